#pragma once

// Scenario files: JSON, 1-based ports, flow-list style (absent flows are
// simply not listed). parse_scenario validates everything and reports the
// offending field path.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tsn/core.hpp"
#include "tsn/edf.hpp"
#include "tsn/latin.hpp"

namespace tsn {

class ScenarioError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

enum class ScenarioMode { Auto, ForceMtdma, ForceMedf };

inline const char* to_string(ScenarioMode m) {
  switch (m) {
    case ScenarioMode::Auto: return "AUTO";
    case ScenarioMode::ForceMtdma: return "FORCE_MTDMA";
    case ScenarioMode::ForceMedf: return "FORCE_MEDF";
  }
  return "?";
}

struct TsFlowEntry {
  Port input = 0;
  Port output = 0;
  std::int64_t offset = 0;
  std::int64_t period = 1;
  Slot subscribe_slot = 0;  // > 0 replays a mid-run subscription
  friend bool operator==(const TsFlowEntry&, const TsFlowEntry&) = default;
};

struct BeArrival {
  Slot slot = 0;
  Port input = 0;
  Port output = 0;
  friend bool operator==(const BeArrival&, const BeArrival&) = default;
};

struct ExplicitBeTraffic {
  std::vector<BeArrival> arrivals;
  friend bool operator==(const ExplicitBeTraffic&, const ExplicitBeTraffic&) = default;
};

struct BernoulliBeTraffic {
  // Either one rate shared by every VOQ or an n x n matrix of rates.
  std::variant<double, std::vector<std::vector<double>>> rate = 0.0;
  std::uint64_t seed = 0;

  double rate_of(Port i, Port j) const {
    if (auto* r = std::get_if<double>(&rate)) return *r;
    return std::get<std::vector<std::vector<double>>>(rate)[i][j];
  }
  friend bool operator==(const BernoulliBeTraffic&, const BernoulliBeTraffic&) = default;
};

using BeTraffic = std::variant<std::monostate, ExplicitBeTraffic, BernoulliBeTraffic>;

struct Scenario {
  std::size_t n = 2;
  std::vector<TsFlowEntry> ts_flows;
  BeTraffic be_traffic;
  std::size_t voq_capacity = 64;
  std::optional<Slot> sim_slots;  // nullopt = auto
  ScenarioMode mode = ScenarioMode::Auto;
  std::optional<LatinSquare> decomposition_override;
  std::optional<TVector> tvector_override;
  std::optional<std::size_t> islip_iterations;  // nullopt = n
  bool emit_trace = false;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// max offset + 10 x lcm of all TS periods.
inline Slot auto_horizon(const Scenario& sc) {
  std::int64_t h = 1, max_off = 0;
  for (const auto& f : sc.ts_flows) {
    h = std::lcm(h, f.period);
    max_off = std::max(max_off, f.offset);
  }
  return max_off + 10 * h;
}

inline Slot horizon_of(const Scenario& sc) { return sc.sim_slots ? *sc.sim_slots : auto_horizon(sc); }

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(path + "." + key + ": missing required field");
  return *it;
}

inline std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ScenarioError(path + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::int64_t as_int_at_least(const json& v, const std::string& path, std::int64_t lo) {
  const auto x = as_int(v, path);
  if (x < lo) throw ScenarioError(path + ": must be >= " + std::to_string(lo));
  return x;
}

inline Port as_port(const json& v, const std::string& path, std::size_t n) {
  const auto x = as_int(v, path);
  if (x < 1 || x > static_cast<std::int64_t>(n))
    throw ScenarioError(path + ": port " + std::to_string(x) + " outside [1," +
                        std::to_string(n) + "]");
  return static_cast<Port>(x - 1);
}

inline double as_rate(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path + ": expected a number");
  const double r = v.get<double>();
  if (!(r >= 0.0 && r <= 1.0)) throw ScenarioError(path + ": rate must lie in [0,1]");
  return r;
}

inline Period as_period(const json& v, const std::string& path) {
  if (v.is_string() && v.get<std::string>() == "inf") return Period::infinite();
  return Period::finite(as_int_at_least(v, path, 1));
}

inline json period_json(const Period& p) {
  return p.is_finite() ? json(p.value()) : json("inf");
}

}  // namespace detail

inline nlohmann::json latin_to_json(const LatinSquare& l) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : l.rows()) {
    nlohmann::json row = nlohmann::json::array();
    for (auto s : r) row.push_back(s + 1);
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json tvector_to_json(const TVector& tv) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : tv.t) a.push_back(detail::period_json(p));
  return a;
}

inline LatinSquare latin_from_json(const nlohmann::json& v, const std::string& path,
                                   std::size_t n) {
  if (!v.is_array() || v.size() != n)
    throw ScenarioError(path + ": expected " + std::to_string(n) + " rows");
  std::vector<std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != n)
      throw ScenarioError(rp + ": expected " + std::to_string(n) + " symbols");
    std::vector<std::size_t> row;
    for (std::size_t j = 0; j < n; ++j)
      row.push_back(detail::as_port(v[i][j], rp + "[" + std::to_string(j) + "]", n));
    rows.push_back(std::move(row));
  }
  try {
    return LatinSquare::from_rows(rows);
  } catch (const ValidationError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

inline TVector tvector_from_json(const nlohmann::json& v, const std::string& path,
                                 std::size_t n) {
  if (!v.is_array() || v.size() != n)
    throw ScenarioError(path + ": expected " + std::to_string(n) + " periods");
  TVector tv;
  for (std::size_t k = 0; k < n; ++k)
    tv.t.push_back(detail::as_period(v[k], path + "[" + std::to_string(k) + "]"));
  return tv;
}

inline Scenario parse_scenario_json(const nlohmann::json& doc) {
  using detail::json;
  if (!doc.is_object()) throw ScenarioError("$: scenario must be a JSON object");
  static const std::set<std::string> known = {
      "n",    "ts_flows",  "be_traffic",         "voq_capacity",    "sim_slots",       "mode",
      "decomposition_override", "tvector_override", "islip_iterations", "emit_trace"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ScenarioError("$." + it.key() + ": unknown field");

  Scenario sc;
  const auto n = detail::as_int_at_least(detail::require(doc, "n", "$"), "$.n", 2);
  sc.n = static_cast<std::size_t>(n);

  if (auto it = doc.find("ts_flows"); it != doc.end()) {
    if (!it->is_array()) throw ScenarioError("$.ts_flows: expected an array");
    std::set<std::pair<Port, Port>> seen;
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string p = "$.ts_flows[" + std::to_string(k) + "]";
      const json& f = (*it)[k];
      if (!f.is_object()) throw ScenarioError(p + ": expected an object");
      TsFlowEntry e;
      e.input = detail::as_port(detail::require(f, "input", p), p + ".input", sc.n);
      e.output = detail::as_port(detail::require(f, "output", p), p + ".output", sc.n);
      e.offset = detail::as_int_at_least(detail::require(f, "offset", p), p + ".offset", 0);
      e.period = detail::as_int_at_least(detail::require(f, "period", p), p + ".period", 1);
      if (auto s = f.find("subscribe_slot"); s != f.end())
        e.subscribe_slot = detail::as_int_at_least(*s, p + ".subscribe_slot", 0);
      if (!seen.emplace(e.input, e.output).second)
        throw ScenarioError(p + ": duplicate flow (" + std::to_string(e.input + 1) + "," +
                            std::to_string(e.output + 1) + ")");
      sc.ts_flows.push_back(e);
    }
  }

  if (auto it = doc.find("be_traffic"); it != doc.end() && !it->is_null()) {
    const std::string p = "$.be_traffic";
    if (!it->is_object() || it->size() != 1)
      throw ScenarioError(p + ": expected exactly one of {explicit, bernoulli}");
    if (auto ex = it->find("explicit"); ex != it->end()) {
      if (!ex->is_array()) throw ScenarioError(p + ".explicit: expected an array");
      ExplicitBeTraffic t;
      for (std::size_t k = 0; k < ex->size(); ++k) {
        const std::string q = p + ".explicit[" + std::to_string(k) + "]";
        const json& a = (*ex)[k];
        if (!a.is_object()) throw ScenarioError(q + ": expected an object");
        t.arrivals.push_back(
            {detail::as_int_at_least(detail::require(a, "slot", q), q + ".slot", 0),
             detail::as_port(detail::require(a, "input", q), q + ".input", sc.n),
             detail::as_port(detail::require(a, "output", q), q + ".output", sc.n)});
      }
      sc.be_traffic = std::move(t);
    } else if (auto b = it->find("bernoulli"); b != it->end()) {
      const std::string q = p + ".bernoulli";
      if (!b->is_object()) throw ScenarioError(q + ": expected an object");
      BernoulliBeTraffic t;
      const json& rate = detail::require(*b, "rate", q);
      if (rate.is_array()) {
        if (rate.size() != sc.n) throw ScenarioError(q + ".rate: expected n rows");
        std::vector<std::vector<double>> m(sc.n);
        for (std::size_t i = 0; i < sc.n; ++i) {
          const std::string rp = q + ".rate[" + std::to_string(i) + "]";
          if (!rate[i].is_array() || rate[i].size() != sc.n)
            throw ScenarioError(rp + ": expected n rates");
          for (std::size_t j = 0; j < sc.n; ++j)
            m[i].push_back(detail::as_rate(rate[i][j], rp + "[" + std::to_string(j) + "]"));
        }
        t.rate = std::move(m);
      } else {
        t.rate = detail::as_rate(rate, q + ".rate");
      }
      const auto seed = detail::as_int_at_least(detail::require(*b, "seed", q), q + ".seed", 0);
      t.seed = static_cast<std::uint64_t>(seed);
      sc.be_traffic = std::move(t);
    } else {
      throw ScenarioError(p + ": expected exactly one of {explicit, bernoulli}");
    }
  }

  if (auto it = doc.find("voq_capacity"); it != doc.end())
    sc.voq_capacity = static_cast<std::size_t>(detail::as_int_at_least(*it, "$.voq_capacity", 1));

  if (auto it = doc.find("sim_slots"); it != doc.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "auto")
        throw ScenarioError("$.sim_slots: expected a positive integer or \"auto\"");
    } else {
      sc.sim_slots = detail::as_int_at_least(*it, "$.sim_slots", 1);
    }
  }

  if (auto it = doc.find("mode"); it != doc.end()) {
    const std::string m = it->is_string() ? it->get<std::string>() : "";
    if (m == "AUTO") sc.mode = ScenarioMode::Auto;
    else if (m == "FORCE_MTDMA") sc.mode = ScenarioMode::ForceMtdma;
    else if (m == "FORCE_MEDF") sc.mode = ScenarioMode::ForceMedf;
    else throw ScenarioError("$.mode: expected one of AUTO, FORCE_MTDMA, FORCE_MEDF");
  }

  if (auto it = doc.find("decomposition_override"); it != doc.end() && !it->is_null())
    sc.decomposition_override = latin_from_json(*it, "$.decomposition_override", sc.n);
  if (auto it = doc.find("tvector_override"); it != doc.end() && !it->is_null())
    sc.tvector_override = tvector_from_json(*it, "$.tvector_override", sc.n);
  if (sc.tvector_override && !sc.decomposition_override)
    throw ScenarioError("$.tvector_override: requires decomposition_override");

  if (auto it = doc.find("islip_iterations"); it != doc.end())
    sc.islip_iterations =
        static_cast<std::size_t>(detail::as_int_at_least(*it, "$.islip_iterations", 1));

  if (auto it = doc.find("emit_trace"); it != doc.end()) {
    if (!it->is_boolean()) throw ScenarioError("$.emit_trace: expected a boolean");
    sc.emit_trace = it->get<bool>();
  }
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario_json(doc);
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
  using nlohmann::json;
  json doc;
  doc["n"] = sc.n;
  json flows = json::array();
  for (const auto& f : sc.ts_flows) {
    json e = {{"input", f.input + 1}, {"output", f.output + 1}, {"offset", f.offset},
              {"period", f.period}};
    if (f.subscribe_slot != 0) e["subscribe_slot"] = f.subscribe_slot;
    flows.push_back(e);
  }
  doc["ts_flows"] = flows;
  if (auto* ex = std::get_if<ExplicitBeTraffic>(&sc.be_traffic)) {
    json a = json::array();
    for (const auto& x : ex->arrivals)
      a.push_back({{"slot", x.slot}, {"input", x.input + 1}, {"output", x.output + 1}});
    doc["be_traffic"] = {{"explicit", a}};
  } else if (auto* b = std::get_if<BernoulliBeTraffic>(&sc.be_traffic)) {
    json rate = std::holds_alternative<double>(b->rate)
                    ? json(std::get<double>(b->rate))
                    : json(std::get<std::vector<std::vector<double>>>(b->rate));
    doc["be_traffic"] = {{"bernoulli", {{"rate", rate}, {"seed", b->seed}}}};
  }
  doc["voq_capacity"] = sc.voq_capacity;
  doc["sim_slots"] = sc.sim_slots ? json(*sc.sim_slots) : json("auto");
  doc["mode"] = to_string(sc.mode);
  if (sc.decomposition_override) doc["decomposition_override"] = latin_to_json(*sc.decomposition_override);
  if (sc.tvector_override) doc["tvector_override"] = tvector_to_json(*sc.tvector_override);
  if (sc.islip_iterations) doc["islip_iterations"] = *sc.islip_iterations;
  doc["emit_trace"] = sc.emit_trace;
  return doc;
}

}  // namespace tsn
