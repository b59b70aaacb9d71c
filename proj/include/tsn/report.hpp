#pragma once

// JSON and CSV emission for reports, admission decisions and traces.

#include <json.hpp>

#include <ostream>
#include <sstream>
#include <string>

#include "tsn/scenario.hpp"
#include "tsn/switchsim.hpp"

namespace tsn {

inline nlohmann::json certificate_to_json(const Sc2Certificate& c) {
  return {{"latin_square", latin_to_json(decomposition_to_latin(c.decomposition))},
          {"tvector", tvector_to_json(c.tvector)},
          {"utilization", {{"num", utilization(c.tvector).numerator()},
                           {"den", utilization(c.tvector).denominator()}}}};
}

inline nlohmann::json flow_to_json(const FlowRequest& f) {
  return {{"input", f.input + 1}, {"output", f.output + 1}, {"offset", f.offset},
          {"period", f.period}};
}

inline nlohmann::json report_to_json(const SimulationReport& r) {
  using nlohmann::json;
  json doc;
  doc["n"] = r.n;
  doc["slots"] = r.slots;
  doc["mode"] = mode_name(r.mode);
  if (auto* m = std::get_if<MedfMode>(&r.mode)) {
    doc["certificate"] = certificate_to_json(m->certificate);
  } else {
    doc["decomposition"] =
        latin_to_json(decomposition_to_latin(std::get<MtdmaMode>(r.mode).decomposition));
  }
  json adm = json::array(), rej = json::array();
  for (const auto& f : r.admitted) adm.push_back(flow_to_json(f));
  for (const auto& f : r.rejected) rej.push_back(flow_to_json(f));
  doc["admitted"] = adm;
  doc["rejected"] = rej;

  json flows = json::array();
  for (const auto& f : r.per_flow) {
    const auto& c = f.counters;
    flows.push_back({{"input", f.flow.input + 1},
                     {"output", f.flow.output + 1},
                     {"arrivals", c.arrivals},
                     {"delivered", c.delivered},
                     {"expired", c.expired},
                     {"live_at_end", f.live_at_end},
                     {"max_delay", c.max_delay},
                     {"mean_delay", c.mean_delay()}});
  }
  doc["per_flow"] = flows;
  doc["ts_expired_total"] = r.ts_expired_total();

  json hist = json::object();
  for (auto [d, count] : r.ts_delay_histogram) hist[std::to_string(d)] = count;
  doc["ts_delay_histogram"] = hist;

  json voqs = json::array();
  for (const auto& q : r.voqs)
    voqs.push_back({{"input", q.input + 1},
                    {"output", q.output + 1},
                    {"arrivals", q.counters.arrivals},
                    {"delivered", q.counters.delivered},
                    {"drops", q.counters.drops},
                    {"backlog", q.backlog_at_end}});
  doc["be"] = {{"arrivals", r.be_arrivals},
               {"delivered", r.be_delivered},
               {"drops", r.be_drops},
               {"mean_backlog", r.be_mean_backlog},
               {"voqs", voqs}};
  return doc;
}

namespace detail {

inline std::string pairs_field(const std::vector<std::pair<Port, Port>>& ps) {
  std::string s;
  for (auto [i, j] : ps) {
    if (!s.empty()) s += ';';
    s += std::to_string(i + 1) + "-" + std::to_string(j + 1);
  }
  return s;
}

}  // namespace detail

inline constexpr const char* kTraceHeader = "slot,mode,step1,ts_pairs,be_pairs,be_transfers,expired";

inline std::string trace_row(const SlotRecord& r) {
  std::vector<std::pair<Port, Port>> be_moved, expired;
  for (const auto& b : r.be_sent) be_moved.emplace_back(b.input, b.output);
  for (const auto& e : r.expired) expired.emplace_back(e.input, e.output);
  std::ostringstream os;
  os << r.slot << ',' << (r.medf ? "MEDF" : "MTDMA") << ','
     << (r.step1_label ? "M" + std::to_string(*r.step1_label + 1) : std::string("none")) << ','
     << detail::pairs_field(r.ts_pairs.pairs()) << ',' << detail::pairs_field(r.be_pairs.pairs())
     << ',' << detail::pairs_field(be_moved) << ',' << detail::pairs_field(expired);
  return os.str();
}

inline void write_trace_csv(std::ostream& os, const std::vector<SlotRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) os << trace_row(r) << '\n';
}

}  // namespace tsn
