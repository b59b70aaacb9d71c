#pragma once

// Command-line front end. Exit status: 0 success, 1 infeasible or rejected,
// 2 usage or input errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tsn/admission.hpp"
#include "tsn/edf.hpp"
#include "tsn/latin.hpp"
#include "tsn/report.hpp"
#include "tsn/scenario.hpp"
#include "tsn/switchsim.hpp"

namespace tsn {

enum ExitCode : int { kExitOk = 0, kExitInfeasible = 1, kExitUsage = 2 };

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

inline TrafficSpec spec_of(const Scenario& sc) {
  TrafficSpec spec(sc.n);
  for (const auto& f : sc.ts_flows) spec.set_flow(f.input, f.output, {f.offset, f.period});
  return spec;
}

inline TVector parse_tvector_arg(const std::string& s) {
  TVector tv;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "inf") {
      tv.t.push_back(Period::infinite());
      continue;
    }
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty() || v < 1)
      throw ValidationError("--tvector: '" + tok + "' is not a positive integer or inf");
    tv.t.push_back(Period::finite(v));
  }
  if (tv.t.empty()) throw ValidationError("--tvector: empty vector");
  return tv;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Input-queued TSN switch: admission checks, schedulers and slot-level simulation",
               "tsnswitch"};
  app.require_subcommand(1);

  std::string file, trace_path, tvector_arg;
  std::size_t n = 0;
  Slot slots = 0;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and print the report as JSON");
  simulate->add_option("FILE", file, "Scenario JSON")->required();
  simulate->add_option("--trace", trace_path, "Write the per-slot trace as CSV");

  auto* sc1 = app.add_subcommand("check-sc1", "Check the period >= N admission condition");
  sc1->add_option("FILE", file, "Scenario JSON")->required();

  auto* sc2 = app.add_subcommand("check-sc2", "Search for a decomposition + T-vector certificate");
  sc2->add_option("FILE", file, "Scenario JSON")->required();

  auto* enumerate = app.add_subcommand("enumerate", "Stream all flow decomposition sets");
  enumerate->add_option("--n", n, "Switch size")->required();

  auto* count = app.add_subcommand("count", "Number of flow decomposition sets");
  count->add_option("--n", n, "Switch size")->required();

  auto* edf = app.add_subcommand("edf-trace", "EDF schedule of the virtual task system");
  edf->add_option("--tvector", tvector_arg, "Comma-separated periods, e.g. 2,4,8,8")->required();
  edf->add_option("--slots", slots, "Number of slots")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) {
      const Scenario scenario = load_scenario_file(file);
      const bool want_trace = !trace_path.empty();
      SimulationReport rep = run(scenario, {want_trace});
      out << report_to_json(rep).dump(2) << '\n';
      if (want_trace) {
        std::ofstream tf(trace_path);
        if (!tf) throw ValidationError(trace_path + ": cannot write trace");
        write_trace_csv(tf, rep.trace);
      } else if (scenario.emit_trace) {
        write_trace_csv(err, rep.trace);
      }
      return rep.rejected.empty() ? kExitOk : kExitInfeasible;
    }
    if (*sc1) {
      const bool holds = check_sc1(spec_of(load_scenario_file(file)));
      out << nlohmann::json{{"condition", "SC1"}, {"holds", holds}}.dump() << '\n';
      return holds ? kExitOk : kExitInfeasible;
    }
    if (*sc2) {
      const auto cert = search_sc2(spec_of(load_scenario_file(file)));
      nlohmann::json doc{{"condition", "SC2"},
                         {"holds", cert.has_value()},
                         {"result", cert ? "FEASIBLE" : "INFEASIBLE"}};
      if (cert) doc["certificate"] = certificate_to_json(*cert);
      out << doc.dump() << '\n';
      return cert ? kExitOk : kExitInfeasible;
    }
    if (*enumerate) {
      LatinSquareEnumerator squares(n);
      while (squares.advance()) out << latin_to_json(squares.current()).dump() << '\n';
      return kExitOk;
    }
    if (*count) {
      out << count_decompositions(n) << '\n';
      return kExitOk;
    }
    if (*edf) {
      const EdfTrace tr = edf_trace(parse_tvector_arg(tvector_arg), slots);
      for (Slot t = 0; t < tr.horizon(); ++t) {
        out << t << ',';
        if (const auto& a = tr.a[static_cast<std::size_t>(t)]) out << *a + 1;
        out << '\n';
      }
      return kExitOk;
    }
  } catch (const InfeasibleUtilization& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tsn
