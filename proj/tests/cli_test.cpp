#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsn/cli.hpp"

using namespace tsn;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tsnswitch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scenario_path(const std::string& name) {
  return std::string(TSN_SCENARIO_DIR) + "/" + name;
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(CliTest, Count) {
  auto r = cli({"count", "--n", "6"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "1128960\n");
  EXPECT_EQ(cli({"count", "--n", "7"}).out, "12198297600\n");
  EXPECT_EQ(cli({"count", "--n", "9"}).code, kExitUsage);
}

TEST(CliTest, Enumerate) {
  auto r = cli({"enumerate", "--n", "4"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(line_count(r.out), 24u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "[[1,2,3,4],[2,1,4,3],[3,4,1,2],[4,3,2,1]]");
  EXPECT_EQ(cli({"enumerate", "--n", "7"}).code, kExitUsage);
}

TEST(CliTest, CheckSc1) {
  auto r = cli({"check-sc1", scenario_path("example1.json")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(r.out)["holds"], true);
  EXPECT_EQ(cli({"check-sc1", scenario_path("example2.json")}).code, kExitInfeasible);
}

TEST(CliTest, CheckSc2) {
  auto r = cli({"check-sc2", scenario_path("example1.json")});
  EXPECT_EQ(r.code, kExitInfeasible);
  EXPECT_EQ(nlohmann::json::parse(r.out)["result"], "INFEASIBLE");

  auto f = cli({"check-sc2", scenario_path("example2.json")});
  EXPECT_EQ(f.code, kExitOk);
  const auto doc = nlohmann::json::parse(f.out);
  EXPECT_EQ(doc["result"], "FEASIBLE");
  EXPECT_EQ(doc["certificate"]["tvector"], nlohmann::json::parse("[2,4,8,8]"));
  EXPECT_EQ(doc["certificate"]["latin_square"],
            nlohmann::json::parse("[[1,2,3,4],[4,1,2,3],[3,4,1,2],[2,3,4,1]]"));
}

TEST(CliTest, EdfTrace) {
  auto r = cli({"edf-trace", "--tvector", "2,4,8,8", "--slots", "8"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "0,1\n1,2\n2,1\n3,3\n4,1\n5,2\n6,1\n7,4\n");
  auto idle = cli({"edf-trace", "--tvector", "3,6,6,inf", "--slots", "6"});
  EXPECT_EQ(idle.out, "0,1\n1,2\n2,3\n3,1\n4,\n5,\n");
  EXPECT_EQ(cli({"edf-trace", "--tvector", "2,2,4", "--slots", "4"}).code, kExitInfeasible);
  EXPECT_EQ(cli({"edf-trace", "--tvector", "2,x", "--slots", "4"}).code, kExitUsage);
}

TEST(CliTest, SimulateWithTrace) {
  const std::string trace = testing::TempDir() + "tsn_trace.csv";
  auto r = cli({"simulate", scenario_path("mixed.json"), "--trace", trace});
  EXPECT_EQ(r.code, kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["mode"], "MEDF");
  EXPECT_EQ(doc["ts_expired_total"], 0);
  EXPECT_EQ(doc["be"]["delivered"], 4);
  std::ifstream in(trace);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(line_count(buf.str()), 61u);
  std::remove(trace.c_str());
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"count"}).code, kExitUsage);
  auto missing = cli({"simulate", "/nonexistent/x.json"});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_NE(missing.err.find("cannot open"), std::string::npos);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(CliTest, RejectedFlowsGiveExitOne) {
  const std::string path = testing::TempDir() + "tsn_reject.json";
  {
    std::ofstream f(path);
    f << R"({"n": 2, "sim_slots": 10, "ts_flows": [
      {"input": 1, "output": 1, "offset": 0, "period": 1},
      {"input": 1, "output": 2, "offset": 0, "period": 1}]})";
  }
  auto r = cli({"simulate", path});
  EXPECT_EQ(r.code, kExitInfeasible);
  EXPECT_EQ(nlohmann::json::parse(r.out)["rejected"].size(), 1u);
  std::remove(path.c_str());
}
