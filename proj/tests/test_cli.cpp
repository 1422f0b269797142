#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sigra/report.hpp"

using namespace sigra;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

// Runs the CLI with stdout captured to a file.
Result cli(const std::string& args) {
  static int n = 0;
  const auto out = fs::temp_directory_path() / ("sigra_cli_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
  const std::string cmd = std::string(SIGRA_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  fs::remove(out);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / (name + "_" + std::to_string(::getpid()));
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST(Report, HeaderGolden) {
  std::ostringstream os;
  write_csv_header(os);
  EXPECT_EQ(os.str(),
            "protocol,T,M,K,lambda,L,G_target,p_d,p_f,n_frames,replications,goodput_mean,goodput_ci95,"
            "reliability_mean,reliability_ci95,latency_ms_mean,latency_ms_ci95,messages_mean,messages_ci95,"
            "false_positives_total,collisions_total\n");
}

TEST(Report, ParseAndExpand) {
  std::istringstream in(
      "# sweep\n"
      "T = 2000\n"
      "lambda=0.5, 1,2   # three loads\n"
      "protocol=signature,lte_full\n"
      "\n"
      "seed=9\n"
      "replications=4\n");
  ScenarioSpec spec;
  parse_scenario(in, spec);
  EXPECT_EQ(spec.base.T, 2000u);
  EXPECT_EQ(spec.base.seed, 9u);
  EXPECT_EQ(spec.replications, 4u);
  const auto cfgs = spec.expand();
  ASSERT_EQ(cfgs.size(), 6u);
  EXPECT_EQ(cfgs[0].protocol, Protocol::signature);
  EXPECT_EQ(cfgs[2].lambda, 2.0);
  EXPECT_EQ(cfgs[3].protocol, Protocol::lte_full);
  EXPECT_EQ(cfgs[3].lambda, 0.5);
}

TEST(Report, ParseErrorsCarryLineNumbers) {
  const auto fails = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    ScenarioSpec spec;
    try {
      parse_scenario(in, spec, "x.cfg");
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
      return;
    }
    ADD_FAILURE() << "no error for: " << text;
  };
  fails("T=10\nbogus=1\n", "x.cfg:2");
  fails("\n\nM=abc\n", "x.cfg:3");
  fails("K=4\nprotocol=gsm\n", "x.cfg:2");
  fails("lambda\n", "x.cfg:1");
  fails("p_d=0.9x\n", "bad value");
}

TEST(Report, RowFormatting) {
  SweepResult r;
  r.config.lambda = 0.5;
  r.replications = 1;
  AccessMetrics m;
  m.goodput = 0.98;
  m.L = 13;
  const std::vector<AccessMetrics> runs{m};
  r.aggregate = aggregate(runs);
  std::ostringstream os;
  write_csv_row(os, r);
  EXPECT_EQ(os.str(),
            "signature,5000,54,4,0.5,13,0.99,0.99,0.001,500,1,0.980000,NA,1.000000,NA,0.000000,NA,0.000000,NA,0,0\n");
}

TEST(Cli, DesignDefaults) {
  const auto r = cli("design");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("L = 13\n"), std::string::npos) << r.out;
}

TEST(Cli, DesignAttacker) {
  const auto r = cli("design --attacker-N 2 --K 4");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("= 70\n"), std::string::npos) << r.out;
  const auto j = cli("design --attacker-N 2 --json");
  EXPECT_NE(j.out.find("\"attacker_candidates\": \"70\""), std::string::npos) << j.out;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("design --T 10 --lambda 10").code, 3);
  EXPECT_EQ(cli("design --lambda -1").code, 2);
  EXPECT_EQ(cli("simulate --set nope=1").code, 2);
  EXPECT_EQ(cli("simulate --config /nonexistent/file.cfg").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  const auto r = cli("simulate --set T=10 --set lambda=10 --set n_frames=5");
  EXPECT_EQ(r.code, 3);
  // the failing point is still listed
  EXPECT_NE(r.out.find("signature,10,54,4,10,NA"), std::string::npos) << r.out;
}

TEST(Cli, EmptyRunIsHeaderOnly) {
  const auto r = cli("simulate --set n_frames=0 --set protocol=signature,lte_full");
  EXPECT_EQ(r.code, 0);
  std::ostringstream header;
  write_csv_header(header);
  EXPECT_EQ(r.out, header.str());
}

TEST(Cli, SweepOneRowPerPoint) {
  const auto cfg = write_temp("sweep.cfg",
                              "T=1000\nn_frames=40\nlambda=0.5,1\nprotocol=signature,lte_full,lte_mtc\n"
                              "replications=2\n");
  const auto r = cli("sweep --config " + cfg + " -j 2");
  fs::remove(cfg);
  EXPECT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[1].rfind("signature,1000,54,4,0.5,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("signature,1000,54,4,1,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("lte_full,1000,54,4,0.5,NA,", 0), 0u);
  EXPECT_EQ(rows[6].rfind("lte_mtc,1000,54,4,1,NA,", 0), 0u);
}

TEST(Cli, ByteIdenticalRepeats) {
  const std::string args = "simulate --set T=1000 --set n_frames=30 --set lambda=1,2 "
                           "--set protocol=signature,lte_full -r 3";
  const auto a = cli(args + " -j 1");
  const auto b = cli(args + " -j 3");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(cli(args).out, a.out);
  EXPECT_NE(cli(args + " --set seed=2").out, a.out);
}

TEST(Cli, DecodeDemo) {
  const auto a = cli("decode-demo");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out,
            "rao_index,event,device_id\n"
            "1,eliminated,2\n"
            "2,eliminated,4\n"
            "2,decoded_active,3\n"
            "2,stop_feedback_sent,3\n"
            "3,decoded_active,1\n"
            "3,stop_feedback_sent,1\n"
            "# decoded=2 eliminated=2 false_positives=0 raos_used=3 of 4\n");
  EXPECT_EQ(cli("decode-demo").out, a.out);
}
