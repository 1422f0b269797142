// sigra: frame design, simulation sweeps and the decoding walk-through.
//
// exit codes: 0 ok, 2 bad configuration, 3 infeasible design, 4 run failed

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sigra/sigra.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kInfeasible = 3, kRuntime = 4 };

std::string g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct DesignArgs {
  sigra::design::DesignInput in;
  std::uint64_t attacker_N = 0;
  bool json = false;
};

int cmd_design(const DesignArgs& a) {
  using namespace sigra::design;
  const auto out = frame_length(a.in);
  if (a.json) {
    nlohmann::ordered_json j;
    j["L"] = out.L;
    j["L_raw"] = out.L_raw;
    j["clamped"] = out.clamped;
    j["p_i"] = out.p_i;
    j["p_fa"] = out.p_fa;
    j["goodput"] = out.E_G;
    j["p_c1"] = out.collision.p_c1;
    j["p_c2"] = out.collision.p_c2;
    j["p_c"] = out.collision.p_c;
    if (a.attacker_N) {
      j["attacker_N"] = a.attacker_N;
      j["attacker_candidates"] = attacker_candidates(a.attacker_N, a.in.K).str();
      j["replay_probability"] = replay_probability();
    }
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << "L = " << out.L << (out.clamped ? " (clamped)" : "") << '\n'
            << "L_raw = " << g(out.L_raw) << '\n'
            << "p_i = " << g(out.p_i) << '\n'
            << "p_fa = " << g(out.p_fa) << '\n'
            << "goodput = " << g(out.E_G) << '\n'
            << "p_c1 = " << g(out.collision.p_c1) << '\n'
            << "p_c2 = " << g(out.collision.p_c2) << '\n'
            << "p_c = " << g(out.collision.p_c) << '\n';
  if (a.attacker_N) {
    std::cout << "attacker_candidates(N=" << a.attacker_N << ", K=" << a.in.K
              << ") = " << attacker_candidates(a.attacker_N, a.in.K).str() << '\n'
              << "replay_probability = " << g(replay_probability()) << '\n';
  }
  return kOk;
}

struct SimArgs {
  std::string config;
  std::vector<std::string> sets;
  std::uint32_t replications = 0;  // 0: from config
  unsigned workers = 1;
  std::string output;
  std::string trace;
  std::uint32_t min_evidence = 0;
};

int cmd_simulate(const SimArgs& a) {
  sigra::ScenarioSpec spec;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw sigra::ConfigError("cannot open " + a.config);
    sigra::parse_scenario(in, spec, a.config);
  }
  for (const auto& s : a.sets) {
    try {
      sigra::apply_assignment(spec, s);
    } catch (const sigra::ConfigError& e) {
      throw sigra::ConfigError("--set " + s + ": " + e.what());
    }
  }
  if (a.replications) spec.replications = a.replications;
  if (spec.replications < 1) throw sigra::ConfigError("replications must be >= 1");

  auto configs = spec.expand();
  for (const auto& c : configs) c.validate();
  // Nothing to simulate: keep the header, drop the rows.
  if (spec.base.n_frames == 0) configs.clear();

  sigra::SweepOptions opts;
  opts.replications = spec.replications;
  opts.workers = a.workers;
  opts.sim.keep_traces = !a.trace.empty();
  opts.sim.min_evidence = a.min_evidence;
  const auto results = sigra::sweep(configs, opts);

  std::ostringstream csv;
  sigra::write_csv_header(csv);
  int rc = kOk;
  for (const auto& r : results) {
    sigra::write_csv_row(csv, r);
    if (!r.error.empty()) {
      std::cerr << "sigra: " << to_string(r.config.protocol) << " lambda=" << g(r.config.lambda) << ": "
                << r.error << '\n';
      const int code = r.infeasible ? kInfeasible : kRuntime;
      rc = rc == kOk ? code : std::max(rc, code);
    }
  }

  if (a.output.empty() || a.output == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream out(a.output, std::ios::binary);
    if (!(out << csv.str())) {
      std::cerr << "sigra: cannot write " << a.output << '\n';
      return kRuntime;
    }
  }

  if (!a.trace.empty()) {
    std::ofstream t(a.trace, std::ios::binary);
    t << "protocol,lambda,frame,rao_index,event,device_id\n";
    for (const auto& r : results)
      for (const auto& ft : r.traces)
        for (const auto& e : ft.events)
          t << to_string(r.config.protocol) << ',' << g(r.config.lambda) << ',' << ft.frame << ',' << e.rao << ','
            << to_string(e.kind) << ',' << e.device << '\n';
    if (!t) {
      std::cerr << "sigra: cannot write " << a.trace << '\n';
      return kRuntime;
    }
  }
  return rc;
}

int cmd_decode_demo() {
  const auto run = sigra::demo::run_example();
  sigra::write_trace_csv(std::cout, run.trace, true, 1);
  std::uint32_t decoded = 0, eliminated = 0, fp = 0;
  for (const auto& e : run.trace) {
    decoded += e.kind == sigra::DecodeEventKind::decoded_active;
    eliminated += e.kind == sigra::DecodeEventKind::eliminated;
    fp += e.kind == sigra::DecodeEventKind::false_positive_declared;
  }
  std::cout << "# decoded=" << decoded << " eliminated=" << eliminated << " false_positives=" << fp
            << " raos_used=" << run.outcome.raos_used << " of 4\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signature-based random access: design, simulation, decoding demo"};
  app.require_subcommand(1);

  DesignArgs da;
  auto* design = app.add_subcommand("design", "frame length and security figures for a load point");
  design->add_option("--T", da.in.T, "devices")->capture_default_str();
  design->add_option("--lambda", da.in.lambda, "arrivals per RAO")->capture_default_str();
  design->add_option("--K", da.in.K, "preambles per signature")->capture_default_str();
  design->add_option("--M", da.in.M, "preambles per RAO")->capture_default_str();
  design->add_option("--p_d", da.in.p_d, "detection probability")->capture_default_str();
  design->add_option("--p_f", da.in.p_f, "false alarm probability")->capture_default_str();
  design->add_option("--G", da.in.G_target, "goodput target")->capture_default_str();
  design->add_option("--attacker-N", da.attacker_N, "eavesdropped active devices");
  design->add_flag("--json", da.json, "machine-readable output");

  SimArgs sa;
  auto* simulate = app.add_subcommand("simulate", "run scenarios and write CSV");
  simulate->alias("sweep");
  simulate->add_option("-c,--config", sa.config, "key=value scenario file");
  simulate->add_option("--set", sa.sets, "override, key=value (repeatable)");
  simulate->add_option("-r,--replications", sa.replications, "replications per point");
  simulate->add_option("-j,--workers", sa.workers, "worker threads (0: all cores)")->capture_default_str();
  simulate->add_option("-o,--output", sa.output, "CSV file (default stdout)");
  simulate->add_option("--trace", sa.trace, "decode events of replication 0 (signature only)");
  simulate->add_option("--min-evidence", sa.min_evidence, "peeling evidence threshold (0: auto)");

  auto* demo = app.add_subcommand("decode-demo", "walk through iterative decoding on a 4-device example");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (design->parsed()) return cmd_design(da);
    if (simulate->parsed()) return cmd_simulate(sa);
    if (demo->parsed()) return cmd_decode_demo();
  } catch (const sigra::design::InfeasibleDesign& e) {
    std::cerr << "sigra: infeasible design: " << e.what() << '\n';
    return kInfeasible;
  } catch (const sigra::ConfigError& e) {
    std::cerr << "sigra: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sigra: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "sigra: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
