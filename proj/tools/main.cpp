// mhcl-sim: scenario runner.
//
//   mhcl-sim run      --topology grid --n 25 --mode aggregate --seed 7
//   mhcl-sim sweep    --config scenarios/full_matrix.scenario --out results.csv
//   mhcl-sim plan     --topology grid --n 9 --mode greedy
//   mhcl-sim validate --config scenarios/full_matrix.scenario

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "mhcl/error.hpp"
#include "mhcl/oracle.hpp"
#include "mhcl/simulator.hpp"
#include "mhcl/sweep.hpp"
#include "scenario.hpp"

namespace {

using namespace mhcl;
using namespace mhcl::cli;

enum Exit : int {
  kOk = 0,
  kInvariantFailure = 1,
  kConfigError = 2,
  kSimulationError = 3,
  kIoError = 4,
};

struct Options {
  std::string config;
  std::string topology;
  std::string topology_file;
  unsigned n = 0;
  std::string mode;
  std::string failure;
  double rate = 0.1;
  double reserve = -1.0;
  std::uint64_t seed = 0;
  std::string seeds;
  std::string out;
  std::string trace;
  unsigned addr_width = 0;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "scenario file");
  cmd->add_option("--topology", o.topology, "grid, uniform or file");
  cmd->add_option("--topology-file", o.topology_file, "node list for --topology file");
  cmd->add_option("--n", o.n, "number of nodes");
  cmd->add_option("--mode", o.mode, "greedy, aggregate or baseline");
  cmd->add_option("--failure", o.failure, "none, tx or rx");
  cmd->add_option("--rate", o.rate, "failure rate in [0, 1]")->capture_default_str();
  cmd->add_option("--reserve", o.reserve, "reserve pool in percent (default 6.25)");
  cmd->add_option("--seed", o.seed, "single seed");
  cmd->add_option("--seeds", o.seeds, "N (1..N), A-B or a comma list");
  cmd->add_option("--addr-width", o.addr_width, "host address width in bits (1-16)");
}

/// Scenario from --config, then individual flags on top.
Scenario build_scenario(const CLI::App* cmd, const Options& o) {
  Scenario sc = o.config.empty() ? Scenario{} : load_scenario(o.config);
  if (cmd->count("--topology")) sc.topologies = {parse_topology_kind(o.topology)};
  if (cmd->count("--topology-file")) sc.topology_file = o.topology_file;
  if (cmd->count("--n")) sc.sizes = {o.n};
  if (cmd->count("--mode")) sc.modes = {parse_mode(o.mode)};
  if (cmd->count("--failure")) {
    FailureModel f{parse_failure_kind(o.failure), o.rate};
    if (f.kind == FailureKind::None) f.rate = 0.0;
    f.validate();
    sc.failures = {f};
  } else if (cmd->count("--rate")) {
    throw Error(ErrorCode::ConfigError, "--rate needs --failure tx|rx");
  }
  if (cmd->count("--reserve")) sc.base.reserve = ReserveFraction::from_percent(o.reserve);
  if (cmd->count("--addr-width")) sc.base.address_width = o.addr_width;
  if (cmd->count("--seeds")) {
    sc.seeds = parse_seed_list(o.seeds);
  } else if (cmd->count("--seed")) {
    sc.seeds = {o.seed};
  } else if (const char* env = std::getenv("MHCL_SEED")) {
    const std::string text(env);
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::ConfigError, "MHCL_SEED must be a non-negative integer");
    }
    sc.seeds = {std::stoull(text)};
  }
  if (o.threads > 0) sc.threads = o.threads;
  try {
    sc.base.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return sc;
}

void print_run(std::ostream& os, const SweepCase& c, std::uint64_t seed, const Metrics& m) {
  auto line = [&](const char* key, const std::string& value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-22s", key);
    os << buf << value << '\n';
  };
  auto fixed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  line("scenario", c.scenario_id);
  line("seed", std::to_string(seed));
  line("nodes", std::to_string(m.n));
  line("dag_depth", std::to_string(m.dag_depth));
  line("setup_ms", fixed(static_cast<double>(m.setup_time.count()) / 1000.0));
  line("dio_count", std::to_string(m.dio_count));
  line("dao_count", std::to_string(m.dao_count));
  line("retransmissions", std::to_string(m.control_retransmissions));
  line("allocation_failures", std::to_string(m.allocation_failures));
  line("addr_rate", fixed(m.addressing_rate));
  line("up_rate", fixed(m.up_rate));
  line("down_rate", fixed(m.down_rate));
  line("timed_out", m.timed_out ? "yes" : "no");
  if (m.stalled) line("stalled", "yes");
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  body(out);
  out.flush();
  if (!out) throw IoError("error writing " + path);
}

int cmd_run(const CLI::App* cmd, const Options& o) {
  const auto sc = build_scenario(cmd, o);
  const auto cases = sc.cases();
  if (cases.size() != 1 || sc.seeds.size() != 1) {
    throw Error(ErrorCode::ConfigError, "run needs exactly one scenario and one seed; use sweep");
  }
  const auto& c = cases.front();
  const auto seed = sc.seeds.front();
  auto config = c.config;
  config.topology = c.topology.build(seed);
  config.seed = seed;
  config.record_trace = !o.trace.empty();
  const auto metrics = run(config);

  print_run(std::cout, c, seed, metrics);
  if (!o.trace.empty()) write_file(o.trace, [&](std::ostream& os) { write_trace(os, metrics.trace); });
  if (!o.out.empty()) {
    write_file(o.out, [&](std::ostream& os) { write_csv(os, {row_of(c, seed, metrics)}); });
  }
  return metrics.stalled ? kInvariantFailure : kOk;
}

void print_summary(std::ostream& os, const std::vector<SweepRow>& rows) {
  std::map<std::string, const SweepRow*> ci;
  for (const auto& r : rows) {
    if (r.seed == "ci95") ci[r.scenario_id] = &r;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-40s %6s %20s %10s %10s %8s %8s\n", "scenario", "depth", "setup_ms",
                "dio", "dao", "addr", "down");
  os << buf;
  for (const auto& r : rows) {
    if (r.seed != "mean") continue;
    const auto* h = ci[r.scenario_id];
    std::snprintf(buf, sizeof buf, "%-40s %6.1f %11.1f +- %6.1f %10.1f %10.1f %8.4f %8.4f\n", r.scenario_id.c_str(),
                  r.dag_depth, r.setup_ms, h ? h->setup_ms : 0.0, r.dio_count, r.dao_count, r.addr_rate,
                  r.down_rate);
    os << buf;
  }
}

int cmd_sweep(const CLI::App* cmd, const Options& o) {
  const auto sc = build_scenario(cmd, o);
  const auto rows = sweep(sc.cases(), sc.seeds, std::max(1u, sc.threads));
  if (o.out.empty()) {
    write_csv(std::cout, rows);
    print_summary(std::cerr, rows);
  } else {
    write_file(o.out, [&](std::ostream& os) { write_csv(os, rows); });
    print_summary(std::cout, rows);
  }
  return kOk;
}

int cmd_plan(const CLI::App* cmd, const Options& o) {
  const auto sc = build_scenario(cmd, o);
  const auto cases = sc.cases();
  if (cases.size() != 1) throw Error(ErrorCode::ConfigError, "plan needs exactly one topology and mode");
  const auto& c = cases.front();
  if (c.config.mode == SimMode::BaselineStoring) {
    throw Error(ErrorCode::ConfigError, "plan needs mode greedy or aggregate");
  }
  const auto topology = c.topology.build(sc.seeds.front());
  const auto parents = oracle::bfs_parent_map(topology);
  const auto mode = c.config.mode == SimMode::Aggregate ? Mode::Aggregate : Mode::Greedy;
  const auto plan = oracle::oracle_plan(parents, topology.root(), AddressRange::full(c.config.address_width),
                                        mode, c.config.reserve);
  for (const auto& [node, entry] : plan) {
    char buf[128];
    const auto p = parents.find(node);
    std::snprintf(buf, sizeof buf, "%5u  own %5u  range %-16s parent %s\n", node, entry.own,
                  entry.range.to_string().c_str(), p == parents.end() ? "-" : std::to_string(p->second).c_str());
    std::cout << buf;
  }
  return kOk;
}

int cmd_validate(const CLI::App* cmd, const Options& o) {
  const auto sc = build_scenario(cmd, o);
  int status = kOk;
  for (const auto& c : sc.cases()) {
    for (auto seed : sc.seeds) {
      auto config = c.config;
      config.topology = c.topology.build(seed);
      config.seed = seed;
      const auto metrics = run(config);
      const auto problems = oracle::validate_run(config, metrics);
      std::cout << (problems.empty() ? "ok   " : "FAIL ") << c.scenario_id << " seed " << seed << '\n';
      for (const auto& p : problems) std::cout << "     " << p << '\n';
      if (!problems.empty()) status = kInvariantFailure;
    }
  }
  return status;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotASquare:
    case ErrorCode::TopologyFormat:
      return kConfigError;
    default:
      return kSimulationError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MHCL host-configuration simulator"};
  app.require_subcommand(1);
  Options o;

  auto* run_cmd = app.add_subcommand("run", "single scenario: summary, optional trace");
  add_common(run_cmd, o);
  run_cmd->add_option("--trace", o.trace, "packet trace output file");
  run_cmd->add_option("--out", o.out, "CSV row output file");

  auto* sweep_cmd = app.add_subcommand("sweep", "scenario grid over seeds: CSV");
  add_common(sweep_cmd, o);
  sweep_cmd->add_option("--out", o.out, "CSV output file (default stdout)");
  sweep_cmd->add_option("--threads", o.threads, "parallel runs");

  auto* plan_cmd = app.add_subcommand("plan", "reference address plan of a topology");
  add_common(plan_cmd, o);

  auto* validate_cmd = app.add_subcommand("validate", "run and check invariants");
  add_common(validate_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run_cmd, o);
    if (*sweep_cmd) return cmd_sweep(sweep_cmd, o);
    if (*plan_cmd) return cmd_plan(plan_cmd, o);
    if (*validate_cmd) return cmd_validate(validate_cmd, o);
  } catch (const IoError& e) {
    std::cerr << "mhcl-sim: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    std::cerr << "mhcl-sim: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kOk;
}
