#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhcl/simulator.hpp"
#include "mhcl/sweep.hpp"

namespace mhcl::cli {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment description: shared settings plus sweep axes. Every
/// combination of topology x size x mode x failure is one case, run once per
/// seed.
struct Scenario {
  std::string name = "scenario";
  std::vector<TopologyKind> topologies{TopologyKind::Grid};
  std::vector<unsigned> sizes{9};
  std::optional<std::string> topology_file;
  std::vector<SimMode> modes{SimMode::Greedy};
  std::vector<FailureModel> failures{FailureModel{}};
  std::vector<std::uint64_t> seeds{1};
  unsigned threads = 1;
  SimConfig base;

  /// Cartesian product in file order. File topologies are loaded here.
  std::vector<SweepCase> cases() const;
};

std::string failure_label(const FailureModel& failure);

/// Throws Error(ConfigError) naming `source` and the offending line.
Scenario parse_scenario(std::istream& in, const std::string& source);
/// Throws IoError if the file cannot be read.
Scenario load_scenario(const std::string& path);

/// "7" -> {1..7}; "3-5" -> {3,4,5}; "1,4,9" -> {1,4,9}.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

TopologyKind parse_topology_kind(const std::string& text);
SimMode parse_mode(const std::string& text);
FailureKind parse_failure_kind(const std::string& text);

Topology load_topology_file(const std::string& path);

}  // namespace mhcl::cli
