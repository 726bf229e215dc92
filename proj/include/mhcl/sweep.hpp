#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mhcl/simulator.hpp"
#include "mhcl/topology.hpp"

namespace mhcl {

enum class TopologyKind : std::uint8_t { Grid, Uniform, File };

std::string_view to_string(TopologyKind kind);

/// How to build the topology of one run. Uniform placements are redrawn
/// per seed; grid and file topologies are fixed.
struct TopologySpec {
  TopologyKind kind = TopologyKind::Grid;
  unsigned n = 9;
  std::optional<Topology> fixed;  // File only

  Topology build(std::uint64_t seed) const;
  unsigned size() const { return fixed ? static_cast<unsigned>(fixed->size()) : n; }
};

struct SweepCase {
  std::string scenario_id;
  TopologySpec topology;
  SimConfig config;  // topology and seed are overwritten per run
};

/// One CSV line. Per-run rows carry the seed; summary rows carry "mean" or
/// "ci95" (95% Student-t half-width) in the seed column.
struct SweepRow {
  std::string scenario_id;
  std::string seed;
  SimMode mode = SimMode::Greedy;
  TopologyKind topology = TopologyKind::Grid;
  unsigned n = 0;
  double dag_depth = 0;
  double setup_ms = 0;
  double dio_count = 0;
  double dao_count = 0;
  double addr_rate = 0;
  double up_rate = 0;
  double down_rate = 0;
  /// "0"/"1" for runs, the timed-out fraction for summaries, "error:<code>"
  /// for runs that threw.
  std::string timed_out;
  bool summary = false;
};

inline constexpr const char* kCsvHeader =
    "scenario_id,seed,mode,topology,n,dag_depth,setup_ms,dio_count,dao_count,addr_rate,up_rate,"
    "down_rate,timed_out";

/// Student-t 95% half-width of the mean; 0 for fewer than two samples.
double ci95_half_width(const std::vector<double>& samples);

SweepRow row_of(const SweepCase& sweep_case, std::uint64_t seed, const Metrics& metrics);

/// Runs every case over every seed (in parallel when threads > 1) and
/// returns rows grouped by case in input order, seeds ascending, each group
/// followed by its mean and ci95 rows. Runs that throw become error rows and
/// are left out of the summaries.
std::vector<SweepRow> sweep(const std::vector<SweepCase>& cases, const std::vector<std::uint64_t>& seeds,
                            unsigned threads = 1);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace mhcl
