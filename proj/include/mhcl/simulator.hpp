#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mhcl/address_space.hpp"
#include "mhcl/messages.hpp"
#include "mhcl/node_engine.hpp"
#include "mhcl/topology.hpp"

namespace mhcl {

enum class SimMode : std::uint8_t { Greedy, Aggregate, BaselineStoring };

std::string_view to_string(SimMode mode);

/// Baseline route table behaviour once full.
enum class TablePolicy : std::uint8_t { FifoReject, Lru };

using namespace std::chrono_literals;

struct SimConfig {
  Topology topology = make_grid(9);
  SimMode mode = SimMode::Greedy;
  FailureModel failure{};
  /// Extra Bernoulli loss applied to every unicast as a stand-in for
  /// collisions; behaves like an Rx failure.
  double collision_proxy_rate = 0.0;
  ReserveFraction reserve = ReserveFraction::standard();
  StabilizationParams params{};
  unsigned address_width = 16;
  unsigned dio_retransmissions = 3;
  unsigned dao_retransmissions = 3;

  Duration start_jitter_max = 1000ms;
  Duration link_delay = 5ms;
  Duration link_jitter = 2ms;  // uniform in [-jitter, +jitter]
  Duration app_start = 180s;
  Duration app_spread = 1000ms;  // app sends uniform in [app_start, app_start + spread)
  Duration count_window = 180s;
  Duration horizon = 600s;

  std::size_t baseline_table_capacity = 20;
  TablePolicy baseline_policy = TablePolicy::FifoReject;
  Duration baseline_dao_delay = 1s;
  Duration baseline_dao_period = 60s;

  std::uint64_t seed = 1;
  bool record_trace = false;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

enum class TraceOutcome : std::uint8_t { Delivered, DropTx, DropRx };

std::string_view to_string(TraceOutcome outcome);

struct TraceRecord {
  Duration time;
  NodeId src;
  NodeId dst;
  MessageKind kind;
  TraceOutcome outcome;
  std::vector<std::uint8_t> bytes;
};

/// `time_ms,src,dst,kind,outcome,hex` per line, no header.
void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace);

struct NodeReport {
  NodeId id;
  bool joined = false;  // has a tree parent (always true for the root)
  std::optional<NodeId> parent;
  unsigned depth = 0;  // hops along tree parents; 0 when not joined
  std::optional<HostAddress> own_address;
  std::optional<AddressRange> range;
  std::optional<Duration> addressed_at;
  std::uint32_t subtree_count = 1;  // aggregate: 1 + reported descendant counts
  std::size_t children = 0;
  std::vector<RouteEntry> routes;  // MHCL downward table
  std::size_t baseline_routes = 0;
};

struct AppCounters {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_loss = 0;
  std::uint64_t dropped_noroute = 0;
  std::uint64_t dropped_unaddressed = 0;

  std::uint64_t resolved() const {
    return delivered + dropped_loss + dropped_noroute + dropped_unaddressed;
  }
};

struct Metrics {
  SimMode mode = SimMode::Greedy;
  std::size_t n = 0;
  unsigned dag_depth = 0;
  /// MHCL: time the last node was addressed. Baseline: time the root stored
  /// its last new downward route.
  Duration setup_time{0};
  std::uint64_t dio_count = 0;  // DIO_MHCL + DIOACK_MHCL inside the window
  std::uint64_t dao_count = 0;  // DAO_MHCL + DAOACK_MHCL (+ RPL_DAO) inside the window
  std::uint64_t control_retransmissions = 0;  // included in the counts above
  std::uint64_t allocation_failures = 0;
  double addressing_rate = 1.0;
  double up_rate = 1.0;
  double down_rate = 1.0;
  AppCounters up;
  AppCounters down;
  bool timed_out = false;
  /// Zero-loss run that reached the application phase with unaddressed nodes.
  bool stalled = false;
  std::uint64_t events = 0;
  std::vector<NodeReport> nodes;
  std::vector<TraceRecord> trace;
};

/// Runs one scenario to completion. BaselineStoring dispatches to
/// run_baseline_storing.
Metrics run(const SimConfig& config);

/// Storing-mode downward routing with bounded per-node route tables and
/// static (id-derived) addresses.
Metrics run_baseline_storing(const SimConfig& config);

/// Node ids double as host addresses in the baseline.
inline HostAddress baseline_address(NodeId id) { return id; }

}  // namespace mhcl
