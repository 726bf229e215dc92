#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mhcl/address_space.hpp"
#include "mhcl/dodag.hpp"
#include "mhcl/messages.hpp"
#include "mhcl/stabilization_timer.hpp"

namespace mhcl {

enum class Mode : std::uint8_t { Greedy, Aggregate };

std::string_view to_string(Mode mode);

enum class TimerKind : std::uint8_t {
  Parent,           // preferred-parent stabilization
  Children,         // children counter (greedy)
  LeafAggregation,  // descendant aggregation, non-root (aggregate)
  RootAggregation,  // descendant aggregation, root (aggregate)
  AckTimeout,       // retransmission of the message with sequence `seq`
};

struct TimerId {
  TimerKind kind = TimerKind::Parent;
  std::uint16_t seq = 0;

  friend auto operator<=>(const TimerId&, const TimerId&) = default;
};

enum class NoticeKind : std::uint8_t {
  ParentDefined,
  ChildrenDefined,
  DescendantsDefined,
  Addressed,
  AllocationFailure,  // peer: child left without a range
  GaveUp,             // peer: destination of a message never acknowledged
  RangeConflict,      // peer: sender of a conflicting DIO_MHCL
  StaleChild,         // peer: sender of a misaddressed DAO_MHCL
};

std::string_view to_string(NoticeKind kind);

namespace cmd {

struct Send {
  Message message;
  bool retransmission = false;
};
/// Arms (or re-arms, replacing any pending instance) a timer.
struct ArmTimer {
  TimerId timer;
  Duration delay;
};
struct CancelTimer {
  TimerId timer;
};
/// Hop-count advertisement for the DODAG substrate; broadcast when `to` is
/// empty.
struct AdvertiseRank {
  std::optional<NodeId> to;
  std::uint16_t hops;
};
/// Announces that this node joined and asks neighbors for their ranks.
struct Solicit {};
struct Notice {
  NoticeKind kind;
  NodeId peer = 0;
};

}  // namespace cmd

using Command =
    std::variant<cmd::Send, cmd::ArmTimer, cmd::CancelTimer, cmd::AdvertiseRank, cmd::Solicit, cmd::Notice>;
using Commands = std::vector<Command>;

/// One-line human-readable rendering, used by trace dumps and tests.
std::string describe(const Command& command);

struct RouteEntry {
  NodeId child;
  HostAddress first;
  HostAddress final_address;  // last address of the child's range

  friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

/// Downward routing table: one entry per direct child, sorted by the last
/// address of each child's range.
class RoutingTable {
 public:
  void insert(const RouteEntry& entry);
  /// Linear scan for the first entry whose final address is >= dest; the
  /// entry only matches if dest is not below its first address.
  std::optional<NodeId> lookup(HostAddress dest) const;

  const std::vector<RouteEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<RouteEntry> entries_;
};

struct Forward {
  enum class Kind { Local, Child, NoRoute, Unaddressed };
  Kind kind;
  NodeId next = 0;

  friend bool operator==(const Forward&, const Forward&) = default;
};

/// Downward next-hop decision from a node's own address, range and table.
Forward forward_down(const std::optional<HostAddress>& own, const std::optional<AddressRange>& range,
                     const RoutingTable& table, HostAddress dest);

struct NodeConfig {
  Mode mode = Mode::Greedy;
  bool is_root = false;
  StabilizationParams params{};
  ReserveFraction reserve = ReserveFraction::standard();
  /// Address space owned by the root; ignored for other nodes.
  AddressRange root_range = AddressRange::full(kMaxAddressWidth);
  unsigned dio_retransmissions = 3;
  unsigned dao_retransmissions = 3;
  std::uint64_t seed = 0;
};

/// Per-node protocol engine. It owns no clock and performs no I/O: every
/// input is an event call and every effect is a returned command.
class NodeEngine {
 public:
  struct Child {
    /// Last descendant count reported (0 until a subtree size arrives).
    std::uint32_t count = 0;
    bool addressed_by_us = false;
  };

  NodeEngine(NodeId id, const NodeConfig& config);

  Commands start();
  Commands on_timer(const TimerId& timer);
  Commands on_message(const Message& message);
  Commands on_rank_advert(NodeId from, std::uint16_t hops);
  /// A neighbor powered up and solicited ranks.
  Commands on_neighbor_joined(NodeId neighbor);

  Forward forward_down(HostAddress dest) const;
  /// Next hop toward the root; empty at the root or before the parent is
  /// defined.
  std::optional<NodeId> forward_up() const;

  NodeId id() const { return id_; }
  Mode mode() const { return config_.mode; }
  bool is_root() const { return config_.is_root; }
  bool started() const { return started_; }
  bool parent_defined() const { return parent_defined_; }
  bool children_defined() const { return children_defined_; }
  bool descendants_defined() const { return descendants_defined_; }
  bool partitioned() const { return partitioned_; }
  /// The frozen tree parent once defined, otherwise the current candidate.
  std::optional<NodeId> preferred_parent() const;
  std::optional<std::uint16_t> rank() const;
  const std::map<NodeId, Child>& children() const { return children_; }
  /// Own subtree size: 1 + sum of children's reported counts.
  std::uint32_t subtree_size() const;
  const std::optional<AddressRange>& assigned_range() const { return range_; }
  const std::optional<HostAddress>& own_address() const { return own_; }
  const std::optional<AddressRange>& reserve() const { return reserve_; }
  const RoutingTable& routing_table() const { return table_; }
  std::size_t pending_acks() const { return pending_.size(); }
  const StabilizationTimer& timer(TimerKind kind) const;

 private:
  struct Pending {
    Message message;
    unsigned retransmissions_left;
  };

  void on_parent_timer(Commands& out);
  void on_children_timer(Commands& out);
  void on_leaf_aggregation_timer(Commands& out);
  void on_root_aggregation_timer(Commands& out);
  void on_ack_timeout(std::uint16_t seq, Commands& out);

  void on_dao(const Message& message, const Dao& dao, Commands& out);
  void on_dio(const Message& message, const Dio& dio, Commands& out);
  void on_ack(std::uint16_t acked_seq, Commands& out);

  bool distribution_eligible() const;
  void distribute_addresses(Commands& out);
  void grant(NodeId child, const AddressRange& range, Commands& out);
  void serve_delayed(Commands& out);
  void try_report(Commands& out);

  void arm(TimerKind kind, Duration delay, Commands& out);
  void send_reliable(NodeId dst, Payload payload, unsigned retransmissions, Commands& out);
  void send(NodeId dst, Payload payload, Commands& out);
  std::uint16_t next_seq();
  bool all_children_reported() const;

  NodeId id_;
  NodeConfig config_;
  Rng rng_;

  bool started_ = false;
  HopCountParentSet candidates_;
  bool parent_changed_ = false;
  bool parent_defined_ = false;
  std::optional<NodeId> parent_;
  std::optional<std::uint16_t> frozen_rank_;

  std::map<NodeId, Child> children_;
  std::vector<NodeId> delayed_;
  bool children_changed_ = false;
  bool neighborhood_changed_ = false;
  bool children_defined_ = false;
  bool children_stable_ = false;
  bool descendants_defined_ = false;
  bool count_changed_ = false;

  bool registration_sent_ = false;
  std::uint32_t reported_count_ = 0;

  bool partitioned_ = false;
  std::optional<AddressRange> range_;
  std::optional<HostAddress> own_;
  std::optional<AddressRange> reserve_;
  RoutingTable table_;

  StabilizationTimer parent_timer_;
  StabilizationTimer children_timer_;
  StabilizationTimer leaf_timer_;
  StabilizationTimer root_timer_;

  std::uint16_t seq_ = 0;
  std::map<std::uint16_t, Pending> pending_;
};

}  // namespace mhcl
