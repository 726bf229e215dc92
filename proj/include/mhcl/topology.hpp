#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string_view>
#include <vector>

#include "mhcl/address_space.hpp"

namespace mhcl {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline constexpr double kGridSpacing = 35.0;
inline constexpr double kTransmissionRange = 50.0;

/// Disk: u and v are neighbors iff their distance is at most the range.
/// Axis: additionally require a shared x or y coordinate (grid 4-neighborhood).
enum class LinkRule : std::uint8_t { Disk, Axis };

std::string_view to_string(LinkRule rule);

/// Node placement plus range-limited adjacency. Node ids are the indices into
/// positions().
class Topology {
 public:
  Topology(std::vector<Position> positions, NodeId root, double tx_range = kTransmissionRange,
           LinkRule rule = LinkRule::Disk);

  std::size_t size() const { return positions_.size(); }
  NodeId root() const { return root_; }
  double tx_range() const { return tx_range_; }
  LinkRule link_rule() const { return rule_; }
  const std::vector<Position>& positions() const { return positions_; }
  const std::vector<NodeId>& neighbors(NodeId node) const { return adjacency_.at(node); }
  bool adjacent(NodeId a, NodeId b) const;

  /// Hop distance from the root; -1 for unreachable nodes.
  std::vector<int> hop_distances() const;
  bool connected() const;
  /// Largest hop distance from the root (BFS height of the hop-count DAG).
  unsigned depth() const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.positions_ == b.positions_ && a.root_ == b.root_ && a.tx_range_ == b.tx_range_ &&
           a.rule_ == b.rule_;
  }

 private:
  std::vector<Position> positions_;
  NodeId root_;
  double tx_range_;
  LinkRule rule_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// sqrt(n) x sqrt(n) grid with 35 m spacing and 4-neighborhood links; node
/// id = row * side + col and the root sits at the (0, 0) corner. Throws
/// NotASquare.
Topology make_grid(unsigned n, double spacing = kGridSpacing, double tx_range = kTransmissionRange);

/// n nodes i.i.d. uniform over a square of side (sqrt(n) - 2) * 35 m, root
/// nearest the center. Disconnected draws are regenerated from a derived
/// seed; after 100 attempts throws DisconnectedAfterRetries.
Topology make_uniform(unsigned n, std::uint64_t seed, double spacing = kGridSpacing,
                      double tx_range = kTransmissionRange);

/// Plain-text node list:
///
///   root <id>
///   tx_range <meters>
///   links disk|axis       optional, default disk
///   <id> <x> <y>          one line per node, ids 0..n-1 in order
///
/// '#' starts a comment.
void write_topology(std::ostream& os, const Topology& topology);
/// Throws TopologyFormat with the offending line number.
Topology read_topology(std::istream& is);

enum class FailureKind : std::uint8_t { None, Tx, Rx };

std::string_view to_string(FailureKind kind);

/// Transient per-transmission loss. Tx: nobody receives the packet. Rx:
/// only the addressed destination misses it.
struct FailureModel {
  FailureKind kind = FailureKind::None;
  double rate = 0.0;

  void validate() const;
};

enum class LossOutcome : std::uint8_t { DeliverAll, DropAll, DropDestOnly };

LossOutcome sample_loss(const FailureModel& model, std::mt19937_64& rng);

}  // namespace mhcl
