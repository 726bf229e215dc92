#pragma once

// Brute-force references with global knowledge. Only tests and the CLI link
// this library; the protocol core never does.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mhcl/address_space.hpp"
#include "mhcl/error.hpp"
#include "mhcl/node_engine.hpp"
#include "mhcl/simulator.hpp"
#include "mhcl/topology.hpp"

namespace mhcl::oracle {

/// child -> parent; the root has no entry.
using ParentMap = std::map<NodeId, NodeId>;

struct PlanEntry {
  HostAddress own;
  AddressRange range;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

using Plan = std::map<NodeId, PlanEntry>;

/// InsufficientSpace raised while planning, tagged with the node whose
/// range could not be split.
class PlanExhausted : public Error {
 public:
  PlanExhausted(NodeId node, const std::string& what)
      : Error(ErrorCode::InsufficientSpace, what), node_(node) {}
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

/// Throws InvalidArgument if the map has a cycle or a node that does not
/// reach the root.
void check_parent_map(const ParentMap& parents, NodeId root);

std::map<NodeId, std::uint32_t> oracle_subtree_sizes(const ParentMap& parents, NodeId root);

/// Top-down recursive application of the split rules with exact subtree
/// sizes. Nodes absent from the map (other than the root) are left out.
Plan oracle_plan(const ParentMap& parents, NodeId root, const AddressRange& root_range, Mode mode,
                 const ReserveFraction& reserve);

/// Root-to-owner path found by descending into the unique child whose
/// range contains dest. Throws NoSuchAddress.
std::vector<NodeId> oracle_route(const Plan& plan, const ParentMap& parents, NodeId root,
                                 HostAddress dest);

/// Shortest-hop tree, ties to the smallest parent id: the tree a run
/// converges to when every node starts at once.
ParentMap bfs_parent_map(const Topology& topology);

/// Tree parents as reported by a finished run (joined nodes only).
ParentMap parent_map_of(const Metrics& metrics);

/// Address plan as reported by a finished run (addressed nodes only).
Plan plan_of(const Metrics& metrics);

/// Hop sequence produced by the run's own routing tables for a downward
/// message from the root. Stops at the first node that does not forward.
std::vector<NodeId> walk_down(const Metrics& metrics, NodeId root, HostAddress dest);

/// Invariant checks on a finished run. Returns one line per violation.
std::vector<std::string> validate_run(const SimConfig& config, const Metrics& metrics);

}  // namespace mhcl::oracle
