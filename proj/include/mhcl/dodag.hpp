#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "mhcl/address_space.hpp"

namespace mhcl {

/// Hop-count parent selection standing in for RPL's objective function:
/// the preferred parent is the neighbor with the fewest hops to the root,
/// ties going to the smallest id. Advertised hop counts only improve.
class HopCountParentSet {
 public:
  /// Records a neighbor's advertised hop count. Returns true when the
  /// preferred parent changed as a result.
  bool observe(NodeId neighbor, std::uint16_t hops);

  std::optional<NodeId> preferred() const { return preferred_; }
  /// Hop count of the preferred parent plus one; nullopt without a parent.
  std::optional<std::uint16_t> rank() const;
  const std::map<NodeId, std::uint16_t>& neighbors() const { return hops_; }

 private:
  std::map<NodeId, std::uint16_t> hops_;
  std::optional<NodeId> preferred_;
};

}  // namespace mhcl
