#include "mhcl/dodag.hpp"

#include <tuple>

namespace mhcl {

bool HopCountParentSet::observe(NodeId neighbor, std::uint16_t hops) {
  auto [it, inserted] = hops_.try_emplace(neighbor, hops);
  if (!inserted) {
    if (hops >= it->second) return false;
    it->second = hops;
  }
  const auto before = preferred_;
  if (!preferred_ || std::tie(hops, neighbor) < std::tie(hops_.at(*preferred_), *preferred_)) {
    preferred_ = neighbor;
  }
  return preferred_ != before;
}

std::optional<std::uint16_t> HopCountParentSet::rank() const {
  if (!preferred_) return std::nullopt;
  return static_cast<std::uint16_t>(hops_.at(*preferred_) + 1);
}

}  // namespace mhcl
