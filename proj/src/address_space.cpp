#include "mhcl/address_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mhcl/error.hpp"

namespace mhcl {

namespace {

void require_distinct_sorted(std::vector<NodeId>& ids) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate child id in partition request");
  }
}

[[noreturn]] void insufficient(const AddressRange& range, std::uint64_t usable, std::size_t k) {
  std::ostringstream os;
  os << "range " << range.to_string() << " has " << usable << " usable addresses for " << k
     << " children";
  throw Error(ErrorCode::InsufficientSpace, os.str());
}

// Lays children out contiguously from `cursor`; the reserve is whatever is
// left up to range.end().
PartitionResult lay_out(const AddressRange& range, HostAddress cursor,
                        const std::vector<NodeId>& ids,
                        const std::vector<std::uint32_t>& lengths) {
  PartitionResult out;
  out.children.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.children.push_back({ids[i], AddressRange(cursor, lengths[i])});
    cursor += lengths[i];
  }
  out.reserve = AddressRange(cursor, range.end() - cursor);
  return out;
}

PartitionResult equal_split(const AddressRange& range, std::span<const NodeId> children,
                            const ReserveFraction& fraction, bool take_own) {
  std::vector<NodeId> ids(children.begin(), children.end());
  require_distinct_sorted(ids);

  const std::uint32_t own = take_own ? 1 : 0;
  if (range.length() < own) insufficient(range, 0, ids.size());
  const std::uint64_t usable = range.length() - own - fraction.reserved(range.length());
  if (usable < ids.size()) insufficient(range, usable, ids.size());

  const auto each = ids.empty() ? 0u : static_cast<std::uint32_t>(usable / ids.size());
  auto out = lay_out(range, range.start() + own, ids, std::vector<std::uint32_t>(ids.size(), each));
  if (take_own) out.own_address = range.start();
  return out;
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientSpace: return "InsufficientSpace";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::NotASquare: return "NotASquare";
    case ErrorCode::DisconnectedAfterRetries: return "DisconnectedAfterRetries";
    case ErrorCode::NoSuchAddress: return "NoSuchAddress";
    case ErrorCode::TopologyFormat: return "TopologyFormat";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

AddressRange AddressRange::full(unsigned width) {
  if (width == 0 || width > kMaxAddressWidth) {
    throw Error(ErrorCode::InvalidArgument,
                "address width must be in [1, 16], got " + std::to_string(width));
  }
  return AddressRange(0, std::uint32_t{1} << width);
}

std::string AddressRange::to_string() const {
  std::ostringstream os;
  os << '[' << start_ << ',' << end() << ')';
  return os.str();
}

ReserveFraction::ReserveFraction(std::uint32_t numerator, std::uint32_t denominator)
    : num_(numerator), den_(denominator) {
  if (den_ == 0 || num_ >= den_) {
    throw Error(ErrorCode::InvalidArgument, "reserve fraction must lie in [0, 1)");
  }
  const auto g = std::gcd(num_, den_);
  num_ /= g;
  den_ /= g;
}

ReserveFraction ReserveFraction::from_percent(double percent) {
  if (!(percent >= 0.0) || percent >= 100.0) {
    throw Error(ErrorCode::InvalidArgument, "reserve percent must lie in [0, 100)");
  }
  const auto scaled = static_cast<std::uint32_t>(std::llround(percent * 10000.0));
  return ReserveFraction(scaled, 1000000);
}

std::uint32_t ReserveFraction::reserved(std::uint32_t length) const {
  return static_cast<std::uint32_t>(std::uint64_t{length} * num_ / den_);
}

PartitionResult partition_greedy(const AddressRange& range, std::span<const NodeId> children,
                                 const ReserveFraction& reserve) {
  if (range.empty()) throw Error(ErrorCode::InvalidArgument, "cannot partition an empty range");
  return equal_split(range, children, reserve, true);
}

PartitionResult partition_aggregate(const AddressRange& range,
                                    std::span<const ChildWeight> children,
                                    const ReserveFraction& reserve) {
  if (range.empty()) throw Error(ErrorCode::InvalidArgument, "cannot partition an empty range");

  std::vector<ChildWeight> sorted(children.begin(), children.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ChildWeight& a, const ChildWeight& b) { return a.child < b.child; });
  std::vector<NodeId> ids;
  ids.reserve(sorted.size());
  std::uint64_t total = 0;
  for (const auto& c : sorted) {
    if (c.subtree_size == 0) {
      throw Error(ErrorCode::InvalidArgument, "subtree size must be at least 1");
    }
    ids.push_back(c.child);
    total += c.subtree_size;
  }
  {
    auto check = ids;
    require_distinct_sorted(check);
  }

  const std::uint64_t usable = range.length() - 1 - reserve.reserved(range.length());
  const std::size_t k = sorted.size();
  if (usable < k) insufficient(range, usable, k);

  std::vector<std::uint32_t> lengths(k, 0);
  std::vector<std::uint64_t> remainders(k, 0);
  auto apportion = [&](std::uint64_t pool, std::uint32_t base) {
    std::uint64_t handed = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t share = pool * sorted[i].subtree_size;
      lengths[i] = base + static_cast<std::uint32_t>(share / total);
      remainders[i] = share % total;
      handed += share / total;
    }
    return pool - handed;
  };

  std::uint64_t leftover = 0;
  if (k > 0) {
    leftover = apportion(usable, 0);
    if (std::find(lengths.begin(), lengths.end(), 0u) != lengths.end()) {
      leftover = apportion(usable - k, 1);
    }
  }

  // Descending remainder; equal remainders form one group served together.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t g = 0; g < k && leftover > 0;) {
    std::size_t end = g;
    while (end < k && remainders[order[end]] == remainders[order[g]]) ++end;
    if (remainders[order[g]] == 0 || end - g > leftover) break;
    for (std::size_t j = g; j < end; ++j) ++lengths[order[j]];
    leftover -= end - g;
    g = end;
  }

  auto out = lay_out(range, range.start() + 1, ids, lengths);
  out.own_address = range.start();
  return out;
}

PartitionResult allocate_delayed(const AddressRange& reserve, std::span<const NodeId> children,
                                 const ReserveFraction& fraction) {
  return equal_split(reserve, children, fraction, false);
}

}  // namespace mhcl
