#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mhcl {

/// Link-level node identity (stands in for the MAC-derived interface id).
using NodeId = std::uint16_t;

/// Host part of an address. Only the low `width` bits are meaningful; the
/// wire format carries 16 bits, so widths above 16 are rejected.
using HostAddress = std::uint32_t;

inline constexpr unsigned kMaxAddressWidth = 16;

/// Contiguous half-open interval [start, start + length) of host addresses.
/// A zero length is representable so an exhausted reserve has a value.
class AddressRange {
 public:
  constexpr AddressRange() = default;
  constexpr AddressRange(HostAddress start, std::uint32_t length)
      : start_(start), length_(length) {}

  /// The full space of a `width`-bit host address: [0, 2^width).
  static AddressRange full(unsigned width);

  constexpr HostAddress start() const { return start_; }
  constexpr std::uint32_t length() const { return length_; }
  constexpr HostAddress end() const { return start_ + length_; }
  /// Last address in the range; meaningless when empty().
  constexpr HostAddress last() const { return start_ + length_ - 1; }
  constexpr bool empty() const { return length_ == 0; }

  constexpr bool contains(HostAddress addr) const {
    return addr >= start_ && addr - start_ < length_;
  }
  constexpr bool contains(const AddressRange& other) const {
    return other.start_ >= start_ && other.end() <= end();
  }

  std::string to_string() const;

  friend constexpr bool operator==(const AddressRange&, const AddressRange&) = default;

 private:
  HostAddress start_ = 0;
  std::uint32_t length_ = 0;
};

inline constexpr bool contains(const AddressRange& range, HostAddress addr) {
  return range.contains(addr);
}

/// Fraction r in [0, 1) of a node's range withheld for late children.
class ReserveFraction {
 public:
  /// Throws InvalidArgument unless 0 <= num/den < 1.
  ReserveFraction(std::uint32_t numerator, std::uint32_t denominator);

  /// Default reserve pool: 1/16 (6.25%).
  static ReserveFraction standard() { return {1, 16}; }
  /// Percent given to at most four decimals, e.g. 6.25.
  static ReserveFraction from_percent(double percent);

  std::uint32_t numerator() const { return num_; }
  std::uint32_t denominator() const { return den_; }
  double value() const { return static_cast<double>(num_) / den_; }

  /// floor(r * length)
  std::uint32_t reserved(std::uint32_t length) const;

  friend bool operator==(const ReserveFraction& a, const ReserveFraction& b) {
    return std::uint64_t{a.num_} * b.den_ == std::uint64_t{b.num_} * a.den_;
  }

 private:
  std::uint32_t num_;
  std::uint32_t den_;
};

struct ChildRange {
  NodeId child;
  AddressRange range;

  friend bool operator==(const ChildRange&, const ChildRange&) = default;
};

struct ChildWeight {
  NodeId child;
  std::uint32_t subtree_size;  // >= 1
};

struct PartitionResult {
  /// First address of the partitioned range; absent for reserve allocations.
  std::optional<HostAddress> own_address;
  /// Ordered by ascending child id, laid out contiguously.
  std::vector<ChildRange> children;
  /// Tail of the range left unallocated. May be empty.
  AddressRange reserve;
};

/// Equal split: the node keeps range.start, each of the k children gets
/// floor((L - 1 - floor(rL)) / k) addresses, and the reserve (tail) absorbs
/// floor(rL) plus the rounding remainder.
/// Throws InsufficientSpace when a child would get no address.
PartitionResult partition_greedy(const AddressRange& range,
                                 std::span<const NodeId> children,
                                 const ReserveFraction& reserve);

/// Proportional split of U = L - 1 - floor(rL) addresses by subtree size,
/// largest-remainder rounding. Leftover addresses are handed out one per
/// child in descending order of remainder, a whole group of equal
/// remainders at a time; the first group that cannot be served in full, and
/// everything after it, falls into the reserve. If plain proportional floors
/// leave any child without an address (only possible when U is smaller than
/// the subtree total), every child is first given one address and the rest
/// U - k is split the same way.
/// Throws InsufficientSpace when U < k.
PartitionResult partition_aggregate(const AddressRange& range,
                                    std::span<const ChildWeight> children,
                                    const ReserveFraction& reserve);

/// Equal split of an unallocated reserve among late children. Same layout as
/// partition_greedy except no own address is taken: children start at
/// reserve.start().
PartitionResult allocate_delayed(const AddressRange& reserve,
                                 std::span<const NodeId> children,
                                 const ReserveFraction& fraction);

}  // namespace mhcl
