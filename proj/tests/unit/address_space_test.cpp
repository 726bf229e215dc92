#include <doctest.h>

#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "mhcl/address_space.hpp"
#include "mhcl/error.hpp"
#include "mhcl/oracle.hpp"

using namespace mhcl;

namespace {

std::vector<std::uint32_t> lengths(const PartitionResult& p) {
  std::vector<std::uint32_t> out;
  for (const auto& c : p.children) out.push_back(c.range.length());
  return out;
}

void check_layout(const AddressRange& range, const PartitionResult& p, bool own) {
  HostAddress cursor = range.start() + (own ? 1 : 0);
  if (own) {
    REQUIRE(p.own_address);
    CHECK(*p.own_address == range.start());
  } else {
    CHECK_FALSE(p.own_address);
  }
  for (const auto& c : p.children) {
    CHECK(c.range.start() == cursor);
    CHECK(c.range.length() >= 1);
    cursor = c.range.end();
  }
  CHECK(p.reserve.start() == cursor);
  CHECK(p.reserve.end() == range.end());
}

void expect_code(ErrorCode code, const std::function<void()>& body) {
  try {
    body();
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("address range basics") {
  const AddressRange r(10, 4);
  CHECK(r.end() == 14);
  CHECK(r.last() == 13);
  CHECK(r.contains(10));
  CHECK(r.contains(13));
  CHECK_FALSE(r.contains(14));
  CHECK_FALSE(r.contains(9));
  CHECK(r.contains(AddressRange(11, 3)));
  CHECK_FALSE(r.contains(AddressRange(11, 4)));
  CHECK(AddressRange::full(16) == AddressRange(0, 65536));
  CHECK(AddressRange::full(8) == AddressRange(0, 256));
  expect_code(ErrorCode::InvalidArgument, [] { AddressRange::full(0); });
  expect_code(ErrorCode::InvalidArgument, [] { AddressRange::full(17); });
}

TEST_CASE("reserve fraction") {
  CHECK(ReserveFraction::standard().reserved(256) == 16);
  CHECK(ReserveFraction::standard().reserved(18) == 1);
  CHECK(ReserveFraction::from_percent(6.25) == ReserveFraction::standard());
  CHECK(ReserveFraction(0, 1).reserved(1000) == 0);
  expect_code(ErrorCode::InvalidArgument, [] { ReserveFraction(1, 1); });
  expect_code(ErrorCode::InvalidArgument, [] { ReserveFraction(1, 0); });
  expect_code(ErrorCode::InvalidArgument, [] { ReserveFraction::from_percent(100.0); });
  expect_code(ErrorCode::InvalidArgument, [] { ReserveFraction::from_percent(-1.0); });
}

TEST_CASE("greedy partition: worked examples") {
  const NodeId abc[] = {1, 2, 3};
  auto p = partition_greedy(AddressRange(0, 256), abc, ReserveFraction::standard());
  CHECK(*p.own_address == 0);
  REQUIRE(p.children.size() == 3);
  CHECK(p.children[0].range == AddressRange(1, 79));
  CHECK(p.children[1].range == AddressRange(80, 79));
  CHECK(p.children[2].range == AddressRange(159, 79));
  CHECK(p.reserve == AddressRange(238, 18));

  p = partition_greedy(AddressRange(0, 256), {}, ReserveFraction::standard());
  CHECK(*p.own_address == 0);
  CHECK(p.children.empty());
  CHECK(p.reserve == AddressRange(1, 255));

  const NodeId four[] = {1, 2, 3, 4};
  expect_code(ErrorCode::InsufficientSpace,
              [&] { partition_greedy(AddressRange(10, 4), four, ReserveFraction(0, 1)); });
}

TEST_CASE("greedy partition: children laid out by ascending id") {
  const NodeId ids[] = {9, 3, 5};
  const auto p = partition_greedy(AddressRange(0, 100), ids, ReserveFraction(0, 1));
  CHECK(p.children[0].child == 3);
  CHECK(p.children[1].child == 5);
  CHECK(p.children[2].child == 9);
  const NodeId dup[] = {3, 3};
  expect_code(ErrorCode::InvalidArgument, [&] { partition_greedy(AddressRange(0, 100), dup, ReserveFraction(0, 1)); });
}

TEST_CASE("aggregate partition: worked examples") {
  const ChildWeight w[] = {{1, 10}, {2, 20}, {3, 30}};
  auto p = partition_aggregate(AddressRange(0, 256), w, ReserveFraction::standard());
  CHECK(*p.own_address == 0);
  CHECK(p.children[0].range == AddressRange(1, 40));
  CHECK(p.children[1].range == AddressRange(41, 80));
  CHECK(p.children[2].range == AddressRange(121, 119));
  CHECK(p.reserve == AddressRange(240, 16));

  const ChildWeight one[] = {{7, 1}};
  p = partition_aggregate(AddressRange(0, 256), one, ReserveFraction(0, 1));
  CHECK(p.children[0].range == AddressRange(1, 255));

  const ChildWeight zero[] = {{7, 0}};
  expect_code(ErrorCode::InvalidArgument,
              [&] { partition_aggregate(AddressRange(0, 256), zero, ReserveFraction(0, 1)); });
  const ChildWeight many[] = {{1, 1}, {2, 1}, {3, 1}, {4, 1}};
  expect_code(ErrorCode::InsufficientSpace,
              [&] { partition_aggregate(AddressRange(10, 4), many, ReserveFraction(0, 1)); });
}

TEST_CASE("aggregate partition: tight space gives every child one address first") {
  // U = 3, sizes 1 and 100: plain proportional floors would give child 1 zero.
  const ChildWeight w[] = {{1, 1}, {2, 100}};
  const auto p = partition_aggregate(AddressRange(0, 4), w, ReserveFraction(0, 1));
  CHECK(p.children[0].range.length() == 1);
  CHECK(p.children[1].range.length() == 2);
  CHECK(p.reserve.empty());
}

TEST_CASE("aggregate partition: equal remainders are served as a group or not at all") {
  // U = 10 over three equal children: 3 each, the single leftover cannot
  // serve the three-way tie so it stays in the reserve, as in greedy.
  const ChildWeight w[] = {{1, 4}, {2, 4}, {3, 4}};
  const auto p = partition_aggregate(AddressRange(0, 11), w, ReserveFraction(0, 1));
  CHECK(lengths(p) == std::vector<std::uint32_t>{3, 3, 3});
  CHECK(p.reserve == AddressRange(10, 1));
}

TEST_CASE("delayed allocation: worked examples") {
  const NodeId two[] = {4, 5};
  auto p = allocate_delayed(AddressRange(238, 18), two, ReserveFraction::standard());
  CHECK_FALSE(p.own_address);
  CHECK(p.children[0].range == AddressRange(238, 8));
  CHECK(p.children[1].range == AddressRange(246, 8));
  CHECK(p.reserve == AddressRange(254, 2));

  const NodeId one[] = {4};
  p = allocate_delayed(AddressRange(240, 16), one, ReserveFraction(0, 1));
  CHECK(p.children[0].range == AddressRange(240, 16));
  CHECK(p.reserve.empty());

  expect_code(ErrorCode::InsufficientSpace,
              [&] { allocate_delayed(AddressRange(255, 1), two, ReserveFraction::standard()); });
}

TEST_CASE("equal sizes match greedy lengths, exhaustive over k <= 8 and L <= 4096") {
  for (const auto& r : {ReserveFraction(0, 1), ReserveFraction::standard(), ReserveFraction(1, 3)}) {
    for (std::uint32_t k = 1; k <= 8; ++k) {
      std::vector<NodeId> ids(k);
      std::iota(ids.begin(), ids.end(), NodeId{1});
      for (std::uint32_t L = 1; L <= 4096; ++L) {
        const AddressRange range(0, L);
        const auto usable = static_cast<std::int64_t>(L) - 1 - r.reserved(L);
        if (usable < static_cast<std::int64_t>(k)) continue;
        for (std::uint32_t size : {1u, 7u}) {
          std::vector<ChildWeight> w;
          for (auto id : ids) w.push_back({id, size});
          const auto g = partition_greedy(range, ids, r);
          const auto a = partition_aggregate(range, w, r);
          if (lengths(g) != lengths(a)) {
            FAIL_CHECK("k=" << k << " L=" << L << " size=" << size);
          }
        }
      }
    }
  }
}

TEST_CASE("partitions match the oracle and account exactly, 10^4 random cases") {
  std::mt19937_64 rng(20240601);
  int cases = 0;
  int compared = 0;
  int skipped = 0;
  while (cases < 10000) {
    const unsigned k = std::uniform_int_distribution<unsigned>(0, 12)(rng);
    const std::uint32_t L = std::uniform_int_distribution<std::uint32_t>(1, 70000)(rng);
    const HostAddress start = std::uniform_int_distribution<std::uint32_t>(0, 1000)(rng);
    const ReserveFraction r(std::uniform_int_distribution<std::uint32_t>(0, 7)(rng), 16);
    const AddressRange range(start, L);

    // A star of k children, child i carrying a chain of (w_i - 1) nodes so
    // its subtree has exactly w_i members.
    oracle::ParentMap parents;
    std::vector<NodeId> ids;
    std::vector<ChildWeight> weights;
    NodeId next = 1000;
    std::set<NodeId> used;
    for (unsigned i = 0; i < k; ++i) {
      NodeId id;
      do {
        id = std::uniform_int_distribution<NodeId>(1, 999)(rng);
      } while (!used.insert(id).second);
      const auto w = std::uniform_int_distribution<std::uint32_t>(1, 40)(rng);
      ids.push_back(id);
      weights.push_back({id, w});
      parents[id] = 0;
      NodeId tail = id;
      for (std::uint32_t j = 1; j < w; ++j) {
        parents[next] = tail;
        tail = next++;
      }
    }
    ++cases;

    for (const Mode mode : {Mode::Greedy, Mode::Aggregate}) {
      std::optional<PartitionResult> got;
      bool threw = false;
      try {
        got = mode == Mode::Greedy ? partition_greedy(range, ids, r) : partition_aggregate(range, weights, r);
      } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::InsufficientSpace);
        threw = true;
      }
      const auto usable = static_cast<std::int64_t>(L) - 1 - r.reserved(L);
      CHECK(threw == (usable < static_cast<std::int64_t>(k)));
      if (threw) continue;

      check_layout(range, *got, true);
      std::uint64_t total = 1 + got->reserve.length();
      for (const auto& c : got->children) total += c.range.length();
      CHECK(total == L);
      CHECK(got->reserve.length() >= r.reserved(L));

      // Only the root's split is compared; the oracle may run out of space
      // further down a chain, which says nothing about this partition.
      oracle::ParentMap first_level;
      for (auto id : ids) first_level[id] = 0;
      oracle::Plan plan;
      try {
        plan = mode == Mode::Greedy ? oracle::oracle_plan(first_level, 0, range, mode, r)
                                    : oracle::oracle_plan(parents, 0, range, mode, r);
      } catch (const oracle::PlanExhausted& e) {
        CHECK(e.node() != 0);
        ++skipped;
        continue;
      }
      ++compared;
      for (const auto& c : got->children) {
        REQUIRE(plan.count(c.child));
        CHECK(plan.at(c.child).range == c.range);
      }
    }
  }
  CHECK(compared >= 15000);
}

TEST_CASE("delayed allocation accounts exactly, 10^4 random cases") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 10000; ++i) {
    const std::uint32_t L = std::uniform_int_distribution<std::uint32_t>(0, 5000)(rng);
    const unsigned k = std::uniform_int_distribution<unsigned>(1, 6)(rng);
    std::vector<NodeId> ids(k);
    std::iota(ids.begin(), ids.end(), NodeId{1});
    const AddressRange reserve(std::uniform_int_distribution<std::uint32_t>(0, 60000)(rng), L);
    const auto r = ReserveFraction::standard();
    const auto usable = static_cast<std::int64_t>(L) - r.reserved(L);
    try {
      const auto p = allocate_delayed(reserve, ids, r);
      check_layout(reserve, p, false);
      CHECK(p.children.size() == k);
      CHECK(p.reserve.length() >= r.reserved(L));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientSpace);
      CHECK(usable < static_cast<std::int64_t>(k));
    }
  }
}
