#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mhcl/error.hpp"
#include "mhcl/topology.hpp"

using namespace mhcl;

namespace {

ErrorCode read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_topology(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("accepted: " << text);
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("3x3 grid: 4-neighborhood degrees and depth 4") {
  const auto g = make_grid(9);
  CHECK(g.size() == 9);
  CHECK(g.root() == 0);
  CHECK(g.neighbors(0).size() == 2);
  CHECK(g.neighbors(1).size() == 3);
  CHECK(g.neighbors(4).size() == 4);
  CHECK_FALSE(g.adjacent(0, 4));  // diagonal
  CHECK(g.adjacent(0, 1));
  CHECK(g.adjacent(1, 4));
  CHECK(g.depth() == 4);
  CHECK(g.connected());
  CHECK(g.link_rule() == LinkRule::Axis);
  CHECK(g.positions()[5] == Position{70.0, 35.0});
}

TEST_CASE("grid depth is 2(side - 1)") {
  for (unsigned side = 1; side <= 13; ++side) {
    CHECK(make_grid(side * side).depth() == 2 * (side - 1));
  }
}

TEST_CASE("non-square grid sizes are rejected") {
  for (unsigned n : {0u, 2u, 10u, 168u}) {
    try {
      make_grid(n);
      FAIL("accepted " << n);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotASquare);
    }
  }
}

TEST_CASE("disk rule links the 35 m diagonal, axis rule does not") {
  const std::vector<Position> p{{0, 0}, {35, 35}, {35, 0}};
  const Topology disk(p, 0);
  const Topology axis(p, 0, kTransmissionRange, LinkRule::Axis);
  CHECK(std::hypot(35.0, 35.0) <= kTransmissionRange);
  CHECK(disk.adjacent(0, 1));
  CHECK_FALSE(axis.adjacent(0, 1));
  CHECK(axis.adjacent(0, 2));
  CHECK(axis.adjacent(1, 2));
}

TEST_CASE("uniform placements: connected, seeded, root near the centre") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = make_uniform(49, seed);
    CHECK(t.size() == 49);
    CHECK(t.connected());
    const double side = (7 - 2) * kGridSpacing;
    for (const auto& p : t.positions()) {
      CHECK(p.x >= 0.0);
      CHECK(p.x <= side);
      CHECK(p.y >= 0.0);
      CHECK(p.y <= side);
    }
    const auto centre = [&](const Position& q) { return std::hypot(q.x - side / 2, q.y - side / 2); };
    for (const auto& p : t.positions()) CHECK(centre(t.positions()[t.root()]) <= centre(p));
    CHECK(make_uniform(49, seed) == t);
  }
  CHECK_FALSE(make_uniform(49, 1) == make_uniform(49, 2));
}

TEST_CASE("hop distances on a disconnected layout") {
  const Topology t({{0, 0}, {40, 0}, {500, 500}}, 0);
  CHECK_FALSE(t.connected());
  CHECK(t.hop_distances() == std::vector<int>{0, 1, -1});
}

TEST_CASE("topology file round trip") {
  for (const auto& t : {make_grid(25), make_uniform(36, 5), Topology({{1.5, 2.25}}, 0, 80.0)}) {
    std::stringstream s;
    write_topology(s, t);
    CHECK(read_topology(s) == t);
  }
}

TEST_CASE("topology file errors") {
  std::istringstream ok("# comment\nroot 1\ntx_range 50\n0 0 0\n1 10 0  # trailing\n");
  const auto t = read_topology(ok);
  CHECK(t.root() == 1);
  CHECK(t.link_rule() == LinkRule::Disk);

  CHECK(read_error("tx_range 50\n0 0 0\n") == ErrorCode::TopologyFormat);            // no root
  CHECK(read_error("root 0\n0 0 0\n2 1 1\n") == ErrorCode::TopologyFormat);          // id gap
  CHECK(read_error("root 0\n0 0 zero\n") == ErrorCode::TopologyFormat);              // bad number
  CHECK(read_error("root 0\nlinks hex\n0 0 0\n") == ErrorCode::TopologyFormat);      // bad rule
  CHECK(read_error("root 5\n0 0 0\n") == ErrorCode::TopologyFormat);                 // root out of range
  CHECK(read_error("root 0\ntx_range -1\n0 0 0\n") == ErrorCode::TopologyFormat);    // bad range
  CHECK(read_error("") == ErrorCode::TopologyFormat);

  try {
    std::istringstream in("root 0\n0 0 0\n1 x 0\n");
    read_topology(in);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("loss sampling matches the configured rate") {
  std::mt19937_64 rng(3);
  const FailureModel tx{FailureKind::Tx, 0.1};
  const FailureModel rx{FailureKind::Rx, 0.3};
  int tx_drops = 0;
  int rx_drops = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const auto a = sample_loss(tx, rng);
    CHECK(a != LossOutcome::DropDestOnly);
    tx_drops += a == LossOutcome::DropAll;
    const auto b = sample_loss(rx, rng);
    CHECK(b != LossOutcome::DropAll);
    rx_drops += b == LossOutcome::DropDestOnly;
  }
  // 5 sigma bands.
  CHECK(std::abs(tx_drops - 10000) < 5 * std::sqrt(trials * 0.1 * 0.9));
  CHECK(std::abs(rx_drops - 30000) < 5 * std::sqrt(trials * 0.3 * 0.7));
  CHECK(sample_loss(FailureModel{}, rng) == LossOutcome::DeliverAll);

  CHECK_THROWS_AS((FailureModel{FailureKind::Tx, 1.5}.validate()), Error);
  CHECK_THROWS_AS((FailureModel{FailureKind::Rx, -0.1}.validate()), Error);
}
