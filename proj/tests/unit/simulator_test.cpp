#include <doctest.h>

#include <regex>
#include <sstream>

#include "mhcl/error.hpp"
#include "mhcl/oracle.hpp"
#include "mhcl/simulator.hpp"

using namespace mhcl;

namespace {

SimConfig base(unsigned n, SimMode mode, std::uint64_t seed = 1) {
  SimConfig c;
  c.topology = make_grid(n);
  c.mode = mode;
  c.seed = seed;
  return c;
}

void check_conservation(const Metrics& m) {
  CHECK(m.up.sent == m.up.resolved());
  CHECK(m.down.sent == m.down.resolved());
}

}  // namespace

TEST_CASE("lossless 3x3: everyone addressed, traffic delivered, invariants hold") {
  for (auto mode : {SimMode::Greedy, SimMode::Aggregate}) {
    const auto c = base(9, mode);
    const auto m = run(c);
    CHECK(m.n == 9);
    CHECK(m.addressing_rate == 1.0);
    CHECK(m.up_rate == 1.0);
    CHECK(m.down_rate == 1.0);
    CHECK(m.dag_depth == 4);
    CHECK_FALSE(m.timed_out);
    CHECK_FALSE(m.stalled);
    CHECK(m.up.sent == 8);
    CHECK(m.down.sent == 8);
    CHECK(m.control_retransmissions == 0);
    CHECK(m.dio_count + m.dao_count == (mode == SimMode::Greedy ? 4u : 6u) * 8u);
    CHECK(oracle::validate_run(c, m).empty());
  }
}

TEST_CASE("single node network") {
  for (auto mode : {SimMode::Greedy, SimMode::Aggregate, SimMode::BaselineStoring}) {
    const auto m = run(base(1, mode));
    CHECK(m.n == 1);
    CHECK(m.setup_time == Duration(0));
    CHECK(m.addressing_rate == 1.0);
    CHECK(m.up_rate == 1.0);
    CHECK(m.down_rate == 1.0);
    CHECK(m.dio_count + m.dao_count == 0);
  }
}

TEST_CASE("same seed reproduces the run, another seed differs") {
  auto c = base(25, SimMode::Aggregate, 7);
  c.failure = {FailureKind::Tx, 0.1};
  c.record_trace = true;
  const auto a = run(c);
  const auto b = run(c);
  std::ostringstream ta;
  std::ostringstream tb;
  write_trace(ta, a.trace);
  write_trace(tb, b.trace);
  CHECK(ta.str() == tb.str());
  CHECK(a.setup_time == b.setup_time);
  CHECK(a.dio_count == b.dio_count);
  c.seed = 8;
  std::ostringstream tc;
  write_trace(tc, run(c).trace);
  CHECK(tc.str() != ta.str());
}

TEST_CASE("application traffic is conserved under loss") {
  for (auto mode : {SimMode::Greedy, SimMode::Aggregate, SimMode::BaselineStoring}) {
    for (auto kind : {FailureKind::Tx, FailureKind::Rx}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto c = base(49, mode, seed);
        c.failure = {kind, 0.2};
        const auto m = run(c);
        check_conservation(m);
        CHECK(m.up.sent == 48);
        CHECK(m.addressing_rate >= 0.0);
        CHECK(m.addressing_rate <= 1.0);
        CHECK(oracle::validate_run(c, m).empty());
      }
    }
  }
}

TEST_CASE("trace lines: time,src,dst,kind,outcome,hex") {
  auto c = base(9, SimMode::Greedy);
  c.failure = {FailureKind::Rx, 0.3};
  c.record_trace = true;
  const auto m = run(c);
  REQUIRE_FALSE(m.trace.empty());
  std::ostringstream os;
  write_trace(os, m.trace);
  std::istringstream in(os.str());
  const std::regex line(R"(\d+\.\d{3},\d+,\d+,[A-Z_]+,(DELIVERED|DROP_TX|DROP_RX),[0-9a-f]+)");
  std::string l;
  bool dropped = false;
  while (std::getline(in, l)) {
    CHECK(std::regex_match(l, line));
    dropped |= l.find("DROP_RX") != std::string::npos;
  }
  CHECK(dropped);
  for (const auto& r : m.trace) CHECK(decode(r.bytes).kind() == r.kind);
}

TEST_CASE("baseline: a table holding every route delivers everything") {
  auto c = base(49, SimMode::BaselineStoring);
  c.baseline_table_capacity = 49;
  const auto m = run(c);
  CHECK(m.down_rate == 1.0);
  CHECK(m.up_rate == 1.0);
}

TEST_CASE("baseline: with no table only the root's neighbours are reachable") {
  auto c = base(9, SimMode::BaselineStoring);
  c.baseline_table_capacity = 0;
  const auto m = run(c);
  CHECK(m.down.sent == 8);
  CHECK(m.down.delivered == 2);  // nodes 1 and 3
  CHECK(m.down_rate == doctest::Approx(0.25));
  check_conservation(m);
}

TEST_CASE("baseline: small tables lose downward traffic on a large grid") {
  auto c = base(169, SimMode::BaselineStoring);
  const auto m = run(c);
  CHECK(m.down_rate < 0.5);
  CHECK(m.up_rate == 1.0);
  for (const auto& node : m.nodes) CHECK(node.baseline_routes <= c.baseline_table_capacity);
}

TEST_CASE("config validation") {
  auto c = base(9, SimMode::Greedy);
  c.link_jitter = c.link_delay + 1ms;
  CHECK_THROWS_AS(c.validate(), Error);
  c = base(9, SimMode::Greedy);
  c.address_width = 0;
  CHECK_THROWS_AS(run(c), Error);
  c = base(9, SimMode::Greedy);
  c.failure = {FailureKind::Tx, 2.0};
  CHECK_THROWS_AS(run(c), Error);
}

TEST_CASE("address width too small for the tree leaves nodes unaddressed") {
  auto c = base(25, SimMode::Greedy);
  c.address_width = 4;
  const auto m = run(c);
  CHECK(m.addressing_rate < 1.0);
  CHECK(m.allocation_failures > 0);
  CHECK(m.stalled);
  check_conservation(m);
}
