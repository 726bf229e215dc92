#include <doctest.h>

#include "engine_driver.hpp"
#include "mhcl/error.hpp"

using namespace mhcl;
using namespace mhcl::testing;
using namespace std::chrono_literals;

namespace {

NodeConfig config(Mode mode, bool root = false, std::uint64_t seed = 1) {
  NodeConfig c;
  c.mode = mode;
  c.is_root = root;
  c.seed = seed;
  return c;
}

bool has(const Commands& c, NoticeKind kind) { return noticed(c, kind); }

Commands register_children(NodeEngine& e, std::initializer_list<NodeId> children, std::uint16_t count = 0) {
  Commands all;
  std::uint16_t seq = 100;
  for (auto c : children) {
    auto out = e.on_message(msg(c, e.id(), seq++, Dao{count}));
    all.insert(all.end(), out.begin(), out.end());
  }
  return all;
}

std::vector<std::pair<NodeId, Dio>> dios(const Commands& commands) {
  std::vector<std::pair<NodeId, Dio>> out;
  for (const auto& m : sends(commands)) {
    if (const auto* d = std::get_if<Dio>(&m.payload)) out.emplace_back(m.dst, *d);
  }
  return out;
}

}  // namespace

TEST_CASE("non-root start solicits and arms the parent timer in (I/2, I]") {
  NodeEngine e(5, config(Mode::Greedy));
  const auto out = e.start();
  CHECK(std::holds_alternative<cmd::Solicit>(out.front()));
  const auto d = armed(out, TimerKind::Parent);
  REQUIRE(d);
  CHECK(*d > 32ms);
  CHECK(*d <= 64ms);
  CHECK(e.start().empty());
}

TEST_CASE("events before start are ignored") {
  NodeEngine e(5, config(Mode::Greedy));
  CHECK(e.on_message(msg(1, 5, 1, Dio{10, 5})).empty());
  CHECK(e.on_rank_advert(1, 0).empty());
  CHECK(e.on_timer(TimerId{TimerKind::Parent, 0}).empty());
  CHECK_FALSE(e.own_address());
}

TEST_CASE("greedy non-root: parent freezes, registers with count 0, starts the children timer") {
  NodeEngine e(5, config(Mode::Greedy));
  e.start();
  const auto advert = e.on_rank_advert(2, 0);
  REQUIRE(advert.size() == 1);
  CHECK(describe(advert.front()) == "advertise hops=1");

  const auto out = fire_until(e, TimerKind::Parent, [](const Commands& c) { return has(c, NoticeKind::ParentDefined); });
  CHECK(e.parent_defined());
  CHECK(*e.preferred_parent() == 2);
  CHECK(*e.forward_up() == 2);
  CHECK(*e.rank() == 1);
  const auto daos = sent_payloads<Dao>(out);
  REQUIRE(daos.size() == 1);
  CHECK(daos.front().descendant_count == 0);
  CHECK(armed(out, TimerKind::Children));
  CHECK(e.pending_acks() == 1);
  // A frozen parent ignores better offers.
  CHECK(e.on_rank_advert(1, 0).empty());
  CHECK(*e.preferred_parent() == 2);
}

TEST_CASE("parent timer doubles to 128 ms then freezes") {
  NodeEngine e(5, config(Mode::Greedy));
  e.start();
  e.on_rank_advert(2, 0);
  auto out = e.on_timer(TimerId{TimerKind::Parent, 0});  // change seen: reset
  const auto first = armed(out, TimerKind::Parent);
  REQUIRE(first);
  CHECK(*first <= 64ms);
  out = e.on_timer(TimerId{TimerKind::Parent, 0});
  CHECK(armed(out, TimerKind::Parent) == std::min(*first * 2, Duration(128ms)));
  Duration last = *armed(out, TimerKind::Parent);
  while (last < 128ms) {
    out = e.on_timer(TimerId{TimerKind::Parent, 0});
    last = *armed(out, TimerKind::Parent);
  }
  CHECK(last == 128ms);
  out = e.on_timer(TimerId{TimerKind::Parent, 0});
  CHECK(has(out, NoticeKind::ParentDefined));
}

TEST_CASE("greedy root: three children get the worked-example ranges") {
  auto c = config(Mode::Greedy, true);
  c.root_range = AddressRange(0, 256);
  NodeEngine root(0, c);
  root.start();
  const auto acks = register_children(root, {1, 2, 3});
  CHECK(sent_payloads<DaoAck>(acks).size() == 3);
  CHECK(root.children().size() == 3);

  const auto out =
      fire_until(root, TimerKind::Children, [](const Commands& o) { return has(o, NoticeKind::ChildrenDefined); });
  const auto grants = dios(out);
  REQUIRE(grants.size() == 3);
  CHECK(grants[0] == std::pair<NodeId, Dio>{1, Dio{1, 79}});
  CHECK(grants[1] == std::pair<NodeId, Dio>{2, Dio{80, 79}});
  CHECK(grants[2] == std::pair<NodeId, Dio>{3, Dio{159, 79}});
  CHECK(*root.reserve() == AddressRange(238, 18));
  CHECK(*root.own_address() == 0);
  CHECK(root.routing_table().size() == 3);

  SUBCASE("a late child is served from the reserve") {
    const auto late = register_children(root, {4});
    const auto g = dios(late);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == std::pair<NodeId, Dio>{4, Dio{238, 17}});
    CHECK(*root.reserve() == AddressRange(255, 1));
  }
  SUBCASE("a duplicate registration is only acknowledged") {
    const auto dup = register_children(root, {2});
    CHECK(dios(dup).empty());
    CHECK(sent_payloads<DaoAck>(dup).size() == 1);
  }
  SUBCASE("routing follows the table") {
    CHECK(root.forward_down(100) == Forward{Forward::Kind::Child, 2});
    CHECK(root.forward_down(79) == Forward{Forward::Kind::Child, 1});
    CHECK(root.forward_down(240).kind == Forward::Kind::NoRoute);
    CHECK(root.forward_down(0).kind == Forward::Kind::Local);
    CHECK(root.forward_down(999).kind == Forward::Kind::NoRoute);
  }
}

TEST_CASE("greedy: children registered after the counter froze wait for the reserve") {
  NodeEngine e(5, config(Mode::Greedy));
  settle_parent(e, 2);
  register_children(e, {7});
  fire_until(e, TimerKind::Children, [](const Commands& o) { return has(o, NoticeKind::ChildrenDefined); });
  CHECK(dios(register_children(e, {9})).empty());

  const auto out = e.on_message(msg(2, 5, 50, Dio{1000, 100}));
  CHECK(has(out, NoticeKind::Addressed));
  const auto g = dios(out);
  REQUIRE(g.size() == 2);
  // 99 usable after the own address, 6 reserved: child 7 gets 93, the late
  // child 9 is carved from the remaining 6.
  CHECK(g[0] == std::pair<NodeId, Dio>{7, Dio{1001, 93}});
  CHECK(g[1].first == 9);
  CHECK(g[1].second.first_address == 1094);
}

TEST_CASE("DIO handling is idempotent, conflicts are reported") {
  NodeEngine e(5, config(Mode::Greedy));
  settle_parent(e, 2);
  fire_until(e, TimerKind::Children, [](const Commands& o) { return has(o, NoticeKind::ChildrenDefined); });
  auto out = e.on_message(msg(2, 5, 50, Dio{300, 40}));
  CHECK(has(out, NoticeKind::Addressed));
  CHECK(*e.own_address() == 300);
  CHECK(*e.assigned_range() == AddressRange(300, 40));
  CHECK(*e.reserve() == AddressRange(301, 39));

  out = e.on_message(msg(2, 5, 51, Dio{300, 40}));
  CHECK(sent_payloads<DioAck>(out).size() == 1);
  CHECK_FALSE(has(out, NoticeKind::Addressed));
  CHECK_FALSE(has(out, NoticeKind::RangeConflict));

  out = e.on_message(msg(2, 5, 52, Dio{500, 40}));
  CHECK(has(out, NoticeKind::RangeConflict));
  CHECK(*e.assigned_range() == AddressRange(300, 40));

  out = e.on_message(msg(2, 6, 53, Dio{500, 40}));
  CHECK(out.empty());
}

TEST_CASE("misaddressed DAO is flagged, not adopted") {
  NodeEngine e(5, config(Mode::Greedy));
  e.start();
  const auto out = e.on_message(msg(9, 4, 1, Dao{0}));
  CHECK(has(out, NoticeKind::StaleChild));
  CHECK(e.children().empty());
}

TEST_CASE("a reliable message is sent at most 1 + 3 times, then given up") {
  NodeEngine e(5, config(Mode::Greedy));
  const auto out = settle_parent(e, 2);
  const auto dao = sends(out).front();
  int transmissions = 1;
  for (int i = 0; i < 3; ++i) {
    const auto r = e.on_timer(TimerId{TimerKind::AckTimeout, dao.seq});
    const auto s = sends(r);
    REQUIRE(s.size() == 1);
    CHECK(s.front() == dao);
    CHECK(std::get<cmd::Send>(r.front()).retransmission);
    CHECK(armed(r, TimerKind::AckTimeout) == Duration(64ms));
    ++transmissions;
  }
  const auto last = e.on_timer(TimerId{TimerKind::AckTimeout, dao.seq});
  CHECK(sends(last).empty());
  CHECK(has(last, NoticeKind::GaveUp));
  CHECK(transmissions == 4);
  CHECK(e.pending_acks() == 0);
  CHECK(e.on_timer(TimerId{TimerKind::AckTimeout, dao.seq}).empty());
}

TEST_CASE("an acknowledgement cancels the retransmission") {
  NodeEngine e(5, config(Mode::Greedy));
  const auto dao = sends(settle_parent(e, 2)).front();
  const auto out = e.on_message(msg(2, 5, 77, DaoAck{dao.seq}));
  REQUIRE(out.size() == 1);
  CHECK(describe(out.front()) == "cancel ack#" + std::to_string(dao.seq));
  CHECK(e.pending_acks() == 0);
  CHECK(e.on_message(msg(2, 5, 78, DaoAck{dao.seq})).empty());
}

TEST_CASE("aggregate non-root reports its subtree once every child has reported") {
  NodeEngine e(5, config(Mode::Aggregate));
  settle_parent(e, 2);
  register_children(e, {10, 11});

  Commands all;
  for (int i = 0; i < 12; ++i) {
    auto out = e.on_timer(TimerId{TimerKind::LeafAggregation, 0});
    all.insert(all.end(), out.begin(), out.end());
  }
  auto daos = sent_payloads<Dao>(all);
  REQUIRE(daos.size() == 1);
  CHECK(daos.front().descendant_count == 0);  // registration only

  CHECK(sent_payloads<Dao>(e.on_message(msg(10, 5, 1, Dao{3}))).empty());
  const auto out = e.on_message(msg(11, 5, 2, Dao{5}));
  daos = sent_payloads<Dao>(out);
  REQUIRE(daos.size() == 1);
  CHECK(daos.front().descendant_count == 9);
  CHECK(e.subtree_size() == 9);

  const auto addressed = e.on_message(msg(2, 5, 60, Dio{100, 64}));
  CHECK(has(addressed, NoticeKind::Addressed));
  const auto g = dios(addressed);
  REQUIRE(g.size() == 2);
  // 63 after the own address, 4 reserved, 59 split 3:5.
  CHECK(g[0] == std::pair<NodeId, Dio>{10, Dio{101, 22}});
  CHECK(g[1] == std::pair<NodeId, Dio>{11, Dio{123, 37}});
  CHECK(e.on_timer(TimerId{TimerKind::LeafAggregation, 0}).empty());
}

TEST_CASE("aggregate leaf reports a subtree of one") {
  NodeEngine e(5, config(Mode::Aggregate));
  settle_parent(e, 2);
  Commands all;
  for (int i = 0; i < 12; ++i) {
    auto out = e.on_timer(TimerId{TimerKind::LeafAggregation, 0});
    all.insert(all.end(), out.begin(), out.end());
  }
  const auto daos = sent_payloads<Dao>(all);
  REQUIRE(daos.size() == 2);
  CHECK(daos[0].descendant_count == 0);
  CHECK(daos[1].descendant_count == 1);
}

TEST_CASE("aggregate root waits for every child's count, then splits by subtree size") {
  NodeEngine root(0, config(Mode::Aggregate, true));
  root.start();
  register_children(root, {1, 2});
  for (int i = 0; i < 20; ++i) {
    CHECK_FALSE(has(root.on_timer(TimerId{TimerKind::RootAggregation, 0}), NoticeKind::DescendantsDefined));
  }
  root.on_message(msg(1, 0, 10, Dao{4}));
  root.on_message(msg(2, 0, 11, Dao{2}));
  const auto out = fire_until(root, TimerKind::RootAggregation,
                              [](const Commands& o) { return has(o, NoticeKind::DescendantsDefined); });
  CHECK(root.subtree_size() == 7);
  const auto g = dios(out);
  REQUIRE(g.size() == 2);
  // 65535 - 4096 = 61439 usable, shares 40959.33 and 20479.67.
  CHECK(g[0] == std::pair<NodeId, Dio>{1, Dio{1, 40959}});
  CHECK(g[1] == std::pair<NodeId, Dio>{2, Dio{40960, 20480}});
  CHECK(*root.reserve() == AddressRange(61440, 4096));
}

TEST_CASE("root timer cap is 512 ms") {
  NodeEngine root(0, config(Mode::Aggregate, true));
  root.start();
  Duration last{};
  for (int i = 0; i < 10; ++i) {
    if (auto d = armed(root.on_timer(TimerId{TimerKind::RootAggregation, 0}), TimerKind::RootAggregation)) last = *d;
  }
  CHECK(last == 512ms);
}

TEST_CASE("forward_down without an address") {
  const RoutingTable empty;
  CHECK(forward_down(std::nullopt, std::nullopt, empty, 3).kind == Forward::Kind::Unaddressed);
  RoutingTable t;
  t.insert({3, 159, 237});
  t.insert({1, 1, 79});
  t.insert({2, 80, 158});
  CHECK(t.entries().front().child == 1);
  CHECK(t.lookup(158) == NodeId{2});
  CHECK_FALSE(t.lookup(238));
  t.insert({2, 80, 100});
  CHECK(t.size() == 3);
  CHECK_FALSE(t.lookup(120));
}

TEST_CASE("same seed, same command log") {
  auto run = [](std::uint64_t seed) {
    NodeEngine e(5, config(Mode::Aggregate, false, seed));
    std::vector<std::string> log;
    auto add = [&](const Commands& c) {
      for (auto& s : describe_all(c)) log.push_back(s);
    };
    add(e.start());
    add(e.on_rank_advert(2, 0));
    for (int i = 0; i < 10; ++i) add(e.on_timer(TimerId{TimerKind::Parent, 0}));
    for (int i = 0; i < 10; ++i) add(e.on_timer(TimerId{TimerKind::LeafAggregation, 0}));
    return log;
  };
  CHECK(run(3) == run(3));
  CHECK(run(3) != run(4));
}

TEST_CASE("zero multiplier is rejected") {
  auto c = config(Mode::Greedy);
  c.params.sp_child = 0;
  CHECK_THROWS_AS(NodeEngine(1, c), Error);
}
