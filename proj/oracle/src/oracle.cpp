#include "mhcl/oracle.hpp"

#include <algorithm>
#include <boost/rational.hpp>
#include <deque>
#include <set>
#include <sstream>

namespace mhcl::oracle {

namespace {

using Rational = boost::rational<std::int64_t>;

std::map<NodeId, std::vector<NodeId>> children_of(const ParentMap& parents) {
  std::map<NodeId, std::vector<NodeId>> kids;
  for (const auto& [child, parent] : parents) kids[parent].push_back(child);
  for (auto& [_, list] : kids) std::sort(list.begin(), list.end());
  return kids;
}

[[noreturn]] void exhausted(NodeId node, const AddressRange& range, std::size_t k) {
  std::ostringstream os;
  os << "node " << node << ": range " << range.to_string() << " cannot give " << k
     << " children one address each";
  throw PlanExhausted(node, os.str());
}

std::int64_t usable_of(const AddressRange& range, const ReserveFraction& r) {
  const Rational held = Rational(range.length()) * Rational(r.numerator(), r.denominator());
  return static_cast<std::int64_t>(range.length()) - 1 - boost::rational_cast<std::int64_t>(held);
}

std::vector<std::int64_t> greedy_sizes(std::int64_t usable, std::size_t k) {
  return std::vector<std::int64_t>(k, k == 0 ? 0 : usable / static_cast<std::int64_t>(k));
}

// Largest remainder over exact rational quotas.
std::vector<std::int64_t> proportional_sizes(std::int64_t pool, const std::vector<std::int64_t>& weights) {
  std::int64_t total = 0;
  for (auto w : weights) total += w;
  std::vector<std::int64_t> sizes;
  std::vector<Rational> fractions;
  std::int64_t given = 0;
  for (auto w : weights) {
    const Rational quota(pool * w, total);
    const auto whole = quota.numerator() / quota.denominator();
    sizes.push_back(whole);
    fractions.push_back(quota - whole);
    given += whole;
  }
  auto leftover = pool - given;

  std::set<Rational, std::greater<>> distinct(fractions.begin(), fractions.end());
  for (const auto& level : distinct) {
    if (level.numerator() == 0) break;
    const auto members = std::count(fractions.begin(), fractions.end(), level);
    if (members > leftover) break;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (fractions[i] == level) ++sizes[i];
    }
    leftover -= members;
  }
  return sizes;
}

std::vector<std::int64_t> aggregate_sizes(std::int64_t usable, const std::vector<std::int64_t>& weights) {
  auto sizes = proportional_sizes(usable, weights);
  if (std::find(sizes.begin(), sizes.end(), 0) == sizes.end()) return sizes;
  const auto k = static_cast<std::int64_t>(weights.size());
  sizes = proportional_sizes(usable - k, weights);
  for (auto& s : sizes) ++s;
  return sizes;
}

}  // namespace

void check_parent_map(const ParentMap& parents, NodeId root) {
  if (parents.count(root) != 0) throw Error(ErrorCode::InvalidArgument, "root has a parent");
  for (const auto& [start, _] : parents) {
    std::set<NodeId> seen{start};
    auto cur = start;
    while (cur != root) {
      auto it = parents.find(cur);
      if (it == parents.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    "node " + std::to_string(start) + " does not reach the root");
      }
      cur = it->second;
      if (!seen.insert(cur).second) {
        throw Error(ErrorCode::InvalidArgument, "cycle through node " + std::to_string(cur));
      }
    }
  }
}

std::map<NodeId, std::uint32_t> oracle_subtree_sizes(const ParentMap& parents, NodeId root) {
  check_parent_map(parents, root);
  std::map<NodeId, std::uint32_t> sizes{{root, 1}};
  for (const auto& [child, _] : parents) sizes[child] = 1;
  // Every node adds one to each of its ancestors.
  for (const auto& [child, parent] : parents) {
    auto cur = parent;
    while (true) {
      ++sizes[cur];
      if (cur == root) break;
      cur = parents.at(cur);
    }
  }
  return sizes;
}

Plan oracle_plan(const ParentMap& parents, NodeId root, const AddressRange& root_range, Mode mode,
                 const ReserveFraction& reserve) {
  const auto sizes = oracle_subtree_sizes(parents, root);
  const auto kids = children_of(parents);

  Plan plan;
  std::deque<std::pair<NodeId, AddressRange>> todo{{root, root_range}};
  while (!todo.empty()) {
    const auto [node, range] = todo.front();
    todo.pop_front();
    if (range.empty()) exhausted(node, range, 0);
    plan[node] = {range.start(), range};

    auto it = kids.find(node);
    if (it == kids.end()) continue;
    const auto& list = it->second;
    const auto usable = usable_of(range, reserve);
    if (usable < static_cast<std::int64_t>(list.size())) exhausted(node, range, list.size());

    std::vector<std::int64_t> lengths;
    if (mode == Mode::Greedy) {
      lengths = greedy_sizes(usable, list.size());
    } else {
      std::vector<std::int64_t> weights;
      for (auto c : list) weights.push_back(sizes.at(c));
      lengths = aggregate_sizes(usable, weights);
    }
    HostAddress cursor = range.start() + 1;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto len = static_cast<std::uint32_t>(lengths[i]);
      if (len == 0) exhausted(node, range, list.size());
      todo.emplace_back(list[i], AddressRange(cursor, len));
      cursor += len;
    }
  }
  return plan;
}

std::vector<NodeId> oracle_route(const Plan& plan, const ParentMap& parents, NodeId root,
                                 HostAddress dest) {
  const auto kids = children_of(parents);
  std::vector<NodeId> path{root};
  auto cur = root;
  while (true) {
    const auto& here = plan.at(cur);
    if (here.own == dest) return path;
    if (!here.range.contains(dest)) break;
    std::optional<NodeId> next;
    if (auto it = kids.find(cur); it != kids.end()) {
      for (auto c : it->second) {
        auto p = plan.find(c);
        if (p != plan.end() && p->second.range.contains(dest)) {
          if (next) throw Error(ErrorCode::InvalidArgument, "overlapping child ranges");
          next = c;
        }
      }
    }
    if (!next) break;
    cur = *next;
    path.push_back(cur);
  }
  throw Error(ErrorCode::NoSuchAddress, "address " + std::to_string(dest) + " is not allocated");
}

ParentMap bfs_parent_map(const Topology& topology) {
  const auto dist = topology.hop_distances();
  ParentMap parents;
  for (NodeId v = 0; v < topology.size(); ++v) {
    if (v == topology.root() || dist[v] < 0) continue;
    std::optional<NodeId> best;
    for (auto u : topology.neighbors(v)) {
      if (dist[u] == dist[v] - 1 && (!best || u < *best)) best = u;
    }
    parents[v] = *best;
  }
  return parents;
}

ParentMap parent_map_of(const Metrics& metrics) {
  ParentMap parents;
  for (const auto& r : metrics.nodes) {
    if (r.joined && r.parent) parents[r.id] = *r.parent;
  }
  return parents;
}

Plan plan_of(const Metrics& metrics) {
  Plan plan;
  for (const auto& r : metrics.nodes) {
    if (r.range && r.own_address) plan[r.id] = {*r.own_address, *r.range};
  }
  return plan;
}

std::vector<NodeId> walk_down(const Metrics& metrics, NodeId root, HostAddress dest) {
  std::vector<NodeId> path{root};
  auto cur = root;
  for (std::size_t hops = 0; hops <= metrics.nodes.size(); ++hops) {
    const auto& r = metrics.nodes.at(cur);
    RoutingTable table;
    for (const auto& e : r.routes) table.insert(e);
    const auto decision = forward_down(r.own_address, r.range, table, dest);
    if (decision.kind != Forward::Kind::Child) return path;
    cur = decision.next;
    path.push_back(cur);
  }
  return path;
}

std::vector<std::string> validate_run(const SimConfig& config, const Metrics& m) {
  std::vector<std::string> bad;
  auto fail = [&](std::string why) { bad.push_back(std::move(why)); };
  const auto n = config.topology.size();
  const auto root = config.topology.root();

  for (double rate : {m.addressing_rate, m.up_rate, m.down_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) fail("rate outside [0, 1]");
  }
  if (!m.timed_out) {
    if (m.up.sent != n - 1) fail("up messages sent != n - 1");
    if (m.up.resolved() != m.up.sent) fail("up messages not conserved");
    if (m.down.resolved() != m.down.sent) fail("down messages not conserved");
    if (m.down.sent != m.up.delivered) fail("root did not answer every delivered up message");
  }

  const auto parents = parent_map_of(m);
  try {
    check_parent_map(parents, root);
  } catch (const Error& e) {
    fail(std::string("tree: ") + e.what());
    return bad;
  }

  const bool lossless = (config.failure.kind == FailureKind::None || config.failure.rate == 0.0) &&
                        config.collision_proxy_rate == 0.0;
  if (lossless && m.stalled) fail("zero-loss run stalled with unaddressed nodes");
  if (config.mode == SimMode::BaselineStoring) return bad;

  // Own addresses unique, ranges nested along the tree and disjoint otherwise.
  const auto plan = plan_of(m);
  std::set<HostAddress> owns;
  for (const auto& [node, entry] : plan) {
    if (!owns.insert(entry.own).second) fail("duplicate own address " + std::to_string(entry.own));
    if (entry.own != entry.range.start()) fail("own address is not range start at node " + std::to_string(node));
    if (node != root) {
      auto p = parents.find(node);
      if (p == parents.end() || plan.count(p->second) == 0 ||
          !plan.at(p->second).range.contains(entry.range)) {
        fail("range of node " + std::to_string(node) + " not inside its parent's");
      }
    }
  }
  for (const auto& [a, ea] : plan) {
    for (const auto& [b, eb] : plan) {
      if (a >= b) continue;
      const bool disjoint = ea.range.end() <= eb.range.start() || eb.range.end() <= ea.range.start();
      if (!disjoint && !ea.range.contains(eb.range) && !eb.range.contains(ea.range)) {
        fail("ranges of " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
      }
    }
  }

  // Every addressed node is reached by the run's own tables along its tree path.
  for (const auto& [node, entry] : plan) {
    const auto path = walk_down(m, root, entry.own);
    if (path.back() != node || path.size() != m.nodes.at(node).depth + 1) {
      fail("downward walk to node " + std::to_string(node) + " misses");
      continue;
    }
    try {
      if (oracle_route(plan, parents, root, entry.own) != path) {
        fail("downward walk to node " + std::to_string(node) + " differs from the containment route");
      }
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  if (lossless && !m.timed_out) {
    const std::uint64_t control = m.dio_count + m.dao_count - m.control_retransmissions;
    const std::uint64_t bound = (config.mode == SimMode::Aggregate ? 6u : 4u) * (n - 1);
    if (control > bound) {
      fail("control messages " + std::to_string(control) + " exceed " + std::to_string(bound));
    }
    if (m.addressing_rate < 1.0) fail("zero-loss run left nodes unaddressed");
    const auto mode = config.mode == SimMode::Aggregate ? Mode::Aggregate : Mode::Greedy;
    try {
      const auto expected = oracle_plan(parents, root, AddressRange::full(config.address_width), mode,
                                        config.reserve);
      if (expected != plan) fail("address plan differs from the oracle plan");
    } catch (const PlanExhausted& e) {
      fail(std::string("oracle plan: ") + e.what());
    }
    if (config.mode == SimMode::Aggregate && parents.size() + 1 == n) {
      if (m.nodes.at(root).subtree_count != n) fail("root count != subtree size");
    }
  }
  return bad;
}

}  // namespace mhcl::oracle
