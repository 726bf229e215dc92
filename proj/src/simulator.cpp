#include "mhcl/simulator.hpp"

#include <algorithm>
#include <iomanip>
#include <list>
#include <map>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "mhcl/error.hpp"
#include "mhcl/random.hpp"

namespace mhcl {

std::string_view to_string(SimMode mode) {
  switch (mode) {
    case SimMode::Greedy: return "greedy";
    case SimMode::Aggregate: return "aggregate";
    case SimMode::BaselineStoring: return "baseline";
  }
  return "?";
}

std::string_view to_string(TraceOutcome outcome) {
  switch (outcome) {
    case TraceOutcome::Delivered: return "DELIVERED";
    case TraceOutcome::DropTx: return "DROP_TX";
    case TraceOutcome::DropRx: return "DROP_RX";
  }
  return "?";
}

void SimConfig::validate() const {
  failure.validate();
  params.validate();
  if (!(collision_proxy_rate >= 0.0 && collision_proxy_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "collision proxy rate must lie in [0, 1]");
  }
  if (address_width == 0 || address_width > kMaxAddressWidth) {
    throw Error(ErrorCode::InvalidArgument, "address width must be in [1, 16]");
  }
  for (auto d : {start_jitter_max, link_delay, link_jitter, app_start, app_spread, count_window,
                 horizon, baseline_dao_delay, baseline_dao_period}) {
    if (d < Duration::zero()) throw Error(ErrorCode::InvalidArgument, "durations must be >= 0");
  }
  if (link_jitter > link_delay) {
    throw Error(ErrorCode::InvalidArgument, "link jitter cannot exceed the link delay");
  }
  if (baseline_dao_period <= Duration::zero()) {
    throw Error(ErrorCode::InvalidArgument, "baseline DAO period must be positive");
  }
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace) {
  for (const auto& r : trace) {
    const auto us = r.time.count();
    os << us / 1000 << '.' << std::setw(3) << std::setfill('0') << us % 1000 << std::setfill(' ')
       << ',' << r.src << ',' << r.dst << ',' << to_string(r.kind) << ',' << to_string(r.outcome)
       << ',' << to_hex(r.bytes) << '\n';
  }
}

namespace {

struct EvStart {
  NodeId node;
};
struct EvTimer {
  NodeId node;
  TimerId timer;
  std::uint64_t generation;
};
struct EvArrive {
  Message message;
};
struct EvRank {
  NodeId to;
  NodeId from;
  std::uint16_t hops;
};
struct EvJoined {
  NodeId to;
  NodeId from;
};
struct EvAppSend {
  NodeId node;
};
struct EvOwnDao {
  NodeId node;
  std::uint64_t generation;
};

using Event = std::variant<EvStart, EvTimer, EvArrive, EvRank, EvJoined, EvAppSend, EvOwnDao>;

struct Scheduled {
  Duration time;
  std::uint64_t order;
  Event event;
};

struct Later {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return a.time != b.time ? a.time > b.time : a.order > b.order;
  }
};

bool is_dio_family(MessageKind k) { return k == MessageKind::DioMhcl || k == MessageKind::DioAckMhcl; }
bool is_dao_family(MessageKind k) {
  return k == MessageKind::DaoMhcl || k == MessageKind::DaoAckMhcl || k == MessageKind::RplDao;
}

double ratio(std::uint64_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

/// Event queue, radio medium, loss injection, counters and application
/// bookkeeping shared by the MHCL and baseline runs.
class Medium {
 public:
  explicit Medium(const SimConfig& config)
      : config_(config), topo_(config.topology), rng_(derive_seed(config.seed, 0xA11CE)),
        started_(topo_.size(), false) {
    metrics_.mode = config.mode;
    metrics_.n = topo_.size();
  }

  void schedule(Duration at, Event event) { queue_.push({at, order_++, std::move(event)}); }
  Duration now() const { return now_; }
  const Topology& topology() const { return topo_; }
  Metrics& metrics() { return metrics_; }
  bool started(NodeId id) const { return started_[id]; }
  void mark_started(NodeId id) { started_[id] = true; }

  Duration link_delay() {
    if (config_.link_jitter == Duration::zero()) return std::max(config_.link_delay, Duration(1));
    std::uniform_int_distribution<std::int64_t> jitter(-config_.link_jitter.count(),
                                                       config_.link_jitter.count());
    return std::max(config_.link_delay + Duration(jitter(rng_)), Duration(1));
  }

  /// Unicast over one hop. Returns true when the destination will receive it.
  bool transmit(const Message& message, bool retransmission) {
    const auto kind = message.kind();
    auto outcome = TraceOutcome::Delivered;
    switch (sample_loss(config_.failure, rng_)) {
      case LossOutcome::DropAll: outcome = TraceOutcome::DropTx; break;
      case LossOutcome::DropDestOnly: outcome = TraceOutcome::DropRx; break;
      case LossOutcome::DeliverAll: break;
    }
    if (outcome == TraceOutcome::Delivered && config_.collision_proxy_rate > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      if (u(rng_) < config_.collision_proxy_rate) outcome = TraceOutcome::DropRx;
    }
    if (!topo_.adjacent(message.src, message.dst) || !started_[message.dst]) {
      outcome = TraceOutcome::DropRx;
    }

    if (now_ < config_.count_window) {
      if (is_dio_family(kind)) ++metrics_.dio_count;
      if (is_dao_family(kind)) ++metrics_.dao_count;
      if (retransmission) ++metrics_.control_retransmissions;
    }
    if (config_.record_trace) {
      metrics_.trace.push_back({now_, message.src, message.dst, kind, outcome, encode(message)});
    }
    if (outcome != TraceOutcome::Delivered) return false;
    schedule(now_ + link_delay(), EvArrive{message});
    return true;
  }

  void broadcast_rank(NodeId from, std::uint16_t hops) {
    for (auto v : topo_.neighbors(from)) {
      if (started_[v]) schedule(now_ + link_delay(), EvRank{v, from, hops});
    }
  }
  void unicast_rank(NodeId from, NodeId to, std::uint16_t hops) {
    if (started_[to]) schedule(now_ + link_delay(), EvRank{to, from, hops});
  }
  void announce_join(NodeId from) {
    for (auto v : topo_.neighbors(from)) {
      if (started_[v]) schedule(now_ + link_delay(), EvJoined{v, from});
    }
  }

  void schedule_starts() {
    std::uniform_int_distribution<std::int64_t> jitter(0, config_.start_jitter_max.count());
    for (NodeId v = 0; v < topo_.size(); ++v) schedule(Duration(jitter(rng_)), EvStart{v});
  }

  void schedule_app() {
    std::uniform_int_distribution<std::int64_t> spread(
        0, std::max<std::int64_t>(config_.app_spread.count() - 1, 0));
    for (NodeId v = 0; v < topo_.size(); ++v) {
      if (v == topo_.root()) continue;
      schedule(config_.app_start + Duration(spread(rng_)), EvAppSend{v});
      ++app_pending_;
    }
  }

  std::uint16_t next_app_seq() { return ++app_seq_; }

  // Application flow accounting.
  void app_launched() { --app_pending_; ++in_flight_; }
  void app_spawned() { ++in_flight_; }
  void app_resolved() { --in_flight_; }
  bool app_done() const { return app_pending_ == 0 && in_flight_ == 0; }

  /// Pops and dispatches events until the application phase resolves or the
  /// horizon passes. Returns false on timeout.
  template <class Handler>
  bool loop(Handler&& handle) {
    while (!queue_.empty()) {
      if (app_done()) return true;
      auto next = queue_.top();
      if (next.time > config_.horizon) return false;
      queue_.pop();
      now_ = next.time;
      ++metrics_.events;
      std::visit(handle, next.event);
    }
    return app_done();
  }

 private:
  const SimConfig& config_;
  const Topology& topo_;
  std::mt19937_64 rng_;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
  std::uint64_t order_ = 0;
  Duration now_{0};
  std::vector<bool> started_;
  Metrics metrics_;
  std::uint16_t app_seq_ = 0;
  std::size_t app_pending_ = 0;
  std::size_t in_flight_ = 0;
};

std::vector<unsigned> tree_depths(const std::vector<std::optional<NodeId>>& parent, NodeId root) {
  const auto n = parent.size();
  std::vector<unsigned> depth(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    unsigned hops = 0;
    auto cur = v;
    while (cur != root && parent[cur] && hops <= n) {
      cur = *parent[cur];
      ++hops;
    }
    depth[v] = cur == root ? hops : 0;
  }
  return depth;
}

class MhclSimulation {
 public:
  explicit MhclSimulation(const SimConfig& config) : config_(config), medium_(config) {
    const auto& topo = config.topology;
    NodeConfig base;
    base.mode = config.mode == SimMode::Aggregate ? Mode::Aggregate : Mode::Greedy;
    base.params = config.params;
    base.reserve = config.reserve;
    base.root_range = AddressRange::full(config.address_width);
    base.dio_retransmissions = config.dio_retransmissions;
    base.dao_retransmissions = config.dao_retransmissions;
    engines_.reserve(topo.size());
    for (NodeId v = 0; v < topo.size(); ++v) {
      auto nc = base;
      nc.is_root = v == topo.root();
      nc.seed = derive_seed(config.seed, 1000 + v);
      engines_.emplace_back(v, nc);
    }
    generations_.resize(topo.size());
    addressed_at_.resize(topo.size());
  }

  Metrics run() {
    medium_.schedule_starts();
    medium_.schedule_app();
    const bool finished = medium_.loop([this](const auto& ev) { handle(ev); });
    return collect(!finished);
  }

 private:
  void handle(const EvStart& ev) {
    medium_.mark_started(ev.node);
    apply(ev.node, engines_[ev.node].start());
    if (ev.node == config_.topology.root()) addressed_at_[ev.node] = medium_.now();
  }
  void handle(const EvTimer& ev) {
    auto& gens = generations_[ev.node];
    auto it = gens.find(ev.timer);
    if (it == gens.end() || it->second != ev.generation) return;
    gens.erase(it);
    apply(ev.node, engines_[ev.node].on_timer(ev.timer));
  }
  void handle(const EvRank& ev) { apply(ev.to, engines_[ev.to].on_rank_advert(ev.from, ev.hops)); }
  void handle(const EvJoined& ev) { apply(ev.to, engines_[ev.to].on_neighbor_joined(ev.from)); }
  void handle(const EvOwnDao&) {}

  void handle(const EvAppSend& ev) {
    medium_.app_launched();
    auto& metrics = medium_.metrics();
    ++metrics.up.sent;
    const auto& engine = engines_[ev.node];
    // An unaddressed originator can only give the root's own address, which
    // the root reads as "no reply possible".
    const auto reply_to = engine.own_address().value_or(*engines_[root()].own_address());
    send_up(ev.node, AppData{static_cast<std::uint16_t>(reply_to), Direction::Up});
  }

  void handle(const EvArrive& ev) {
    const auto& m = ev.message;
    if (const auto* app = std::get_if<AppData>(&m.payload)) {
      if (app->direction == Direction::Up) {
        on_app_up(m.dst, *app);
      } else {
        route_down(m.dst, *app);
      }
      return;
    }
    apply(m.dst, engines_[m.dst].on_message(m));
  }

  NodeId root() const { return config_.topology.root(); }

  void send_up(NodeId at, const AppData& app) {
    auto& up = medium_.metrics().up;
    const auto next = engines_[at].forward_up();
    if (!next) {
      ++up.dropped_noroute;
      medium_.app_resolved();
      return;
    }
    if (!medium_.transmit(Message{at, *next, medium_.next_app_seq(), app}, false)) {
      ++up.dropped_loss;
      medium_.app_resolved();
    }
  }

  void on_app_up(NodeId at, const AppData& app) {
    if (at != root()) {
      send_up(at, app);
      return;
    }
    auto& metrics = medium_.metrics();
    ++metrics.up.delivered;
    medium_.app_resolved();

    ++metrics.down.sent;
    medium_.app_spawned();
    if (app.address == *engines_[root()].own_address()) {
      ++metrics.down.dropped_unaddressed;
      medium_.app_resolved();
      return;
    }
    route_down(root(), AppData{app.address, Direction::Down});
  }

  void route_down(NodeId at, const AppData& app) {
    auto& down = medium_.metrics().down;
    const auto decision = engines_[at].forward_down(app.address);
    switch (decision.kind) {
      case Forward::Kind::Local:
        ++down.delivered;
        medium_.app_resolved();
        return;
      case Forward::Kind::NoRoute:
        ++down.dropped_noroute;
        medium_.app_resolved();
        return;
      case Forward::Kind::Unaddressed:
        ++down.dropped_unaddressed;
        medium_.app_resolved();
        return;
      case Forward::Kind::Child:
        break;
    }
    if (!medium_.transmit(Message{at, decision.next, medium_.next_app_seq(), app}, false)) {
      ++down.dropped_loss;
      medium_.app_resolved();
    }
  }

  void apply(NodeId node, const Commands& commands) {
    for (const auto& c : commands) {
      std::visit([&](const auto& command) { execute(node, command); }, c);
    }
  }

  void execute(NodeId, const cmd::Send& c) { medium_.transmit(c.message, c.retransmission); }
  void execute(NodeId node, const cmd::ArmTimer& c) {
    const auto gen = ++generation_counter_;
    generations_[node][c.timer] = gen;
    medium_.schedule(medium_.now() + c.delay, EvTimer{node, c.timer, gen});
  }
  void execute(NodeId node, const cmd::CancelTimer& c) { generations_[node].erase(c.timer); }
  void execute(NodeId node, const cmd::AdvertiseRank& c) {
    if (c.to) {
      medium_.unicast_rank(node, *c.to, c.hops);
    } else {
      medium_.broadcast_rank(node, c.hops);
    }
  }
  void execute(NodeId node, const cmd::Solicit&) { medium_.announce_join(node); }
  void execute(NodeId node, const cmd::Notice& c) {
    switch (c.kind) {
      case NoticeKind::Addressed:
        addressed_at_[node] = medium_.now();
        break;
      case NoticeKind::AllocationFailure:
        ++medium_.metrics().allocation_failures;
        break;
      case NoticeKind::ChildrenDefined:
      case NoticeKind::DescendantsDefined:
        if (node == root()) root_settled_ = medium_.now();
        break;
      default:
        break;
    }
  }

  Metrics collect(bool timed_out) {
    auto metrics = std::move(medium_.metrics());
    const auto n = engines_.size();
    std::vector<std::optional<NodeId>> parents(n);
    for (NodeId v = 0; v < n; ++v) parents[v] = engines_[v].forward_up();
    const auto depths = tree_depths(parents, root());

    std::size_t addressed = 0;
    Duration setup{0};
    metrics.nodes.reserve(n);
    for (NodeId v = 0; v < n; ++v) {
      const auto& e = engines_[v];
      NodeReport r;
      r.id = v;
      r.joined = e.is_root() || e.parent_defined();
      r.parent = parents[v];
      r.depth = depths[v];
      r.own_address = e.own_address();
      r.range = e.assigned_range();
      r.addressed_at = addressed_at_[v];
      r.subtree_count = e.subtree_size();
      r.children = e.children().size();
      r.routes = e.routing_table().entries();
      if (v != root() && r.range) {
        ++addressed;
        setup = std::max(setup, *addressed_at_[v]);
      }
      if (r.joined) metrics.dag_depth = std::max(metrics.dag_depth, r.depth);
      metrics.nodes.push_back(std::move(r));
    }
    if (n == 1) setup = root_settled_.value_or(Duration{0});

    metrics.setup_time = setup;
    metrics.addressing_rate = ratio(addressed, n - 1);
    metrics.up_rate = ratio(metrics.up.delivered, n - 1);
    metrics.down_rate = ratio(metrics.down.delivered, n - 1);
    metrics.timed_out = timed_out;
    const bool lossless = config_.failure.kind == FailureKind::None || config_.failure.rate == 0.0;
    metrics.stalled = lossless && config_.collision_proxy_rate == 0.0 && addressed + 1 < n;
    return metrics;
  }

  const SimConfig& config_;
  Medium medium_;
  std::vector<NodeEngine> engines_;
  std::vector<std::map<TimerId, std::uint64_t>> generations_;
  std::uint64_t generation_counter_ = 0;
  std::vector<std::optional<Duration>> addressed_at_;
  std::optional<Duration> root_settled_;
};

/// Bounded storing-mode route table keyed by target address.
class BoundedRouteTable {
 public:
  BoundedRouteTable(std::size_t capacity, TablePolicy policy) : capacity_(capacity), policy_(policy) {}

  /// Returns true if the route is present after the call.
  bool store(HostAddress target, NodeId via) {
    if (auto it = index_.find(target); it != index_.end()) {
      it->second->second = via;
      touch(it->second);
      return true;
    }
    if (order_.size() >= capacity_) {
      if (policy_ == TablePolicy::FifoReject || capacity_ == 0) return false;
      index_.erase(order_.front().first);
      order_.pop_front();
    }
    order_.emplace_back(target, via);
    index_[target] = std::prev(order_.end());
    return true;
  }

  std::optional<NodeId> lookup(HostAddress target) {
    auto it = index_.find(target);
    if (it == index_.end()) return std::nullopt;
    touch(it->second);
    return it->second->second;
  }

  std::size_t size() const { return order_.size(); }

 private:
  using Entry = std::pair<HostAddress, NodeId>;

  void touch(std::list<Entry>::iterator it) {
    if (policy_ == TablePolicy::Lru) order_.splice(order_.end(), order_, it);
  }

  std::size_t capacity_;
  TablePolicy policy_;
  std::list<Entry> order_;
  std::unordered_map<HostAddress, std::list<Entry>::iterator> index_;
};

class BaselineSimulation {
 public:
  explicit BaselineSimulation(const SimConfig& config) : config_(config), medium_(config) {
    const auto n = config.topology.size();
    nodes_.reserve(n);
    for (NodeId v = 0; v < n; ++v) {
      nodes_.push_back(Node{{}, BoundedRouteTable(config.baseline_table_capacity, config.baseline_policy)});
    }
  }

  Metrics run() {
    medium_.schedule_starts();
    medium_.schedule_app();
    const bool finished = medium_.loop([this](const auto& ev) { handle(ev); });
    return collect(!finished);
  }

 private:
  struct Node {
    HopCountParentSet parents;
    BoundedRouteTable routes;
    std::uint64_t dao_generation = 0;
    std::uint16_t seq = 0;
  };

  NodeId root() const { return config_.topology.root(); }
  bool is_root(NodeId v) const { return v == root(); }

  std::optional<std::uint16_t> rank(NodeId v) const {
    if (is_root(v)) return 0;
    return nodes_[v].parents.rank();
  }

  void handle(const EvStart& ev) {
    medium_.mark_started(ev.node);
    medium_.announce_join(ev.node);
    if (is_root(ev.node)) medium_.broadcast_rank(ev.node, 0);
  }
  void handle(const EvTimer&) {}
  void handle(const EvJoined& ev) {
    if (auto r = rank(ev.to)) medium_.unicast_rank(ev.to, ev.from, *r);
  }
  void handle(const EvRank& ev) {
    if (is_root(ev.to)) return;
    auto& node = nodes_[ev.to];
    const auto before = node.parents.rank();
    if (node.parents.observe(ev.from, ev.hops)) {
      // New preferred parent: (re)advertise our own target after the DAO delay.
      const auto gen = ++node.dao_generation;
      medium_.schedule(medium_.now() + config_.baseline_dao_delay, EvOwnDao{ev.to, gen});
    }
    if (node.parents.rank() != before) medium_.broadcast_rank(ev.to, *node.parents.rank());
  }
  void handle(const EvOwnDao& ev) {
    auto& node = nodes_[ev.node];
    if (ev.generation != node.dao_generation) return;
    send_dao(ev.node, baseline_address(ev.node));
    medium_.schedule(medium_.now() + config_.baseline_dao_period, EvOwnDao{ev.node, ev.generation});
  }

  void send_dao(NodeId from, HostAddress target) {
    const auto parent = nodes_[from].parents.preferred();
    if (!parent) return;
    medium_.transmit(Message{from, *parent, ++nodes_[from].seq, RplDao{static_cast<std::uint16_t>(target)}},
                     false);
  }

  void handle(const EvAppSend& ev) {
    medium_.app_launched();
    ++medium_.metrics().up.sent;
    send_up(ev.node, AppData{static_cast<std::uint16_t>(baseline_address(ev.node)), Direction::Up});
  }

  void handle(const EvArrive& ev) {
    const auto& m = ev.message;
    if (const auto* dao = std::get_if<RplDao>(&m.payload)) {
      on_dao(m.dst, m.src, dao->target);
      return;
    }
    if (const auto* app = std::get_if<AppData>(&m.payload)) {
      if (app->direction == Direction::Up) {
        on_app_up(m.dst, *app);
      } else {
        route_down(m.dst, *app);
      }
    }
  }

  void on_dao(NodeId at, NodeId from_child, HostAddress target) {
    auto& table = nodes_[at].routes;
    const auto before = table.size();
    if (!table.store(target, from_child)) return;
    if (is_root(at)) {
      if (table.size() > before) root_last_route_ = medium_.now();
      return;
    }
    send_dao(at, target);
  }

  void send_up(NodeId at, const AppData& app) {
    auto& up = medium_.metrics().up;
    const auto next = is_root(at) ? std::nullopt : nodes_[at].parents.preferred();
    if (!next) {
      ++up.dropped_noroute;
      medium_.app_resolved();
      return;
    }
    if (!medium_.transmit(Message{at, *next, medium_.next_app_seq(), app}, false)) {
      ++up.dropped_loss;
      medium_.app_resolved();
    }
  }

  void on_app_up(NodeId at, const AppData& app) {
    if (!is_root(at)) {
      send_up(at, app);
      return;
    }
    auto& metrics = medium_.metrics();
    ++metrics.up.delivered;
    medium_.app_resolved();
    ++metrics.down.sent;
    medium_.app_spawned();
    route_down(at, AppData{app.address, Direction::Down});
  }

  void route_down(NodeId at, const AppData& app) {
    auto& down = medium_.metrics().down;
    if (app.address == baseline_address(at)) {
      ++down.delivered;
      medium_.app_resolved();
      return;
    }
    auto next = nodes_[at].routes.lookup(app.address);
    const auto dest = static_cast<NodeId>(app.address);
    if (!next && app.address < nodes_.size() && config_.topology.adjacent(at, dest)) next = dest;
    if (!next) {
      ++down.dropped_noroute;
      medium_.app_resolved();
      return;
    }
    if (!medium_.transmit(Message{at, *next, medium_.next_app_seq(), app}, false)) {
      ++down.dropped_loss;
      medium_.app_resolved();
    }
  }

  Metrics collect(bool timed_out) {
    auto metrics = std::move(medium_.metrics());
    const auto n = nodes_.size();
    std::vector<std::optional<NodeId>> parents(n);
    for (NodeId v = 0; v < n; ++v) {
      if (!is_root(v)) parents[v] = nodes_[v].parents.preferred();
    }
    const auto depths = tree_depths(parents, root());
    std::size_t joined = 0;
    for (NodeId v = 0; v < n; ++v) {
      NodeReport r;
      r.id = v;
      r.joined = is_root(v) || parents[v].has_value();
      r.parent = parents[v];
      r.depth = depths[v];
      r.own_address = baseline_address(v);
      r.baseline_routes = nodes_[v].routes.size();
      if (!is_root(v) && r.joined) ++joined;
      if (r.joined) metrics.dag_depth = std::max(metrics.dag_depth, r.depth);
      metrics.nodes.push_back(std::move(r));
    }
    metrics.setup_time = root_last_route_;
    metrics.addressing_rate = ratio(joined, n - 1);
    metrics.up_rate = ratio(metrics.up.delivered, n - 1);
    metrics.down_rate = ratio(metrics.down.delivered, n - 1);
    metrics.timed_out = timed_out;
    return metrics;
  }

  const SimConfig& config_;
  Medium medium_;
  std::vector<Node> nodes_;
  Duration root_last_route_{0};
};

}  // namespace

Metrics run(const SimConfig& config) {
  config.validate();
  if (config.mode == SimMode::BaselineStoring) return run_baseline_storing(config);
  return MhclSimulation(config).run();
}

Metrics run_baseline_storing(const SimConfig& config) {
  config.validate();
  if (config.mode != SimMode::BaselineStoring) {
    throw Error(ErrorCode::InvalidArgument, "run_baseline_storing needs mode = baseline");
  }
  return BaselineSimulation(config).run();
}

}  // namespace mhcl
