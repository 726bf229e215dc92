#include "mhcl/node_engine.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "mhcl/error.hpp"

namespace mhcl {

std::string_view to_string(Mode mode) {
  return mode == Mode::Greedy ? "greedy" : "aggregate";
}

std::string_view to_string(NoticeKind kind) {
  switch (kind) {
    case NoticeKind::ParentDefined: return "ParentDefined";
    case NoticeKind::ChildrenDefined: return "ChildrenDefined";
    case NoticeKind::DescendantsDefined: return "DescendantsDefined";
    case NoticeKind::Addressed: return "Addressed";
    case NoticeKind::AllocationFailure: return "AllocationFailure";
    case NoticeKind::GaveUp: return "GaveUp";
    case NoticeKind::RangeConflict: return "RangeConflict";
    case NoticeKind::StaleChild: return "StaleChild";
  }
  return "Unknown";
}

namespace {

std::string_view timer_name(TimerKind kind) {
  switch (kind) {
    case TimerKind::Parent: return "parent";
    case TimerKind::Children: return "children";
    case TimerKind::LeafAggregation: return "leaf-agg";
    case TimerKind::RootAggregation: return "root-agg";
    case TimerKind::AckTimeout: return "ack";
  }
  return "?";
}

std::string describe_payload(const Message& m) {
  std::ostringstream os;
  os << to_string(m.kind()) << ' ' << m.src << "->" << m.dst << " seq=" << m.seq;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Dio>) {
          os << " first=" << p.first_address << " size=" << p.partition_size;
        } else if constexpr (std::is_same_v<T, Dao>) {
          os << " count=" << p.descendant_count;
        } else if constexpr (std::is_same_v<T, DioAck> || std::is_same_v<T, DaoAck>) {
          os << " acked=" << p.acked_seq;
        } else if constexpr (std::is_same_v<T, AppData>) {
          os << " addr=" << p.address << (p.direction == Direction::Up ? " up" : " down");
        } else {
          os << " target=" << p.target;
        }
      },
      m.payload);
  return os.str();
}

}  // namespace

std::string describe(const Command& command) {
  std::ostringstream os;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cmd::Send>) {
          os << (c.retransmission ? "resend " : "send ") << describe_payload(c.message);
        } else if constexpr (std::is_same_v<T, cmd::ArmTimer>) {
          os << "arm " << timer_name(c.timer.kind);
          if (c.timer.kind == TimerKind::AckTimeout) os << '#' << c.timer.seq;
          os << ' ' << c.delay.count() << "us";
        } else if constexpr (std::is_same_v<T, cmd::CancelTimer>) {
          os << "cancel " << timer_name(c.timer.kind);
          if (c.timer.kind == TimerKind::AckTimeout) os << '#' << c.timer.seq;
        } else if constexpr (std::is_same_v<T, cmd::AdvertiseRank>) {
          os << "advertise hops=" << c.hops;
          if (c.to) os << " to=" << *c.to;
        } else if constexpr (std::is_same_v<T, cmd::Solicit>) {
          os << "solicit";
        } else {
          os << "notice " << to_string(c.kind) << ' ' << c.peer;
        }
      },
      command);
  return os.str();
}

void RoutingTable::insert(const RouteEntry& entry) {
  std::erase_if(entries_, [&](const RouteEntry& e) { return e.child == entry.child; });
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry,
                              [](const RouteEntry& a, const RouteEntry& b) {
                                return a.final_address < b.final_address;
                              });
  entries_.insert(pos, entry);
}

std::optional<NodeId> RoutingTable::lookup(HostAddress dest) const {
  std::size_t i = 0;
  while (i < entries_.size() && dest > entries_[i].final_address) ++i;
  if (i == entries_.size() || dest < entries_[i].first) return std::nullopt;
  return entries_[i].child;
}

Forward forward_down(const std::optional<HostAddress>& own, const std::optional<AddressRange>& range,
                     const RoutingTable& table, HostAddress dest) {
  if (!own || !range) return {Forward::Kind::Unaddressed};
  if (dest == *own) return {Forward::Kind::Local, 0};
  if (!range->contains(dest)) return {Forward::Kind::NoRoute};
  if (auto child = table.lookup(dest)) return {Forward::Kind::Child, *child};
  return {Forward::Kind::NoRoute};
}

NodeEngine::NodeEngine(NodeId id, const NodeConfig& config)
    : id_(id),
      config_(config),
      rng_(config.seed),
      parent_timer_(config.params.base_interval(), config.params.sp_child),
      children_timer_(config.params.base_interval(), config.params.sp_parent),
      leaf_timer_(config.params.base_interval(), config.params.sp_leaf),
      root_timer_(config.params.base_interval(), config.params.sp_root) {
  config_.params.validate();
}

Commands NodeEngine::start() {
  Commands out;
  if (started_) return out;
  started_ = true;
  out.emplace_back(cmd::Solicit{});

  if (is_root()) {
    parent_defined_ = true;
    frozen_rank_ = 0;
    range_ = config_.root_range;
    own_ = config_.root_range.start();
    out.emplace_back(cmd::AdvertiseRank{std::nullopt, 0});
    if (mode() == Mode::Greedy) {
      arm(TimerKind::Children, children_timer_.reset(rng_), out);
    } else {
      arm(TimerKind::RootAggregation, root_timer_.reset(rng_), out);
    }
    return out;
  }

  arm(TimerKind::Parent, parent_timer_.reset(rng_), out);
  if (mode() == Mode::Aggregate) arm(TimerKind::LeafAggregation, leaf_timer_.reset(rng_), out);
  return out;
}

Commands NodeEngine::on_timer(const TimerId& timer) {
  Commands out;
  if (!started_) return out;
  switch (timer.kind) {
    case TimerKind::Parent:
      if (!is_root() && !parent_defined_) on_parent_timer(out);
      break;
    case TimerKind::Children:
      if (mode() == Mode::Greedy && !children_defined_) on_children_timer(out);
      break;
    case TimerKind::LeafAggregation:
      if (mode() == Mode::Aggregate && !is_root() && !range_) on_leaf_aggregation_timer(out);
      break;
    case TimerKind::RootAggregation:
      if (mode() == Mode::Aggregate && is_root() && !descendants_defined_) {
        on_root_aggregation_timer(out);
      }
      break;
    case TimerKind::AckTimeout:
      on_ack_timeout(timer.seq, out);
      break;
  }
  return out;
}

Commands NodeEngine::on_message(const Message& message) {
  Commands out;
  if (!started_) return out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Dio>) {
          on_dio(message, p, out);
        } else if constexpr (std::is_same_v<T, Dao>) {
          on_dao(message, p, out);
        } else if constexpr (std::is_same_v<T, DioAck> || std::is_same_v<T, DaoAck>) {
          if (message.dst == id_) on_ack(p.acked_seq, out);
        }
        // APP_DATA and RPL_DAO are routed by the host, not the engine.
      },
      message.payload);
  return out;
}

Commands NodeEngine::on_rank_advert(NodeId from, std::uint16_t hops) {
  Commands out;
  if (!started_ || is_root() || parent_defined_) return out;
  const auto before = candidates_.rank();
  if (candidates_.observe(from, hops)) parent_changed_ = true;
  const auto after = candidates_.rank();
  if (after && after != before) out.emplace_back(cmd::AdvertiseRank{std::nullopt, *after});
  return out;
}

Commands NodeEngine::on_neighbor_joined(NodeId neighbor) {
  Commands out;
  if (!started_) return out;
  neighborhood_changed_ = true;
  if (auto r = rank()) out.emplace_back(cmd::AdvertiseRank{neighbor, *r});
  return out;
}

Forward NodeEngine::forward_down(HostAddress dest) const {
  return mhcl::forward_down(own_, range_, table_, dest);
}

std::optional<NodeId> NodeEngine::forward_up() const {
  if (is_root() || !parent_defined_) return std::nullopt;
  return parent_;
}

std::optional<NodeId> NodeEngine::preferred_parent() const {
  if (is_root()) return std::nullopt;
  return parent_defined_ ? parent_ : candidates_.preferred();
}

std::optional<std::uint16_t> NodeEngine::rank() const {
  if (is_root()) return 0;
  if (parent_defined_) return frozen_rank_;
  return candidates_.rank();
}

std::uint32_t NodeEngine::subtree_size() const {
  std::uint32_t total = 1;
  for (const auto& [_, c] : children_) total += c.count;
  return total;
}

const StabilizationTimer& NodeEngine::timer(TimerKind kind) const {
  switch (kind) {
    case TimerKind::Parent: return parent_timer_;
    case TimerKind::Children: return children_timer_;
    case TimerKind::LeafAggregation: return leaf_timer_;
    case TimerKind::RootAggregation: return root_timer_;
    case TimerKind::AckTimeout: break;
  }
  throw Error(ErrorCode::InvalidArgument, "ack timeouts are not stabilization timers");
}

void NodeEngine::on_parent_timer(Commands& out) {
  const bool changed = parent_changed_ || !candidates_.preferred();
  parent_changed_ = false;
  if (parent_timer_.expire(changed, rng_) != StabilizationTimer::Expiry::AtMax) {
    arm(TimerKind::Parent, parent_timer_.current(), out);
    return;
  }

  parent_defined_ = true;
  parent_ = candidates_.preferred();
  frozen_rank_ = candidates_.rank();
  out.emplace_back(cmd::Notice{NoticeKind::ParentDefined, *parent_});

  if (mode() == Mode::Greedy) {
    send_reliable(*parent_, Dao{0}, config_.dao_retransmissions, out);
    registration_sent_ = true;
    arm(TimerKind::Children, children_timer_.reset(rng_), out);
  } else {
    // Restart the aggregation loop so the registration goes out on its
    // next expiry rather than after a full capped interval.
    children_stable_ = false;
    arm(TimerKind::LeafAggregation, leaf_timer_.reset(rng_), out);
  }
}

void NodeEngine::on_children_timer(Commands& out) {
  const bool changed = children_changed_ || neighborhood_changed_;
  children_changed_ = neighborhood_changed_ = false;
  if (children_timer_.expire(changed, rng_) != StabilizationTimer::Expiry::AtMax) {
    arm(TimerKind::Children, children_timer_.current(), out);
    return;
  }
  children_defined_ = true;
  out.emplace_back(cmd::Notice{NoticeKind::ChildrenDefined, static_cast<NodeId>(children_.size())});
  if (distribution_eligible()) distribute_addresses(out);
}

void NodeEngine::on_leaf_aggregation_timer(Commands& out) {
  if (parent_defined_ && !registration_sent_) {
    send_reliable(*parent_, Dao{0}, config_.dao_retransmissions, out);
    registration_sent_ = true;
  }
  const bool changed = children_changed_ || neighborhood_changed_;
  children_changed_ = neighborhood_changed_ = false;
  children_stable_ = leaf_timer_.expire(changed, rng_) == StabilizationTimer::Expiry::AtMax;
  try_report(out);
  arm(TimerKind::LeafAggregation, leaf_timer_.current(), out);
}

void NodeEngine::on_root_aggregation_timer(Commands& out) {
  const bool changed = children_changed_ || neighborhood_changed_ || count_changed_;
  children_changed_ = neighborhood_changed_ = count_changed_ = false;
  children_stable_ = root_timer_.expire(changed, rng_) == StabilizationTimer::Expiry::AtMax;
  if (children_stable_ && all_children_reported()) {
    descendants_defined_ = true;
    out.emplace_back(
        cmd::Notice{NoticeKind::DescendantsDefined, static_cast<NodeId>(subtree_size() - 1)});
    distribute_addresses(out);
    return;
  }
  arm(TimerKind::RootAggregation, root_timer_.current(), out);
}

void NodeEngine::on_ack_timeout(std::uint16_t seq, Commands& out) {
  auto it = pending_.find(seq);
  if (it == pending_.end()) return;
  auto& p = it->second;
  if (p.retransmissions_left > 0) {
    --p.retransmissions_left;
    out.emplace_back(cmd::Send{p.message, true});
    out.emplace_back(cmd::ArmTimer{TimerId{TimerKind::AckTimeout, seq}, config_.params.base_interval()});
    return;
  }

  const Message lost = p.message;
  pending_.erase(it);
  out.emplace_back(cmd::Notice{NoticeKind::GaveUp, lost.dst});
  if (mode() == Mode::Aggregate) {
    if (const auto* dao = std::get_if<Dao>(&lost.payload)) {
      // The aggregation loop resends on its next expiry.
      if (dao->descendant_count == 0) {
        registration_sent_ = false;
      } else if (reported_count_ == dao->descendant_count) {
        reported_count_ = 0;
      }
    }
  }
}

void NodeEngine::on_dao(const Message& message, const Dao& dao, Commands& out) {
  if (message.dst != id_) {
    out.emplace_back(cmd::Notice{NoticeKind::StaleChild, message.src});
    return;
  }
  send(message.src, DaoAck{message.seq}, out);

  auto it = children_.find(message.src);
  if (it == children_.end()) {
    const bool late = partitioned_ || (mode() == Mode::Greedy && children_defined_);
    children_[message.src] = Child{dao.descendant_count, false};
    if (late) {
      delayed_.push_back(message.src);
      if (partitioned_) serve_delayed(out);
      return;
    }
    children_changed_ = true;
  } else if (dao.descendant_count != 0 && dao.descendant_count != it->second.count) {
    it->second.count = dao.descendant_count;
    count_changed_ = true;
  }

  if (mode() == Mode::Aggregate && !is_root()) try_report(out);
}

void NodeEngine::on_dio(const Message& message, const Dio& dio, Commands& out) {
  if (message.dst != id_) return;
  send(message.src, DioAck{message.seq}, out);

  const AddressRange granted(dio.first_address, dio.partition_size);
  if (is_root() || range_) {
    if (range_ != granted) out.emplace_back(cmd::Notice{NoticeKind::RangeConflict, message.src});
    return;
  }

  range_ = granted;
  own_ = granted.start();
  out.emplace_back(cmd::Notice{NoticeKind::Addressed, message.src});
  if (mode() == Mode::Aggregate) {
    out.emplace_back(cmd::CancelTimer{TimerId{TimerKind::LeafAggregation, 0}});
  }
  if (distribution_eligible()) distribute_addresses(out);
}

void NodeEngine::on_ack(std::uint16_t acked_seq, Commands& out) {
  if (pending_.erase(acked_seq) == 0) return;
  out.emplace_back(cmd::CancelTimer{TimerId{TimerKind::AckTimeout, acked_seq}});
}

bool NodeEngine::distribution_eligible() const {
  if (partitioned_ || !range_) return false;
  if (mode() == Mode::Greedy) return children_defined_;
  return is_root() ? descendants_defined_ : true;
}

void NodeEngine::distribute_addresses(Commands& out) {
  const AddressRange range = *range_;
  own_ = range.start();

  std::vector<NodeId> ids;
  for (const auto& [child, _] : children_) {
    if (std::find(delayed_.begin(), delayed_.end(), child) == delayed_.end()) ids.push_back(child);
  }

  PartitionResult plan;
  for (;;) {
    try {
      if (mode() == Mode::Greedy) {
        plan = partition_greedy(range, ids, config_.reserve);
      } else {
        std::vector<ChildWeight> weights;
        weights.reserve(ids.size());
        for (auto child : ids) weights.push_back({child, std::max(children_.at(child).count, 1u)});
        plan = partition_aggregate(range, weights, config_.reserve);
      }
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientSpace || ids.empty()) throw;
      out.emplace_back(cmd::Notice{NoticeKind::AllocationFailure, ids.back()});
      ids.pop_back();
    }
  }

  partitioned_ = true;
  reserve_ = plan.reserve;
  for (const auto& c : plan.children) grant(c.child, c.range, out);
  serve_delayed(out);
}

void NodeEngine::grant(NodeId child, const AddressRange& range, Commands& out) {
  table_.insert({child, range.start(), range.last()});
  children_[child].addressed_by_us = true;
  send_reliable(child,
                Dio{static_cast<std::uint16_t>(range.start()), static_cast<std::uint16_t>(range.length())},
                config_.dio_retransmissions, out);
}

void NodeEngine::serve_delayed(Commands& out) {
  for (auto child : delayed_) {
    try {
      const NodeId one[] = {child};
      auto plan = allocate_delayed(*reserve_, one, config_.reserve);
      reserve_ = plan.reserve;
      grant(child, plan.children.front().range, out);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientSpace) throw;
      out.emplace_back(cmd::Notice{NoticeKind::AllocationFailure, child});
    }
  }
  delayed_.clear();
}

void NodeEngine::try_report(Commands& out) {
  if (mode() != Mode::Aggregate || is_root() || range_) return;
  if (!parent_defined_ || !children_stable_ || !all_children_reported()) return;
  const auto count = std::min<std::uint32_t>(subtree_size(), std::numeric_limits<std::uint16_t>::max());
  if (count == reported_count_) return;
  send_reliable(*parent_, Dao{static_cast<std::uint16_t>(count)}, config_.dao_retransmissions, out);
  registration_sent_ = true;
  reported_count_ = count;
}

bool NodeEngine::all_children_reported() const {
  return std::all_of(children_.begin(), children_.end(),
                     [](const auto& kv) { return kv.second.count >= 1; });
}

void NodeEngine::arm(TimerKind kind, Duration delay, Commands& out) {
  out.emplace_back(cmd::ArmTimer{TimerId{kind, 0}, delay});
}

void NodeEngine::send_reliable(NodeId dst, Payload payload, unsigned retransmissions, Commands& out) {
  const auto seq = next_seq();
  Message msg{id_, dst, seq, payload};
  pending_[seq] = Pending{msg, retransmissions};
  out.emplace_back(cmd::Send{msg, false});
  out.emplace_back(cmd::ArmTimer{TimerId{TimerKind::AckTimeout, seq}, config_.params.base_interval()});
}

void NodeEngine::send(NodeId dst, Payload payload, Commands& out) {
  out.emplace_back(cmd::Send{Message{id_, dst, next_seq(), payload}, false});
}

std::uint16_t NodeEngine::next_seq() {
  if (++seq_ == 0) ++seq_;
  return seq_;
}

void StabilizationParams::validate() const {
  if (sp_child == 0 || sp_parent == 0 || sp_leaf == 0 || sp_root == 0) {
    throw Error(ErrorCode::InvalidArgument, "stabilization multipliers must be >= 1");
  }
  if (dio_min_exp > 20) {
    throw Error(ErrorCode::InvalidArgument, "dio_min exponent above 20 is not supported");
  }
}

}  // namespace mhcl
