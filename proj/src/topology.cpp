#include "mhcl/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "mhcl/error.hpp"
#include "mhcl/random.hpp"

namespace mhcl {

namespace {

constexpr int kUniformAttempts = 100;

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

[[noreturn]] void format_error(int line, const std::string& why) {
  throw Error(ErrorCode::TopologyFormat, "topology line " + std::to_string(line) + ": " + why);
}

}  // namespace

std::string_view to_string(LinkRule rule) {
  return rule == LinkRule::Axis ? "axis" : "disk";
}

Topology::Topology(std::vector<Position> positions, NodeId root, double tx_range, LinkRule rule)
    : positions_(std::move(positions)), root_(root), tx_range_(tx_range), rule_(rule) {
  if (positions_.empty() || positions_.size() > std::numeric_limits<NodeId>::max()) {
    throw Error(ErrorCode::InvalidArgument, "topology needs between 1 and 65535 nodes");
  }
  if (root_ >= positions_.size()) throw Error(ErrorCode::InvalidArgument, "root id out of range");
  if (!(tx_range_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "tx range must be positive");

  adjacency_.resize(positions_.size());
  for (std::size_t u = 0; u < positions_.size(); ++u) {
    for (std::size_t v = u + 1; v < positions_.size(); ++v) {
      const auto& a = positions_[u];
      const auto& b = positions_[v];
      const bool aligned = rule_ == LinkRule::Disk || a.x == b.x || a.y == b.y;
      if (aligned && distance(a, b) <= tx_range_) {
        adjacency_[u].push_back(static_cast<NodeId>(v));
        adjacency_[v].push_back(static_cast<NodeId>(u));
      }
    }
  }
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& n = adjacency_.at(a);
  return std::find(n.begin(), n.end(), b) != n.end();
}

std::vector<int> Topology::hop_distances() const {
  std::vector<int> dist(size(), -1);
  std::deque<NodeId> queue{root_};
  dist[root_] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : adjacency_[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

bool Topology::connected() const {
  const auto dist = hop_distances();
  return std::find(dist.begin(), dist.end(), -1) == dist.end();
}

unsigned Topology::depth() const {
  unsigned deepest = 0;
  for (int d : hop_distances()) deepest = std::max(deepest, static_cast<unsigned>(std::max(d, 0)));
  return deepest;
}

Topology make_grid(unsigned n, double spacing, double tx_range) {
  const auto side = static_cast<unsigned>(std::lround(std::sqrt(static_cast<double>(n))));
  if (n == 0 || side * side != n) {
    throw Error(ErrorCode::NotASquare, std::to_string(n) + " is not a perfect square");
  }
  std::vector<Position> positions;
  positions.reserve(n);
  for (unsigned row = 0; row < side; ++row) {
    for (unsigned col = 0; col < side; ++col) positions.push_back({col * spacing, row * spacing});
  }
  return Topology(std::move(positions), 0, tx_range, LinkRule::Axis);
}

Topology make_uniform(unsigned n, std::uint64_t seed, double spacing, double tx_range) {
  if (n < 9) throw Error(ErrorCode::InvalidArgument, "uniform topologies need n >= 9");
  const double side = (std::sqrt(static_cast<double>(n)) - 2.0) * spacing;
  const Position center{side / 2.0, side / 2.0};

  for (int attempt = 0; attempt < kUniformAttempts; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::uniform_real_distribution<double> coord(0.0, side);
    std::vector<Position> positions(n);
    for (auto& p : positions) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
    NodeId root = 0;
    for (NodeId i = 1; i < n; ++i) {
      if (distance(positions[i], center) < distance(positions[root], center)) root = i;
    }
    Topology topology(std::move(positions), root, tx_range);
    if (topology.connected()) return topology;
  }
  throw Error(ErrorCode::DisconnectedAfterRetries,
              "no connected uniform topology of " + std::to_string(n) + " nodes after " +
                  std::to_string(kUniformAttempts) + " attempts");
}

void write_topology(std::ostream& os, const Topology& topology) {
  os << "# id x y\n";
  os << "root " << topology.root() << '\n';
  os << "tx_range " << std::setprecision(17) << topology.tx_range() << '\n';
  os << "links " << to_string(topology.link_rule()) << '\n';
  for (std::size_t i = 0; i < topology.size(); ++i) {
    const auto& p = topology.positions()[i];
    os << i << ' ' << std::setprecision(17) << p.x << ' ' << p.y << '\n';
  }
}

Topology read_topology(std::istream& is) {
  std::vector<Position> positions;
  std::optional<NodeId> root;
  double tx_range = kTransmissionRange;
  LinkRule rule = LinkRule::Disk;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "root") {
      unsigned id = 0;
      if (!(ls >> id)) format_error(lineno, "expected a root id");
      root = static_cast<NodeId>(id);
    } else if (head == "tx_range") {
      if (!(ls >> tx_range) || !(tx_range > 0.0)) format_error(lineno, "expected a positive range in meters");
    } else if (head == "links") {
      std::string word;
      ls >> word;
      if (word == "disk") {
        rule = LinkRule::Disk;
      } else if (word == "axis") {
        rule = LinkRule::Axis;
      } else {
        format_error(lineno, "expected 'disk' or 'axis'");
      }
    } else {
      std::size_t id = 0;
      Position p;
      try {
        id = std::stoul(head);
      } catch (const std::exception&) {
        format_error(lineno, "unknown directive '" + head + "'");
      }
      if (!(ls >> p.x >> p.y)) format_error(lineno, "expected '<id> <x> <y>'");
      if (id != positions.size()) format_error(lineno, "node ids must be listed in order from 0");
      positions.push_back(p);
    }
    std::string extra;
    if (ls >> extra) format_error(lineno, "trailing token '" + extra + "'");
  }
  if (positions.empty()) format_error(lineno, "no nodes");
  if (!root) format_error(lineno, "missing 'root' line");
  if (*root >= positions.size()) format_error(lineno, "root id out of range");
  return Topology(std::move(positions), *root, tx_range, rule);
}

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::None: return "none";
    case FailureKind::Tx: return "tx";
    case FailureKind::Rx: return "rx";
  }
  return "?";
}

void FailureModel::validate() const {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "failure rate must lie in [0, 1]");
  }
}

LossOutcome sample_loss(const FailureModel& model, std::mt19937_64& rng) {
  if (model.kind == FailureKind::None || model.rate <= 0.0) return LossOutcome::DeliverAll;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) >= model.rate) return LossOutcome::DeliverAll;
  return model.kind == FailureKind::Tx ? LossOutcome::DropAll : LossOutcome::DropDestOnly;
}

}  // namespace mhcl
