#include "scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mhcl/error.hpp"

namespace mhcl::cli {

namespace {

std::string where(const std::string& source, const YAML::Node& node) {
  return source + ":" + std::to_string(node.Mark().line + 1);
}

[[noreturn]] void bad(const std::string& source, const YAML::Node& node, const std::string& why) {
  throw Error(ErrorCode::ConfigError, where(source, node) + ": " + why);
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  void allow(const YAML::Node& map, std::initializer_list<const char*> keys) const {
    if (!map.IsMap()) bad(source_, map, "expected a mapping");
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!known.count(key)) bad(source_, kv.first, "unknown key '" + key + "'");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const char* what) const {
    if (!node.IsScalar()) bad(source_, node, std::string("expected a scalar for ") + what);
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      bad(source_, node, std::string("invalid value for ") + what + ": '" + node.Scalar() + "'");
    }
  }

  Duration ms(const YAML::Node& node, const char* what) const {
    const auto v = scalar<double>(node, what);
    if (!(v >= 0.0)) bad(source_, node, std::string(what) + " must be >= 0");
    return Duration(static_cast<std::int64_t>(std::llround(v * 1000.0)));
  }

  /// A scalar or a sequence of scalars.
  template <class T, class F>
  std::vector<T> list(const YAML::Node& node, const char* what, F convert) const {
    std::vector<T> out;
    auto one = [&](const YAML::Node& item) {
      try {
        out.push_back(convert(scalar<std::string>(item, what)));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError && std::string(e.what()).rfind(source_, 0) == 0) throw;
        bad(source_, item, e.what());
      }
    };
    if (node.IsSequence()) {
      for (const auto& item : node) one(item);
    } else {
      one(node);
    }
    if (out.empty()) bad(source_, node, std::string(what) + " must not be empty");
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

unsigned parse_unsigned(const std::string& text) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw Error(ErrorCode::ConfigError, "expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<unsigned>(v);
}

}  // namespace

TopologyKind parse_topology_kind(const std::string& text) {
  if (text == "grid") return TopologyKind::Grid;
  if (text == "uniform") return TopologyKind::Uniform;
  if (text == "file") return TopologyKind::File;
  throw Error(ErrorCode::ConfigError, "unknown topology '" + text + "' (grid, uniform, file)");
}

SimMode parse_mode(const std::string& text) {
  if (text == "greedy") return SimMode::Greedy;
  if (text == "aggregate") return SimMode::Aggregate;
  if (text == "baseline") return SimMode::BaselineStoring;
  throw Error(ErrorCode::ConfigError, "unknown mode '" + text + "' (greedy, aggregate, baseline)");
}

FailureKind parse_failure_kind(const std::string& text) {
  if (text == "none") return FailureKind::None;
  if (text == "tx") return FailureKind::Tx;
  if (text == "rx") return FailureKind::Rx;
  throw Error(ErrorCode::ConfigError, "unknown failure kind '" + text + "' (none, tx, rx)");
}

std::string failure_label(const FailureModel& f) {
  if (f.kind == FailureKind::None || f.rate == 0.0) return "none";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%g", std::string(to_string(f.kind)).c_str(), f.rate * 100.0);
  return buf;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (text.find(',') != std::string::npos) {
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) seeds.push_back(parse_unsigned(part));
  } else if (auto dash = text.find('-'); dash != std::string::npos) {
    const auto lo = parse_unsigned(text.substr(0, dash));
    const auto hi = parse_unsigned(text.substr(dash + 1));
    if (hi < lo) throw Error(ErrorCode::ConfigError, "empty seed range '" + text + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  } else {
    const auto count = parse_unsigned(text);
    for (unsigned s = 1; s <= count; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw Error(ErrorCode::ConfigError, "no seeds in '" + text + "'");
  return seeds;
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology file " + path);
  return read_topology(in);
}

std::vector<SweepCase> Scenario::cases() const {
  std::optional<Topology> file_topology;
  std::vector<SweepCase> out;
  for (auto kind : topologies) {
    std::vector<unsigned> ns = sizes;
    if (kind == TopologyKind::File) {
      if (!topology_file) throw Error(ErrorCode::ConfigError, "topology 'file' needs topology_file");
      if (!file_topology) file_topology = load_topology_file(*topology_file);
      ns = {static_cast<unsigned>(file_topology->size())};
    }
    for (auto n : ns) {
      for (auto mode : modes) {
        for (const auto& failure : failures) {
          SweepCase c;
          c.topology.kind = kind;
          c.topology.n = n;
          if (kind == TopologyKind::File) c.topology.fixed = file_topology;
          c.config = base;
          c.config.mode = mode;
          c.config.failure = failure;
          c.scenario_id = name + "-" + std::string(to_string(kind)) + std::to_string(n) + "-" +
                          std::string(to_string(mode)) + "-" + failure_label(failure);
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

Scenario parse_scenario(std::istream& in, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(in);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ConfigError,
                source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  Scenario sc;
  if (root.IsNull()) return sc;
  const Reader r(source);
  r.allow(root, {"name", "topologies", "sizes", "topology_file", "modes", "failures", "seeds", "threads",
                 "reserve_percent", "address_width", "collision_proxy_rate", "params", "timing",
                 "retransmissions", "baseline"});

  if (auto v = root["name"]) sc.name = r.scalar<std::string>(v, "name");
  if (auto v = root["topologies"]) sc.topologies = r.list<TopologyKind>(v, "topologies", parse_topology_kind);
  if (auto v = root["sizes"]) sc.sizes = r.list<unsigned>(v, "sizes", parse_unsigned);
  if (auto v = root["topology_file"]) sc.topology_file = r.scalar<std::string>(v, "topology_file");
  if (auto v = root["modes"]) sc.modes = r.list<SimMode>(v, "modes", parse_mode);
  if (auto v = root["threads"]) sc.threads = r.scalar<unsigned>(v, "threads");

  if (auto v = root["failures"]) {
    if (!v.IsSequence() || v.size() == 0) bad(source, v, "failures must be a non-empty list");
    sc.failures.clear();
    for (const auto& item : v) {
      r.allow(item, {"kind", "rate"});
      FailureModel f;
      try {
        f.kind = parse_failure_kind(r.scalar<std::string>(item["kind"], "kind"));
      } catch (const Error& e) {
        bad(source, item, e.what());
      }
      if (auto rate = item["rate"]) f.rate = r.scalar<double>(rate, "rate");
      if (f.kind != FailureKind::None && !item["rate"]) bad(source, item, "failure needs a rate");
      try {
        f.validate();
      } catch (const Error& e) {
        bad(source, item, e.what());
      }
      sc.failures.push_back(f);
    }
  }

  if (auto v = root["seeds"]) {
    if (v.IsMap()) {
      r.allow(v, {"first", "count"});
      const auto first = v["first"] ? r.scalar<std::uint64_t>(v["first"], "first") : 1;
      const auto count = r.scalar<std::uint64_t>(v["count"], "count");
      if (count == 0) bad(source, v, "seed count must be positive");
      sc.seeds.clear();
      for (std::uint64_t i = 0; i < count; ++i) sc.seeds.push_back(first + i);
    } else {
      sc.seeds = r.list<std::uint64_t>(v, "seeds", [](const std::string& s) { return std::uint64_t{parse_unsigned(s)}; });
    }
  }

  auto& b = sc.base;
  if (auto v = root["reserve_percent"]) {
    try {
      b.reserve = ReserveFraction::from_percent(r.scalar<double>(v, "reserve_percent"));
    } catch (const Error& e) {
      bad(source, v, e.what());
    }
  }
  if (auto v = root["address_width"]) b.address_width = r.scalar<unsigned>(v, "address_width");
  if (auto v = root["collision_proxy_rate"]) b.collision_proxy_rate = r.scalar<double>(v, "collision_proxy_rate");

  if (auto p = root["params"]) {
    r.allow(p, {"sp_child", "sp_parent", "sp_leaf", "sp_root", "dio_min_exp"});
    if (auto v = p["sp_child"]) b.params.sp_child = r.scalar<unsigned>(v, "sp_child");
    if (auto v = p["sp_parent"]) b.params.sp_parent = r.scalar<unsigned>(v, "sp_parent");
    if (auto v = p["sp_leaf"]) b.params.sp_leaf = r.scalar<unsigned>(v, "sp_leaf");
    if (auto v = p["sp_root"]) b.params.sp_root = r.scalar<unsigned>(v, "sp_root");
    if (auto v = p["dio_min_exp"]) b.params.dio_min_exp = r.scalar<unsigned>(v, "dio_min_exp");
  }
  if (auto t = root["timing"]) {
    r.allow(t, {"start_jitter_ms", "link_delay_ms", "link_jitter_ms", "app_start_ms", "app_spread_ms",
                "count_window_ms", "horizon_ms"});
    if (auto v = t["start_jitter_ms"]) b.start_jitter_max = r.ms(v, "start_jitter_ms");
    if (auto v = t["link_delay_ms"]) b.link_delay = r.ms(v, "link_delay_ms");
    if (auto v = t["link_jitter_ms"]) b.link_jitter = r.ms(v, "link_jitter_ms");
    if (auto v = t["app_start_ms"]) b.app_start = r.ms(v, "app_start_ms");
    if (auto v = t["app_spread_ms"]) b.app_spread = r.ms(v, "app_spread_ms");
    if (auto v = t["count_window_ms"]) b.count_window = r.ms(v, "count_window_ms");
    if (auto v = t["horizon_ms"]) b.horizon = r.ms(v, "horizon_ms");
  }
  if (auto t = root["retransmissions"]) {
    r.allow(t, {"dio", "dao"});
    if (auto v = t["dio"]) b.dio_retransmissions = r.scalar<unsigned>(v, "dio");
    if (auto v = t["dao"]) b.dao_retransmissions = r.scalar<unsigned>(v, "dao");
  }
  if (auto t = root["baseline"]) {
    r.allow(t, {"table_capacity", "policy", "dao_delay_ms", "dao_period_ms"});
    if (auto v = t["table_capacity"]) b.baseline_table_capacity = r.scalar<std::size_t>(v, "table_capacity");
    if (auto v = t["policy"]) {
      const auto policy = r.scalar<std::string>(v, "policy");
      if (policy == "fifo") {
        b.baseline_policy = TablePolicy::FifoReject;
      } else if (policy == "lru") {
        b.baseline_policy = TablePolicy::Lru;
      } else {
        bad(source, v, "policy must be 'fifo' or 'lru'");
      }
    }
    if (auto v = t["dao_delay_ms"]) b.baseline_dao_delay = r.ms(v, "dao_delay_ms");
    if (auto v = t["dao_period_ms"]) b.baseline_dao_period = r.ms(v, "dao_period_ms");
  }

  try {
    b.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, source + ": " + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path);
  return parse_scenario(in, path);
}

}  // namespace mhcl::cli
