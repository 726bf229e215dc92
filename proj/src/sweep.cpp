#include "mhcl/sweep.hpp"

#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "mhcl/error.hpp"

namespace mhcl {

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Grid: return "grid";
    case TopologyKind::Uniform: return "uniform";
    case TopologyKind::File: return "file";
  }
  return "?";
}

Topology TopologySpec::build(std::uint64_t seed) const {
  switch (kind) {
    case TopologyKind::Grid: return make_grid(n);
    case TopologyKind::Uniform: return make_uniform(n, seed);
    case TopologyKind::File:
      if (!fixed) throw Error(ErrorCode::InvalidArgument, "file topology has not been loaded");
      return *fixed;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown topology kind");
}

double ci95_half_width(const std::vector<double>& samples) {
  const auto k = samples.size();
  if (k < 2) return 0.0;
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(k - 1));
  const boost::math::students_t dist(static_cast<double>(k - 1));
  return boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(static_cast<double>(k));
}

SweepRow row_of(const SweepCase& sweep_case, std::uint64_t seed, const Metrics& m) {
  SweepRow row;
  row.scenario_id = sweep_case.scenario_id;
  row.seed = std::to_string(seed);
  row.mode = sweep_case.config.mode;
  row.topology = sweep_case.topology.kind;
  row.n = static_cast<unsigned>(m.n);
  row.dag_depth = m.dag_depth;
  row.setup_ms = static_cast<double>(m.setup_time.count()) / 1000.0;
  row.dio_count = static_cast<double>(m.dio_count);
  row.dao_count = static_cast<double>(m.dao_count);
  row.addr_rate = m.addressing_rate;
  row.up_rate = m.up_rate;
  row.down_rate = m.down_rate;
  row.timed_out = m.timed_out ? "1" : "0";
  return row;
}

namespace {

struct Outcome {
  std::optional<SweepRow> row;
  std::string error;
};

Outcome run_one(const SweepCase& c, std::uint64_t seed) {
  try {
    auto config = c.config;
    config.topology = c.topology.build(seed);
    config.seed = seed;
    config.record_trace = false;
    return {row_of(c, seed, run(config)), {}};
  } catch (const Error& e) {
    return {std::nullopt, to_string(e.code())};
  }
}

void summarize(const SweepCase& c, const std::vector<SweepRow>& runs, std::vector<SweepRow>& out) {
  SweepRow mean;
  mean.scenario_id = c.scenario_id;
  mean.mode = c.config.mode;
  mean.topology = c.topology.kind;
  mean.n = c.topology.size();
  mean.summary = true;
  auto ci = mean;
  mean.seed = "mean";
  ci.seed = "ci95";

  double timed_out = 0.0;
  for (const auto& r : runs) timed_out += r.timed_out == "1" ? 1.0 : 0.0;
  const double k = runs.empty() ? 1.0 : static_cast<double>(runs.size());

  auto field = [&](double SweepRow::*member) {
    std::vector<double> xs;
    double total = 0.0;
    for (const auto& r : runs) {
      xs.push_back(r.*member);
      total += r.*member;
    }
    mean.*member = total / k;
    ci.*member = ci95_half_width(xs);
  };
  for (auto member : {&SweepRow::dag_depth, &SweepRow::setup_ms, &SweepRow::dio_count, &SweepRow::dao_count,
                      &SweepRow::addr_rate, &SweepRow::up_rate, &SweepRow::down_rate}) {
    field(member);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", timed_out / k);
  mean.timed_out = buf;
  ci.timed_out = "";
  out.push_back(std::move(mean));
  out.push_back(std::move(ci));
}

std::string number(double v, bool summary) {
  char buf[64];
  if (summary) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
  } else if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.6f", v);
  }
  return buf;
}

}  // namespace

std::vector<SweepRow> sweep(const std::vector<SweepCase>& cases, const std::vector<std::uint64_t>& seeds,
                            unsigned threads) {
  const std::size_t jobs = cases.size() * seeds.size();
  std::vector<Outcome> outcomes(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      outcomes[j] = run_one(cases[j / seeds.size()], seeds[j % seeds.size()]);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<SweepRow> rows;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    std::vector<SweepRow> ok;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      auto& o = outcomes[ci * seeds.size() + si];
      if (o.row) {
        ok.push_back(*o.row);
        rows.push_back(std::move(*o.row));
        continue;
      }
      SweepRow err;
      err.scenario_id = c.scenario_id;
      err.seed = std::to_string(seeds[si]);
      err.mode = c.config.mode;
      err.topology = c.topology.kind;
      err.n = c.topology.size();
      err.timed_out = "error:" + o.error;
      rows.push_back(std::move(err));
    }
    summarize(c, ok, rows);
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    const bool error = r.timed_out.rfind("error:", 0) == 0;
    os << r.scenario_id << ',' << r.seed << ',' << to_string(r.mode) << ',' << to_string(r.topology) << ','
       << r.n;
    if (error) {
      os << ",,,,,,,," << r.timed_out << '\n';
      continue;
    }
    for (double v : {r.dag_depth, r.setup_ms, r.dio_count, r.dao_count}) os << ',' << number(v, r.summary);
    for (double v : {r.addr_rate, r.up_rate, r.down_rate}) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", v);
      os << ',' << buf;
    }
    os << ',' << r.timed_out << '\n';
  }
}

}  // namespace mhcl
