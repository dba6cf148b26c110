#include "manet/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace manet {

namespace {

struct PairTable {
  std::vector<std::pair<int, int>> pairs;  // all i < j, in (i, j) order
};

PairTable make_pairs(int n) {
  PairTable t;
  t.pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) t.pairs.emplace_back(i, j);
  return t;
}

struct TraceView {
  int nodes = 0;
  int steps = 0;
  std::vector<Vec2> pos;  // step-major
  std::vector<Vec2> vel;

  explicit TraceView(const MobilityTrace& trace)
      : nodes(trace.node_count), steps(trace.step_count()) {
    pos.resize(static_cast<size_t>(steps) * nodes);
    vel.resize(pos.size());
    for (int s = 0; s < steps; ++s)
      for (int n = 0; n < nodes; ++n) {
        const NodeState& st = trace.state_at(s, n);
        pos[static_cast<size_t>(s) * nodes + n] = st.position;
        vel[static_cast<size_t>(s) * nodes + n] = st.velocity();
      }
  }
  Vec2 p(int step, int node) const { return pos[static_cast<size_t>(step) * nodes + node]; }
  Vec2 v(int step, int node) const { return vel[static_cast<size_t>(step) * nodes + node]; }
};

void check_trace(const MobilityTrace& trace) {
  if (trace.node_count < 1 || trace.sample_interval <= 0.0)
    throw std::invalid_argument("metrics need a non-empty fixed-step trace");
  if (trace.samples.size() !=
      static_cast<size_t>(trace.step_count()) * trace.node_count)
    throw std::invalid_argument("trace sample count does not match its grid");
}

}  // namespace

std::vector<LinkEpisode> extract_link_episodes(const MobilityTrace& trace, double R) {
  check_trace(trace);
  if (R <= 0.0) throw std::invalid_argument("radio range must be > 0");
  const TraceView view(trace);
  const PairTable table = make_pairs(view.nodes);
  const double dt = trace.sample_interval;
  const double r_sq = R * R;

  std::vector<std::vector<LinkEpisode>> per_pair(table.pairs.size());
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(table.pairs.size()); ++p) {
    const auto [i, j] = table.pairs[p];
    int run_start = -1;
    for (int s = 0; s < view.steps; ++s) {
      const bool linked = distance_sq(view.p(s, i), view.p(s, j)) <= r_sq;
      if (linked && run_start < 0) run_start = s;
      if ((!linked || s + 1 == view.steps) && run_start >= 0) {
        const int run_end = linked ? s : s - 1;
        LinkEpisode e;
        e.i = i;
        e.j = j;
        e.start = trace.time_of(run_start);
        e.end = trace.time_of(run_end);
        e.duration = e.end - e.start + dt;
        per_pair[p].push_back(e);
        run_start = -1;
      }
    }
  }

  std::vector<LinkEpisode> episodes;
  for (const auto& list : per_pair)
    episodes.insert(episodes.end(), list.begin(), list.end());
  return episodes;
}

AvgResult avg_link_duration(const std::vector<LinkEpisode>& episodes) {
  AvgResult r;
  double sum = 0.0;
  for (const LinkEpisode& e : episodes) {
    if (e.duration == 0.0) continue;
    sum += e.duration;
    ++r.tuples;
  }
  r.defined = r.tuples > 0;
  r.value = r.defined ? sum / static_cast<double>(r.tuples) : 0.0;
  return r;
}

AvgResult avg_relative_speed(const MobilityTrace& trace,
                             std::optional<double> distance_filter,
                             bool include_zero) {
  check_trace(trace);
  const TraceView view(trace);
  const PairTable table = make_pairs(view.nodes);
  const double filter_sq =
      distance_filter ? *distance_filter * *distance_filter : 0.0;

  std::vector<double> pair_sum(table.pairs.size(), 0.0);
  std::vector<long long> pair_count(table.pairs.size(), 0);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(table.pairs.size()); ++p) {
    const auto [i, j] = table.pairs[p];
    double sum = 0.0;
    long long count = 0;
    for (int s = 0; s < view.steps; ++s) {
      if (distance_filter &&
          distance_sq(view.p(s, i), view.p(s, j)) > filter_sq)
        continue;
      const double rs = (view.v(s, i) - view.v(s, j)).norm();
      if (rs == 0.0 && !include_zero) continue;
      sum += rs;
      ++count;
    }
    pair_sum[p] = sum;
    pair_count[p] = count;
  }

  // The sums are over unordered pairs; the reported tuple count follows the
  // ordered double sum, which leaves the mean unchanged.
  AvgResult r;
  double total = 0.0;
  for (size_t p = 0; p < table.pairs.size(); ++p) {
    total += pair_sum[p];
    r.tuples += 2 * pair_count[p];
  }
  r.defined = r.tuples > 0;
  r.value = r.defined ? 2.0 * total / static_cast<double>(r.tuples) : 0.0;
  return r;
}

AvgResult avg_spatial_dependence(const MobilityTrace& trace, double R, double c,
                                 bool include_zero, long long* zero_speed_skipped) {
  check_trace(trace);
  if (R <= 0.0) throw std::invalid_argument("radio range must be > 0");
  if (c <= 0.0) throw std::invalid_argument("proximity factor must be > 0");
  const TraceView view(trace);
  const PairTable table = make_pairs(view.nodes);
  const double near_sq = c * R * c * R;

  std::vector<double> pair_sum(table.pairs.size(), 0.0);
  std::vector<long long> pair_count(table.pairs.size(), 0);
  std::vector<long long> pair_skipped(table.pairs.size(), 0);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(table.pairs.size()); ++p) {
    const auto [i, j] = table.pairs[p];
    double sum = 0.0;
    long long count = 0, skipped = 0;
    for (int s = 0; s < view.steps; ++s) {
      if (distance_sq(view.p(s, i), view.p(s, j)) > near_sq) continue;
      const Vec2 vi = view.v(s, i), vj = view.v(s, j);
      const double ni = vi.norm(), nj = vj.norm();
      if (ni == 0.0 || nj == 0.0) {
        ++skipped;
        continue;
      }
      const double rd = std::clamp(vi.dot(vj) / (ni * nj), -1.0, 1.0);
      const double sr = std::min(ni, nj) / std::max(ni, nj);
      const double ds = rd * sr;
      if (ds == 0.0 && !include_zero) continue;
      sum += ds;
      ++count;
    }
    pair_sum[p] = sum;
    pair_count[p] = count;
    pair_skipped[p] = skipped;
  }

  AvgResult r;
  double total = 0.0;
  long long skipped = 0;
  for (size_t p = 0; p < table.pairs.size(); ++p) {
    total += pair_sum[p];
    r.tuples += 2 * pair_count[p];
    skipped += 2 * pair_skipped[p];
  }
  if (zero_speed_skipped) *zero_speed_skipped = skipped;
  r.defined = r.tuples > 0;
  r.value = r.defined ? 2.0 * total / static_cast<double>(r.tuples) : 0.0;
  return r;
}

MetricsReport compute_metrics(const MobilityTrace& trace, const MetricsParams& params) {
  MetricsReport report;
  report.params = params;
  report.link_duration =
      avg_link_duration(extract_link_episodes(trace, params.radio_range));
  report.relative_speed = avg_relative_speed(trace, params.rs_distance_filter,
                                             params.include_zero_tuples);
  report.spatial_dependence = avg_spatial_dependence(
      trace, params.radio_range, params.proximity_factor,
      params.include_zero_tuples, &report.ds_zero_speed_skipped);
  return report;
}

}  // namespace manet
