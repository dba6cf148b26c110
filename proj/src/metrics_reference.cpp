#include "manet/metrics_reference.hpp"

#include <algorithm>
#include <cmath>

namespace manet::reference {

namespace {
double dist(const MobilityTrace& t, int step, int i, int j) {
  return distance(t.state_at(step, i).position, t.state_at(step, j).position);
}
}  // namespace

AvgResult avg_link_duration(const MobilityTrace& trace, double R) {
  const int n = trace.node_count;
  const int steps = trace.step_count();
  const double dt = trace.sample_interval;

  AvgResult r;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int s = 0;
      while (s < steps) {
        if (dist(trace, s, i, j) > R) {
          ++s;
          continue;
        }
        int e = s;
        while (e + 1 < steps && dist(trace, e + 1, i, j) <= R) ++e;
        const double duration = trace.time_of(e) - trace.time_of(s) + dt;
        if (duration != 0.0) {
          sum += duration;
          ++r.tuples;
        }
        s = e + 1;
      }
    }
  }
  r.defined = r.tuples > 0;
  r.value = r.defined ? sum / static_cast<double>(r.tuples) : 0.0;
  return r;
}

AvgResult avg_relative_speed(const MobilityTrace& trace,
                             std::optional<double> distance_filter,
                             bool include_zero) {
  const int n = trace.node_count;
  const int steps = trace.step_count();

  AvgResult r;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int s = 0; s < steps; ++s) {
        if (distance_filter && dist(trace, s, i, j) > *distance_filter) continue;
        const Vec2 vi = trace.state_at(s, i).velocity();
        const Vec2 vj = trace.state_at(s, j).velocity();
        const double rs = (vi - vj).norm();
        if (rs == 0.0 && !include_zero) continue;
        sum += rs;
        ++r.tuples;
      }
    }
  }
  r.defined = r.tuples > 0;
  r.value = r.defined ? sum / static_cast<double>(r.tuples) : 0.0;
  return r;
}

AvgResult avg_spatial_dependence(const MobilityTrace& trace, double R, double c,
                                 bool include_zero) {
  const int n = trace.node_count;
  const int steps = trace.step_count();

  AvgResult r;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int s = 0; s < steps; ++s) {
        if (dist(trace, s, i, j) > c * R) continue;
        const Vec2 vi = trace.state_at(s, i).velocity();
        const Vec2 vj = trace.state_at(s, j).velocity();
        const double ni = vi.norm(), nj = vj.norm();
        if (ni == 0.0 || nj == 0.0) continue;
        const double rd = std::clamp(vi.dot(vj) / (ni * nj), -1.0, 1.0);
        const double sr = std::min(ni, nj) / std::max(ni, nj);
        const double ds = rd * sr;
        if (ds == 0.0 && !include_zero) continue;
        sum += ds;
        ++r.tuples;
      }
    }
  }
  r.defined = r.tuples > 0;
  r.value = r.defined ? sum / static_cast<double>(r.tuples) : 0.0;
  return r;
}

}  // namespace manet::reference
