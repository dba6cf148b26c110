#include "manet/trace.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace manet {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGridEps = 1e-9;
}  // namespace

Vec2 NodeState::velocity() const { return heading_to_velocity(speed, heading); }

MobilityTrace make_trace(int node_count, double duration, double sample_interval,
                         SimulationArea area) {
  if (node_count < 1) throw std::invalid_argument("node_count must be >= 1");
  if (sample_interval <= 0.0) throw std::invalid_argument("sample_interval must be > 0");
  if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
  MobilityTrace trace;
  trace.node_count = node_count;
  trace.duration = duration;
  trace.sample_interval = sample_interval;
  trace.area = area;
  const int steps = trace.step_count();
  trace.samples.reserve(static_cast<size_t>(steps) * node_count);
  for (int s = 0; s < steps; ++s)
    for (int n = 0; n < node_count; ++n)
      trace.samples.push_back({trace.time_of(s), n, NodeState{}});
  return trace;
}

double wrap_heading(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // fmod can round back up to 2*pi
  return w;
}

double angular_distance(double a, double b) {
  double d = std::fabs(wrap_heading(a) - wrap_heading(b));
  return d > std::numbers::pi ? kTwoPi - d : d;
}

Vec2 heading_to_velocity(double speed, double heading) {
  if (speed < 0.0) throw std::invalid_argument("speed must be >= 0");
  if (!std::isfinite(speed) || !std::isfinite(heading))
    throw std::invalid_argument("speed and heading must be finite");
  return {speed * std::cos(heading), speed * std::sin(heading)};
}

Vec2 position_at(const MobilityTrace& trace, int node, double t) {
  if (node < 0 || node >= trace.node_count)
    throw std::invalid_argument("node id out of range");
  if (t < -kGridEps || t > trace.duration + kGridEps)
    throw std::domain_error("query time outside trace duration");
  const double dt = trace.sample_interval;
  const int last = trace.step_count() - 1;
  int step = static_cast<int>(std::floor(t / dt));
  if (step < 0) step = 0;
  if (step >= last) return trace.state_at(last, node).position;
  const double frac = (t - step * dt) / dt;
  if (frac <= kGridEps) return trace.state_at(step, node).position;
  const Vec2 a = trace.state_at(step, node).position;
  const Vec2 b = trace.state_at(step + 1, node).position;
  return a + (b - a) * frac;
}

const char* finding_kind_name(TraceFinding::Kind kind) {
  switch (kind) {
    case TraceFinding::Kind::bad_shape: return "bad_shape";
    case TraceFinding::Kind::missing_sample: return "missing_sample";
    case TraceFinding::Kind::duplicate_sample: return "duplicate_sample";
    case TraceFinding::Kind::off_grid: return "off_grid";
    case TraceFinding::Kind::bad_node_id: return "bad_node_id";
    case TraceFinding::Kind::disorder: return "disorder";
    case TraceFinding::Kind::out_of_area: return "out_of_area";
    case TraceFinding::Kind::bad_value: return "bad_value";
  }
  return "unknown";
}

TraceValidation validate_trace(const MobilityTrace& trace) {
  TraceValidation v;
  auto add = [&v](TraceFinding::Kind kind, double time, int node, std::string detail) {
    v.findings.push_back({kind, time, node, std::move(detail)});
  };

  if (trace.node_count < 1 || trace.sample_interval <= 0.0 || trace.duration < 0.0 ||
      trace.area.width <= 0.0 || trace.area.height <= 0.0) {
    add(TraceFinding::Kind::bad_shape, 0.0, -1,
        "node_count, sample_interval, duration and area must be positive");
    return v;
  }

  const double dt = trace.sample_interval;
  const int steps = trace.step_count();
  std::vector<int> seen(static_cast<size_t>(steps) * trace.node_count, 0);

  const TraceSample* prev = nullptr;
  for (const TraceSample& s : trace.samples) {
    if (prev) {
      const bool ordered = prev->time < s.time - kGridEps ||
                           (std::fabs(prev->time - s.time) <= kGridEps &&
                            prev->node_id < s.node_id);
      if (!ordered)
        add(TraceFinding::Kind::disorder, s.time, s.node_id,
            "sample not strictly after its predecessor");
    }
    prev = &s;

    if (s.node_id < 0 || s.node_id >= trace.node_count) {
      add(TraceFinding::Kind::bad_node_id, s.time, s.node_id, "node id out of range");
      continue;
    }
    const double steps_exact = s.time / dt;
    const long long step = std::llround(steps_exact);
    if (std::fabs(steps_exact - step) > 1e-6 || step < 0 || step >= steps) {
      add(TraceFinding::Kind::off_grid, s.time, s.node_id,
          "sample time not on the sampling grid");
      continue;
    }
    int& count = seen[static_cast<size_t>(step) * trace.node_count + s.node_id];
    if (++count > 1)
      add(TraceFinding::Kind::duplicate_sample, s.time, s.node_id,
          "more than one sample for this (time, node)");

    if (!s.state.position.finite() || !std::isfinite(s.state.speed) ||
        !std::isfinite(s.state.heading) || s.state.speed < 0.0 ||
        s.state.heading < 0.0 || s.state.heading >= kTwoPi + kGridEps) {
      add(TraceFinding::Kind::bad_value, s.time, s.node_id,
          "non-finite position, negative speed, or heading outside [0, 2pi)");
    } else if (!trace.area.contains(s.state.position)) {
      add(TraceFinding::Kind::out_of_area, s.time, s.node_id,
          "position outside the simulation area");
    }
  }

  for (int step = 0; step < steps; ++step)
    for (int n = 0; n < trace.node_count; ++n)
      if (seen[static_cast<size_t>(step) * trace.node_count + n] == 0)
        add(TraceFinding::Kind::missing_sample, trace.time_of(step), n,
            "no sample for this (time, node)");
  return v;
}

}  // namespace manet
