#pragma once

#include <string>
#include <vector>

#include "manet/vec2.hpp"

namespace manet {

// Rectangular simulation region [0, width] x [0, height].
struct SimulationArea {
  double width = 1000.0;
  double height = 1000.0;

  bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
};

// Kinematic state of one node: position plus polar velocity.
// heading is normalized to [0, 2*pi).
struct NodeState {
  Vec2 position;
  double speed = 0.0;    // m/s, >= 0
  double heading = 0.0;  // radians

  Vec2 velocity() const;
};

struct TraceSample {
  double time = 0.0;
  int node_id = 0;
  NodeState state;
};

// Fixed-step sampled motion of node_count nodes over [0, duration].
// A well-formed trace has exactly one sample per node at every grid time
// {0, dt, 2*dt, ..., duration}, ordered by (time, node_id). The accessors
// assume that layout; arbitrary (possibly malformed) sample lists can be
// checked with validate_trace.
struct MobilityTrace {
  int node_count = 0;
  double duration = 0.0;
  double sample_interval = 1.0;
  SimulationArea area;
  std::vector<TraceSample> samples;

  int step_count() const {
    return static_cast<int>(std::llround(duration / sample_interval)) + 1;
  }
  double time_of(int step) const { return step * sample_interval; }

  const NodeState& state_at(int step, int node) const {
    return samples[static_cast<size_t>(step) * node_count + node].state;
  }
  NodeState& state_at(int step, int node) {
    return samples[static_cast<size_t>(step) * node_count + node].state;
  }
};

// Preallocates a well-formed trace grid with default-initialized states.
MobilityTrace make_trace(int node_count, double duration, double sample_interval,
                         SimulationArea area);

// Wraps an angle into [0, 2*pi).
double wrap_heading(double theta);

// Shortest angular distance between two headings, in [0, pi].
double angular_distance(double a, double b);

// Polar to Cartesian velocity. Throws std::invalid_argument on negative
// speed or non-finite heading.
Vec2 heading_to_velocity(double speed, double heading);

// Position of `node` at time t, linearly interpolated between the bracketing
// samples (exact at grid times). Throws std::domain_error if t is outside
// [0, duration] and std::invalid_argument for a bad node id.
Vec2 position_at(const MobilityTrace& trace, int node, double t);

struct TraceFinding {
  enum class Kind {
    bad_shape,        // non-positive node count / interval / area
    missing_sample,   // no sample for (time, node)
    duplicate_sample, // more than one sample for (time, node)
    off_grid,         // sample time not on the sampling grid
    bad_node_id,      // node id outside [0, node_count)
    disorder,         // samples not strictly ordered by (time, node)
    out_of_area,      // position outside the simulation area
    bad_value,        // NaN/inf position, negative speed, heading out of range
  };
  Kind kind;
  double time = 0.0;
  int node = -1;
  std::string detail;
};

struct TraceValidation {
  std::vector<TraceFinding> findings;
  bool ok() const { return findings.empty(); }
};

// Reports every violated trace invariant with its location. Never throws.
TraceValidation validate_trace(const MobilityTrace& trace);

const char* finding_kind_name(TraceFinding::Kind kind);

}  // namespace manet
