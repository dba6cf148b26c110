#pragma once

#include <vector>

#include "manet/rng.hpp"
#include "manet/trace.hpp"
#include "manet/vec2.hpp"

namespace manet {

enum class MapKind { manhattan, freeway };

// One directed straight lane. Freeway lanes wrap (offset is toroidal along
// the lane); manhattan lanes end at a perimeter intersection.
struct Lane {
  int id = 0;
  Vec2 start;
  Vec2 end;
  double length = 0.0;
  double heading = 0.0;  // radians, [0, 2*pi)
  bool wraps = false;

  Vec2 direction() const;
  Vec2 point_at(double offset) const;
};

struct LanePosition {
  int lane_id = 0;
  double offset = 0.0;  // meters from lane start, in [0, length]
};

struct Intersection {
  Vec2 position;
};

// A crossing seen from one incoming lane: where it sits along the lane and
// which outgoing legs exist there. An absent leg (straight past the lane end,
// or a turn that would enter the target lane at its very end) is marked
// invalid with lane_id -1.
struct LaneCrossing {
  double offset = 0.0;
  int intersection = -1;
  bool has_straight = false;
  LanePosition left{-1, 0.0};
  LanePosition right{-1, 0.0};
};

struct LaneGraph {
  MapKind kind = MapKind::manhattan;
  SimulationArea area;
  int lanes_per_direction = 0;  // freeway maps only
  std::vector<Lane> lanes;
  std::vector<Intersection> intersections;
  std::vector<std::vector<LaneCrossing>> crossings;  // per lane, sorted by offset

  double total_lane_length() const;
  // First crossing strictly ahead of `offset` on `lane` (nullptr if none).
  const LaneCrossing* next_crossing_after(int lane, double offset) const;
  // Crossing at `offset` on `lane` (nullptr if the position is not a crossing).
  const LaneCrossing* crossing_at(int lane, double offset) const;
};

// Grid of `rows` horizontal and `cols` vertical two-way streets placed at
// (i + 0.5) / rows of the area extent; streets span the crossing bounding box
// so every lane end is an intersection. Requires rows, cols >= 2.
LaneGraph build_manhattan_map(int rows, int cols, SimulationArea area);

// `num_freeways` horizontal freeways evenly spaced vertically, each with
// `lanes_per_direction` lanes per direction offset by lane_spacing meters.
// Freeway lanes wrap at their ends and never intersect.
LaneGraph build_freeway_map(int num_freeways, int lanes_per_direction,
                            SimulationArea area, double lane_spacing = 4.0);

struct TurnProbabilities {
  double straight = 0.5;
  double left = 0.25;
  double right = 0.25;
};

// Next leg of travel from `pos`. On a manhattan map `pos` must lie on a
// crossing; the outgoing leg is drawn with the given probabilities,
// renormalized over the legs that exist there. On a freeway the lane wraps
// to offset 0 at its end and the call is a no-op elsewhere.
LanePosition next_leg(const LaneGraph& map, LanePosition pos, Rng& rng,
                      TurnProbabilities probs = {});

}  // namespace manet
