#include "manet/road_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace manet {

namespace {
constexpr double kOffsetEps = 1e-6;

Lane make_lane(int id, Vec2 start, Vec2 end, bool wraps) {
  Lane lane;
  lane.id = id;
  lane.start = start;
  lane.end = end;
  lane.length = distance(start, end);
  lane.heading = wrap_heading(std::atan2(end.y - start.y, end.x - start.x));
  lane.wraps = wraps;
  return lane;
}
}  // namespace

Vec2 Lane::direction() const {
  return {(end.x - start.x) / length, (end.y - start.y) / length};
}

Vec2 Lane::point_at(double offset) const { return start + direction() * offset; }

double LaneGraph::total_lane_length() const {
  double total = 0.0;
  for (const Lane& lane : lanes) total += lane.length;
  return total;
}

const LaneCrossing* LaneGraph::next_crossing_after(int lane, double offset) const {
  for (const LaneCrossing& c : crossings[lane])
    if (c.offset > offset + kOffsetEps) return &c;
  return nullptr;
}

const LaneCrossing* LaneGraph::crossing_at(int lane, double offset) const {
  for (const LaneCrossing& c : crossings[lane])
    if (std::fabs(c.offset - offset) <= kOffsetEps) return &c;
  return nullptr;
}

LaneGraph build_manhattan_map(int rows, int cols, SimulationArea area) {
  if (rows < 2 || cols < 2)
    throw std::invalid_argument("manhattan map needs rows >= 2 and cols >= 2");
  if (area.width <= 0.0 || area.height <= 0.0)
    throw std::invalid_argument("area must be positive");

  LaneGraph g;
  g.kind = MapKind::manhattan;
  g.area = area;

  std::vector<double> xs(cols), ys(rows);
  for (int j = 0; j < cols; ++j) xs[j] = (j + 0.5) * area.width / cols;
  for (int i = 0; i < rows; ++i) ys[i] = (i + 0.5) * area.height / rows;
  const double x0 = xs.front(), x1 = xs.back();
  const double y0 = ys.front(), y1 = ys.back();

  // Lane ids: per horizontal street an east lane then a west lane, then per
  // vertical street a north lane then a south lane.
  for (int i = 0; i < rows; ++i) {
    g.lanes.push_back(make_lane(2 * i, {x0, ys[i]}, {x1, ys[i]}, false));
    g.lanes.push_back(make_lane(2 * i + 1, {x1, ys[i]}, {x0, ys[i]}, false));
  }
  const int vbase = 2 * rows;
  for (int j = 0; j < cols; ++j) {
    g.lanes.push_back(make_lane(vbase + 2 * j, {xs[j], y0}, {xs[j], y1}, false));
    g.lanes.push_back(make_lane(vbase + 2 * j + 1, {xs[j], y1}, {xs[j], y0}, false));
  }

  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      g.intersections.push_back({{xs[j], ys[i]}});

  const int east = 0, west = 1, north = 2, south = 3;
  auto lane_id = [&](int dir, int index) {
    switch (dir) {
      case east: return 2 * index;
      case west: return 2 * index + 1;
      case north: return vbase + 2 * index;
      default: return vbase + 2 * index + 1;
    }
  };
  // Offset of intersection (i, j) along a lane of the given direction.
  auto offset_on = [&](int dir, int i, int j) {
    switch (dir) {
      case east: return xs[j] - x0;
      case west: return x1 - xs[j];
      case north: return ys[i] - y0;
      default: return y1 - ys[i];
    }
  };
  auto entry = [&](int dir, int i, int j) -> LanePosition {
    const int index = (dir == east || dir == west) ? i : j;
    return {lane_id(dir, index), offset_on(dir, i, j)};
  };
  // A turn is only usable if it enters the target lane short of its end.
  auto usable = [&](LanePosition p) {
    return p.offset < g.lanes[p.lane_id].length - kOffsetEps;
  };
  const int left_of[4] = {north, south, west, east};
  const int right_of[4] = {south, north, east, west};

  g.crossings.resize(g.lanes.size());
  for (int dir = 0; dir < 4; ++dir) {
    const int count = (dir == east || dir == west) ? rows : cols;
    for (int index = 0; index < count; ++index) {
      const int lane = lane_id(dir, index);
      for (int other = 0; other < ((dir == east || dir == west) ? cols : rows); ++other) {
        const int i = (dir == east || dir == west) ? index : other;
        const int j = (dir == east || dir == west) ? other : index;
        LaneCrossing c;
        c.offset = offset_on(dir, i, j);
        c.intersection = i * cols + j;
        c.has_straight = c.offset < g.lanes[lane].length - kOffsetEps;
        LanePosition l = entry(left_of[dir], i, j);
        LanePosition r = entry(right_of[dir], i, j);
        if (usable(l)) c.left = l;
        if (usable(r)) c.right = r;
        g.crossings[lane].push_back(c);
      }
      std::sort(g.crossings[lane].begin(), g.crossings[lane].end(),
                [](const LaneCrossing& a, const LaneCrossing& b) {
                  return a.offset < b.offset;
                });
    }
  }
  return g;
}

LaneGraph build_freeway_map(int num_freeways, int lanes_per_direction,
                            SimulationArea area, double lane_spacing) {
  if (num_freeways < 1 || lanes_per_direction < 1)
    throw std::invalid_argument("freeway map needs num_freeways >= 1 and lanes_per_direction >= 1");
  if (area.width <= 0.0 || area.height <= 0.0)
    throw std::invalid_argument("area must be positive");

  LaneGraph g;
  g.kind = MapKind::freeway;
  g.area = area;
  g.lanes_per_direction = lanes_per_direction;

  int id = 0;
  for (int k = 0; k < num_freeways; ++k) {
    const double yc = (k + 0.5) * area.height / num_freeways;
    for (int l = 0; l < lanes_per_direction; ++l) {
      const double y = yc - lane_spacing * (l + 0.5);
      g.lanes.push_back(make_lane(id++, {0.0, y}, {area.width, y}, true));
    }
    for (int l = 0; l < lanes_per_direction; ++l) {
      const double y = yc + lane_spacing * (l + 0.5);
      g.lanes.push_back(make_lane(id++, {area.width, y}, {0.0, y}, true));
    }
  }
  for (const Lane& lane : g.lanes)
    if (!area.contains(lane.start) || !area.contains(lane.end))
      throw std::invalid_argument("freeway lanes do not fit the area; reduce lanes or spacing");
  g.crossings.resize(g.lanes.size());
  return g;
}

LanePosition next_leg(const LaneGraph& map, LanePosition pos, Rng& rng,
                      TurnProbabilities probs) {
  const Lane& lane = map.lanes[pos.lane_id];
  if (map.kind == MapKind::freeway) {
    if (pos.offset >= lane.length - kOffsetEps) return {pos.lane_id, 0.0};
    return pos;
  }

  const LaneCrossing* c = map.crossing_at(pos.lane_id, pos.offset);
  if (!c) throw std::logic_error("next_leg called away from an intersection");

  struct Option {
    LanePosition to;
    double weight;
  };
  Option options[3];
  int count = 0;
  if (c->has_straight) options[count++] = {{pos.lane_id, c->offset}, probs.straight};
  if (c->left.lane_id >= 0) options[count++] = {c->left, probs.left};
  if (c->right.lane_id >= 0) options[count++] = {c->right, probs.right};
  if (count == 0) throw std::logic_error("dangling lane end with no outgoing options");

  double total = 0.0;
  for (int k = 0; k < count; ++k) total += options[k].weight;
  double u = rng.uniform() * total;
  for (int k = 0; k < count; ++k) {
    u -= options[k].weight;
    if (u < 0.0 || k == count - 1) return options[k].to;
  }
  return options[count - 1].to;
}

}  // namespace manet
