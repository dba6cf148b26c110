#include "manet/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace manet {

namespace {

Vec2 clamp_to_area(Vec2 p, const SimulationArea& area) {
  return {std::clamp(p.x, 0.0, area.width), std::clamp(p.y, 0.0, area.height)};
}

double clamp_speed(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

// Advances `pos` by `dist` meters along the lane graph, drawing a turn at
// every crossing reached (manhattan) or wrapping at lane ends (freeway).
void advance_on_lanes(const LaneGraph& map, LanePosition& pos, double dist,
                      Rng& rng, TurnProbabilities probs) {
  while (dist > 1e-12) {
    const Lane& lane = map.lanes[pos.lane_id];
    if (map.kind == MapKind::freeway) {
      const double remaining = lane.length - pos.offset;
      if (dist < remaining) {
        pos.offset += dist;
        return;
      }
      dist -= remaining;
      pos = next_leg(map, {pos.lane_id, lane.length}, rng, probs);
      continue;
    }
    const LaneCrossing* next = map.next_crossing_after(pos.lane_id, pos.offset);
    if (!next) {
      // Sitting on the lane's final crossing; decide the turn and continue.
      pos = next_leg(map, pos, rng, probs);
      continue;
    }
    const double to_crossing = next->offset - pos.offset;
    if (dist < to_crossing) {
      pos.offset += dist;
      return;
    }
    dist -= to_crossing;
    pos = next_leg(map, {pos.lane_id, next->offset}, rng, probs);
  }
}

int sample_steps(double duration, double dt) {
  return static_cast<int>(std::llround(duration / dt)) + 1;
}

void check_time_grid(double duration, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("sample_interval must be > 0");
  if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
}

void check_vehicular(const VehicularParams& p) {
  if (p.num_nodes < 1) throw std::invalid_argument("num_nodes must be >= 1");
  if (p.max_speed <= 0.0) throw std::invalid_argument("max_speed must be > 0");
  if (p.min_speed < 0.0 || p.min_speed > p.max_speed)
    throw std::invalid_argument("min_speed must be in [0, max_speed]");
  if (p.accel_limit < 0.0) throw std::invalid_argument("accel_limit must be >= 0");
  if (p.safety_distance < 0.0) throw std::invalid_argument("safety_distance must be >= 0");
  check_time_grid(p.duration, p.sample_interval);
}

struct LaneVehicle {
  LanePosition pos;
  double desired = 0.0;  // free bounded random walk
  double speed = 0.0;    // actual: tracks desired at accel rate, capped by safety
};

// Distance from `back` to `front` along a lane (toroidal on freeways).
double gap_along_lane(const Lane& lane, double back, double front) {
  double gap = front - back;
  if (lane.wraps && gap < 0.0) gap += lane.length;
  return gap;
}

// Shared manhattan/freeway vehicle stepper. Per step and in node-id order,
// every vehicle draws a target speed; a vehicle within safety_distance of the
// vehicle ahead on its lane is capped at that vehicle's target speed. Samples
// record the state at the start of each interval.
MobilityTrace drive_vehicles(const VehicularParams& params, const LaneGraph& map,
                             uint64_t seed, std::vector<LaneVehicle> vehicles) {
  const int n = params.num_nodes;
  const double dt = params.sample_interval;
  const int steps = sample_steps(params.duration, dt);
  MobilityTrace trace = make_trace(n, params.duration, dt, map.area);

  // Freeway lanes carry speed classes (outer slow, inner fast): vehicles on
  // lane l of L keep desired speeds within the l-th band of [min, max].
  auto band = [&](int lane_id) -> std::pair<double, double> {
    if (map.kind != MapKind::freeway || map.lanes_per_direction < 2)
      return {params.min_speed, params.max_speed};
    const int per_dir = map.lanes_per_direction;
    const int l = (lane_id % (2 * per_dir)) % per_dir;
    const double width = (params.max_speed - params.min_speed) / per_dir;
    return {params.min_speed + l * width, params.min_speed + (l + 1) * width};
  };

  std::vector<Rng> streams;
  streams.reserve(n);
  for (int i = 0; i < n; ++i) streams.emplace_back(Rng::mix(seed, kLeaderStream + i));
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] = band(vehicles[i].pos.lane_id);
    vehicles[i].desired = streams[i].uniform(lo, hi);
    vehicles[i].speed = vehicles[i].desired;
  }

  std::vector<double> uncapped(n), prev_speed(n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  for (int step = 0; step < steps; ++step) {
    for (int i = 0; i < n; ++i) {
      LaneVehicle& v = vehicles[i];
      const auto [lo, hi] = band(v.pos.lane_id);
      v.desired = clamp_speed(v.desired + streams[i].symmetric() * params.accel_limit * dt,
                              lo, hi);
      // Acceleration is rate-limited; braking may be arbitrarily sharp.
      uncapped[i] = std::min(v.desired, v.speed + params.accel_limit * dt);
      prev_speed[i] = v.speed;
    }

    // Safety pass, front-to-back per lane: a follower within safety distance
    // decelerates to the speed of the vehicle ahead. On ring lanes the
    // frontmost follows the rearmost using its previous-step speed.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (vehicles[a].pos.lane_id != vehicles[b].pos.lane_id)
        return vehicles[a].pos.lane_id < vehicles[b].pos.lane_id;
      if (vehicles[a].pos.offset != vehicles[b].pos.offset)
        return vehicles[a].pos.offset > vehicles[b].pos.offset;
      return a < b;
    });
    for (size_t k = 0; k < order.size(); ++k) {
      const int i = order[k];
      const Lane& lane = map.lanes[vehicles[i].pos.lane_id];
      const bool lane_front =
          k == 0 || vehicles[order[k - 1]].pos.lane_id != vehicles[i].pos.lane_id;
      double cap = uncapped[i];
      if (!lane_front) {
        const int ahead = order[k - 1];
        const double gap = gap_along_lane(lane, vehicles[i].pos.offset,
                                          vehicles[ahead].pos.offset);
        if (gap <= params.safety_distance) cap = std::min(cap, vehicles[ahead].speed);
      } else if (lane.wraps) {
        size_t last = k;
        while (last + 1 < order.size() &&
               vehicles[order[last + 1]].pos.lane_id == vehicles[i].pos.lane_id)
          ++last;
        const int behind_most = order[last];
        if (behind_most != i) {
          const double gap = gap_along_lane(lane, vehicles[i].pos.offset,
                                            vehicles[behind_most].pos.offset);
          if (gap <= params.safety_distance)
            cap = std::min(cap, prev_speed[behind_most]);
        }
      }
      vehicles[i].speed = cap;
    }

    for (int i = 0; i < n; ++i) {
      const Lane& lane = map.lanes[vehicles[i].pos.lane_id];
      trace.state_at(step, i) = {lane.point_at(vehicles[i].pos.offset),
                                 vehicles[i].speed, lane.heading};
    }
    if (step + 1 < steps) {
      for (int i = 0; i < n; ++i) {
        const double before = vehicles[i].pos.offset;
        advance_on_lanes(map, vehicles[i].pos, vehicles[i].speed * dt, streams[i],
                         params.turn_probs);
        // A wrapped freeway vehicle models a fresh entrant replacing one that
        // left, so its desired speed is drawn anew (within its lane's band).
        if (map.kind == MapKind::freeway && vehicles[i].pos.offset < before) {
          const auto [lo, hi] = band(vehicles[i].pos.lane_id);
          vehicles[i].desired = streams[i].uniform(lo, hi);
        }
      }
    }
  }
  return trace;
}

// Seeded placement; rejects positions within safety_distance of an already
// placed vehicle on the same lane.
std::vector<LaneVehicle> place_vehicles(const VehicularParams& params,
                                        const LaneGraph& map, uint64_t seed) {
  const double needed = params.num_nodes * std::max(params.safety_distance, 1.0);
  if (needed > map.total_lane_length())
    throw std::invalid_argument("more nodes than lane capacity at safety spacing");

  Rng rng(Rng::mix(seed, kPlacementStream));
  std::vector<LaneVehicle> vehicles(params.num_nodes);
  for (int i = 0; i < params.num_nodes; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      const int lane_id = rng.uniform_int(static_cast<int>(map.lanes.size()));
      const Lane& lane = map.lanes[lane_id];
      const double offset = rng.uniform(0.0, lane.length);
      placed = true;
      for (int j = 0; j < i; ++j) {
        if (vehicles[j].pos.lane_id != lane_id) continue;
        double gap = std::fabs(vehicles[j].pos.offset - offset);
        if (lane.wraps) gap = std::min(gap, lane.length - gap);
        if (gap < params.safety_distance) {
          placed = false;
          break;
        }
      }
      if (placed) vehicles[i].pos = {lane_id, offset};
    }
    if (!placed)
      throw std::invalid_argument("could not place nodes at safety spacing; map too crowded");
  }
  return vehicles;
}

void check_gvmm(const GvmmParams& p) {
  if (p.num_nodes < 1) throw std::invalid_argument("num_nodes must be >= 1");
  if (p.num_groups < 1 || p.num_groups > p.num_nodes)
    throw std::invalid_argument("num_groups must be in [1, num_nodes]");
  if (p.sdr < 0.0 || p.sdr > 1.0) throw std::invalid_argument("sdr must be in [0, 1]");
  if (p.adr < 0.0 || p.adr > 1.0) throw std::invalid_argument("adr must be in [0, 1]");
  if (p.max_speed <= 0.0) throw std::invalid_argument("max_speed must be > 0");
  if (p.max_angle < 0.0) throw std::invalid_argument("max_angle must be >= 0");
  if (p.group_radius < 0.0) throw std::invalid_argument("group_radius must be >= 0");
  check_time_grid(p.duration, p.sample_interval);
}

}  // namespace

GroupAssignment assign_groups(int num_nodes, int num_groups) {
  if (num_nodes < 1) throw std::invalid_argument("num_nodes must be >= 1");
  if (num_groups < 1 || num_groups > num_nodes)
    throw std::invalid_argument("num_groups must be in [1, num_nodes]");
  GroupAssignment a;
  a.group_of.resize(num_nodes);
  a.leaders.resize(num_groups);
  const int base = num_nodes / num_groups;
  const int extra = num_nodes % num_groups;
  int node = 0;
  for (int g = 0; g < num_groups; ++g) {
    const int size = base + (g < extra ? 1 : 0);
    a.leaders[g] = node;
    for (int k = 0; k < size; ++k) a.group_of[node++] = g;
  }
  return a;
}

std::vector<NodeState> generate_leader_path(const LaneGraph& map,
                                            const DriveParams& drive,
                                            double duration, double dt, Rng& rng,
                                            TurnProbabilities probs) {
  if (map.kind != MapKind::manhattan)
    throw std::invalid_argument("leader paths require a manhattan map");
  if (drive.max_speed <= 0.0 || drive.min_speed < 0.0 || drive.min_speed > drive.max_speed)
    throw std::invalid_argument("bad leader speed range");
  check_time_grid(duration, dt);

  const int steps = sample_steps(duration, dt);
  LanePosition pos;
  pos.lane_id = rng.uniform_int(static_cast<int>(map.lanes.size()));
  pos.offset = rng.uniform(0.0, map.lanes[pos.lane_id].length);
  double speed = rng.uniform(drive.min_speed, drive.max_speed);

  std::vector<NodeState> path;
  path.reserve(steps);
  for (int step = 0; step < steps; ++step) {
    speed = clamp_speed(speed + rng.symmetric() * drive.accel_limit * dt,
                        drive.min_speed, drive.max_speed);
    const Lane& lane = map.lanes[pos.lane_id];
    path.push_back({lane.point_at(pos.offset), speed, lane.heading});
    if (step + 1 < steps) advance_on_lanes(map, pos, speed * dt, rng, probs);
  }
  return path;
}

MobilityTrace generate_gvmm(const GvmmParams& params, const LaneGraph& map,
                            uint64_t seed) {
  check_gvmm(params);
  if (map.kind != MapKind::manhattan)
    throw std::invalid_argument("gvmm requires a manhattan map for its leaders");

  // Leader motion is taken from a vehicular trace: a full traffic run of the
  // manhattan model on the same map, one vehicle per group. Driving leaders
  // from real traffic keeps their speed distribution identical to the
  // stand-alone vehicular models.
  VehicularParams traffic;
  traffic.num_nodes = params.num_nodes;
  traffic.max_speed = params.max_speed;
  traffic.min_speed = params.leader_min_speed;
  traffic.accel_limit = params.leader_accel_limit;
  traffic.safety_distance = params.leader_safety_distance;
  traffic.duration = params.duration;
  traffic.sample_interval = params.sample_interval;
  traffic.turn_probs = params.turn_probs;
  const MobilityTrace traffic_trace = generate_manhattan(traffic, map, seed);

  const int steps = sample_steps(params.duration, params.sample_interval);
  std::vector<std::vector<NodeState>> leader_paths(params.num_groups);
  for (int g = 0; g < params.num_groups; ++g) {
    leader_paths[g].resize(steps);
    for (int step = 0; step < steps; ++step)
      leader_paths[g][step] = traffic_trace.state_at(step, g);
  }
  return generate_gvmm_with_leaders(params, leader_paths, map.area, seed);
}

MobilityTrace generate_gvmm_with_leaders(
    const GvmmParams& params, const std::vector<std::vector<NodeState>>& leader_paths,
    SimulationArea area, uint64_t seed) {
  check_gvmm(params);
  if (leader_paths.size() != static_cast<size_t>(params.num_groups))
    throw std::invalid_argument("need exactly one leader path per group");

  const int n = params.num_nodes;
  const double dt = params.sample_interval;
  const int steps = sample_steps(params.duration, dt);
  for (const auto& path : leader_paths)
    if (static_cast<int>(path.size()) != steps)
      throw std::invalid_argument("leader path does not match the sample grid");
  const GroupAssignment groups = assign_groups(n, params.num_groups);
  MobilityTrace trace = make_trace(n, params.duration, dt, area);

  for (int node = 0; node < n; ++node) {
    const int g = groups.group_of[node];
    const std::vector<NodeState>& leader = leader_paths[g];
    if (node == groups.leaders[g]) {
      for (int step = 0; step < steps; ++step) trace.state_at(step, node) = leader[step];
      continue;
    }
    Rng rng(Rng::mix(seed, kMemberStream + node));
    const double angle = rng.uniform(0.0, 2.0 * 3.141592653589793);
    const double radius = params.group_radius * std::sqrt(rng.uniform());
    Vec2 pos = clamp_to_area(leader[0].position +
                                 Vec2{radius * std::cos(angle), radius * std::sin(angle)},
                             area);
    for (int step = 0; step < steps; ++step) {
      const double speed = clamp_speed(
          leader[step].speed + rng.symmetric() * params.sdr * params.max_speed,
          0.0, params.max_speed);
      const double heading =
          wrap_heading(leader[step].heading + rng.symmetric() * params.adr * params.max_angle);
      trace.state_at(step, node) = {pos, speed, heading};
      if (step + 1 < steps)
        pos = clamp_to_area(pos + heading_to_velocity(speed, heading) * dt, area);
    }
  }
  return trace;
}

std::vector<NodeState> leader_path_from_trace(const MobilityTrace& trace, int node,
                                              double duration, double dt) {
  check_time_grid(duration, dt);
  if (duration > trace.duration + 1e-9)
    throw std::invalid_argument("external leader trace is shorter than the requested duration");
  const int steps = sample_steps(duration, dt);
  std::vector<NodeState> path(steps);
  for (int step = 0; step < steps; ++step) {
    const double t = step * dt;
    const Vec2 p = position_at(trace, node, t);
    const double t2 = std::min(t + dt, trace.duration);
    const Vec2 q = position_at(trace, node, t2);
    NodeState st;
    st.position = p;
    if (t2 > t) {
      const Vec2 v = (q - p) * (1.0 / (t2 - t));
      st.speed = v.norm();
      st.heading = st.speed > 0.0 ? wrap_heading(std::atan2(v.y, v.x)) : 0.0;
    } else if (step > 0) {
      st.speed = path[step - 1].speed;
      st.heading = path[step - 1].heading;
    }
    path[step] = st;
  }
  return path;
}

MobilityTrace generate_manhattan(const VehicularParams& params,
                                 const LaneGraph& map, uint64_t seed) {
  check_vehicular(params);
  if (map.kind != MapKind::manhattan)
    throw std::invalid_argument("manhattan model requires a manhattan map");
  return drive_vehicles(params, map, seed, place_vehicles(params, map, seed));
}

MobilityTrace generate_freeway(const VehicularParams& params,
                               const LaneGraph& map, uint64_t seed) {
  check_vehicular(params);
  if (map.kind != MapKind::freeway)
    throw std::invalid_argument("freeway model requires a freeway map");
  return drive_vehicles(params, map, seed, place_vehicles(params, map, seed));
}

}  // namespace manet
