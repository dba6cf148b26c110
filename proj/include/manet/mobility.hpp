#pragma once

#include <cstdint>
#include <vector>

#include "manet/road_map.hpp"
#include "manet/trace.hpp"

namespace manet {

// Group-vehicular model: lane-following group leaders, members deviating
// from their leader by bounded speed/angle fractions.
struct GvmmParams {
  int num_nodes = 50;
  int num_groups = 5;
  double sdr = 0.1;                    // speed deviation ratio, [0, 1]
  double adr = 0.05;                   // angle deviation ratio, [0, 1]
  double max_speed = 20.0;             // m/s
  double max_angle = 6.283185307179586;  // radians
  double duration = 900.0;
  double sample_interval = 1.0;
  double group_radius = 50.0;          // initial member placement disc
  double leader_min_speed = 1.0;
  double leader_accel_limit = 2.0;     // m/s^2
  double leader_safety_distance = 20.0;
  TurnProbabilities turn_probs;
};

// Independent lane-following vehicles (manhattan / freeway models).
struct VehicularParams {
  int num_nodes = 50;
  double max_speed = 20.0;
  double min_speed = 1.0;
  double accel_limit = 2.0;       // m/s^2
  double safety_distance = 20.0;  // m; follower matches the leader-ahead's speed
  double duration = 900.0;
  double sample_interval = 1.0;
  TurnProbabilities turn_probs;
};

struct GroupAssignment {
  std::vector<int> group_of;  // node -> group id
  std::vector<int> leaders;   // group -> leader node id
};

// Splits nodes 0..N-1 into G contiguous blocks of size ceil(N/G) or
// floor(N/G); the lowest id in each block is the leader.
GroupAssignment assign_groups(int num_nodes, int num_groups);

struct DriveParams {
  double min_speed = 1.0;
  double max_speed = 20.0;
  double accel_limit = 2.0;
};

// One lane-following path, sampled every dt over [0, duration]. The vehicle
// starts at a random lane position with a random initial speed, updates its
// speed each step by a bounded random acceleration, and draws a turn at every
// crossing it reaches. Draw order (the reproducibility contract): lane index,
// offset, initial speed, then per step one acceleration draw followed by one
// turn draw per crossing passed during that step.
std::vector<NodeState> generate_leader_path(const LaneGraph& map,
                                            const DriveParams& drive,
                                            double duration, double dt, Rng& rng,
                                            TurnProbabilities probs = {});

// Rng stream ids (mixed with the scenario seed): leaders and independent
// vehicles use stream (kLeaderStream + node), members (kMemberStream + node),
// vehicle placement kPlacementStream.
inline constexpr uint64_t kLeaderStream = 0x10000;
inline constexpr uint64_t kMemberStream = 0x20000;
inline constexpr uint64_t kPlacementStream = 0x30000;

MobilityTrace generate_gvmm(const GvmmParams& params, const LaneGraph& map,
                            uint64_t seed);

// Group-vehicular trace with externally supplied leader motion (one path per
// group, each already sampled on the target grid).
MobilityTrace generate_gvmm_with_leaders(
    const GvmmParams& params, const std::vector<std::vector<NodeState>>& leader_paths,
    SimulationArea area, uint64_t seed);

// Resamples one node of an existing trace onto a [0, duration] grid, deriving
// speed and heading from the sampled displacement.
std::vector<NodeState> leader_path_from_trace(const MobilityTrace& trace, int node,
                                              double duration, double dt);
MobilityTrace generate_manhattan(const VehicularParams& params,
                                 const LaneGraph& map, uint64_t seed);
MobilityTrace generate_freeway(const VehicularParams& params,
                               const LaneGraph& map, uint64_t seed);

}  // namespace manet
