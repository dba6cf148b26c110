#pragma once

#include <optional>
#include <vector>

#include "manet/trace.hpp"

namespace manet {

// Maximal run of consecutive sample times during which nodes i < j stayed
// within radio range. A single-sample contact counts one sample interval,
// so duration = (end - start) + dt.
struct LinkEpisode {
  int i = 0;
  int j = 0;
  double start = 0.0;
  double end = 0.0;
  double duration = 0.0;
};

// An averaged metric plus the number of tuples it was averaged over.
// defined == false means no tuple qualified; value is 0 in that case and
// must not be fed into orderings.
struct AvgResult {
  double value = 0.0;
  long long tuples = 0;
  bool defined = false;
};

struct MetricsParams {
  double radio_range = 250.0;   // R, meters
  double proximity_factor = 2.0;  // spatial dependence counts pairs within c*R
  std::optional<double> rs_distance_filter;  // optional range gate for relative speed
  bool include_zero_tuples = false;  // keep tuples whose metric value is exactly 0
};

struct MetricsReport {
  AvgResult link_duration;        // seconds
  AvgResult relative_speed;       // m/s
  AvgResult spatial_dependence;   // dimensionless, [-1, 1]
  long long ds_zero_speed_skipped = 0;  // in-range tuples dropped because a node was still
  MetricsParams params;
};

// Per-pair link episodes under a unit-disk radio of range R, using the trace's
// sample grid. Episodes are emitted in (i, j, start) order.
std::vector<LinkEpisode> extract_link_episodes(const MobilityTrace& trace, double R);

// Mean episode duration over episodes with nonzero duration.
AvgResult avg_link_duration(const std::vector<LinkEpisode>& episodes);

// Mean |V_i - V_j| over ordered node pairs and sample times. Tuples with a
// value of exactly 0 are excluded unless include_zero; an optional distance
// filter keeps only tuples with the pair within that range.
AvgResult avg_relative_speed(const MobilityTrace& trace,
                             std::optional<double> distance_filter = {},
                             bool include_zero = false);

// Mean of cos(angle between velocities) * (min speed / max speed) over
// ordered pairs within c * R of each other with both nodes moving. Zero-valued
// tuples are excluded unless include_zero.
AvgResult avg_spatial_dependence(const MobilityTrace& trace, double R, double c,
                                 bool include_zero = false,
                                 long long* zero_speed_skipped = nullptr);

MetricsReport compute_metrics(const MobilityTrace& trace,
                              const MetricsParams& params = {});

}  // namespace manet
