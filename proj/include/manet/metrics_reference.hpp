#pragma once

#include <optional>

#include "manet/metrics.hpp"
#include "manet/trace.hpp"

namespace manet::reference {

// Serial brute-force implementations of the mobility metrics, written as
// direct enumerations over (i, j, t) tuples. They share no kernel code with
// the parallel implementations and exist as the correctness oracle for tests
// and as the baseline for the benchmark target.

AvgResult avg_link_duration(const MobilityTrace& trace, double R);

AvgResult avg_relative_speed(const MobilityTrace& trace,
                             std::optional<double> distance_filter = {},
                             bool include_zero = false);

AvgResult avg_spatial_dependence(const MobilityTrace& trace, double R, double c,
                                 bool include_zero = false);

}  // namespace manet::reference
