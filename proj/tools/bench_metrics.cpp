// Benchmark: OpenMP metric kernels against the serial reference
// implementations on generated traces of growing size.

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "manet/metrics.hpp"
#include "manet/metrics_reference.hpp"
#include "manet/mobility.hpp"
#include "manet/road_map.hpp"

using namespace manet;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  const SimulationArea area{1000.0, 1000.0};
  const LaneGraph map = build_manhattan_map(5, 5, area);

  std::printf("threads=%d reps=%d\n", omp_get_max_threads(), reps);
  std::printf("%6s %8s  %10s %10s %8s\n", "nodes", "steps", "parallel", "serial",
              "speedup");

  for (int nodes : {25, 50, 100, 200}) {
    VehicularParams params;
    params.num_nodes = nodes;
    params.duration = 900.0;
    const MobilityTrace trace = generate_manhattan(params, map, 42);

    volatile double sink = 0.0;
    const double parallel = time_best_of(reps, [&] {
      const MetricsReport r = compute_metrics(trace);
      sink = r.link_duration.value + r.relative_speed.value +
             r.spatial_dependence.value;
    });
    const double serial = time_best_of(reps, [&] {
      const AvgResult ld = reference::avg_link_duration(trace, 250.0);
      const AvgResult rs = reference::avg_relative_speed(trace);
      const AvgResult ds = reference::avg_spatial_dependence(trace, 250.0, 2.0);
      sink = ld.value + rs.value + ds.value;
    });
    std::printf("%6d %8d  %9.4fs %9.4fs %7.2fx\n", nodes, trace.step_count(),
                parallel, serial, serial / parallel);
  }
  return 0;
}
