#pragma once

#include <string>
#include <vector>

#include "manet/scenario.hpp"

namespace manet {

// Grid driver behind the sweep command and the experiment suites: runs
// generate -> analyze (-> simulate) for every (model, protocol, speed, seed)
// cell and collects flat result rows. Cells execute concurrently; each owns
// an rng stream derived from (base_seed, cell index) and rows are assembled
// in grid order regardless of completion order.
struct SweepSpec {
  std::vector<std::string> models{"gvmm", "manhattan", "freeway"};
  std::vector<std::string> protocols{"aodv", "dsr", "tora"};
  std::vector<double> speeds{10, 20, 30, 40, 50, 60};
  int seeds_per_cell = 5;
  uint64_t base_seed = 1;
  ScenarioConfig base;
  bool mobility_only = false;
};

struct MobilityCell {
  std::string model;
  double max_speed = 0;
  int seed_slot = 0;
  uint64_t seed = 0;
  std::string config_hash;
  MetricsReport report;
  std::string error;  // empty on success
};

struct RoutingCell {
  std::string model;
  std::string protocol;
  double max_speed = 0;
  int seed_slot = 0;
  uint64_t seed = 0;
  std::string config_hash;
  bool pdr_defined = false, nrl_defined = false, delay_defined = false,
       popt_defined = false;
  double pdr = 0, nrl = 0, avg_delay = 0, path_optimality = 0;
  long long originated = 0, delivered = 0;
  long long dropped[sim::kDropReasonCount] = {};
  long long in_flight_at_end = 0;
  long long routing_transmissions = 0;
  bool conservation_ok = false;
  std::string error;
};

struct SweepResult {
  std::vector<MobilityCell> mobility;
  std::vector<RoutingCell> routing;
  int error_count = 0;
};

SweepResult run_sweep(const SweepSpec& spec);

// CSV renderings (header row, '.' decimals, NA for undefined metrics).
std::string mobility_csv(const std::vector<MobilityCell>& cells);
std::string mobility_summary_csv(const std::vector<MobilityCell>& cells);
std::string routing_csv(const std::vector<RoutingCell>& cells);
std::string routing_summary_csv(const std::vector<RoutingCell>& cells);

// One simulate row (the cmd_simulate output shares the sweep's row format).
RoutingCell routing_cell_from_report(const ScenarioConfig& config,
                                     const sim::SimReport& report);
std::string routing_row(const RoutingCell& cell);
std::string routing_header();
MobilityCell mobility_cell_from_report(const ScenarioConfig& config,
                                       const MetricsReport& report);
std::string mobility_row(const MobilityCell& cell);
std::string mobility_header();

}  // namespace manet
