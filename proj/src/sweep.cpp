#include "manet/sweep.hpp"

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace manet {

namespace {

constexpr uint64_t kMobilityCellStream = 0x4D0B0000;
constexpr uint64_t kRoutingCellStream = 0x50500000;

std::string na_or(double value, bool defined) {
  return defined ? format_double(value) : std::string("NA");
}

struct Stat {
  double sum = 0, sum_sq = 0;
  long long n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double sd() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = (sum_sq - n * m * m) / (n - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
};

ScenarioConfig cell_config(const SweepSpec& spec, const std::string& model,
                           const std::string& protocol, double speed,
                           uint64_t seed) {
  ScenarioConfig c = spec.base;
  c.model = model;
  if (!protocol.empty()) c.protocol = protocol;
  c.max_speed = speed;
  c.seed = seed;
  return c;
}

}  // namespace

MobilityCell mobility_cell_from_report(const ScenarioConfig& config,
                                       const MetricsReport& report) {
  MobilityCell cell;
  cell.model = config.model;
  cell.max_speed = config.max_speed;
  cell.seed = config.seed;
  cell.config_hash = config_hash_hex(config);
  cell.report = report;
  return cell;
}

RoutingCell routing_cell_from_report(const ScenarioConfig& config,
                                     const sim::SimReport& report) {
  RoutingCell cell;
  cell.model = config.model;
  cell.protocol = config.protocol;
  cell.max_speed = config.max_speed;
  cell.seed = config.seed;
  cell.config_hash = config_hash_hex(config);
  cell.originated = report.originated;
  cell.delivered = report.delivered;
  for (int r = 0; r < sim::kDropReasonCount; ++r) cell.dropped[r] = report.dropped[r];
  cell.in_flight_at_end = report.in_flight_at_end;
  cell.routing_transmissions = report.routing_transmissions;
  cell.conservation_ok = report.conservation_ok();
  try {
    cell.pdr = sim::compute_pdr(report);
    cell.pdr_defined = true;
  } catch (const sim::UndefinedMetricError&) {}
  try {
    cell.nrl = sim::compute_nrl(report);
    cell.nrl_defined = true;
  } catch (const sim::UndefinedMetricError&) {}
  try {
    cell.avg_delay = sim::compute_avg_delay(report);
    cell.delay_defined = true;
  } catch (const sim::UndefinedMetricError&) {}
  try {
    cell.path_optimality = sim::compute_path_optimality(report);
    cell.popt_defined = true;
  } catch (const sim::UndefinedMetricError&) {}
  return cell;
}

SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult result;
  const int n_models = static_cast<int>(spec.models.size());
  const int n_speeds = static_cast<int>(spec.speeds.size());
  const int n_seeds = spec.seeds_per_cell;

  const int n_mobility = n_models * n_speeds * n_seeds;
  result.mobility.resize(n_mobility);
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < n_mobility; ++idx) {
    const int m = idx / (n_speeds * n_seeds);
    const int s = (idx / n_seeds) % n_speeds;
    const int k = idx % n_seeds;
    const uint64_t seed = Rng::mix(spec.base_seed, kMobilityCellStream + idx);
    ScenarioConfig config =
        cell_config(spec, spec.models[m], "", spec.speeds[s], seed);
    MobilityCell& cell = result.mobility[idx];
    try {
      const MobilityTrace trace = generate_trace(config);
      cell = mobility_cell_from_report(
          config, compute_metrics(trace, metrics_params(config)));
    } catch (const std::exception& e) {
      cell.model = config.model;
      cell.max_speed = config.max_speed;
      cell.seed = seed;
      cell.config_hash = config_hash_hex(config);
      cell.error = e.what();
    }
    cell.seed_slot = k;
  }

  if (!spec.mobility_only) {
    const int n_protocols = static_cast<int>(spec.protocols.size());
    const int n_groups = n_models * n_speeds * n_seeds;  // one trace per group
    result.routing.resize(static_cast<size_t>(n_groups) * n_protocols);
#pragma omp parallel for schedule(dynamic)
    for (int g = 0; g < n_groups; ++g) {
      const int m = g / (n_speeds * n_seeds);
      const int s = (g / n_seeds) % n_speeds;
      const int k = g % n_seeds;
      const uint64_t seed = Rng::mix(spec.base_seed, kRoutingCellStream + g);
      for (int p = 0; p < n_protocols; ++p) {
        const size_t row = static_cast<size_t>(g) * n_protocols + p;
        ScenarioConfig config = cell_config(spec, spec.models[m],
                                            spec.protocols[p], spec.speeds[s], seed);
        RoutingCell& cell = result.routing[row];
        try {
          cell = routing_cell_from_report(config, simulate_scenario(config));
        } catch (const std::exception& e) {
          cell.model = config.model;
          cell.protocol = config.protocol;
          cell.max_speed = config.max_speed;
          cell.seed = seed;
          cell.config_hash = config_hash_hex(config);
          cell.error = e.what();
        }
        cell.seed_slot = k;
      }
    }
  }

  for (const MobilityCell& c : result.mobility)
    if (!c.error.empty()) ++result.error_count;
  for (const RoutingCell& c : result.routing)
    if (!c.error.empty()) ++result.error_count;
  return result;
}

std::string mobility_header() {
  return "model,seed,max_speed,radio_range,proximity_factor,"
         "link_duration,relative_speed,spatial_dependence,"
         "ld_tuples,rs_tuples,ds_tuples,ds_zero_speed_skipped,error,config_hash";
}

std::string mobility_row(const MobilityCell& c) {
  std::ostringstream os;
  os << c.model << ',' << c.seed << ',' << format_double(c.max_speed) << ','
     << format_double(c.report.params.radio_range) << ','
     << format_double(c.report.params.proximity_factor) << ','
     << na_or(c.report.link_duration.value, c.report.link_duration.defined) << ','
     << na_or(c.report.relative_speed.value, c.report.relative_speed.defined) << ','
     << na_or(c.report.spatial_dependence.value, c.report.spatial_dependence.defined)
     << ',' << c.report.link_duration.tuples << ',' << c.report.relative_speed.tuples
     << ',' << c.report.spatial_dependence.tuples << ','
     << c.report.ds_zero_speed_skipped << ',' << c.error << ',' << c.config_hash;
  return os.str();
}

std::string mobility_csv(const std::vector<MobilityCell>& cells) {
  std::ostringstream os;
  os << mobility_header() << '\n';
  for (const MobilityCell& c : cells) os << mobility_row(c) << '\n';
  return os.str();
}

std::string mobility_summary_csv(const std::vector<MobilityCell>& cells) {
  std::map<std::pair<std::string, double>, std::array<Stat, 3>> groups;
  for (const MobilityCell& c : cells) {
    if (!c.error.empty()) continue;
    auto& stats = groups[{c.model, c.max_speed}];
    if (c.report.link_duration.defined) stats[0].add(c.report.link_duration.value);
    if (c.report.relative_speed.defined) stats[1].add(c.report.relative_speed.value);
    if (c.report.spatial_dependence.defined)
      stats[2].add(c.report.spatial_dependence.value);
  }
  std::ostringstream os;
  os << "model,max_speed,n,link_duration_mean,link_duration_sd,"
        "relative_speed_mean,relative_speed_sd,"
        "spatial_dependence_mean,spatial_dependence_sd\n";
  for (const auto& [key, stats] : groups) {
    os << key.first << ',' << format_double(key.second) << ',' << stats[0].n;
    for (const Stat& st : stats) {
      os << ',' << na_or(st.mean(), st.n > 0) << ',' << na_or(st.sd(), st.n > 0);
    }
    os << '\n';
  }
  return os.str();
}

std::string routing_header() {
  return "protocol,model,seed,max_speed,pdr,nrl,avg_delay,path_optimality,"
         "originated,delivered,drop_no_route,drop_ttl,drop_queue_overflow,"
         "drop_link_loss,drop_expired_at_end,in_flight_at_end,"
         "routing_transmissions,conservation_ok,error,config_hash";
}

std::string routing_row(const RoutingCell& c) {
  std::ostringstream os;
  os << c.protocol << ',' << c.model << ',' << c.seed << ','
     << format_double(c.max_speed) << ',' << na_or(c.pdr, c.pdr_defined) << ','
     << na_or(c.nrl, c.nrl_defined) << ',' << na_or(c.avg_delay, c.delay_defined)
     << ',' << na_or(c.path_optimality, c.popt_defined) << ',' << c.originated
     << ',' << c.delivered;
  for (int r = 0; r < sim::kDropReasonCount; ++r) os << ',' << c.dropped[r];
  os << ',' << c.in_flight_at_end << ',' << c.routing_transmissions << ','
     << (c.conservation_ok ? 1 : 0) << ',' << c.error << ',' << c.config_hash;
  return os.str();
}

std::string routing_csv(const std::vector<RoutingCell>& cells) {
  std::ostringstream os;
  os << routing_header() << '\n';
  for (const RoutingCell& c : cells) os << routing_row(c) << '\n';
  return os.str();
}

std::string routing_summary_csv(const std::vector<RoutingCell>& cells) {
  std::map<std::tuple<std::string, std::string, double>, std::array<Stat, 4>> groups;
  for (const RoutingCell& c : cells) {
    if (!c.error.empty()) continue;
    auto& stats = groups[{c.model, c.protocol, c.max_speed}];
    if (c.pdr_defined) stats[0].add(c.pdr);
    if (c.nrl_defined) stats[1].add(c.nrl);
    if (c.delay_defined) stats[2].add(c.avg_delay);
    if (c.popt_defined) stats[3].add(c.path_optimality);
  }
  std::ostringstream os;
  os << "model,protocol,max_speed,pdr_n,pdr_mean,pdr_sd,nrl_n,nrl_mean,nrl_sd,"
        "delay_n,delay_mean,delay_sd,path_optimality_n,path_optimality_mean,"
        "path_optimality_sd\n";
  for (const auto& [key, stats] : groups) {
    os << std::get<0>(key) << ',' << std::get<1>(key) << ','
       << format_double(std::get<2>(key));
    for (const Stat& st : stats)
      os << ',' << st.n << ',' << na_or(st.mean(), st.n > 0) << ','
         << na_or(st.sd(), st.n > 0);
    os << '\n';
  }
  return os.str();
}

}  // namespace manet
