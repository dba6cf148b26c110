#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/road_map.hpp"
#include "manet/sim/sim.hpp"
#include "manet/trace.hpp"
#include "manet/trace_io.hpp"

namespace manet {

// Full experiment description. A config plus the code version determines
// every output byte.
struct ScenarioConfig {
  std::string model = "gvmm";  // gvmm | manhattan | freeway
  int nodes = 50;
  int groups = 5;
  double sdr = 0.1;
  double adr = 0.05;
  double max_speed = 20.0;
  double max_angle = 6.283185307179586;
  double min_speed = 1.0;
  double accel_limit = 2.0;
  double safety_distance = 20.0;
  double group_radius = 50.0;
  double duration = 900.0;
  double sample_interval = 1.0;
  double area_width = 1000.0;
  double area_height = 1000.0;
  int map_rows = 5;
  int map_cols = 5;
  int freeways = 3;
  int lanes_per_direction = 2;
  double lane_spacing = 4.0;
  double turn_straight = 0.5;
  double turn_left = 0.25;
  double turn_right = 0.25;
  double radio_range = 250.0;
  double proximity_factor = 2.0;
  double bitrate = 2.0e6;
  double hop_latency = 0.002;
  double loss_probability = 0.0;
  double broadcast_jitter = 0.0;
  int num_flows = 8;
  double flow_rate = 4000.0;  // bits/s
  int packet_size = 512;      // bytes
  double flow_start = 10.0;
  double flow_stagger = 1.0;
  double flow_stop_margin = 10.0;
  std::string protocol = "aodv";
  uint64_t seed = 1;
  int ttl = 32;
  int queue_capacity = 64;
  int buffer_capacity = 10;
  int tora_retry_budget = 3;
};

struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(std::string key_, const std::string& what)
      : std::runtime_error("config key '" + key_ + "': " + what),
        key(std::move(key_)) {}
};

// Sets one key from its text value. Throws ConfigError for unknown keys or
// unparseable values.
void set_config_key(ScenarioConfig& config, const std::string& key,
                    const std::string& value);

// Parses a plain-text "key = value" file body (# comments allowed).
void apply_config_text(ScenarioConfig& config, const std::string& text);

// Validates invariants; each problem names the offending key.
std::vector<ConfigError> validate_config(const ScenarioConfig& config);

// Canonical one-line-per-key rendering (fixed key order); basis of the hash.
std::string config_canonical_text(const ScenarioConfig& config);
uint64_t config_hash(const ScenarioConfig& config);
std::string config_hash_hex(const ScenarioConfig& config);

LaneGraph build_map(const ScenarioConfig& config);
MobilityTrace generate_trace(const ScenarioConfig& config);
TraceMeta trace_meta(const ScenarioConfig& config);
std::vector<sim::TrafficFlow> make_flows(const ScenarioConfig& config);
sim::RadioModel radio_model(const ScenarioConfig& config);
sim::SimOptions sim_options(const ScenarioConfig& config);
MetricsParams metrics_params(const ScenarioConfig& config);

// End-to-end: generate the trace and run the configured protocol over it.
sim::SimReport simulate_scenario(const ScenarioConfig& config);

}  // namespace manet
