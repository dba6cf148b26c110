#include "manet/scenario.hpp"

#include <charconv>
#include <functional>
#include <sstream>

namespace manet {

namespace {

struct KeyBinding {
  const char* name;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* begin = value.data();
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(key, "cannot parse '" + value + "'");
  return out;
}

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

const std::vector<KeyBinding>& bindings() {
  static const std::vector<KeyBinding> table = [] {
    std::vector<KeyBinding> t;
    auto add_str = [&t](const char* name, std::string ScenarioConfig::* field) {
      t.push_back({name,
                   [field](const ScenarioConfig& c) { return c.*field; },
                   [field](ScenarioConfig& c, const std::string& v) { c.*field = v; }});
    };
    auto add_int = [&t](const char* name, int ScenarioConfig::* field) {
      t.push_back({name,
                   [field](const ScenarioConfig& c) { return std::to_string(c.*field); },
                   [field, name](ScenarioConfig& c, const std::string& v) {
                     c.*field = parse_number<int>(name, v);
                   }});
    };
    auto add_u64 = [&t](const char* name, uint64_t ScenarioConfig::* field) {
      t.push_back({name,
                   [field](const ScenarioConfig& c) { return std::to_string(c.*field); },
                   [field, name](ScenarioConfig& c, const std::string& v) {
                     c.*field = parse_number<uint64_t>(name, v);
                   }});
    };
    auto add_dbl = [&t](const char* name, double ScenarioConfig::* field) {
      t.push_back({name,
                   [field](const ScenarioConfig& c) { return format_double(c.*field); },
                   [field, name](ScenarioConfig& c, const std::string& v) {
                     c.*field = parse_number<double>(name, v);
                   }});
    };
    add_str("model", &ScenarioConfig::model);
    add_int("nodes", &ScenarioConfig::nodes);
    add_int("groups", &ScenarioConfig::groups);
    add_dbl("sdr", &ScenarioConfig::sdr);
    add_dbl("adr", &ScenarioConfig::adr);
    add_dbl("max_speed", &ScenarioConfig::max_speed);
    add_dbl("max_angle", &ScenarioConfig::max_angle);
    add_dbl("min_speed", &ScenarioConfig::min_speed);
    add_dbl("accel_limit", &ScenarioConfig::accel_limit);
    add_dbl("safety_distance", &ScenarioConfig::safety_distance);
    add_dbl("group_radius", &ScenarioConfig::group_radius);
    add_dbl("duration", &ScenarioConfig::duration);
    add_dbl("sample_interval", &ScenarioConfig::sample_interval);
    add_dbl("area_width", &ScenarioConfig::area_width);
    add_dbl("area_height", &ScenarioConfig::area_height);
    add_int("map_rows", &ScenarioConfig::map_rows);
    add_int("map_cols", &ScenarioConfig::map_cols);
    add_int("freeways", &ScenarioConfig::freeways);
    add_int("lanes_per_direction", &ScenarioConfig::lanes_per_direction);
    add_dbl("lane_spacing", &ScenarioConfig::lane_spacing);
    add_dbl("turn_straight", &ScenarioConfig::turn_straight);
    add_dbl("turn_left", &ScenarioConfig::turn_left);
    add_dbl("turn_right", &ScenarioConfig::turn_right);
    add_dbl("radio_range", &ScenarioConfig::radio_range);
    add_dbl("proximity_factor", &ScenarioConfig::proximity_factor);
    add_dbl("bitrate", &ScenarioConfig::bitrate);
    add_dbl("hop_latency", &ScenarioConfig::hop_latency);
    add_dbl("loss_probability", &ScenarioConfig::loss_probability);
    add_dbl("broadcast_jitter", &ScenarioConfig::broadcast_jitter);
    add_int("num_flows", &ScenarioConfig::num_flows);
    add_dbl("flow_rate", &ScenarioConfig::flow_rate);
    add_int("packet_size", &ScenarioConfig::packet_size);
    add_dbl("flow_start", &ScenarioConfig::flow_start);
    add_dbl("flow_stagger", &ScenarioConfig::flow_stagger);
    add_dbl("flow_stop_margin", &ScenarioConfig::flow_stop_margin);
    add_str("protocol", &ScenarioConfig::protocol);
    add_u64("seed", &ScenarioConfig::seed);
    add_int("ttl", &ScenarioConfig::ttl);
    add_int("queue_capacity", &ScenarioConfig::queue_capacity);
    add_int("buffer_capacity", &ScenarioConfig::buffer_capacity);
    add_int("tora_retry_budget", &ScenarioConfig::tora_retry_budget);
    return t;
  }();
  return table;
}

}  // namespace

void set_config_key(ScenarioConfig& config, const std::string& key,
                    const std::string& value) {
  for (const KeyBinding& b : bindings()) {
    if (key == b.name) {
      b.set(config, value);
      return;
    }
  }
  throw ConfigError(key, "unknown config key");
}

void apply_config_text(ScenarioConfig& config, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "expected 'key = value' on line " + std::to_string(lineno));
    set_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::vector<ConfigError> validate_config(const ScenarioConfig& c) {
  std::vector<ConfigError> errors;
  auto bad = [&errors](const char* key, const char* what) {
    errors.emplace_back(key, what);
  };
  if (c.model != "gvmm" && c.model != "manhattan" && c.model != "freeway")
    bad("model", "must be gvmm, manhattan or freeway");
  if (c.nodes < 1) bad("nodes", "must be >= 1");
  if (c.groups < 1 || c.groups > c.nodes) bad("groups", "must be in [1, nodes]");
  if (c.sdr < 0 || c.sdr > 1) bad("sdr", "must be in [0, 1]");
  if (c.adr < 0 || c.adr > 1) bad("adr", "must be in [0, 1]");
  if (c.max_speed <= 0) bad("max_speed", "must be > 0");
  if (c.max_angle < 0) bad("max_angle", "must be >= 0");
  if (c.min_speed < 0 || c.min_speed > c.max_speed)
    bad("min_speed", "must be in [0, max_speed]");
  if (c.accel_limit < 0) bad("accel_limit", "must be >= 0");
  if (c.safety_distance < 0) bad("safety_distance", "must be >= 0");
  if (c.group_radius < 0) bad("group_radius", "must be >= 0");
  if (c.duration <= 0) bad("duration", "must be > 0");
  if (c.sample_interval <= 0) bad("sample_interval", "must be > 0");
  if (c.area_width <= 0) bad("area_width", "must be > 0");
  if (c.area_height <= 0) bad("area_height", "must be > 0");
  if (c.map_rows < 2) bad("map_rows", "must be >= 2");
  if (c.map_cols < 2) bad("map_cols", "must be >= 2");
  if (c.freeways < 1) bad("freeways", "must be >= 1");
  if (c.lanes_per_direction < 1) bad("lanes_per_direction", "must be >= 1");
  if (c.lane_spacing <= 0) bad("lane_spacing", "must be > 0");
  if (c.turn_straight < 0 || c.turn_left < 0 || c.turn_right < 0 ||
      c.turn_straight + c.turn_left + c.turn_right <= 0)
    bad("turn_straight", "turn probabilities must be >= 0 with a positive sum");
  if (c.radio_range <= 0) bad("radio_range", "must be > 0");
  if (c.proximity_factor <= 0) bad("proximity_factor", "must be > 0");
  if (c.bitrate <= 0) bad("bitrate", "must be > 0");
  if (c.hop_latency < 0) bad("hop_latency", "must be >= 0");
  if (c.loss_probability < 0 || c.loss_probability > 1)
    bad("loss_probability", "must be in [0, 1]");
  if (c.broadcast_jitter < 0) bad("broadcast_jitter", "must be >= 0");
  if (c.num_flows < 0) bad("num_flows", "must be >= 0");
  if (c.num_flows > 0 && c.nodes < 2) bad("num_flows", "flows need at least 2 nodes");
  if (c.flow_rate <= 0) bad("flow_rate", "must be > 0");
  if (c.packet_size < 1) bad("packet_size", "must be >= 1 byte");
  if (c.flow_start < 0 || c.flow_start > c.duration)
    bad("flow_start", "must be in [0, duration]");
  if (c.flow_stagger < 0) bad("flow_stagger", "must be >= 0");
  if (c.flow_stop_margin < 0 || c.flow_stop_margin > c.duration)
    bad("flow_stop_margin", "must be in [0, duration]");
  if (c.protocol != "aodv" && c.protocol != "dsr" && c.protocol != "tora")
    bad("protocol", "must be aodv, dsr or tora");
  if (c.ttl < 1) bad("ttl", "must be >= 1");
  if (c.queue_capacity < 1) bad("queue_capacity", "must be >= 1");
  if (c.buffer_capacity < 1) bad("buffer_capacity", "must be >= 1");
  if (c.tora_retry_budget < 0) bad("tora_retry_budget", "must be >= 0");
  return errors;
}

std::string config_canonical_text(const ScenarioConfig& config) {
  std::ostringstream os;
  for (const KeyBinding& b : bindings()) os << b.name << '=' << b.get(config) << '\n';
  return os.str();
}

uint64_t config_hash(const ScenarioConfig& config) {
  const std::string text = config_canonical_text(config);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const ScenarioConfig& config) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

LaneGraph build_map(const ScenarioConfig& c) {
  const SimulationArea area{c.area_width, c.area_height};
  if (c.model == "freeway")
    return build_freeway_map(c.freeways, c.lanes_per_direction, area, c.lane_spacing);
  return build_manhattan_map(c.map_rows, c.map_cols, area);
}

static TurnProbabilities turn_probs(const ScenarioConfig& c) {
  return {c.turn_straight, c.turn_left, c.turn_right};
}

MobilityTrace generate_trace(const ScenarioConfig& c) {
  const LaneGraph map = build_map(c);
  if (c.model == "gvmm") {
    GvmmParams p;
    p.num_nodes = c.nodes;
    p.num_groups = c.groups;
    p.sdr = c.sdr;
    p.adr = c.adr;
    p.max_speed = c.max_speed;
    p.max_angle = c.max_angle;
    p.duration = c.duration;
    p.sample_interval = c.sample_interval;
    p.group_radius = c.group_radius;
    p.leader_min_speed = c.min_speed;
    p.leader_accel_limit = c.accel_limit;
    p.turn_probs = turn_probs(c);
    return generate_gvmm(p, map, c.seed);
  }
  VehicularParams p;
  p.num_nodes = c.nodes;
  p.max_speed = c.max_speed;
  p.min_speed = c.min_speed;
  p.accel_limit = c.accel_limit;
  p.safety_distance = c.safety_distance;
  p.duration = c.duration;
  p.sample_interval = c.sample_interval;
  p.turn_probs = turn_probs(c);
  if (c.model == "manhattan") return generate_manhattan(p, map, c.seed);
  return generate_freeway(p, map, c.seed);
}

TraceMeta trace_meta(const ScenarioConfig& c) {
  TraceMeta meta;
  meta.seed = c.seed;
  meta.model = c.model;
  std::ostringstream os;
  os << "max_speed=" << format_double(c.max_speed);
  if (c.model == "gvmm")
    os << " groups=" << c.groups << " sdr=" << format_double(c.sdr)
       << " adr=" << format_double(c.adr);
  else
    os << " min_speed=" << format_double(c.min_speed)
       << " accel_limit=" << format_double(c.accel_limit)
       << " safety_distance=" << format_double(c.safety_distance);
  os << " hash=" << config_hash_hex(c);
  meta.params = os.str();
  return meta;
}

std::vector<sim::TrafficFlow> make_flows(const ScenarioConfig& c) {
  Rng rng(Rng::mix(c.seed, 0xF10f5));
  const double stop = std::max(c.flow_start, c.duration - c.flow_stop_margin);
  return sim::make_random_flows(c.num_flows, c.nodes, c.flow_rate,
                                c.packet_size * 8, c.flow_start, c.flow_stagger,
                                stop, rng);
}

sim::RadioModel radio_model(const ScenarioConfig& c) {
  sim::RadioModel r;
  r.range = c.radio_range;
  r.bitrate = c.bitrate;
  r.per_hop_latency = c.hop_latency;
  r.loss_probability = c.loss_probability;
  r.broadcast_jitter = c.broadcast_jitter;
  return r;
}

sim::SimOptions sim_options(const ScenarioConfig& c) {
  sim::SimOptions o;
  o.ttl = c.ttl;
  o.queue_capacity = c.queue_capacity;
  o.buffer_capacity = c.buffer_capacity;
  o.tora_retry_budget = c.tora_retry_budget;
  return o;
}

MetricsParams metrics_params(const ScenarioConfig& c) {
  MetricsParams p;
  p.radio_range = c.radio_range;
  p.proximity_factor = c.proximity_factor;
  return p;
}

sim::SimReport simulate_scenario(const ScenarioConfig& config) {
  const MobilityTrace trace = generate_trace(config);
  return sim::run_simulation(trace, make_flows(config),
                             sim::protocol_from_name(config.protocol),
                             radio_model(config), config.seed,
                             sim_options(config));
}

}  // namespace manet
