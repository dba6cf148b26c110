// manet: scenario generation, trace analysis, routing simulation and the
// full experiment sweep, driven by a key=value config with flag overrides.

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "manet/scenario.hpp"
#include "manet/sweep.hpp"

namespace fs = std::filesystem;
using namespace manet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitIo, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (const fs::path dir = fs::path(path).parent_path(); !dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitIo, "cannot write '" + path + "'"};
  out << text;
}

// Relative output paths land in $MANET_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("MANET_OUT_DIR"); dir && *dir)
    return (fs::path(dir) / path).string();
  return path;
}

// Config assembly order: defaults, then --config file, then flag overrides.
struct ConfigCli {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::deque<std::pair<std::string, std::string>> flag_values;  // stable refs

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--set", overrides,
                    "override one config key (key=value, repeatable)");
    add_flag(cmd, "--model", "model", "mobility model (gvmm|manhattan|freeway)");
    add_flag(cmd, "--nodes", "nodes", "number of nodes");
    add_flag(cmd, "--groups", "groups", "number of gvmm groups");
    add_flag(cmd, "--max-speed", "max_speed", "maximum speed, m/s");
    add_flag(cmd, "--sdr", "sdr", "speed deviation ratio");
    add_flag(cmd, "--adr", "adr", "angle deviation ratio");
    add_flag(cmd, "--duration", "duration", "trace duration, s");
    add_flag(cmd, "--sample-interval", "sample_interval", "sampling step, s");
    add_flag(cmd, "--radius", "radio_range", "radio range R, m");
    add_flag(cmd, "--proximity-factor", "proximity_factor",
             "spatial-dependence proximity factor c");
    add_flag(cmd, "--protocol", "protocol", "routing protocol (aodv|dsr|tora)");
    add_flag(cmd, "--flows", "num_flows", "number of cbr flows");
    add_flag(cmd, "--seed", "seed", "scenario seed");
  }

  void add_flag(CLI::App* cmd, const char* flag, const char* key, const char* help) {
    flag_values.emplace_back(key, "");
    auto& slot = flag_values.back().second;
    cmd->add_option_function<std::string>(
        flag, [&slot](const std::string& v) { slot = v; }, help);
  }

  ScenarioConfig build() const {
    ScenarioConfig config;
    if (!config_path.empty()) apply_config_text(config, read_file(config_path));
    for (const auto& kv : overrides) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError(kv, "expected key=value");
      set_config_key(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : flag_values)
      if (!value.empty()) set_config_key(config, key, value);
    return config;
  }
};

ScenarioConfig validated(const ConfigCli& cli) {
  ScenarioConfig config = cli.build();
  const std::vector<ConfigError> errors = validate_config(config);
  if (!errors.empty()) {
    std::string msg;
    for (const ConfigError& e : errors) {
      if (!msg.empty()) msg += "; ";
      msg += e.what();
    }
    throw CliError{kExitUsage, msg};
  }
  return config;
}

double meta_max_speed(const TraceMeta& meta) {
  const size_t at = meta.params.find("max_speed=");
  if (at == std::string::npos) return 0.0;
  return std::atof(meta.params.c_str() + at + 10);
}

std::string meta_hash(const TraceMeta& meta) {
  const size_t at = meta.params.find("hash=");
  if (at == std::string::npos) return "-";
  std::string h = meta.params.substr(at + 5);
  if (const size_t sp = h.find(' '); sp != std::string::npos) h.erase(sp);
  return h;
}

int cmd_generate(const ConfigCli& cli, const std::string& out,
                 const std::string& ns2_out, const std::string& leader_trace) {
  ScenarioConfig config = validated(cli);
  MobilityTrace trace;
  if (!leader_trace.empty() && config.model == "gvmm") {
    const MobilityTrace leaders =
        parse_ns2_trace(read_file(leader_trace), config.duration,
                        config.sample_interval,
                        {config.area_width, config.area_height});
    if (leaders.node_count < config.groups)
      throw CliError{kExitIo, "leader trace has fewer nodes than groups"};
    GvmmParams p;
    p.num_nodes = config.nodes;
    p.num_groups = config.groups;
    p.sdr = config.sdr;
    p.adr = config.adr;
    p.max_speed = config.max_speed;
    p.max_angle = config.max_angle;
    p.duration = config.duration;
    p.sample_interval = config.sample_interval;
    p.group_radius = config.group_radius;
    std::vector<std::vector<NodeState>> paths(config.groups);
    for (int g = 0; g < config.groups; ++g)
      paths[g] = leader_path_from_trace(leaders, g, config.duration,
                                        config.sample_interval);
    trace = generate_gvmm_with_leaders(
        p, paths, {config.area_width, config.area_height}, config.seed);
  } else {
    trace = generate_trace(config);
  }

  const std::string path = resolve_out(out.empty() ? "trace.txt" : out);
  write_file(path, write_native_trace_string(trace, trace_meta(config)));
  if (!ns2_out.empty())
    write_file(resolve_out(ns2_out), export_ns2_trace(trace));
  std::cout << "generated model=" << config.model << " nodes=" << trace.node_count
            << " steps=" << trace.step_count()
            << " duration=" << format_double(trace.duration)
            << " seed=" << config.seed << " -> " << path << '\n';
  return kExitOk;
}

int cmd_analyze(const ConfigCli& cli, const std::vector<std::string>& traces,
                const std::string& out) {
  const ScenarioConfig config = validated(cli);
  if (traces.empty()) throw CliError{kExitUsage, "analyze needs at least one trace file"};
  std::ostringstream csv;
  csv << mobility_header() << '\n';
  for (const std::string& path : traces) {
    TraceMeta meta;
    MobilityTrace trace;
    try {
      trace = read_native_trace_string(read_file(path), &meta);
    } catch (const ParseError& e) {
      throw CliError{kExitIo, path + ": " + e.what()};
    }
    const TraceValidation validation = validate_trace(trace);
    if (!validation.ok()) {
      const TraceFinding& f = validation.findings.front();
      throw CliError{kExitIo, path + ": invalid trace (" +
                                  std::string(finding_kind_name(f.kind)) + " at t=" +
                                  format_double(f.time) + " node=" +
                                  std::to_string(f.node) + ", " +
                                  std::to_string(validation.findings.size()) +
                                  " finding(s))"};
    }
    MobilityCell cell;
    cell.model = meta.model;
    cell.seed = meta.seed;
    cell.max_speed = meta_max_speed(meta);
    cell.config_hash = meta_hash(meta);
    cell.report = compute_metrics(trace, metrics_params(config));
    csv << mobility_row(cell) << '\n';
  }
  if (out.empty()) std::cout << csv.str();
  else write_file(resolve_out(out), csv.str());
  return kExitOk;
}

int cmd_simulate(const ConfigCli& cli, const std::string& trace_path,
                 const std::string& out, const std::string& event_log_path) {
  ScenarioConfig config = cli.build();
  MobilityTrace trace;
  bool have_trace = false;
  if (!trace_path.empty()) {
    TraceMeta meta;
    try {
      trace = read_native_trace_string(read_file(trace_path), &meta);
    } catch (const ParseError& e) {
      throw CliError{kExitIo, trace_path + ": " + e.what()};
    }
    config.nodes = trace.node_count;
    config.duration = trace.duration;
    config.sample_interval = trace.sample_interval;
    config.area_width = trace.area.width;
    config.area_height = trace.area.height;
    config.model = meta.model;
    have_trace = true;
  }
  {
    const std::vector<ConfigError> errors = validate_config(config);
    if (!errors.empty()) throw CliError{kExitUsage, errors.front().what()};
  }
  if (!have_trace) trace = generate_trace(config);

  std::ofstream event_log;
  sim::SimOptions options = sim_options(config);
  if (!event_log_path.empty()) {
    const std::string path = resolve_out(event_log_path);
    event_log.open(path, std::ios::binary);
    if (!event_log) throw CliError{kExitIo, "cannot write '" + path + "'"};
    options.event_log = &event_log;
  }
  const sim::SimReport report = sim::run_simulation(
      trace, make_flows(config), sim::protocol_from_name(config.protocol),
      radio_model(config), config.seed, options);
  const RoutingCell cell = routing_cell_from_report(config, report);
  std::ostringstream csv;
  csv << routing_header() << '\n' << routing_row(cell) << '\n';
  if (out.empty()) std::cout << csv.str();
  else write_file(resolve_out(out), csv.str());
  return kExitOk;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

int cmd_sweep(const ConfigCli& cli, const std::string& models,
              const std::string& protocols, const std::string& speeds,
              int seeds, uint64_t base_seed, bool mobility_only,
              const std::string& out_dir) {
  SweepSpec spec;
  spec.base = validated(cli);
  if (!models.empty()) spec.models = split_list(models);
  if (!protocols.empty()) spec.protocols = split_list(protocols);
  if (!speeds.empty()) {
    spec.speeds.clear();
    for (const std::string& s : split_list(speeds)) spec.speeds.push_back(std::atof(s.c_str()));
  }
  spec.seeds_per_cell = seeds;
  spec.base_seed = base_seed;
  spec.mobility_only = mobility_only;
  for (const std::string& m : spec.models)
    if (m != "gvmm" && m != "manhattan" && m != "freeway")
      throw CliError{kExitUsage, "config key 'model': unknown model '" + m + "'"};
  for (const std::string& p : spec.protocols)
    if (p != "aodv" && p != "dsr" && p != "tora")
      throw CliError{kExitUsage, "config key 'protocol': unknown protocol '" + p + "'"};
  if (spec.seeds_per_cell < 1) throw CliError{kExitUsage, "--seeds must be >= 1"};

  const SweepResult result = run_sweep(spec);
  const fs::path dir = resolve_out(out_dir.empty() ? "." : out_dir);
  write_file((dir / "mobility_metrics.csv").string(), mobility_csv(result.mobility));
  write_file((dir / "mobility_summary.csv").string(),
             mobility_summary_csv(result.mobility));
  if (!mobility_only) {
    write_file((dir / "routing_metrics.csv").string(), routing_csv(result.routing));
    write_file((dir / "routing_summary.csv").string(),
               routing_summary_csv(result.routing));
  }
  std::cout << "sweep complete: " << result.mobility.size() << " mobility rows, "
            << result.routing.size() << " routing rows, " << result.error_count
            << " cell errors -> " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MANET mobility-model and routing-protocol experiment toolkit"};
  app.require_subcommand(1);

  ConfigCli gen_cli, ana_cli, sim_cli, sweep_cli;
  std::string gen_out, gen_ns2, gen_leaders;
  std::vector<std::string> ana_traces;
  std::string ana_out;
  std::string sim_trace, sim_out, sim_event_log;
  std::string sweep_models, sweep_protocols, sweep_speeds, sweep_out;
  int sweep_seeds = 5;
  uint64_t sweep_base_seed = 1;
  bool sweep_mobility_only = false;

  CLI::App* generate = app.add_subcommand("generate", "generate a mobility trace");
  gen_cli.attach(generate);
  generate->add_option("--out", gen_out, "native trace output file (default trace.txt)");
  generate->add_option("--ns2", gen_ns2, "also write the NS-2 movement file");
  generate->add_option("--leader-trace", gen_leaders,
                       "NS-2 movement file supplying gvmm leader motion");

  CLI::App* analyze = app.add_subcommand("analyze", "mobility metrics for traces");
  ana_cli.attach(analyze);
  analyze->add_option("traces", ana_traces, "native trace files");
  analyze->add_option("--out", ana_out, "CSV output file (default stdout)");

  CLI::App* simulate = app.add_subcommand("simulate", "run the routing simulation");
  sim_cli.attach(simulate);
  simulate->add_option("--trace", sim_trace, "simulate over an existing native trace");
  simulate->add_option("--out", sim_out, "CSV output file (default stdout)");
  simulate->add_option("--event-log", sim_event_log,
                       "write the per-event log (time node event packet)");

  CLI::App* sweep = app.add_subcommand("sweep", "full experiment grid");
  sweep_cli.attach(sweep);
  sweep->add_option("--models", sweep_models, "comma list (default all three)");
  sweep->add_option("--protocols", sweep_protocols, "comma list (default all three)");
  sweep->add_option("--speeds", sweep_speeds, "comma list (default 10..60)");
  sweep->add_option("--seeds", sweep_seeds, "seeds per cell (default 5)");
  sweep->add_option("--base-seed", sweep_base_seed, "sweep base seed");
  sweep->add_flag("--mobility-only", sweep_mobility_only, "skip routing runs");
  sweep->add_option("--out", sweep_out, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed())
      return cmd_generate(gen_cli, gen_out, gen_ns2, gen_leaders);
    if (analyze->parsed()) return cmd_analyze(ana_cli, ana_traces, ana_out);
    if (simulate->parsed())
      return cmd_simulate(sim_cli, sim_trace, sim_out, sim_event_log);
    if (sweep->parsed())
      return cmd_sweep(sweep_cli, sweep_models, sweep_protocols, sweep_speeds,
                       sweep_seeds, sweep_base_seed, sweep_mobility_only, sweep_out);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
