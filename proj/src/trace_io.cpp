#include "manet/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace manet {

namespace {
constexpr int kTraceFormatVersion = 1;
}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

void write_native_trace(std::ostream& os, const MobilityTrace& trace,
                        const TraceMeta& meta) {
  os << "manet-trace " << kTraceFormatVersion << '\n'
     << "node_count " << trace.node_count << '\n'
     << "duration " << format_double(trace.duration) << '\n'
     << "sample_interval " << format_double(trace.sample_interval) << '\n'
     << "area " << format_double(trace.area.width) << ' '
     << format_double(trace.area.height) << '\n'
     << "seed " << meta.seed << '\n'
     << "model " << meta.model << '\n';
  if (!meta.params.empty()) os << "params " << meta.params << '\n';
  os << "end_header\n";
  for (const TraceSample& s : trace.samples) {
    os << format_double(s.time) << ' ' << s.node_id << ' '
       << format_double(s.state.position.x) << ' '
       << format_double(s.state.position.y) << ' '
       << format_double(s.state.speed) << ' '
       << format_double(s.state.heading) << '\n';
  }
}

MobilityTrace read_native_trace(std::istream& is, TraceMeta* meta) {
  MobilityTrace trace;
  TraceMeta m;
  std::string line;
  int lineno = 0;

  auto fail = [&lineno](const std::string& what) -> ParseError {
    return ParseError(lineno, what);
  };

  if (!std::getline(is, line)) throw fail("empty trace file");
  ++lineno;
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "manet-trace")
      throw fail("not a manet trace file");
    if (version != kTraceFormatVersion) throw fail("unsupported trace format version");
  }

  bool have_nodes = false, have_duration = false, have_interval = false, have_area = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line == "end_header") break;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "node_count") {
      if (!(ss >> trace.node_count)) throw fail("bad node_count");
      have_nodes = true;
    } else if (key == "duration") {
      if (!(ss >> trace.duration)) throw fail("bad duration");
      have_duration = true;
    } else if (key == "sample_interval") {
      if (!(ss >> trace.sample_interval)) throw fail("bad sample_interval");
      have_interval = true;
    } else if (key == "area") {
      if (!(ss >> trace.area.width >> trace.area.height)) throw fail("bad area");
      have_area = true;
    } else if (key == "seed") {
      if (!(ss >> m.seed)) throw fail("bad seed");
    } else if (key == "model") {
      if (!(ss >> m.model)) throw fail("bad model");
    } else if (key == "params") {
      std::getline(ss, m.params);
      if (!m.params.empty() && m.params.front() == ' ') m.params.erase(0, 1);
    } else {
      throw fail("unknown header key '" + key + "'");
    }
  }
  if (!have_nodes || !have_duration || !have_interval || !have_area)
    throw fail("incomplete trace header");

  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    TraceSample s;
    if (!(ss >> s.time >> s.node_id >> s.state.position.x >> s.state.position.y >>
          s.state.speed >> s.state.heading))
      throw fail("bad sample record");
    trace.samples.push_back(s);
  }
  if (meta) *meta = m;
  return trace;
}

std::string write_native_trace_string(const MobilityTrace& trace,
                                      const TraceMeta& meta) {
  std::ostringstream os;
  write_native_trace(os, trace, meta);
  return os.str();
}

MobilityTrace read_native_trace_string(const std::string& text, TraceMeta* meta) {
  std::istringstream is(text);
  return read_native_trace(is, meta);
}

std::string export_ns2_trace(const MobilityTrace& trace) {
  const int n = trace.node_count;
  const int steps = trace.step_count();
  const double dt = trace.sample_interval;
  std::ostringstream os;

  for (int node = 0; node < n; ++node) {
    const Vec2 p0 = trace.state_at(0, node).position;
    os << "$node_(" << node << ") set X_ " << format_double(p0.x) << '\n';
    os << "$node_(" << node << ") set Y_ " << format_double(p0.y) << '\n';
  }

  struct Command {
    double time;
    int node;
    Vec2 dest;
    double speed;
  };
  std::vector<Command> commands;
  // Tight per-step tolerance so merged segments stay within nanometers of
  // every intermediate sample.
  constexpr double kMergeEps = 1e-12;
  for (int node = 0; node < n; ++node) {
    int k = 0;
    while (k + 1 < steps) {
      const Vec2 d = trace.state_at(k + 1, node).position -
                     trace.state_at(k, node).position;
      if (d.norm() <= kMergeEps) {
        ++k;
        continue;
      }
      int m = k + 1;
      while (m + 1 < steps) {
        const Vec2 dn = trace.state_at(m + 1, node).position -
                        trace.state_at(m, node).position;
        if (std::fabs(dn.x - d.x) > kMergeEps || std::fabs(dn.y - d.y) > kMergeEps)
          break;
        ++m;
      }
      commands.push_back({trace.time_of(k), node,
                          trace.state_at(m, node).position, d.norm() / dt});
      k = m;
    }
  }
  std::stable_sort(commands.begin(), commands.end(),
                   [](const Command& a, const Command& b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.node < b.node;
                   });
  for (const Command& c : commands) {
    os << "$ns_ at " << format_double(c.time) << " \"$node_(" << c.node
       << ") setdest " << format_double(c.dest.x) << ' '
       << format_double(c.dest.y) << ' ' << format_double(c.speed) << "\"\n";
  }
  return os.str();
}

MobilityTrace parse_ns2_trace(const std::string& text, double duration,
                              double sample_interval, SimulationArea area) {
  struct Command {
    double time;
    Vec2 dest;
    double speed;
  };
  struct NodeScript {
    Vec2 init;
    std::vector<Command> commands;
  };
  std::vector<NodeScript> scripts;
  auto node_ref = [&scripts](int id) -> NodeScript& {
    if (id >= static_cast<int>(scripts.size())) scripts.resize(id + 1);
    return scripts[id];
  };

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const char* s = line.c_str();

    int id = 0;
    char axis = 0;
    double v = 0, t = 0, x = 0, y = 0, sp = 0;
    if (std::sscanf(s, " $node_(%d) set %c_ %lf", &id, &axis, &v) == 3) {
      if (id < 0) throw ParseError(lineno, "negative node id");
      if (axis == 'X') node_ref(id).init.x = v;
      else if (axis == 'Y') node_ref(id).init.y = v;
      else if (axis != 'Z') throw ParseError(lineno, "unknown node attribute");
      continue;
    }
    if (std::sscanf(s, " $ns_ at %lf \"$node_(%d) setdest %lf %lf %lf\"", &t, &id,
                    &x, &y, &sp) == 5) {
      if (id < 0) throw ParseError(lineno, "negative node id");
      if (t < 0) throw ParseError(lineno, "negative command time");
      if (sp <= 0) throw ParseError(lineno, "setdest speed must be > 0");
      node_ref(id).commands.push_back({t, {x, y}, sp});
      continue;
    }
    throw ParseError(lineno, "unrecognized movement line");
  }
  if (scripts.empty()) throw ParseError(0, "no nodes in movement file");

  MobilityTrace trace =
      make_trace(static_cast<int>(scripts.size()), duration, sample_interval, area);
  const int steps = trace.step_count();
  for (int node = 0; node < trace.node_count; ++node) {
    NodeScript& script = scripts[node];
    std::stable_sort(script.commands.begin(), script.commands.end(),
                     [](const Command& a, const Command& b) { return a.time < b.time; });
    Vec2 pos = script.init;
    bool moving = false;
    Vec2 dir;
    double speed = 0.0;
    double clock = 0.0;
    size_t next = 0;

    auto advance_to = [&](double t) {
      if (moving) {
        // Current motion target is commands[next-1].dest.
        const Vec2 target = script.commands[next - 1].dest;
        const double remaining = distance(pos, target);
        const double travel = speed * (t - clock);
        if (travel >= remaining) {
          pos = target;
          moving = false;
        } else {
          pos += dir * travel;
        }
      }
      clock = t;
    };

    for (int step = 0; step < steps; ++step) {
      const double t = trace.time_of(step);
      while (next < script.commands.size() && script.commands[next].time <= t) {
        const Command& c = script.commands[next];
        advance_to(c.time);
        const double len = distance(pos, c.dest);
        if (len > 0.0) {
          dir = (c.dest - pos) * (1.0 / len);
          speed = c.speed;
          moving = true;
        } else {
          moving = false;
        }
        ++next;
      }
      advance_to(t);
      NodeState st;
      st.position = pos;
      st.speed = moving ? speed : 0.0;
      st.heading = moving ? wrap_heading(std::atan2(dir.y, dir.x)) : 0.0;
      trace.state_at(step, node) = st;
    }
  }
  return trace;
}

}  // namespace manet
