#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "manet/trace.hpp"

namespace manet {

// Provenance carried in the native trace header.
struct TraceMeta {
  uint64_t seed = 0;
  std::string model = "unknown";
  std::string params;  // free-form key=value list
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};

// Shortest decimal form that parses back to exactly the same double
// (integral values keep one decimal, e.g. "15.0").
std::string format_double(double v);

// Native trace format: a versioned header (node_count, duration,
// sample_interval, area, seed, model, params) followed by one
// "time id x y speed heading" record per sample.
void write_native_trace(std::ostream& os, const MobilityTrace& trace,
                        const TraceMeta& meta);
MobilityTrace read_native_trace(std::istream& is, TraceMeta* meta = nullptr);

std::string write_native_trace_string(const MobilityTrace& trace,
                                      const TraceMeta& meta);
MobilityTrace read_native_trace_string(const std::string& text,
                                       TraceMeta* meta = nullptr);

// NS-2 movement-scenario text: initial "$node_(i) set X_/Y_" lines, then one
// '$ns_ at <t> "$node_(i) setdest <x> <y> <speed>"' command per
// constant-velocity segment (consecutive equal-velocity sample intervals are
// merged; resting nodes emit no setdest).
std::string export_ns2_trace(const MobilityTrace& trace);

// Samples NS-2 movement commands back onto a fixed grid. The movement file
// carries no grid metadata, so duration, sample_interval and area are
// supplied by the caller. Throws ParseError with the offending line number.
MobilityTrace parse_ns2_trace(const std::string& text, double duration,
                              double sample_interval, SimulationArea area);

}  // namespace manet
