#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "manet/rng.hpp"
#include "manet/trace.hpp"

namespace manet::sim {

// Idealized unit-disk radio: a hop succeeds iff the receiver is within
// `range` of the sender when the frame starts transmitting and the loss draw
// passes. Frames serialize at `bitrate` through a per-node FIFO and arrive
// after an extra fixed per-hop latency.
struct RadioModel {
  double range = 250.0;            // m
  double bitrate = 2.0e6;          // bits/s
  double per_hop_latency = 0.002;  // s
  double loss_probability = 0.0;
  double broadcast_jitter = 0.0;   // max extra per-receiver delay, s
};

// Constant-bit-rate application flow.
struct TrafficFlow {
  int src = 0;
  int dst = 0;
  double rate = 4000.0;         // bits/s
  int packet_size_bits = 4096;  // 512 bytes
  double start = 0.0;
  double stop = 0.0;
};

enum class Protocol { aodv, dsr, tora };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

enum class DropReason : int {
  no_route = 0,
  ttl = 1,
  queue_overflow = 2,
  link_loss = 3,
  expired_at_end = 4,
};
inline constexpr int kDropReasonCount = 5;
const char* drop_reason_name(DropReason r);

struct PacketRecord {
  int id = 0;
  int src = 0;
  int dst = 0;
  int size_bits = 0;
  double origin_time = 0.0;
  int shortest_path_at_origination = -1;  // hops; -1 when disconnected
  bool delivered = false;
  double delivery_time = 0.0;
  int hop_count = 0;
  std::vector<int> path;  // nodes visited, starting at src
  bool dropped = false;
  DropReason drop_reason = DropReason::no_route;
};

struct SimReport {
  long long originated = 0;
  long long delivered = 0;
  long long dropped[kDropReasonCount] = {};
  long long in_flight_at_end = 0;
  long long routing_transmissions = 0;  // per-hop control transmissions
  long long data_transmissions = 0;
  long long tora_height_violations = 0;
  std::vector<PacketRecord> packets;

  long long dropped_total() const;
  // originated = delivered + dropped + in_flight, and the counters agree
  // with the per-packet records.
  bool conservation_ok() const;
};

struct SimOptions {
  int ttl = 32;
  int queue_capacity = 64;        // per-node transmit queue, frames
  int buffer_capacity = 10;       // per-destination route-wait buffer, packets
  int control_packet_bits = 512;  // 64 bytes
  int duplicate_cache_size = 64;

  double aodv_route_lifetime = 10.0;
  double aodv_rreq_timeout = 1.0;
  int aodv_rreq_retries = 2;

  double dsr_request_period = 0.5;       // doubles per retry
  double dsr_max_request_period = 10.0;
  double dsr_send_buffer_timeout = 30.0;
  int dsr_cache_routes_per_dest = 5;
  int dsr_max_replies_per_request = 4;

  int tora_retry_budget = 3;     // query attempts before giving up
  int tora_reversal_budget = 3;  // reversals per (node, destination) per route life

  std::ostream* event_log = nullptr;
};

// Runs the packet-level simulation over the trace and returns per-run
// counters. Deterministic for a fixed (trace, flows, protocol, radio, seed,
// options) tuple. Throws std::invalid_argument on bad flows.
SimReport run_simulation(const MobilityTrace& trace,
                         const std::vector<TrafficFlow>& flows,
                         Protocol protocol, const RadioModel& radio,
                         uint64_t seed, const SimOptions& options = {});

struct UndefinedMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// delivered / originated. Undefined when nothing was originated.
double compute_pdr(const SimReport& report);
// routing transmissions per delivered data packet. Undefined at delivered = 0.
double compute_nrl(const SimReport& report);
// mean end-to-end delay over delivered packets. Undefined at delivered = 0.
double compute_avg_delay(const SimReport& report);
// mean (hops taken - shortest path at origination) over delivered packets
// that had a path when originated. Undefined when no packet qualifies.
double compute_path_optimality(const SimReport& report);

// Seeded distinct random src/dst pairs with staggered start times.
std::vector<TrafficFlow> make_random_flows(int count, int node_count,
                                           double rate, int packet_size_bits,
                                           double first_start, double stagger,
                                           double stop, Rng& rng);

}  // namespace manet::sim
