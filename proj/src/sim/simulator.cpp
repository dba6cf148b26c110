#include "engine.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

namespace manet::sim {

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::aodv: return "aodv";
    case Protocol::dsr: return "dsr";
    case Protocol::tora: return "tora";
  }
  return "unknown";
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "aodv") return Protocol::aodv;
  if (name == "dsr") return Protocol::dsr;
  if (name == "tora") return Protocol::tora;
  throw std::invalid_argument("unknown protocol '" + name + "'");
}

const char* drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::no_route: return "no_route";
    case DropReason::ttl: return "ttl";
    case DropReason::queue_overflow: return "queue_overflow";
    case DropReason::link_loss: return "link_loss";
    case DropReason::expired_at_end: return "expired_at_end";
  }
  return "unknown";
}

const char* frame_kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::data: return "data";
    case FrameKind::rreq: return "rreq";
    case FrameKind::rrep: return "rrep";
    case FrameKind::rerr: return "rerr";
    case FrameKind::dsr_req: return "dsr_req";
    case FrameKind::dsr_rep: return "dsr_rep";
    case FrameKind::dsr_err: return "dsr_err";
    case FrameKind::qry: return "qry";
    case FrameKind::upd: return "upd";
  }
  return "unknown";
}

long long SimReport::dropped_total() const {
  long long total = 0;
  for (long long d : dropped) total += d;
  return total;
}

bool SimReport::conservation_ok() const {
  long long delivered_count = 0, dropped_count[kDropReasonCount] = {};
  long long unresolved = 0;
  for (const PacketRecord& p : packets) {
    if (p.delivered) ++delivered_count;
    else if (p.dropped) ++dropped_count[static_cast<int>(p.drop_reason)];
    else ++unresolved;
  }
  if (originated != static_cast<long long>(packets.size())) return false;
  if (delivered_count != delivered) return false;
  for (int r = 0; r < kDropReasonCount; ++r)
    if (dropped_count[r] != dropped[r]) return false;
  if (unresolved != in_flight_at_end) return false;
  return originated == delivered + dropped_total() + in_flight_at_end;
}

Engine::Engine(const MobilityTrace& trace, const std::vector<TrafficFlow>& flows,
               Protocol protocol, const RadioModel& radio, uint64_t seed,
               const SimOptions& options)
    : trace_(trace),
      flows_(flows),
      protocol_(protocol),
      radio_(radio),
      options_(options),
      rng_(Rng::mix(seed, 0x51400)),
      io_(trace.node_count) {
  if (trace.node_count < 1) throw std::invalid_argument("empty trace");
  for (const TrafficFlow& f : flows_) {
    if (f.src < 0 || f.src >= trace.node_count || f.dst < 0 ||
        f.dst >= trace.node_count)
      throw std::invalid_argument("flow endpoint outside the trace node range");
    if (f.src == f.dst) throw std::invalid_argument("flow src equals dst");
    if (f.rate <= 0.0 || f.packet_size_bits <= 0)
      throw std::invalid_argument("flow rate and packet size must be > 0");
    if (f.start < 0.0 || f.stop < f.start || f.stop > trace.duration)
      throw std::invalid_argument("flow interval outside the trace duration");
  }
  switch (protocol_) {
    case Protocol::aodv: agent_ = make_aodv_agent(*this); break;
    case Protocol::dsr: agent_ = make_dsr_agent(*this); break;
    case Protocol::tora: agent_ = make_tora_agent(*this); break;
  }
}

void Engine::schedule(Event ev, double at) {
  ev.time = at;
  ev.seq = next_seq_++;
  queue_.push(std::move(ev));
}

Vec2 Engine::node_position(int node, double t) const {
  return position_at(trace_, node, t);
}

bool Engine::in_range(int a, int b, double t) const {
  return distance(node_position(a, t), node_position(b, t)) <= radio_.range;
}

int Engine::log_pkt_id(const Frame& frame) const {
  return frame.kind == FrameKind::data ? frame.data_id : frame.uid;
}

void Engine::log_event(int node, const char* what, int pkt) {
  if (!options_.event_log) return;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.9f %d %s %d\n", now_, node, what, pkt);
  *options_.event_log << buf;
}

void Engine::send(int from, Frame frame) {
  frame.tx_node = from;
  frame.uid = next_frame_uid_++;
  NodeIo& io = io_[from];
  if (static_cast<int>(io.queue.size()) >= options_.queue_capacity) {
    if (frame.kind == FrameKind::data)
      drop_data(frame.data_id, DropReason::queue_overflow);
    return;
  }
  io.queue.push_back(std::make_shared<Frame>(std::move(frame)));
  if (!io.busy) begin_tx(from);
}

void Engine::begin_tx(int node) {
  NodeIo& io = io_[node];
  io.busy = true;
  Frame& frame = *io.queue.front();
  frame.tx_start = now_;
  Event ev;
  ev.kind = Event::tx_end;
  ev.node = node;
  schedule(std::move(ev), now_ + frame.size_bits / radio_.bitrate);
}

void Engine::handle_tx_end(int node) {
  NodeIo& io = io_[node];
  std::shared_ptr<Frame> frame = io.queue.front();
  io.queue.pop_front();
  io.busy = false;

  if (frame->kind == FrameKind::data) ++report_.data_transmissions;
  else ++report_.routing_transmissions;
  {
    char what[32];
    std::snprintf(what, sizeof what, "tx_%s", frame_kind_name(frame->kind));
    log_event(node, what, log_pkt_id(*frame));
  }

  if (frame->rx_node < 0) {
    // Broadcast: every node in range at transmit start receives a copy.
    for (int other = 0; other < node_count(); ++other) {
      if (other == node) continue;
      if (!in_range(node, other, frame->tx_start)) continue;
      if (radio_.loss_probability > 0.0 &&
          rng_.uniform() < radio_.loss_probability)
        continue;
      double delay = radio_.per_hop_latency;
      if (radio_.broadcast_jitter > 0.0)
        delay += rng_.uniform(0.0, radio_.broadcast_jitter);
      Event ev;
      ev.kind = Event::rx;
      ev.node = other;
      ev.frame = std::make_shared<Frame>(*frame);
      schedule(std::move(ev), now_ + delay);
    }
  } else {
    const bool reachable = in_range(node, frame->rx_node, frame->tx_start);
    const bool lost = radio_.loss_probability > 0.0 &&
                      rng_.uniform() < radio_.loss_probability;
    if (reachable && !lost) {
      if (protocol_ == Protocol::tora && frame->kind == FrameKind::data &&
          agent_->height_of(node, frame->data_dst) <=
              agent_->height_of(frame->rx_node, frame->data_dst))
        ++report_.tora_height_violations;
      Event ev;
      ev.kind = Event::rx;
      ev.node = frame->rx_node;
      ev.frame = frame;
      schedule(std::move(ev), now_ + radio_.per_hop_latency);
    } else {
      agent_->on_unicast_failed(node, *frame);
    }
  }

  if (!io.busy && !io.queue.empty()) begin_tx(node);
}

void Engine::handle_rx(int node, std::shared_ptr<Frame> frame) {
  {
    char what[32];
    std::snprintf(what, sizeof what, "rx_%s", frame_kind_name(frame->kind));
    log_event(node, what, log_pkt_id(*frame));
  }
  if (frame->kind == FrameKind::data) {
    PacketRecord& rec = packet(frame->data_id);
    rec.path.push_back(node);
    rec.hop_count = static_cast<int>(rec.path.size()) - 1;
  }
  agent_->on_receive(node, *frame);
}

Frame Engine::make_data_frame(int data_id) const {
  const PacketRecord& rec = report_.packets[data_id];
  Frame f;
  f.kind = FrameKind::data;
  f.ttl = options_.ttl;
  f.size_bits = rec.size_bits;
  f.data_id = data_id;
  f.data_src = rec.src;
  f.data_dst = rec.dst;
  return f;
}

void Engine::deliver_data(int node, const Frame& frame) {
  PacketRecord& rec = packet(frame.data_id);
  if (rec.delivered || rec.dropped)
    throw std::logic_error("packet delivered twice or after a drop");
  rec.delivered = true;
  rec.delivery_time = now_;
  ++report_.delivered;
  log_event(node, "deliver", frame.data_id);
}

void Engine::drop_data(int data_id, DropReason reason) {
  PacketRecord& rec = packet(data_id);
  if (rec.delivered || rec.dropped)
    throw std::logic_error("packet dropped twice or after delivery");
  rec.dropped = true;
  rec.drop_reason = reason;
  ++report_.dropped[static_cast<int>(reason)];
  char what[40];
  std::snprintf(what, sizeof what, "drop_%s", drop_reason_name(reason));
  log_event(rec.src, what, data_id);
}

void Engine::set_timer(int node, int kind, int key, double delay) {
  Event ev;
  ev.kind = Event::timer;
  ev.node = node;
  ev.a = kind;
  ev.b = key;
  schedule(std::move(ev), now_ + delay);
}

int Engine::shortest_path_hops(int src, int dst, double t) const {
  const int n = node_count();
  std::vector<Vec2> pos(n);
  for (int i = 0; i < n; ++i) pos[i] = node_position(i, t);
  const double r_sq = radio_.range * radio_.range;
  std::vector<int> dist(n, -1);
  std::vector<int> frontier{src};
  dist[src] = 0;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int v = 0; v < n; ++v) {
        if (dist[v] >= 0 || v == u) continue;
        if (distance_sq(pos[u], pos[v]) > r_sq) continue;
        dist[v] = dist[u] + 1;
        if (v == dst) return dist[v];
        next.push_back(v);
      }
    }
    frontier = std::move(next);
  }
  return dist[dst];
}

void Engine::originate(int flow_index) {
  const TrafficFlow& flow = flows_[flow_index];
  if (now_ > flow.stop + 1e-12) return;

  const int id = static_cast<int>(report_.packets.size());
  PacketRecord rec;
  rec.id = id;
  rec.src = flow.src;
  rec.dst = flow.dst;
  rec.size_bits = flow.packet_size_bits;
  rec.origin_time = now_;
  rec.shortest_path_at_origination = shortest_path_hops(flow.src, flow.dst, now_);
  rec.path.push_back(flow.src);
  report_.packets.push_back(std::move(rec));
  ++report_.originated;
  log_event(flow.src, "origin", id);
  agent_->on_app_packet(flow.src, id);

  const double interval = flow.packet_size_bits / flow.rate;
  const double next = now_ + interval;
  if (next <= flow.stop + 1e-12 && next <= trace_.duration) {
    Event ev;
    ev.kind = Event::flow_packet;
    ev.a = flow_index;
    schedule(std::move(ev), next);
  }
}

void Engine::finalize() {
  std::vector<int> buffered;
  agent_->collect_buffered(buffered);
  for (int id : buffered) drop_data(id, DropReason::expired_at_end);
  for (const PacketRecord& p : report_.packets)
    if (!p.delivered && !p.dropped) ++report_.in_flight_at_end;
}

SimReport Engine::run() {
  for (size_t f = 0; f < flows_.size(); ++f) {
    Event ev;
    ev.kind = Event::flow_packet;
    ev.a = static_cast<int>(f);
    schedule(std::move(ev), flows_[f].start);
  }
  while (!queue_.empty()) {
    Event ev = queue_.top();
    if (ev.time > trace_.duration) break;
    queue_.pop();
    now_ = ev.time;
    switch (ev.kind) {
      case Event::flow_packet: originate(ev.a); break;
      case Event::tx_end: handle_tx_end(ev.node); break;
      case Event::rx: handle_rx(ev.node, std::move(ev.frame)); break;
      case Event::timer: agent_->on_timer(ev.node, ev.a, ev.b); break;
    }
  }
  now_ = trace_.duration;
  finalize();
  return std::move(report_);
}

SimReport run_simulation(const MobilityTrace& trace,
                         const std::vector<TrafficFlow>& flows,
                         Protocol protocol, const RadioModel& radio,
                         uint64_t seed, const SimOptions& options) {
  Engine engine(trace, flows, protocol, radio, seed, options);
  return engine.run();
}

std::vector<TrafficFlow> make_random_flows(int count, int node_count,
                                           double rate, int packet_size_bits,
                                           double first_start, double stagger,
                                           double stop, Rng& rng) {
  if (node_count < 2) throw std::invalid_argument("flows need at least two nodes");
  std::set<std::pair<int, int>> used;
  std::vector<TrafficFlow> flows;
  flows.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::pair<int, int> pair;
    do {
      pair.first = rng.uniform_int(node_count);
      pair.second = rng.uniform_int(node_count);
    } while (pair.first == pair.second ||
             (used.count(pair) && used.size() <
                  static_cast<size_t>(node_count) * (node_count - 1)));
    used.insert(pair);
    TrafficFlow f;
    f.src = pair.first;
    f.dst = pair.second;
    f.rate = rate;
    f.packet_size_bits = packet_size_bits;
    f.start = first_start + k * stagger;
    f.stop = stop;
    flows.push_back(f);
  }
  return flows;
}

}  // namespace manet::sim
