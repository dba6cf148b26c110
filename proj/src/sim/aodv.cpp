#include <deque>
#include <unordered_map>

#include "engine.hpp"

namespace manet::sim {

namespace {

constexpr int kTimerRreq = 1;

struct Route {
  int next_hop = -1;
  int hops = 0;
  uint32_t seq = 0;
  bool seq_valid = false;
  bool valid = false;
  double expires = 0.0;
};

struct Discovery {
  int retries = 0;
  int generation = 0;
  bool active = false;
};

struct NodeState {
  std::unordered_map<int, Route> routes;
  std::unordered_map<int, Discovery> discovery;
  std::unordered_map<int, std::deque<int>> buffer;  // dst -> data ids
  LruSet rreq_seen;
  uint32_t own_seq = 0;
  int next_rreq_id = 0;

  explicit NodeState(size_t cache) : rreq_seen(cache) {}
};

class AodvAgent : public RoutingAgent {
 public:
  explicit AodvAgent(Engine& engine) : RoutingAgent(engine) {
    nodes_.reserve(engine.node_count());
    for (int i = 0; i < engine.node_count(); ++i)
      nodes_.emplace_back(engine.options().duplicate_cache_size);
  }

  void on_app_packet(int node, int data_id) override {
    const int dst = engine_.packet(data_id).dst;
    if (Route* r = valid_route(node, dst)) {
      send_data(node, data_id, *r);
      return;
    }
    buffer_packet(node, dst, data_id);
    if (!nodes_[node].discovery[dst].active) start_discovery(node, dst);
  }

  void on_receive(int node, Frame frame) override {
    switch (frame.kind) {
      case FrameKind::data: handle_data(node, frame); break;
      case FrameKind::rreq: handle_rreq(node, frame); break;
      case FrameKind::rrep: handle_rrep(node, frame); break;
      case FrameKind::rerr: handle_rerr(node, frame); break;
      default: break;
    }
  }

  void on_unicast_failed(int node, const Frame& frame) override {
    const int broken = frame.rx_node;
    // Every route through the lost neighbor is gone; bump their sequence
    // numbers so stale information cannot reinstall them.
    for (auto& [dst, route] : nodes_[node].routes) {
      if (route.valid && route.next_hop == broken) {
        route.valid = false;
        ++route.seq;
      }
    }
    if (frame.kind != FrameKind::data) return;

    const int dst = frame.data_dst;
    if (node == frame.data_src) {
      // The source still owns the packet: park it and rediscover.
      buffer_packet(node, dst, frame.data_id);
      if (!nodes_[node].discovery[dst].active) start_discovery(node, dst);
      return;
    }
    engine_.drop_data(frame.data_id, DropReason::link_loss);
    send_rerr(node, dst);
  }

  void on_timer(int node, int kind, int key) override {
    if (kind != kTimerRreq) return;
    const int dst = key;
    NodeState& st = nodes_[node];
    auto it = st.discovery.find(dst);
    if (it == st.discovery.end() || !it->second.active) return;
    if (valid_route(node, dst)) {
      it->second.active = false;
      return;
    }
    if (it->second.retries < engine_.options().aodv_rreq_retries) {
      ++it->second.retries;
      broadcast_rreq(node, dst);
      engine_.set_timer(node, kTimerRreq, dst, engine_.options().aodv_rreq_timeout);
      return;
    }
    it->second.active = false;
    auto buf = st.buffer.find(dst);
    if (buf != st.buffer.end()) {
      for (int id : buf->second) engine_.drop_data(id, DropReason::no_route);
      st.buffer.erase(buf);
    }
  }

  void collect_buffered(std::vector<int>& data_ids) const override {
    for (const NodeState& st : nodes_)
      for (const auto& [dst, queue] : st.buffer)
        for (int id : queue) data_ids.push_back(id);
  }

 private:
  Route* valid_route(int node, int dst) {
    auto it = nodes_[node].routes.find(dst);
    if (it == nodes_[node].routes.end()) return nullptr;
    Route& r = it->second;
    if (!r.valid || r.expires <= engine_.now()) return nullptr;
    return &r;
  }

  void refresh(Route& r) {
    r.expires = engine_.now() + engine_.options().aodv_route_lifetime;
  }

  void send_data(int node, int data_id, Route& route) {
    refresh(route);
    Frame f = engine_.make_data_frame(data_id);
    f.rx_node = route.next_hop;
    engine_.send(node, std::move(f));
  }

  void forward_data(int node, Frame& frame, Route& route) {
    refresh(route);
    frame.rx_node = route.next_hop;
    engine_.send(node, std::move(frame));
  }

  void buffer_packet(int node, int dst, int data_id) {
    auto& queue = nodes_[node].buffer[dst];
    if (static_cast<int>(queue.size()) >= engine_.options().buffer_capacity) {
      engine_.drop_data(queue.front(), DropReason::no_route);
      queue.pop_front();
    }
    queue.push_back(data_id);
  }

  void start_discovery(int node, int dst) {
    Discovery& d = nodes_[node].discovery[dst];
    d.active = true;
    d.retries = 0;
    broadcast_rreq(node, dst);
    engine_.set_timer(node, kTimerRreq, dst, engine_.options().aodv_rreq_timeout);
  }

  void broadcast_rreq(int node, int dst) {
    NodeState& st = nodes_[node];
    ++st.own_seq;
    Frame f;
    f.kind = FrameKind::rreq;
    f.size_bits = engine_.options().control_packet_bits;
    f.ttl = engine_.options().ttl;
    f.origin = node;
    f.target = dst;
    f.request_id = st.next_rreq_id++;
    f.origin_seq = st.own_seq;
    f.hop_count = 0;
    auto it = st.routes.find(dst);
    if (it != st.routes.end() && it->second.seq_valid) {
      f.dest_seq = it->second.seq;
      f.dest_seq_known = true;
    }
    // Flood suppression must also catch the origin's own request echo.
    st.rreq_seen.seen_or_insert({node, f.request_id});
    engine_.send(node, std::move(f));
  }

  // Installs a route candidate if it is fresher or shorter at equal freshness.
  void consider_route(int node, int dst, int next_hop, int hops, uint32_t seq) {
    Route& r = nodes_[node].routes[dst];
    const bool better = !r.valid || !r.seq_valid || seq > r.seq ||
                        (seq == r.seq && hops < r.hops);
    if (!better) return;
    r.next_hop = next_hop;
    r.hops = hops;
    r.seq = seq;
    r.seq_valid = true;
    r.valid = true;
    refresh(r);
  }

  void handle_rreq(int node, Frame& frame) {
    NodeState& st = nodes_[node];
    if (st.rreq_seen.seen_or_insert({frame.origin, frame.request_id})) return;
    if (frame.origin == node) return;

    consider_route(node, frame.origin, frame.tx_node, frame.hop_count + 1,
                   frame.origin_seq);

    if (node == frame.target) {
      if (frame.dest_seq_known && frame.dest_seq > st.own_seq)
        st.own_seq = frame.dest_seq;
      ++st.own_seq;
      send_rrep(node, frame.origin, node, st.own_seq, 0, frame.tx_node);
      return;
    }
    Route* cached = valid_route(node, frame.target);
    if (cached && cached->seq_valid &&
        (!frame.dest_seq_known || cached->seq >= frame.dest_seq)) {
      send_rrep(node, frame.origin, frame.target, cached->seq, cached->hops,
                frame.tx_node);
      return;
    }
    if (frame.ttl > 1) {
      Frame fwd = frame;
      fwd.rx_node = -1;
      --fwd.ttl;
      ++fwd.hop_count;
      engine_.send(node, std::move(fwd));
    }
  }

  void send_rrep(int node, int origin, int dst, uint32_t dest_seq, int hop_count,
                 int next_hop) {
    Frame f;
    f.kind = FrameKind::rrep;
    f.size_bits = engine_.options().control_packet_bits;
    f.ttl = engine_.options().ttl;
    f.origin = origin;
    f.target = dst;
    f.dest_seq = dest_seq;
    f.dest_seq_known = true;
    f.hop_count = hop_count;
    f.rx_node = next_hop;
    engine_.send(node, std::move(f));
  }

  void handle_rrep(int node, Frame& frame) {
    NodeState& st = nodes_[node];
    consider_route(node, frame.target, frame.tx_node, frame.hop_count + 1,
                   frame.dest_seq);

    if (node == frame.origin) {
      const int dst = frame.target;
      auto disc = st.discovery.find(dst);
      if (disc != st.discovery.end()) disc->second.active = false;
      auto buf = st.buffer.find(dst);
      if (buf == st.buffer.end()) return;
      std::deque<int> pending = std::move(buf->second);
      st.buffer.erase(buf);
      for (int id : pending) {
        if (Route* r = valid_route(node, dst)) send_data(node, id, *r);
        else buffer_packet(node, dst, id);
      }
      return;
    }
    Route* back = valid_route(node, frame.origin);
    if (!back) return;  // reverse path evaporated; the origin will retry
    Frame fwd = frame;
    fwd.rx_node = back->next_hop;
    ++fwd.hop_count;
    refresh(*back);
    engine_.send(node, std::move(fwd));
  }

  void send_rerr(int node, int dst) {
    NodeState& st = nodes_[node];
    uint32_t seq = 0;
    auto it = st.routes.find(dst);
    if (it != st.routes.end()) seq = it->second.seq;
    Frame f;
    f.kind = FrameKind::rerr;
    f.size_bits = engine_.options().control_packet_bits;
    f.ttl = 1;
    f.target = dst;
    f.dest_seq = seq;
    f.rx_node = -1;
    engine_.send(node, std::move(f));
  }

  void handle_rerr(int node, Frame& frame) {
    auto it = nodes_[node].routes.find(frame.target);
    if (it == nodes_[node].routes.end()) return;
    Route& r = it->second;
    if (!r.valid || r.next_hop != frame.tx_node) return;
    r.valid = false;
    if (frame.dest_seq > r.seq) r.seq = frame.dest_seq;
    // Propagate upstream so sources learn about the break.
    send_rerr(node, frame.target);
  }

  void handle_data(int node, Frame& frame) {
    if (node == frame.data_dst) {
      engine_.deliver_data(node, frame);
      return;
    }
    --frame.ttl;
    if (frame.ttl <= 0) {
      engine_.drop_data(frame.data_id, DropReason::ttl);
      return;
    }
    if (Route* r = valid_route(node, frame.data_dst)) {
      forward_data(node, frame, *r);
      return;
    }
    engine_.drop_data(frame.data_id, DropReason::no_route);
    send_rerr(node, frame.data_dst);
  }

  std::vector<NodeState> nodes_;
};

}  // namespace

std::unique_ptr<RoutingAgent> make_aodv_agent(Engine& engine) {
  return std::make_unique<AodvAgent>(engine);
}

}  // namespace manet::sim
