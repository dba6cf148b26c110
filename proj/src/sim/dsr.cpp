#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "engine.hpp"

namespace manet::sim {

namespace {

constexpr int kTimerRequest = 1;

struct BufferedPacket {
  int data_id;
  double since;
};

struct Discovery {
  bool active = false;
  int attempt = 0;
};

struct NodeState {
  // dst -> cached source routes (each starts at this node and ends at dst).
  std::unordered_map<int, std::vector<std::vector<int>>> cache;
  std::unordered_map<int, Discovery> discovery;
  std::unordered_map<int, std::deque<BufferedPacket>> buffer;
  LruSet req_seen;
  std::map<std::pair<int, int>, int> replies_sent;  // at targets, per request
  int next_req_id = 0;

  explicit NodeState(size_t cache_size) : req_seen(cache_size) {}
};

class DsrAgent : public RoutingAgent {
 public:
  explicit DsrAgent(Engine& engine) : RoutingAgent(engine) {
    nodes_.reserve(engine.node_count());
    for (int i = 0; i < engine.node_count(); ++i)
      nodes_.emplace_back(engine.options().duplicate_cache_size);
  }

  void on_app_packet(int node, int data_id) override {
    const int dst = engine_.packet(data_id).dst;
    if (const std::vector<int>* route = shortest_route(node, dst)) {
      send_on_route(node, data_id, *route);
      return;
    }
    buffer_packet(node, dst, data_id);
    ensure_discovery(node, dst);
  }

  void on_receive(int node, Frame frame) override {
    switch (frame.kind) {
      case FrameKind::data: handle_data(node, frame); break;
      case FrameKind::dsr_req: handle_request(node, frame); break;
      case FrameKind::dsr_rep: handle_reply(node, frame); break;
      case FrameKind::dsr_err: handle_error(node, frame); break;
      default: break;
    }
  }

  void on_unicast_failed(int node, const Frame& frame) override {
    if (frame.kind == FrameKind::dsr_rep || frame.kind == FrameKind::dsr_err)
      return;  // lost replies surface as request timeouts
    if (frame.kind != FrameKind::data) return;

    const int broken_from = node;
    const int broken_to = frame.rx_node;
    purge_link(node, broken_from, broken_to);

    const int dst = frame.data_dst;
    if (node == frame.data_src) {
      buffer_packet(node, dst, frame.data_id);
      flush_or_discover(node, dst);
      return;
    }
    engine_.drop_data(frame.data_id, DropReason::link_loss);
    send_error(node, frame.route, frame.route_idx, broken_from, broken_to);
  }

  void on_timer(int node, int kind, int key) override {
    if (kind != kTimerRequest) return;
    const int dst = key;
    NodeState& st = nodes_[node];
    auto it = st.discovery.find(dst);
    if (it == st.discovery.end() || !it->second.active) return;

    // Age out packets that waited through the whole backoff window.
    auto buf = st.buffer.find(dst);
    if (buf != st.buffer.end()) {
      const double deadline =
          engine_.now() - engine_.options().dsr_send_buffer_timeout;
      while (!buf->second.empty() && buf->second.front().since <= deadline) {
        engine_.drop_data(buf->second.front().data_id, DropReason::no_route);
        buf->second.pop_front();
      }
      if (buf->second.empty()) st.buffer.erase(buf);
    }
    if (!st.buffer.count(dst)) {
      it->second.active = false;
      return;
    }
    ++it->second.attempt;
    broadcast_request(node, dst);
    engine_.set_timer(node, kTimerRequest, dst, backoff(it->second.attempt));
  }

  void collect_buffered(std::vector<int>& data_ids) const override {
    for (const NodeState& st : nodes_)
      for (const auto& [dst, queue] : st.buffer)
        for (const BufferedPacket& p : queue) data_ids.push_back(p.data_id);
  }

 private:
  double backoff(int attempt) const {
    double period = engine_.options().dsr_request_period;
    for (int k = 0; k < attempt; ++k) {
      period *= 2.0;
      if (period >= engine_.options().dsr_max_request_period) break;
    }
    return std::min(period, engine_.options().dsr_max_request_period);
  }

  const std::vector<int>* shortest_route(int node, int dst) const {
    auto it = nodes_[node].cache.find(dst);
    if (it == nodes_[node].cache.end() || it->second.empty()) return nullptr;
    const std::vector<int>* best = nullptr;
    for (const std::vector<int>& route : it->second)
      if (!best || route.size() < best->size()) best = &route;
    return best;
  }

  void send_on_route(int node, int data_id, std::vector<int> route) {
    Frame f = engine_.make_data_frame(data_id);
    f.route = std::move(route);
    f.route_idx = 0;
    f.rx_node = f.route[1];
    engine_.send(node, std::move(f));
  }

  void buffer_packet(int node, int dst, int data_id) {
    auto& queue = nodes_[node].buffer[dst];
    if (static_cast<int>(queue.size()) >= engine_.options().buffer_capacity) {
      engine_.drop_data(queue.front().data_id, DropReason::no_route);
      queue.pop_front();
    }
    queue.push_back({data_id, engine_.now()});
  }

  void ensure_discovery(int node, int dst) {
    Discovery& d = nodes_[node].discovery[dst];
    if (d.active) return;
    d.active = true;
    d.attempt = 0;
    broadcast_request(node, dst);
    engine_.set_timer(node, kTimerRequest, dst, backoff(0));
  }

  void broadcast_request(int node, int dst) {
    NodeState& st = nodes_[node];
    Frame f;
    f.kind = FrameKind::dsr_req;
    f.size_bits = engine_.options().control_packet_bits;
    f.ttl = engine_.options().ttl;
    f.origin = node;
    f.target = dst;
    f.request_id = st.next_req_id++;
    f.route = {node};
    st.req_seen.seen_or_insert({node, f.request_id});
    engine_.send(node, std::move(f));
  }

  // Sends all buffered packets for dst over the current shortest cached
  // route, or falls back to discovery.
  void flush_or_discover(int node, int dst) {
    NodeState& st = nodes_[node];
    auto buf = st.buffer.find(dst);
    if (buf == st.buffer.end()) return;
    const std::vector<int>* route = shortest_route(node, dst);
    if (!route) {
      ensure_discovery(node, dst);
      return;
    }
    std::deque<BufferedPacket> pending = std::move(buf->second);
    st.buffer.erase(buf);
    for (const BufferedPacket& p : pending) {
      if (const std::vector<int>* r = shortest_route(node, dst))
        send_on_route(node, p.data_id, *r);
      else
        buffer_packet(node, dst, p.data_id);
    }
    if (st.buffer.count(dst)) ensure_discovery(node, dst);
  }

  void cache_route(int node, const std::vector<int>& route) {
    const int dst = route.back();
    auto& routes = nodes_[node].cache[dst];
    if (std::find(routes.begin(), routes.end(), route) != routes.end()) return;
    if (static_cast<int>(routes.size()) >=
        engine_.options().dsr_cache_routes_per_dest)
      routes.erase(routes.begin());
    routes.push_back(route);
  }

  void purge_link(int node, int a, int b) {
    for (auto& [dst, routes] : nodes_[node].cache) {
      std::erase_if(routes, [a, b](const std::vector<int>& route) {
        for (size_t k = 0; k + 1 < route.size(); ++k) {
          if ((route[k] == a && route[k + 1] == b) ||
              (route[k] == b && route[k + 1] == a))
            return true;
        }
        return false;
      });
    }
  }

  void handle_request(int node, Frame& frame) {
    NodeState& st = nodes_[node];
    if (node == frame.target) {
      // Reply to the first few copies; each arrives over a distinct path.
      int& replies = st.replies_sent[{frame.origin, frame.request_id}];
      if (replies >= engine_.options().dsr_max_replies_per_request) return;
      ++replies;
      std::vector<int> route = frame.route;
      route.push_back(node);
      Frame rep;
      rep.kind = FrameKind::dsr_rep;
      rep.size_bits = engine_.options().control_packet_bits;
      rep.ttl = engine_.options().ttl;
      rep.origin = frame.origin;
      rep.target = frame.target;
      rep.route = std::move(route);
      rep.route_idx = static_cast<int>(rep.route.size()) - 2;
      rep.rx_node = rep.route[rep.route_idx];
      engine_.send(node, std::move(rep));
      return;
    }
    if (st.req_seen.seen_or_insert({frame.origin, frame.request_id})) return;
    if (std::find(frame.route.begin(), frame.route.end(), node) !=
        frame.route.end())
      return;
    if (frame.ttl <= 1) return;
    Frame fwd = frame;
    fwd.route.push_back(node);
    --fwd.ttl;
    fwd.rx_node = -1;
    engine_.send(node, std::move(fwd));
  }

  void handle_reply(int node, Frame& frame) {
    if (node == frame.origin) {
      cache_route(node, frame.route);
      NodeState& st = nodes_[node];
      auto disc = st.discovery.find(frame.target);
      if (disc != st.discovery.end()) disc->second.active = false;
      flush_or_discover(node, frame.target);
      return;
    }
    if (frame.route_idx <= 0) return;
    Frame fwd = frame;
    --fwd.route_idx;
    fwd.rx_node = fwd.route[fwd.route_idx];
    engine_.send(node, std::move(fwd));
  }

  void send_error(int node, const std::vector<int>& route, int route_idx,
                  int broken_from, int broken_to) {
    if (route_idx <= 0) return;
    Frame f;
    f.kind = FrameKind::dsr_err;
    f.size_bits = engine_.options().control_packet_bits;
    f.ttl = engine_.options().ttl;
    f.origin = route.front();
    f.request_id = broken_from;
    f.target = broken_to;
    f.route = route;
    f.route_idx = route_idx - 1;
    f.rx_node = route[route_idx - 1];
    engine_.send(node, std::move(f));
  }

  void handle_error(int node, Frame& frame) {
    purge_link(node, frame.request_id, frame.target);
    if (node == frame.origin) {
      const int dst = frame.route.back();
      if (nodes_[node].buffer.count(dst)) flush_or_discover(node, dst);
      return;
    }
    if (frame.route_idx <= 0) return;
    Frame fwd = frame;
    --fwd.route_idx;
    fwd.rx_node = fwd.route[fwd.route_idx];
    engine_.send(node, std::move(fwd));
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
    const int idx = frame.route_idx + 1;
    if (idx + 1 >= static_cast<int>(frame.route.size()) ||
        frame.route[idx] != node) {
      // Malformed source route; treat as a routing failure at this hop.
      engine_.drop_data(frame.data_id, DropReason::no_route);
      return;
    }
    Frame fwd = frame;
    fwd.route_idx = idx;
    fwd.rx_node = fwd.route[idx + 1];
    engine_.send(node, std::move(fwd));
  }

  std::vector<NodeState> nodes_;
};

}  // namespace

std::unique_ptr<RoutingAgent> make_dsr_agent(Engine& engine) {
  return std::make_unique<DsrAgent>(engine);
}

}  // namespace manet::sim
