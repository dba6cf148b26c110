#include <deque>
#include <map>
#include <optional>
#include <unordered_map>

#include "engine.hpp"

namespace manet::sim {

namespace {

constexpr int kTimerQuery = 1;

// Per-(node, destination) link-reversal state: an integer height plus the
// last heard neighbor heights. The destination is pinned at height 0.
struct DestState {
  std::optional<int> height;
  std::map<int, int> nbr_heights;  // neighbor -> height, learned from upd
  bool route_required = false;
  int reversals_left = 0;
};

struct Discovery {
  bool active = false;
  int attempts = 0;
};

struct BufferedData {
  int data_id;
  int ttl;  // remaining hops, preserved across buffering
};

struct NodeState {
  std::unordered_map<int, DestState> dests;
  std::unordered_map<int, Discovery> discovery;
  std::unordered_map<int, std::deque<BufferedData>> buffer;  // per destination
  LruSet qry_seen;
  int next_qry_id = 0;

  explicit NodeState(size_t cache) : qry_seen(cache) {}
};

class ToraAgent : public RoutingAgent {
 public:
  explicit ToraAgent(Engine& engine) : RoutingAgent(engine) {
    nodes_.reserve(engine.node_count());
    for (int i = 0; i < engine.node_count(); ++i)
      nodes_.emplace_back(engine.options().duplicate_cache_size);
  }

  void on_app_packet(int node, int data_id) override {
    route_packet(node, engine_.make_data_frame(data_id));
  }

  void on_receive(int node, Frame frame) override {
    switch (frame.kind) {
      case FrameKind::data: handle_data(node, frame); break;
      case FrameKind::qry: handle_qry(node, frame); break;
      case FrameKind::upd: handle_upd(node, frame); break;
      default: break;
    }
  }

  void on_unicast_failed(int node, const Frame& frame) override {
    if (frame.kind != FrameKind::data) return;
    const int dst = frame.data_dst;
    DestState& ds = dest(node, dst);
    ds.nbr_heights.erase(frame.rx_node);
    Frame retry = frame;
    retry.rx_node = -1;
    route_packet(node, std::move(retry));
  }

  void on_timer(int node, int kind, int key) override {
    if (kind != kTimerQuery) return;
    const int dst = key;
    NodeState& st = nodes_[node];
    auto it = st.discovery.find(dst);
    if (it == st.discovery.end() || !it->second.active) return;
    if (dest(node, dst).height) {
      it->second.active = false;
      return;
    }
    if (it->second.attempts < engine_.options().tora_retry_budget) {
      ++it->second.attempts;
      broadcast_qry(node, dst);
      engine_.set_timer(node, kTimerQuery, dst, 1.0);
      return;
    }
    it->second.active = false;
    auto buf = st.buffer.find(dst);
    if (buf != st.buffer.end()) {
      for (const BufferedData& b : buf->second)
        engine_.drop_data(b.data_id, DropReason::no_route);
      st.buffer.erase(buf);
    }
  }

  void collect_buffered(std::vector<int>& data_ids) const override {
    for (const NodeState& st : nodes_)
      for (const auto& [dst, queue] : st.buffer)
        for (const BufferedData& b : queue) data_ids.push_back(b.data_id);
  }

  int height_of(int node, int dst) const override {
    if (node == dst) return 0;
    auto it = nodes_[node].dests.find(dst);
    if (it == nodes_[node].dests.end() || !it->second.height) return 1 << 20;
    return *it->second.height;
  }

 private:
  DestState& dest(int node, int dst) {
    DestState& ds = nodes_[node].dests[dst];
    if (node == dst && !ds.height) {
      ds.height = 0;
      ds.reversals_left = engine_.options().tora_reversal_budget;
    }
    return ds;
  }

  // Lowest-height downstream neighbor, ties broken by node id.
  std::optional<int> downstream(const DestState& ds) const {
    if (!ds.height) return std::nullopt;
    std::optional<int> best;
    int best_h = *ds.height;
    for (const auto& [nbr, h] : ds.nbr_heights) {
      if (h < best_h) {
        best_h = h;
        best = nbr;
      }
    }
    return best;
  }

  void buffer_packet(int node, int dst, int data_id, int ttl) {
    auto& queue = nodes_[node].buffer[dst];
    if (static_cast<int>(queue.size()) >= engine_.options().buffer_capacity) {
      engine_.drop_data(queue.front().data_id, DropReason::no_route);
      queue.pop_front();
    }
    queue.push_back({data_id, ttl});
  }

  void ensure_discovery(int node, int dst) {
    dest(node, dst).route_required = true;
    Discovery& d = nodes_[node].discovery[dst];
    if (d.active) return;
    d.active = true;
    d.attempts = 0;
    broadcast_qry(node, dst);
    engine_.set_timer(node, kTimerQuery, dst, 1.0);
  }

  void broadcast_qry(int node, int dst) {
    NodeState& st = nodes_[node];
    Frame f;
    f.kind = FrameKind::qry;
    f.size_bits = engine_.options().control_packet_bits;
    f.ttl = engine_.options().ttl;
    f.origin = node;
    f.target = dst;
    f.request_id = st.next_qry_id++;
    st.qry_seen.seen_or_insert({key_of(node, dst), f.request_id});
    engine_.send(node, std::move(f));
  }

  void broadcast_upd(int node, int dst) {
    Frame f;
    f.kind = FrameKind::upd;
    f.size_bits = engine_.options().control_packet_bits;
    f.ttl = 1;  // height announcements are single-hop
    f.target = dst;
    f.height = height_of(node, dst);
    engine_.send(node, std::move(f));
  }

  long long key_of(int origin, int dst) const {
    return static_cast<long long>(origin) * engine_.node_count() + dst;
  }

  // Forwards the frame downhill, or buffers it behind a query / reverses.
  void route_packet(int node, Frame frame) {
    const int dst = frame.data_dst;
    if (node == dst) return;
    DestState& ds = dest(node, dst);
    if (!ds.height) {
      buffer_packet(node, dst, frame.data_id, frame.ttl);
      ensure_discovery(node, dst);
      return;
    }
    if (std::optional<int> next = downstream(ds)) {
      frame.rx_node = *next;
      engine_.send(node, std::move(frame));
      return;
    }
    // Lost the last downstream link: full reversal above all neighbors.
    // With no neighbors left, or the reversal budget spent, the route is
    // declared dead so the next packet rebuilds it from a fresh query.
    if (ds.nbr_heights.empty() || ds.reversals_left <= 0) {
      engine_.drop_data(frame.data_id, DropReason::no_route);
      ds.height.reset();
      ds.nbr_heights.clear();
      return;
    }
    --ds.reversals_left;
    int max_h = 0;
    for (const auto& [nbr, h] : ds.nbr_heights) max_h = std::max(max_h, h);
    ds.height = max_h + 1;
    broadcast_upd(node, dst);
    buffer_packet(node, dst, frame.data_id, frame.ttl);
    // All links point away after the reversal; retry at once.
    try_flush(node, dst);
  }

  void try_flush(int node, int dst) {
    NodeState& st = nodes_[node];
    auto buf = st.buffer.find(dst);
    if (buf == st.buffer.end()) return;
    DestState& ds = dest(node, dst);
    if (!ds.height || !downstream(ds)) return;
    std::deque<BufferedData> pending = std::move(buf->second);
    st.buffer.erase(buf);
    for (const BufferedData& b : pending) {
      Frame f = engine_.make_data_frame(b.data_id);
      f.ttl = b.ttl;
      route_packet(node, std::move(f));
    }
  }

  void handle_qry(int node, Frame& frame) {
    const int dst = frame.target;
    NodeState& st = nodes_[node];
    if (st.qry_seen.seen_or_insert({key_of(frame.origin, dst), frame.request_id}))
      return;
    DestState& ds = dest(node, dst);
    if (node == dst || ds.height) {
      broadcast_upd(node, dst);
      return;
    }
    ds.route_required = true;
    if (frame.ttl > 1) {
      Frame fwd = frame;
      fwd.rx_node = -1;
      --fwd.ttl;
      engine_.send(node, std::move(fwd));
    }
  }

  void handle_upd(int node, Frame& frame) {
    const int dst = frame.target;
    if (node == dst) return;
    DestState& ds = dest(node, dst);
    ds.nbr_heights[frame.tx_node] = frame.height;
    if (!ds.height && ds.route_required) {
      ds.height = frame.height + 1;
      ds.route_required = false;
      ds.reversals_left = engine_.options().tora_reversal_budget;
      auto disc = nodes_[node].discovery.find(dst);
      if (disc != nodes_[node].discovery.end()) disc->second.active = false;
      broadcast_upd(node, dst);
    }
    try_flush(node, dst);
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
    frame.rx_node = -1;
    route_packet(node, std::move(frame));
  }

  std::vector<NodeState> nodes_;
};

}  // namespace

std::unique_ptr<RoutingAgent> make_tora_agent(Engine& engine) {
  return std::make_unique<ToraAgent>(engine);
}

}  // namespace manet::sim
