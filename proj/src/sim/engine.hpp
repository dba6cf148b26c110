#pragma once

#include <deque>
#include <list>
#include <map>
#include <memory>
#include <queue>
#include <vector>

#include "manet/sim/sim.hpp"

namespace manet::sim {

enum class FrameKind {
  data,
  rreq,
  rrep,
  rerr,
  dsr_req,
  dsr_rep,
  dsr_err,
  qry,
  upd,
};
const char* frame_kind_name(FrameKind k);

// One per-hop transmission unit. Control protocols share the generic fields;
// unused ones stay at their defaults.
struct Frame {
  FrameKind kind = FrameKind::data;
  int tx_node = -1;
  int rx_node = -1;  // -1 = broadcast
  int ttl = 0;
  int size_bits = 0;
  double tx_start = 0.0;
  int uid = 0;

  int data_id = -1;
  int data_src = -1;
  int data_dst = -1;

  int origin = -1;
  int target = -1;
  int request_id = -1;
  int hop_count = 0;
  uint32_t origin_seq = 0;
  uint32_t dest_seq = 0;
  bool dest_seq_known = false;
  int height = 0;

  std::vector<int> route;  // dsr source routes / accumulated discovery path
  int route_idx = 0;
};

class Engine;

class RoutingAgent {
 public:
  explicit RoutingAgent(Engine& engine) : engine_(engine) {}
  virtual ~RoutingAgent() = default;

  virtual void on_app_packet(int node, int data_id) = 0;
  virtual void on_receive(int node, Frame frame) = 0;
  virtual void on_unicast_failed(int node, const Frame& frame) = 0;
  virtual void on_timer(int node, int kind, int key) = 0;
  // Data ids still waiting in protocol buffers at the end of the run.
  virtual void collect_buffered(std::vector<int>& data_ids) const = 0;
  // Audit hook; only meaningful for height-based routing.
  virtual int height_of(int /*node*/, int /*dst*/) const { return 0; }

 protected:
  Engine& engine_;
};

// Bounded seen-set with LRU eviction (duplicate flood suppression).
class LruSet {
 public:
  explicit LruSet(size_t capacity) : capacity_(capacity) {}

  // Returns true if the key was already present; inserts it otherwise.
  bool seen_or_insert(std::pair<long long, long long> key) {
    auto it = index_.find(key);
    if (it != index_.end()) {
      order_.splice(order_.end(), order_, it->second);
      return true;
    }
    order_.push_back(key);
    index_[key] = std::prev(order_.end());
    if (index_.size() > capacity_) {
      index_.erase(order_.front());
      order_.pop_front();
    }
    return false;
  }

 private:
  size_t capacity_;
  std::list<std::pair<long long, long long>> order_;
  std::map<std::pair<long long, long long>, decltype(order_)::iterator> index_;
};

// Sequential event engine: single timeline, deterministic tie-break by
// insertion order.
class Engine {
 public:
  Engine(const MobilityTrace& trace, const std::vector<TrafficFlow>& flows,
         Protocol protocol, const RadioModel& radio, uint64_t seed,
         const SimOptions& options);

  SimReport run();

  double now() const { return now_; }
  int node_count() const { return trace_.node_count; }
  const SimOptions& options() const { return options_; }
  const RadioModel& radio() const { return radio_; }
  Rng& rng() { return rng_; }

  Vec2 node_position(int node, double t) const;
  bool in_range(int a, int b, double t) const;

  // Queues a frame at `from` (frame.rx_node == -1 broadcasts it). Data frames
  // that overflow the transmit queue are dropped as queue_overflow.
  void send(int from, Frame frame);
  void set_timer(int node, int kind, int key, double delay);

  Frame make_data_frame(int data_id) const;
  PacketRecord& packet(int data_id) { return report_.packets[data_id]; }
  void deliver_data(int node, const Frame& frame);
  void drop_data(int data_id, DropReason reason);

  void log_event(int node, const char* what, int pkt);

 private:
  struct Event {
    double time = 0.0;
    uint64_t seq = 0;
    enum Kind { flow_packet, tx_end, rx, timer } kind = flow_packet;
    int node = -1;
    int a = 0;  // timer kind / flow index
    int b = 0;  // timer key
    std::shared_ptr<Frame> frame;
  };
  struct EventAfter {
    bool operator()(const Event& x, const Event& y) const {
      if (x.time != y.time) return x.time > y.time;
      return x.seq > y.seq;
    }
  };
  struct NodeIo {
    std::deque<std::shared_ptr<Frame>> queue;
    bool busy = false;
  };

  void schedule(Event ev, double at);
  void begin_tx(int node);
  void handle_tx_end(int node);
  void handle_rx(int node, std::shared_ptr<Frame> frame);
  void originate(int flow_index);
  int shortest_path_hops(int src, int dst, double t) const;
  void finalize();

  const MobilityTrace& trace_;
  std::vector<TrafficFlow> flows_;
  Protocol protocol_;
  RadioModel radio_;
  SimOptions options_;
  Rng rng_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  uint64_t next_seq_ = 0;
  int next_frame_uid_ = 0;
  double now_ = 0.0;
  std::vector<NodeIo> io_;
  std::unique_ptr<RoutingAgent> agent_;
  SimReport report_;
  int log_pkt_id(const Frame& frame) const;
};

std::unique_ptr<RoutingAgent> make_aodv_agent(Engine& engine);
std::unique_ptr<RoutingAgent> make_dsr_agent(Engine& engine);
std::unique_ptr<RoutingAgent> make_tora_agent(Engine& engine);

}  // namespace manet::sim
