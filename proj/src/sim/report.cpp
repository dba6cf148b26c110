#include "manet/sim/sim.hpp"

namespace manet::sim {

double compute_pdr(const SimReport& report) {
  if (report.originated <= 0)
    throw UndefinedMetricError("packet delivery ratio undefined: nothing originated");
  return static_cast<double>(report.delivered) /
         static_cast<double>(report.originated);
}

double compute_nrl(const SimReport& report) {
  if (report.delivered <= 0)
    throw UndefinedMetricError("normalized routing load undefined: nothing delivered");
  return static_cast<double>(report.routing_transmissions) /
         static_cast<double>(report.delivered);
}

double compute_avg_delay(const SimReport& report) {
  if (report.delivered <= 0)
    throw UndefinedMetricError("average delay undefined: nothing delivered");
  double sum = 0.0;
  for (const PacketRecord& p : report.packets)
    if (p.delivered) sum += p.delivery_time - p.origin_time;
  return sum / static_cast<double>(report.delivered);
}

double compute_path_optimality(const SimReport& report) {
  if (report.delivered <= 0)
    throw UndefinedMetricError("path optimality undefined: nothing delivered");
  double sum = 0.0;
  long long count = 0;
  for (const PacketRecord& p : report.packets) {
    if (!p.delivered || p.shortest_path_at_origination < 1) continue;
    sum += p.hop_count - p.shortest_path_at_origination;
    ++count;
  }
  if (count == 0)
    throw UndefinedMetricError(
        "path optimality undefined: no delivered packet had a path at origination");
  return sum / static_cast<double>(count);
}

}  // namespace manet::sim
