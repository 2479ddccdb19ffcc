// Run metrics derived from a trace, and the packet-level reconciliation of
// created packets into delivered, lost and still-in-flight.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "hbds/trace.hpp"

namespace hbds {

struct MetricsReport {
  double delivery_probability = 0.0;
  double avg_delivery_delay = 0.0;        // seconds, over delivered packets
  std::optional<double> overhead_ratio;   // undefined when nothing was delivered
  std::uint64_t packets_dropped = 0;      // copy-level drop events
  std::uint64_t packets_created = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t relay_transmissions = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline constexpr const char* kUndefined = "NA";

inline std::string format_overhead(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string(kUndefined);
}

inline MetricsReport compute_metrics(const Trace& trace) {
  MetricsReport m;
  double delay_sum = 0.0;
  trace.for_each([&](const TraceRecord& r) {
    if (r.kind == "create") {
      ++m.packets_created;
    } else if (r.kind == "deliver") {
      ++m.packets_delivered;
      delay_sum += r.number("delay");
    } else if (r.kind == "forward") {
      if (r.at("tx") == "1") ++m.relay_transmissions;
    } else if (r.kind == "drop") {
      ++m.packets_dropped;
    }
  });
  if (m.packets_created > 0)
    m.delivery_probability = static_cast<double>(m.packets_delivered) / static_cast<double>(m.packets_created);
  if (m.packets_delivered > 0) {
    m.avg_delivery_delay = delay_sum / static_cast<double>(m.packets_delivered);
    m.overhead_ratio = (static_cast<double>(m.relay_transmissions) - static_cast<double>(m.packets_delivered)) /
                       static_cast<double>(m.packets_delivered);
  }
  return m;
}

// Per-packet fate at the end of a run.
struct Reconciliation {
  std::uint64_t created = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;       // every copy dropped before delivery
  std::uint64_t in_flight = 0;  // undelivered, at least one copy still held

  bool balanced() const { return created == delivered + lost + in_flight; }
};

// Replays copy custody from the trace. A copy appears at the source on
// creation and at the receiver of each accepted non-final hop; buffer, TTL
// and integrity drops remove one. Selfish discards never held a copy.
inline Reconciliation reconcile(const Trace& trace) {
  std::map<std::uint64_t, std::int64_t> copies;
  std::set<std::uint64_t> delivered;
  trace.for_each([&](const TraceRecord& r) {
    if (r.kind == "create") {
      copies[static_cast<std::uint64_t>(r.integer("pkt"))] += 1;
    } else if (r.kind == "forward") {
      if (r.at("accepted") == "1" && r.get("final") == std::optional<std::string_view>("0"))
        copies[static_cast<std::uint64_t>(r.integer("pkt"))] += 1;
    } else if (r.kind == "deliver") {
      delivered.insert(static_cast<std::uint64_t>(r.integer("pkt")));
    } else if (r.kind == "drop") {
      if (r.at("reason") != "selfish") copies[static_cast<std::uint64_t>(r.integer("pkt"))] -= 1;
    }
  });
  Reconciliation rc;
  for (const auto& [id, n] : copies) {
    ++rc.created;
    if (delivered.contains(id))
      ++rc.delivered;
    else if (n > 0)
      ++rc.in_flight;
    else
      ++rc.lost;
  }
  return rc;
}

}  // namespace hbds
