// Ledger conservation audit. Replays every reputation delta recorded in a
// trace and checks the result against the end-of-run ledger snapshot.

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hbds/ledger.hpp"
#include "hbds/trace.hpp"

namespace hbds {

struct AuditReport {
  double replayed_total = 0.0;          // sum of all deltas in the trace
  double snapshot_total = 0.0;          // sum of the ledger snapshot lines
  std::optional<double> reported_total; // total_rep from the end line
  std::map<std::string, double> by_cause;
  double max_node_error = 0.0;  // worst per-node gap between replay and snapshot
  std::size_t deltas = 0;
  std::size_t nodes = 0;
  std::vector<std::string> issues;

  bool ok() const { return issues.empty(); }
};

inline constexpr double kAuditTolerance = 1e-6;

inline AuditReport audit_trace(const Trace& trace, double tol = kAuditTolerance) {
  AuditReport a;
  std::map<std::uint32_t, double> replay;
  std::map<std::uint32_t, double> snapshot;
  auto node_of = [](const TraceRecord& r) { return static_cast<std::uint32_t>(r.integer("node")); };
  auto issue = [&a](SimTime t, const std::string& m) { a.issues.push_back("t=" + std::to_string(t) + ": " + m); };

  trace.for_each([&](const TraceRecord& r) {
    if (r.kind == "rep") {
      const auto n = node_of(r);
      const double d = r.number("delta");
      const std::string cause(r.at("cause"));
      if (!parse_delta_cause(cause)) issue(r.t, "unknown delta cause '" + cause + "'");
      replay[n] += d;
      a.by_cause[cause] += d;
      a.replayed_total += d;
      ++a.deltas;
      const double running = r.number("rep");
      if (std::abs(running - replay[n]) > tol)
        issue(r.t, "node " + std::to_string(n) + " running balance " + format_double(running) +
                       " differs from replay " + format_double(replay[n]));
    } else if (r.kind == "ledger") {
      snapshot[node_of(r)] = r.number("rep");
    } else if (r.kind == "end") {
      if (auto v = r.get("total_rep")) a.reported_total = std::stod(std::string(*v));
    }
  });

  if (snapshot.empty()) a.issues.push_back("trace holds no ledger snapshot");
  if (!a.reported_total) a.issues.push_back("trace holds no end line with total_rep");
  for (const auto& [n, rep] : snapshot) {
    a.snapshot_total += rep;
    auto it = replay.find(n);
    const double replayed = it == replay.end() ? 0.0 : it->second;
    const double err = std::abs(replayed - rep);
    a.max_node_error = std::max(a.max_node_error, err);
    if (err > tol)
      a.issues.push_back("node " + std::to_string(n) + " snapshot " + format_double(rep) + " but replay " +
                         format_double(replayed));
  }
  for (const auto& [n, v] : replay)
    if (!snapshot.count(n)) a.issues.push_back("node " + std::to_string(n) + " has deltas but no snapshot");
  a.nodes = snapshot.size();

  double cause_sum = 0.0;
  for (const auto& [c, v] : a.by_cause) cause_sum += v;
  if (std::abs(cause_sum - a.replayed_total) > tol) a.issues.push_back("per-cause totals do not add up");
  if (std::abs(a.replayed_total - a.snapshot_total) > tol)
    a.issues.push_back("replayed total " + format_double(a.replayed_total) + " differs from snapshot total " +
                       format_double(a.snapshot_total));
  if (a.reported_total && std::abs(*a.reported_total - a.replayed_total) > tol)
    a.issues.push_back("reported total " + format_double(*a.reported_total) + " differs from replayed total " +
                       format_double(a.replayed_total));
  return a;
}

}  // namespace hbds
