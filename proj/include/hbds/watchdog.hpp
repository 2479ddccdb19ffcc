// Relay monitoring: watchdog panels, Coop/Self reports, direct and indirect
// trust, importance-weighted report fusion and the resulting payments.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hbds/core.hpp"
#include "hbds/election.hpp"
#include "hbds/ledger.hpp"

namespace hbds {

enum class Verdict { Coop, Self };

inline std::string_view to_string(Verdict v) { return v == Verdict::Coop ? "Coop" : "Self"; }

struct TrustParams {
  double direct_weight = 0.7;
  double indirect_weight = 0.3;
  double ema = 0.2;
};

struct TrustState {
  NodeId observer;
  NodeId subject;
  double direct = 0.5;
  double indirect = 0.5;
  double combined = 0.5;
};

struct TrustReport {
  NodeId watchdog;
  NodeId relay;
  PacketId packet = 0;
  Verdict verdict = Verdict::Coop;
  std::uint64_t round = 0;
};

struct WatchdogPanel {
  NodeId wn1;
  NodeId wn2;
  NodeId wn3;

  std::array<NodeId, 3> members() const { return {wn1, wn2, wn3}; }
};

// Round-robin position over a community's sorted member list.
struct PanelCursor {
  std::size_t next = 0;
};

struct PanelRequest {
  std::span<const NodeId> members;  // community members, any order
  std::optional<NodeId> ach;
  std::optional<NodeId> previous_ach;
  NodeId relay;
  std::span<const NodeId> excluded;  // e.g. expelled nodes
};

namespace detail {

inline bool contains(std::span<const NodeId> s, NodeId n) {
  return std::find(s.begin(), s.end(), n) != s.end();
}

}  // namespace detail

// wn1 = ACH, wn2 = previous ACH, wn3 = next round-robin member. Missing or
// ineligible heads are replaced from the round-robin pool. Returns nullopt
// (relay unmonitored) when fewer than three eligible members exist.
inline std::optional<WatchdogPanel> select_watchdogs(const PanelRequest& req, PanelCursor& cursor) {
  std::vector<NodeId> pool(req.members.begin(), req.members.end());
  std::sort(pool.begin(), pool.end());
  auto eligible = [&](NodeId n) { return n != req.relay && !detail::contains(req.excluded, n); };
  const auto n_eligible = static_cast<std::size_t>(std::count_if(pool.begin(), pool.end(), eligible));
  if (n_eligible < 3 || pool.empty()) return std::nullopt;

  std::vector<NodeId> chosen;
  auto take_head = [&](std::optional<NodeId> h) {
    if (h && eligible(*h) && detail::contains(pool, *h) &&
        std::find(chosen.begin(), chosen.end(), *h) == chosen.end())
      chosen.push_back(*h);
    else
      chosen.push_back(NodeId{UINT32_MAX});  // placeholder, filled by round robin
  };
  take_head(req.ach);
  take_head(req.previous_ach);
  chosen.push_back(NodeId{UINT32_MAX});

  for (auto& slot : chosen) {
    if (slot.value != UINT32_MAX) continue;
    for (std::size_t step = 0; step < pool.size(); ++step) {
      const NodeId cand = pool[cursor.next % pool.size()];
      cursor.next = (cursor.next + 1) % pool.size();
      if (eligible(cand) && std::find(chosen.begin(), chosen.end(), cand) == chosen.end()) {
        slot = cand;
        break;
      }
    }
    if (slot.value == UINT32_MAX) return std::nullopt;
  }
  return WatchdogPanel{chosen[0], chosen[1], chosen[2]};
}

// What one watchdog saw of a relay between handoff and timeout.
struct RelayObservation {
  bool in_range = true;        // stayed within radio range until timeout
  bool retransmitted = false;  // packet overheard again (or still in custody)
  bool tag_matches = true;     // integrity tag of the overheard copy
  double prior_trust = 0.5;    // watchdog's combined trust in the relay
};

inline Verdict report_for(const RelayObservation& obs) {
  if (!obs.in_range) return obs.prior_trust >= 0.5 ? Verdict::Coop : Verdict::Self;
  return obs.retransmitted && obs.tag_matches ? Verdict::Coop : Verdict::Self;
}

inline std::array<TrustReport, 3> observe_relay(const WatchdogPanel& panel, PacketId packet,
                                                NodeId relay,
                                                const std::array<RelayObservation, 3>& seen,
                                                std::uint64_t round = 0) {
  const auto wns = panel.members();
  std::array<TrustReport, 3> out;
  for (std::size_t i = 0; i < 3; ++i) out[i] = {wns[i], relay, packet, report_for(seen[i]), round};
  return out;
}

class TrustBook {
 public:
  explicit TrustBook(TrustParams p = {}) : params_(p) {}

  const TrustParams& params() const { return params_; }

  TrustState get(NodeId observer, NodeId subject) const {
    auto it = states_.find({subject, observer});
    if (it != states_.end()) return it->second;
    return TrustState{observer, subject};
  }

  // Mean combined trust toward `subject` held by observers other than `self`.
  std::optional<double> neighbour_opinion(NodeId self, NodeId subject) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (auto it = states_.lower_bound({subject, NodeId{0}});
         it != states_.end() && it->first.first == subject; ++it) {
      if (it->first.second == self) continue;
      sum += it->second.combined;
      ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }

  TrustState update(NodeId observer, NodeId subject, bool forwarded) {
    auto st = update_trust(get(observer, subject), forwarded, neighbour_opinion(observer, subject),
                           params_);
    states_[{subject, observer}] = st;
    return st;
  }

  static TrustState update_trust(TrustState s, bool forwarded, std::optional<double> neighbours,
                                 const TrustParams& p) {
    s.direct = std::clamp((1.0 - p.ema) * s.direct + p.ema * (forwarded ? 1.0 : 0.0), 0.0, 1.0);
    if (neighbours) s.indirect = std::clamp(*neighbours, 0.0, 1.0);
    s.combined = std::clamp(p.direct_weight * s.direct + p.indirect_weight * s.indirect, 0.0, 1.0);
    return s;
  }

 private:
  TrustParams params_;
  std::map<std::pair<NodeId, NodeId>, TrustState> states_;  // keyed (subject, observer)
};

inline TrustState update_trust(TrustState s, bool forwarded, std::optional<double> neighbours = {},
                               const TrustParams& p = {}) {
  return TrustBook::update_trust(s, forwarded, neighbours, p);
}

// Each watchdog's share of the panel's (non-negative) reputation.
inline std::array<double, 3> importance_aspect(double r1, double r2, double r3) {
  const std::array<double, 3> r{std::max(0.0, r1), std::max(0.0, r2), std::max(0.0, r3)};
  const double sum = r[0] + r[1] + r[2];
  if (sum <= 0.0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return {r[0] / sum, r[1] / sum, r[2] / sum};
}

// Importance-weighted majority. Ties go to Self.
inline Verdict cia_aggregate(const std::array<Verdict, 3>& reports, const std::array<double, 3>& ia) {
  double coop = 0.0, self = 0.0;
  for (std::size_t i = 0; i < 3; ++i) (reports[i] == Verdict::Coop ? coop : self) += ia[i];
  return coop > self ? Verdict::Coop : Verdict::Self;
}

inline Verdict cia_aggregate(const std::array<TrustReport, 3>& reports, const std::array<double, 3>& ia) {
  return cia_aggregate({reports[0].verdict, reports[1].verdict, reports[2].verdict}, ia);
}

struct ForwardingSettlement {
  bool eligible = true;
  double delta = 0.0;
  bool strike = false;
};

// CH and gateway/infrastructure nodes earn nothing for relaying.
inline ForwardingSettlement settle_forwarding(Role relay_role, Verdict v, const IncentiveConstants& k) {
  if (relay_role == Role::CH || relay_role == Role::GW) return {false, 0.0, false};
  if (v == Verdict::Coop) return {true, k.f_pay, false};
  return {true, -k.f_pay, true};
}

inline std::array<RepDelta, 3> settle_watchdogs(const std::array<TrustReport, 3>& reports, Verdict final_verdict,
                                                const IncentiveConstants& k) {
  std::array<RepDelta, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = reports[i].verdict == final_verdict ? k.wn_pay : -k.wn_pay;
    out[i] = {reports[i].watchdog, d, DeltaCause::Watchdog};
  }
  return out;
}

}  // namespace hbds
