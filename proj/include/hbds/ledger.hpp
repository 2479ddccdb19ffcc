// Reputation bookkeeping: the shared reputation directory, per-community
// RTables synchronized by CH_ack, carry-forward between communities and the
// three-strike penalty escalator.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hbds/core.hpp"

namespace hbds {

enum class DeltaCause { ElectionPay, ElectionCost, VoterPay, Forwarding, Watchdog, Penalty, Readmission };

inline std::string_view to_string(DeltaCause c) {
  switch (c) {
    case DeltaCause::ElectionPay: return "election_pay";
    case DeltaCause::ElectionCost: return "election_cost";
    case DeltaCause::VoterPay: return "voter_pay";
    case DeltaCause::Forwarding: return "forwarding";
    case DeltaCause::Watchdog: return "watchdog";
    case DeltaCause::Penalty: return "penalty";
    case DeltaCause::Readmission: return "readmission";
  }
  return "?";
}

inline std::optional<DeltaCause> parse_delta_cause(std::string_view s) {
  for (auto c : {DeltaCause::ElectionPay, DeltaCause::ElectionCost, DeltaCause::VoterPay,
                 DeltaCause::Forwarding, DeltaCause::Watchdog, DeltaCause::Penalty,
                 DeltaCause::Readmission}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

struct RepDelta {
  NodeId node;
  double amount = 0.0;
  DeltaCause cause = DeltaCause::Forwarding;
};

struct Expulsion {
  SimTime expiry = 0;
  double debt = 0.0;  // readmission debt, >= 0
};

struct CommunityLedger {
  CommunityId community = 0;
  std::map<NodeId, RTableEntry> entries;
  std::vector<std::uint64_t> election_history;
  std::map<NodeId, Expulsion> expelled;
};

struct PenaltyPolicy {
  double f_pay = 1.0;
  SimTime expel_duration = 900;
};

enum class PenaltyKind { None, NegativePayment, Expel };

struct PenaltyAction {
  PenaltyKind kind = PenaltyKind::None;
  double delta = 0.0;
  double debt = 0.0;
  SimTime expiry = 0;
};

class Ledger {
 public:
  using DeltaObserver = std::function<void(const RepDelta&)>;

  explicit Ledger(PenaltyPolicy policy = {}) : policy_(policy) {}

  void set_observer(DeltaObserver obs) { observer_ = std::move(obs); }
  const PenaltyPolicy& policy() const { return policy_; }

  void register_node(NodeId n, CommunityId c) {
    nodes_.try_emplace(n);
    community(c).entries.try_emplace(n, RTableEntry{n, reputation(n), 0});
    home_[n] = c;
  }

  bool known(NodeId n) const { return nodes_.contains(n); }
  double reputation(NodeId n) const {
    auto it = nodes_.find(n);
    return it == nodes_.end() ? 0.0 : it->second.reputation;
  }
  std::uint32_t strikes(NodeId n) const {
    auto it = nodes_.find(n);
    return it == nodes_.end() ? 0 : it->second.strikes;
  }
  std::optional<CommunityId> home(NodeId n) const {
    auto it = home_.find(n);
    if (it == home_.end()) return std::nullopt;
    return it->second;
  }

  CommunityLedger& community(CommunityId c) {
    auto [it, inserted] = communities_.try_emplace(c);
    if (inserted) it->second.community = c;
    return it->second;
  }
  const CommunityLedger* find_community(CommunityId c) const {
    auto it = communities_.find(c);
    return it == communities_.end() ? nullptr : &it->second;
  }

  // Applies deltas to the directory and to the CH copy of each node's home
  // community. Unknown nodes are registered at reputation 0 first.
  void apply_settlement(std::span<const RepDelta> deltas) {
    for (const auto& d : deltas) {
      auto& st = nodes_[d.node];
      st.reputation += d.amount;
      total_ += d.amount;
      by_cause_[d.cause] += d.amount;
      if (auto h = home(d.node)) {
        auto& e = community(*h).entries[d.node];
        e.node = d.node;
        e.reputation = st.reputation;
      }
      if (observer_) observer_(d);
    }
    ++settlements_;
  }
  void apply(const RepDelta& d) { apply_settlement(std::span<const RepDelta>(&d, 1)); }

  std::uint64_t settlement_count() const { return settlements_; }

  // CH_ack: the CH's RTable is refreshed from the directory and copied to
  // every non-expelled member's local view.
  void broadcast_ack(CommunityId c, std::uint64_t round, std::span<const NodeId> members) {
    auto& cl = community(c);
    for (auto& [n, e] : cl.entries) {
      e.reputation = reputation(n);
      e.last_updated = round;
    }
    cl.election_history.push_back(round);
    for (NodeId m : members) {
      if (cl.expelled.contains(m)) continue;
      views_[m] = cl.entries;
    }
  }

  const std::map<NodeId, RTableEntry>* view_of(NodeId n) const {
    auto it = views_.find(n);
    return it == views_.end() ? nullptr : &it->second;
  }

  // True iff every listed non-expelled member holds the CH's RTable.
  bool views_consistent(CommunityId c, std::span<const NodeId> members) const {
    const auto* cl = find_community(c);
    if (!cl) return true;
    for (NodeId m : members) {
      if (cl->expelled.contains(m)) continue;
      const auto* v = view_of(m);
      if (!v || *v != cl->entries) return false;
    }
    return true;
  }

  // Seeds `to`'s entry for a migrating node from any community that knows it
  // (source first), or 0 for a node new to the network.
  double carry_forward(NodeId n, CommunityId from, CommunityId to) {
    std::optional<double> known_rep;
    if (const auto* src = find_community(from); src && src->entries.contains(n)) {
      known_rep = src->entries.at(n).reputation;
    } else {
      for (const auto& [cid, cl] : communities_) {
        if (auto it = cl.entries.find(n); it != cl.entries.end()) {
          known_rep = it->second.reputation;
          break;
        }
      }
    }
    const double seed = known_rep.value_or(0.0);
    community(to).entries[n] = RTableEntry{n, seed, 0};
    nodes_[n].reputation = seed;
    home_[n] = to;
    return seed;
  }

  std::uint32_t add_strike(NodeId n) { return ++nodes_[n].strikes; }

  // Escalation for the node's current strike count: first strike forfeits
  // the reward only, second adds a negative payment, third and later expel.
  PenaltyAction escalate_penalty(NodeId n, SimTime now) {
    const std::uint32_t s = strikes(n);
    PenaltyAction act;
    if (s <= 1) return act;
    if (s == 2) {
      act.kind = PenaltyKind::NegativePayment;
      act.delta = -policy_.f_pay;
      apply(RepDelta{n, act.delta, DeltaCause::Penalty});
      return act;
    }
    act.kind = PenaltyKind::Expel;
    act.debt = std::max(0.0, -reputation(n));
    act.expiry = now + policy_.expel_duration;
    auto& cl = community(home(n).value_or(0));
    cl.expelled[n] = Expulsion{act.expiry, act.debt};
    return act;
  }

  bool is_expelled(NodeId n) const {
    auto h = home(n);
    if (!h) return false;
    const auto* cl = find_community(*h);
    return cl && cl->expelled.contains(n);
  }
  std::optional<Expulsion> expulsion(NodeId n) const {
    auto h = home(n);
    if (!h) return std::nullopt;
    const auto* cl = find_community(*h);
    if (!cl) return std::nullopt;
    auto it = cl->expelled.find(n);
    if (it == cl->expelled.end()) return std::nullopt;
    return it->second;
  }

  // Restores an expelled node at reputation 0 once its term has run and the
  // payment covers the debt; the escrowed balance is burned.
  bool readmit(NodeId n, double payment, SimTime now) {
    auto ex = expulsion(n);
    if (!ex) return false;
    if (now < ex->expiry || payment < ex->debt) return false;
    community(*home(n)).expelled.erase(n);
    const double rep = reputation(n);
    if (rep != 0.0) apply(RepDelta{n, -rep, DeltaCause::Readmission});
    nodes_[n].strikes = 0;
    return true;
  }

  double total_reputation() const { return total_; }
  double total_by_cause(DeltaCause c) const {
    auto it = by_cause_.find(c);
    return it == by_cause_.end() ? 0.0 : it->second;
  }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.reserve(nodes_.size());
    for (const auto& [n, _] : nodes_) out.push_back(n);
    return out;
  }

  // Median reputation over the given nodes (0 for an empty set).
  double median_reputation(std::span<const NodeId> members) const {
    std::vector<double> reps;
    reps.reserve(members.size());
    for (NodeId m : members) reps.push_back(reputation(m));
    if (reps.empty()) return 0.0;
    std::sort(reps.begin(), reps.end());
    const std::size_t k = reps.size();
    return k % 2 ? reps[k / 2] : 0.5 * (reps[k / 2 - 1] + reps[k / 2]);
  }

 private:
  struct NodeEntry {
    double reputation = 0.0;
    std::uint32_t strikes = 0;
  };

  PenaltyPolicy policy_;
  std::map<NodeId, NodeEntry> nodes_;
  std::map<NodeId, CommunityId> home_;
  std::map<CommunityId, CommunityLedger> communities_;
  std::map<NodeId, std::map<NodeId, RTableEntry>> views_;
  std::map<DeltaCause, double> by_cause_;
  double total_ = 0.0;
  std::uint64_t settlements_ = 0;
  DeltaObserver observer_;
};

}  // namespace hbds
