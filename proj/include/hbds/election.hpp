// Democratic head election with VCG-style payments.
//
// Candidates are nominated by mean peer honesty, each non-candidate votes for
// the candidate it rates highest, and the top three vote getters become CH,
// ACH and IH. A candidate's per-vote payment beta is the mean honesty of the
// candidates its voters would have chosen had it not stood, so its payment
// does not depend on its own declared honesty.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hbds/core.hpp"
#include "hbds/ledger.hpp"

namespace hbds {

struct IncentiveConstants {
  double fixed_budget = 1.0;  // Fb
  double f_pay = 1.0;         // relay payment
  double wn_pay = 0.5;        // watchdog payment

  bool valid() const { return fixed_budget > 0.0 && f_pay > 0.0 && wn_pay > 0.0; }
};

// FH as judged by evaluator about subject.
class HonestyMatrix {
 public:
  void set(NodeId evaluator, NodeId subject, double fh) { m_[{evaluator, subject}] = fh; }
  double at(NodeId evaluator, NodeId subject) const {
    auto it = m_.find({evaluator, subject});
    return it == m_.end() ? 0.0 : it->second;
  }

 private:
  std::map<std::pair<NodeId, NodeId>, double> m_;
};

struct Candidate {
  NodeId id;
  double fh = 0.0;  // candidate honesty score

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct Ballot {
  NodeId voter;
  NodeId candidate;
  std::uint64_t round = 0;
};

struct Heads {
  NodeId ch;
  NodeId ach;
  NodeId ih;

  friend bool operator==(const Heads&, const Heads&) = default;
};

struct ElectionRecord {
  std::uint64_t round = 0;
  CommunityId community = 0;
  std::vector<Candidate> candidates;
  std::vector<Ballot> ballots;
  Heads heads;
  std::map<NodeId, double> payments;  // candidates and voters
  std::map<NodeId, double> costs;     // CH only
  std::map<NodeId, double> reputations;  // after settlement
};

inline std::size_t candidate_quota(std::size_t eligible) {
  auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(eligible))));
  return std::max<std::size_t>(3, root);
}

// Candidates by mean peer honesty, descending, ties by lower id. Returns an
// empty list when fewer than three nodes qualify (score > 0).
inline std::vector<Candidate> nominate(std::span<const NodeId> eligible, const HonestyMatrix& fh) {
  if (eligible.size() < 3) return {};
  std::vector<Candidate> scored;
  for (NodeId y : eligible) {
    double sum = 0.0;
    std::size_t n = 0;
    for (NodeId x : eligible) {
      if (x == y) continue;
      sum += fh.at(x, y);
      ++n;
    }
    const double score = n ? sum / static_cast<double>(n) : 0.0;
    if (score > 0.0) scored.push_back({y, score});
  }
  std::sort(scored.begin(), scored.end(), [](const Candidate& a, const Candidate& b) {
    return a.fh != b.fh ? a.fh > b.fh : a.id < b.id;
  });
  if (scored.size() < 3) return {};
  scored.resize(std::min(scored.size(), candidate_quota(eligible.size())));
  return scored;
}

// One ballot per voter for the candidate it rates highest (ties: lower id).
// Voters that are themselves candidates are skipped.
inline std::vector<Ballot> cast_votes(std::span<const Candidate> candidates,
                                      std::span<const NodeId> voters, const HonestyMatrix& fh,
                                      std::uint64_t round = 0) {
  std::vector<Ballot> out;
  if (candidates.empty()) return out;
  for (NodeId v : voters) {
    bool is_candidate = std::any_of(candidates.begin(), candidates.end(),
                                    [v](const Candidate& c) { return c.id == v; });
    if (is_candidate) continue;
    const Candidate* best = nullptr;
    double best_fh = 0.0;
    for (const auto& c : candidates) {
      const double f = fh.at(v, c.id);
      if (!best || f > best_fh || (f == best_fh && c.id < best->id)) {
        best = &c;
        best_fh = f;
      }
    }
    out.push_back({v, best->id, round});
  }
  return out;
}

inline std::map<NodeId, std::uint32_t> tally(std::span<const Ballot> ballots) {
  std::map<NodeId, std::uint32_t> t;
  for (const auto& b : ballots) ++t[b.candidate];
  return t;
}

inline std::uint32_t votes_for(NodeId x, std::span<const Ballot> ballots) {
  return static_cast<std::uint32_t>(
      std::count_if(ballots.begin(), ballots.end(), [x](const Ballot& b) { return b.candidate == x; }));
}

// Candidates ranked by (votes desc, fh desc, id asc).
inline std::vector<Candidate> rank_candidates(std::span<const Ballot> ballots,
                                              std::span<const Candidate> candidates) {
  auto t = tally(ballots);
  std::vector<Candidate> ranked(candidates.begin(), candidates.end());
  std::sort(ranked.begin(), ranked.end(), [&t](const Candidate& a, const Candidate& b) {
    const auto va = t[a.id], vb = t[b.id];
    if (va != vb) return va > vb;
    if (a.fh != b.fh) return a.fh > b.fh;
    return a.id < b.id;
  });
  return ranked;
}

inline std::optional<Heads> elect_heads(std::span<const Ballot> ballots,
                                        std::span<const Candidate> candidates) {
  if (candidates.size() < 3) return std::nullopt;
  auto ranked = rank_candidates(ballots, candidates);
  return Heads{ranked[0].id, ranked[1].id, ranked[2].id};
}

// Per-vote VCG payment factor:
//   beta_x = FH_x + (1/V_x) [ sum_{y != x} FH_y V_y^(-x) - sum_y FH_y V_y ]
// where V^(-x) are the tallies after x withdraws and its voters re-cast.
// The second sum runs over every candidate including x, so FH_x cancels.
inline double compute_beta(NodeId x, std::span<const Candidate> candidates,
                           std::span<const NodeId> voters, const HonestyMatrix& fh) {
  auto self = std::find_if(candidates.begin(), candidates.end(),
                           [x](const Candidate& c) { return c.id == x; });
  if (self == candidates.end()) throw ValidationError("beta requested for a non-candidate");
  const double fh_x = self->fh;

  const auto ballots = cast_votes(candidates, voters, fh);
  const auto v_x = votes_for(x, ballots);
  if (v_x == 0 || candidates.size() == 1) return fh_x;

  // x withdraws entirely: it neither stands nor votes in the re-cast.
  std::vector<Candidate> without;
  for (const auto& c : candidates)
    if (c.id != x) without.push_back(c);
  std::vector<NodeId> others;
  for (NodeId v : voters)
    if (v != x) others.push_back(v);
  const auto recast = cast_votes(without, others, fh);

  double with_x = 0.0;
  auto t = tally(ballots);
  for (const auto& c : candidates) with_x += c.fh * t[c.id];
  double without_x = 0.0;
  auto t2 = tally(recast);
  for (const auto& c : without) without_x += c.fh * t2[c.id];

  return fh_x + (without_x - with_x) / static_cast<double>(v_x);
}

inline double compute_pay(std::uint32_t votes, double beta, const IncentiveConstants& k) {
  return static_cast<double>(votes) * k.fixed_budget * beta;
}

// Cost charged to an elected head: |FH_rival - FH_head| / FH_head * V * Fb * beta,
// with FH_rival the best honesty among the other candidates.
inline double compute_cost(double fh_head, double fh_rival, std::uint32_t votes, double beta,
                           const IncentiveConstants& k) {
  if (fh_head <= 0.0) throw ValidationError("elected head with zero honesty");
  return std::abs(fh_rival - fh_head) / fh_head * static_cast<double>(votes) * k.fixed_budget * beta;
}

inline double rival_honesty(NodeId head, std::span<const Candidate> candidates) {
  double best = 0.0;
  for (const auto& c : candidates)
    if (c.id != head) best = std::max(best, c.fh);
  return best;
}

// Participation reward for a voter.
inline double voter_pay(double fh_voter, const IncentiveConstants& k) {
  return k.fixed_budget * fh_voter;
}

// Runs nomination, voting, head selection and pricing for one community.
// `voter_honesty` is each voter's own score (mean peer honesty).
inline std::optional<ElectionRecord> run_election(std::uint64_t round, CommunityId community,
                                                  std::span<const NodeId> eligible,
                                                  const HonestyMatrix& fh,
                                                  const IncentiveConstants& k) {
  auto candidates = nominate(eligible, fh);
  if (candidates.size() < 3) return std::nullopt;

  ElectionRecord rec;
  rec.round = round;
  rec.community = community;
  rec.candidates = candidates;
  rec.ballots = cast_votes(candidates, eligible, fh, round);
  auto heads = elect_heads(rec.ballots, candidates);
  if (!heads) return std::nullopt;
  rec.heads = *heads;

  for (const auto& c : candidates) {
    const auto v = votes_for(c.id, rec.ballots);
    const double beta = compute_beta(c.id, candidates, eligible, fh);
    rec.payments[c.id] = compute_pay(v, beta, k);
    if (c.id == rec.heads.ch && v > 0)
      rec.costs[c.id] = compute_cost(c.fh, rival_honesty(c.id, candidates), v, beta, k);
  }
  for (const auto& b : rec.ballots) {
    double sum = 0.0;
    std::size_t n = 0;
    for (NodeId x : eligible) {
      if (x == b.voter) continue;
      sum += fh.at(x, b.voter);
      ++n;
    }
    rec.payments[b.voter] = voter_pay(n ? sum / static_cast<double>(n) : 0.0, k);
  }
  return rec;
}

inline std::vector<RepDelta> settlement_deltas(const ElectionRecord& rec) {
  std::vector<RepDelta> out;
  for (const auto& [n, pay] : rec.payments) {
    if (pay == 0.0) continue;
    const bool candidate = std::any_of(rec.candidates.begin(), rec.candidates.end(),
                                       [n = n](const Candidate& c) { return c.id == n; });
    out.push_back({n, pay, candidate ? DeltaCause::ElectionPay : DeltaCause::VoterPay});
  }
  for (const auto& [n, cost] : rec.costs)
    if (cost != 0.0) out.push_back({n, -cost, DeltaCause::ElectionCost});
  return out;
}

// Applies pay and cost to the ledger, broadcasts CH_ack to the members and
// fills in the resulting reputations.
inline void settle_election(ElectionRecord& rec, Ledger& ledger, std::span<const NodeId> members) {
  const auto deltas = settlement_deltas(rec);
  ledger.apply_settlement(deltas);
  ledger.broadcast_ack(rec.community, rec.round, members);
  for (const auto& [n, _] : rec.payments) rec.reputations[n] = ledger.reputation(n);
  for (const auto& [n, _] : rec.costs) rec.reputations[n] = ledger.reputation(n);
}

}  // namespace hbds
