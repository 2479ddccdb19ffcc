// Honesty scoring: time-of-contact, centrality and community-of-interest
// components, their weighted fusion, and the exponential penalty discount.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "hbds/core.hpp"

namespace hbds {

struct HonestyWeights {
  double alpha1 = 1.0 / 3.0;  // time of contact
  double alpha2 = 1.0 / 3.0;  // mutuality / centrality
  double alpha3 = 1.0 / 3.0;  // community of interest

  bool valid() const {
    auto in01 = [](double a) { return a >= 0.0 && a <= 1.0; };
    return in01(alpha1) && in01(alpha2) && in01(alpha3) &&
           std::abs(alpha1 + alpha2 + alpha3 - 1.0) <= 1e-9;
  }

  // Seeded-random weights on the simplex (uniform via sorted cut points).
  template <class Rng>
  static HonestyWeights random(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double c1 = u(rng), c2 = u(rng);
    if (c1 > c2) std::swap(c1, c2);
    return {c1, c2 - c1, 1.0 - c2};
  }
};

// Social snapshot of one evaluation window.
struct HonestyStats {
  std::map<NodeId, std::set<NodeId>> friends;
  std::map<NodeId, std::set<CommunityId>> communities;

  const std::set<NodeId>& friends_of(NodeId n) const {
    static const std::set<NodeId> none;
    auto it = friends.find(n);
    return it == friends.end() ? none : it->second;
  }
  const std::set<CommunityId>& communities_of(NodeId n) const {
    static const std::set<CommunityId> none;
    auto it = communities.find(n);
    return it == communities.end() ? none : it->second;
  }
};

namespace detail {

template <class Set>
std::size_t intersection_size(const Set& a, const Set& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

}  // namespace detail

// Entropy-weighted interaction score over the contacts of one pair.
// Each contact contributes p * E with p its share of the total length and
// E = -p log2 p for useful contacts (0 otherwise); the sum is divided by
// log2(j). A single contact scores its usefulness flag.
inline double honesty_tc(std::span<const ContactRecord> contacts) {
  if (contacts.empty()) return 0.0;
  double total = 0.0;
  for (const auto& c : contacts) {
    if (c.length <= 0) throw ValidationError("contact length must be positive");
    total += static_cast<double>(c.length);
  }
  const std::size_t j = contacts.size();
  if (j == 1) return contacts.front().useful ? 1.0 : 0.0;

  double sum = 0.0;
  for (const auto& c : contacts) {
    const double p = static_cast<double>(c.length) / total;
    const double entropy = c.useful ? -p * std::log2(p) : 0.0;
    sum += p * entropy;
  }
  return std::clamp(sum / std::log2(static_cast<double>(j)), 0.0, 1.0);
}

// Common friends over the trustee's friends.
inline double honesty_cen(NodeId trustor, NodeId trustee, const HonestyStats& stats) {
  const auto& ny = stats.friends_of(trustee);
  if (ny.empty()) return 0.0;
  return static_cast<double>(detail::intersection_size(stats.friends_of(trustor), ny)) /
         static_cast<double>(ny.size());
}

// Shared communities over the trustee's communities.
inline double honesty_coi(NodeId trustor, NodeId trustee, const HonestyStats& stats) {
  const auto& cy = stats.communities_of(trustee);
  if (cy.empty()) return 0.0;
  return static_cast<double>(detail::intersection_size(stats.communities_of(trustor), cy)) /
         static_cast<double>(cy.size());
}

inline double final_honesty(double tc, double cen, double coi, const HonestyWeights& w) {
  if (!w.valid()) throw ValidationError("honesty weights must lie in [0,1] and sum to 1");
  return w.alpha1 * tc + w.alpha2 * cen + w.alpha3 * coi;
}

// r * e^r with r the share of effective conversations.
inline double penalty_coefficient(std::uint64_t total, std::uint64_t ineffective) {
  if (total == 0) throw ValidationError("penalty coefficient needs at least one conversation");
  if (ineffective > total) throw ValidationError("ineffective conversations exceed total");
  const double r = static_cast<double>(total - ineffective) / static_cast<double>(total);
  return r * std::exp(r);
}

// Honesty multiplier in [0,1]; 1 for a node without conversation history.
inline double penalty_discount(std::uint64_t total, std::uint64_t ineffective) {
  if (total == 0) return 1.0;
  return penalty_coefficient(total, ineffective) / std::exp(1.0);
}

struct ConversationTally {
  std::uint64_t total = 0;
  std::uint64_t ineffective = 0;
};

inline double pairwise_final_honesty(NodeId trustor, NodeId trustee,
                                     std::span<const ContactRecord> pair_contacts,
                                     const HonestyStats& stats, const HonestyWeights& w,
                                     ConversationTally trustee_history = {}) {
  const double fh = final_honesty(honesty_tc(pair_contacts), honesty_cen(trustor, trustee, stats),
                                  honesty_coi(trustor, trustee, stats), w);
  return std::clamp(fh * penalty_discount(trustee_history.total, trustee_history.ineffective), 0.0,
                    1.0);
}

// Accumulates contact evidence per window and blends successive windows.
class HonestyTracker {
 public:
  static constexpr double kCarryWeight = 0.5;

  explicit HonestyTracker(HonestyWeights w = {}) : weights_(w) {
    if (!weights_.valid()) throw ValidationError("invalid honesty weights");
  }

  void set_weights(const HonestyWeights& w) {
    if (!w.valid()) throw ValidationError("invalid honesty weights");
    weights_ = w;
  }
  const HonestyWeights& weights() const { return weights_; }

  void set_communities(NodeId n, std::set<CommunityId> cs) { stats_.communities[n] = std::move(cs); }

  void record(const ContactRecord& c) {
    validate_contact(c);
    auto key = pair_key(c.a, c.b);
    window_[key].push_back(c);
    if (c.useful) {
      stats_.friends[c.a].insert(c.b);
      stats_.friends[c.b].insert(c.a);
    }
    for (NodeId n : {c.a, c.b}) {
      auto& t = history_[n];
      ++t.total;
      if (!c.useful) ++t.ineffective;
    }
  }

  ConversationTally history(NodeId n) const {
    auto it = history_.find(n);
    return it == history_.end() ? ConversationTally{} : it->second;
  }

  // Honesty of `trustee` as judged by `trustor` over the open window,
  // blended with the previous window's value.
  double evaluate(NodeId trustor, NodeId trustee) const {
    static const std::vector<ContactRecord> none;
    auto it = window_.find(pair_key(trustor, trustee));
    const auto& contacts = it == window_.end() ? none : it->second;
    const double fresh =
        pairwise_final_honesty(trustor, trustee, contacts, stats_, weights_, history(trustee));
    auto mit = memory_.find({trustor, trustee});
    if (mit == memory_.end()) return fresh;
    return kCarryWeight * mit->second + (1.0 - kCarryWeight) * fresh;
  }

  // Freezes the given evaluations as the carried memory and opens a new window.
  void close_window(const std::map<std::pair<NodeId, NodeId>, double>& evaluated) {
    for (const auto& [k, v] : evaluated) memory_[k] = v;
    window_.clear();
    for (auto& [n, f] : stats_.friends) f.clear();
  }

  const HonestyStats& stats() const { return stats_; }

 private:
  static std::pair<NodeId, NodeId> pair_key(NodeId a, NodeId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }

  HonestyWeights weights_;
  HonestyStats stats_;
  std::map<std::pair<NodeId, NodeId>, std::vector<ContactRecord>> window_;
  std::map<std::pair<NodeId, NodeId>, double> memory_;
  std::map<NodeId, ConversationTally> history_;
};

}  // namespace hbds
