// Store-carry-forward routing: per-node buffers, offer selection and the
// protocol-specific acceptance rules (HBDS incentive conversion, and the
// simplified SimBet-like and SSAR-like social baselines).

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "hbds/core.hpp"
#include "hbds/scenario.hpp"

namespace hbds {

enum class ForwardReason { Accepted, SelfishRefusal, BufferFull, TtlExpired, IneligibleRelay };

inline std::string_view to_string(ForwardReason r) {
  switch (r) {
    case ForwardReason::Accepted: return "Accepted";
    case ForwardReason::SelfishRefusal: return "SelfishRefusal";
    case ForwardReason::BufferFull: return "BufferFull";
    case ForwardReason::TtlExpired: return "TtlExpired";
    case ForwardReason::IneligibleRelay: return "IneligibleRelay";
  }
  return "?";
}

struct ForwardDecision {
  PacketId packet = 0;
  NodeId from;
  NodeId to;
  bool accepted = false;
  ForwardReason reason = ForwardReason::Accepted;
};

// Packets held by one node. Ids grow with creation time, so map order is
// oldest-created first.
class Buffer {
 public:
  explicit Buffer(std::int64_t capacity = 0) : capacity_(capacity) {}

  std::int64_t capacity() const { return capacity_; }
  std::int64_t used() const { return used_; }
  bool holds(PacketId id) const { return packets_.contains(id); }
  std::size_t size() const { return packets_.size(); }
  const std::map<PacketId, Packet>& packets() const { return packets_; }

  // Inserts, evicting oldest-created packets to make room. Returns the
  // evicted ids, or nullopt when the packet can never fit.
  std::optional<std::vector<PacketId>> insert(const Packet& p) {
    if (p.size > capacity_) return std::nullopt;
    std::vector<PacketId> evicted;
    while (used_ + p.size > capacity_) {
      auto it = packets_.begin();
      used_ -= it->second.size;
      evicted.push_back(it->first);
      packets_.erase(it);
    }
    packets_.emplace(p.id, p);
    used_ += p.size;
    return evicted;
  }

  bool erase(PacketId id) {
    auto it = packets_.find(id);
    if (it == packets_.end()) return false;
    used_ -= it->second.size;
    packets_.erase(it);
    return true;
  }

 private:
  std::int64_t capacity_;
  std::int64_t used_ = 0;
  std::map<PacketId, Packet> packets_;
};

// Encounter graph used by the social baselines: contact counts per pair,
// with betweenness and common-neighbour similarity refreshed on demand.
class SocialGraph {
 public:
  explicit SocialGraph(std::size_t n = 0) : n_(n), counts_(n * n, 0), between_(n, 0.0), sim_(n * n, 0) {}

  std::size_t size() const { return n_; }

  void add_contact(NodeId a, NodeId b) {
    if (counts_[idx(a, b)]++ == 0) dirty_ = true;
    counts_[idx(b, a)]++;
  }

  std::uint32_t contacts(NodeId a, NodeId b) const { return counts_[idx(a, b)]; }

  // Contact frequency with b normalized by a's most frequent partner.
  double tie_strength(NodeId a, NodeId b) const {
    std::uint32_t best = 0;
    for (std::size_t j = 0; j < n_; ++j) best = std::max(best, counts_[a.value * n_ + j]);
    return best == 0 ? 0.0 : static_cast<double>(contacts(a, b)) / best;
  }

  void refresh() {
    if (!dirty_) return;
    dirty_ = false;
    compute_betweenness();
    // Similarity over closed neighbourhoods (a node counts as its own
    // neighbour), so meeting the destination directly counts as shared context.
    auto near = [this](std::size_t a, std::size_t k) { return a == k || counts_[a * n_ + k] != 0; };
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        std::uint32_t common = 0;
        for (std::size_t k = 0; k < n_; ++k)
          if (near(i, k) && near(j, k)) ++common;
        sim_[i * n_ + j] = common;
      }
  }

  double betweenness(NodeId n) const { return between_[n.value]; }
  std::uint32_t similarity(NodeId a, NodeId b) const { return sim_[idx(a, b)]; }

  // SimBet utility of `node` relative to `other` for destination `dst`.
  double simbet_utility(NodeId node, NodeId other, NodeId dst) const {
    auto share = [](double x, double y) { return x + y > 0.0 ? x / (x + y) : 0.0; };
    const double bet = share(betweenness(node), betweenness(other));
    const double sim = share(similarity(node, dst), similarity(other, dst));
    return 0.5 * bet + 0.5 * sim;
  }

 private:
  std::size_t idx(NodeId a, NodeId b) const { return a.value * n_ + b.value; }

  // Brandes' algorithm on the unweighted encounter graph.
  void compute_betweenness() {
    std::fill(between_.begin(), between_.end(), 0.0);
    std::vector<std::vector<std::size_t>> pred(n_);
    std::vector<double> sigma(n_), delta(n_);
    std::vector<long> dist(n_);
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < n_; ++s) {
      for (auto& p : pred) p.clear();
      std::fill(sigma.begin(), sigma.end(), 0.0);
      std::fill(delta.begin(), delta.end(), 0.0);
      std::fill(dist.begin(), dist.end(), -1);
      order.clear();
      sigma[s] = 1.0;
      dist[s] = 0;
      std::queue<std::size_t> q;
      q.push(s);
      while (!q.empty()) {
        auto v = q.front();
        q.pop();
        order.push_back(v);
        for (std::size_t w = 0; w < n_; ++w) {
          if (w == v || !counts_[v * n_ + w]) continue;
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            q.push(w);
          }
          if (dist[w] == dist[v] + 1) {
            sigma[w] += sigma[v];
            pred[w].push_back(v);
          }
        }
      }
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto w = *it;
        for (auto v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        if (w != s) between_[w] += delta[w];
      }
    }
    for (auto& b : between_) b *= 0.5;  // undirected
  }

  std::size_t n_;
  std::vector<std::uint32_t> counts_;
  std::vector<double> between_;
  std::vector<std::uint32_t> sim_;
  bool dirty_ = true;
};

// SimBet-like: hand a copy over only to a node with strictly higher utility.
inline bool simbet_like_acceptance(const SocialGraph& g, NodeId carrier, NodeId candidate, NodeId dst) {
  if (candidate == dst) return true;
  return g.simbet_utility(candidate, carrier, dst) > g.simbet_utility(carrier, candidate, dst);
}

// SSAR-like: hand a copy over only along sufficiently strong social ties.
inline bool ssar_like_acceptance(const SocialGraph& g, NodeId carrier, NodeId candidate, NodeId dst,
                                 double threshold) {
  if (candidate == dst) return true;
  const double tie = g.tie_strength(carrier, candidate);
  return tie > 0.0 && tie >= threshold;
}

struct HbdsIncentive {
  double reputation = 0.0;
  double community_median = 0.0;
  double f_pay = 1.0;
  double gain_threshold = 0.5;
  double target_margin = 10.0;

  double target() const { return community_median + target_margin * f_pay; }
  bool motivated() const { return f_pay > gain_threshold || reputation < community_median; }
};

// Drop probability of a node under HBDS: a motivated selfish node's profile
// probability shrinks linearly as its reputation approaches Rep_target.
inline double hbds_effective_drop(const BehaviorProfile& profile, const HbdsIncentive& inc) {
  if (!profile.is_selfish()) return 0.0;
  if (!inc.motivated()) return profile.drop_probability;
  const double target = inc.target();
  double progress;
  if (target > 0.0)
    progress = std::clamp(inc.reputation / target, 0.0, 1.0);
  else
    progress = inc.reputation >= target ? 1.0 : 0.0;
  return profile.drop_probability * (1.0 - progress);
}

// `draw` is a uniform sample in [0,1).
inline bool hbds_acceptance(const BehaviorProfile& profile, bool expelled, const HbdsIncentive& inc,
                            double draw) {
  if (expelled) return false;
  return draw >= hbds_effective_drop(profile, inc);
}

struct TransferOutcome {
  ForwardDecision decision;
  bool transmitted = false;  // consumed a relay transmission
  bool delivered = false;    // first arrival at the destination
  bool discarded = false;    // silently dropped by a selfish receiver
  bool corrupt = false;      // integrity tag mismatch, copy rejected
  std::vector<PacketId> evicted;
};

// Dense bitset over packet ids (ids are assigned sequentially).
class PacketSet {
 public:
  bool test(PacketId id) const {
    const auto w = static_cast<std::size_t>(id >> 6);
    return w < words_.size() && ((words_[w] >> (id & 63)) & 1U);
  }
  void set(PacketId id) {
    const auto w = static_cast<std::size_t>(id >> 6);
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (id & 63);
  }
  void reset(PacketId id) {
    const auto w = static_cast<std::size_t>(id >> 6);
    if (w < words_.size()) words_[w] &= ~(std::uint64_t{1} << (id & 63));
  }
  std::size_t word_count() const { return words_.size(); }
  std::uint64_t word(std::size_t i) const { return i < words_.size() ? words_[i] : 0; }
  void clear() { words_.clear(); }

 private:
  std::vector<std::uint64_t> words_;
};

// Buffers plus the protocol rules for offering and accepting packets.
class Router {
 public:
  struct NodeInfo {
    BehaviorProfile behavior;
    bool infrastructure = false;
  };

  // Drop probability hook; defaults to the raw profile probability.
  using DropModel = std::function<double(NodeId)>;

  Router(Protocol protocol, std::vector<NodeInfo> nodes, std::int64_t terminal_buffer,
         std::int64_t relay_buffer, std::uint64_t behaviour_seed, double ssar_threshold = 0.5)
      : protocol_(protocol),
        nodes_(std::move(nodes)),
        graph_(nodes_.size()),
        rng_(behaviour_seed),
        ssar_threshold_(ssar_threshold) {
    const auto n = nodes_.size();
    buffers_.reserve(n);
    for (const auto& node : nodes_) buffers_.emplace_back(node.infrastructure ? relay_buffer : terminal_buffer);
    held_.resize(n);
    addressed_.resize(n);
    received_.resize(n);
    originated_.resize(n);
    relay_eligible_.assign(n, 1);
    versions_.assign(n, 0);
  }

  Protocol protocol() const { return protocol_; }
  SocialGraph& graph() { return graph_; }
  const SocialGraph& graph() const { return graph_; }
  const Buffer& buffer(NodeId n) const { return buffers_[n.value]; }
  const NodeInfo& info(NodeId n) const { return nodes_[n.value]; }
  std::size_t size() const { return nodes_.size(); }

  void set_drop_model(DropModel m) { drop_model_ = std::move(m); }
  bool delivered(PacketId id) const { return delivered_.test(id); }

  // An ineligible node (expelled) neither accepts nor hands on relay copies;
  // it still sends packets it originated and receives its own traffic.
  void set_relay_eligible(NodeId n, bool eligible) {
    relay_eligible_[n.value] = eligible ? 1 : 0;
    touch(n);
  }
  bool relay_eligible(NodeId n) const { return relay_eligible_[n.value] != 0; }

  // Changes whenever anything that could alter offers between n and a peer
  // changes: buffer contents, deliveries, social state or eligibility.
  std::uint64_t version(NodeId n) const { return versions_[n.value] + global_version_; }

  void record_encounter(NodeId a, NodeId b) {
    graph_.add_contact(a, b);
    touch(a);
    touch(b);
  }
  void refresh_social() {
    graph_.refresh();
    ++global_version_;
  }

  bool holds(NodeId n, const Packet& p) const {
    return held_[n.value].test(p.id) || (n == p.dst && delivered(p.id));
  }

  // Places a new packet in its source's buffer. Returns the evicted ids, or
  // nullopt when the packet cannot fit at all.
  std::optional<std::vector<PacketId>> originate(const Packet& p) {
    learn(p);
    originated_[p.src.value].set(p.id);
    return store(p.src, p);
  }

  bool drop_copy(NodeId n, PacketId id) {
    if (!buffers_[n.value].erase(id)) return false;
    held_[n.value].reset(id);
    touch(n);
    return true;
  }

  // Next packet `from` should offer `to`: packets addressed to `to` first,
  // then oldest-created, skipping ones already offered in this contact.
  std::optional<Packet> next_offer(NodeId from, NodeId to, const PacketSet& offered, SimTime now) const {
    const bool carrier_ok = relay_eligible(from);
    const bool relay_ok = relay_eligible(to);
    const auto& mine = held_[from.value];
    const auto& theirs = held_[to.value];
    const auto& got = received_[to.value];
    const auto& for_them = addressed_[to.value];
    const auto& own = originated_[from.value];
    for (int pass = 0; pass < 2; ++pass) {
      if (pass == 1 && !relay_ok) break;
      for (std::size_t w = 0; w < mine.word_count(); ++w) {
        std::uint64_t bits = mine.word(w) & ~theirs.word(w) & ~got.word(w) & ~offered.word(w);
        if (!carrier_ok) bits &= own.word(w);
        bits &= pass == 0 ? for_them.word(w) : ~for_them.word(w);
        while (bits) {
          const PacketId id = (static_cast<PacketId>(w) << 6) + static_cast<PacketId>(std::countr_zero(bits));
          bits &= bits - 1;
          const Packet& p = packets_[id];
          if (p.expired_at(now)) continue;
          if (pass == 1 && !offer_allowed(from, to, p)) continue;
          return p;
        }
      }
    }
    return std::nullopt;
  }

  bool offer_allowed(NodeId from, NodeId to, const Packet& p) const {
    if (p.dst == to) return true;
    switch (protocol_) {
      case Protocol::SimBetLike: return simbet_like_acceptance(graph_, from, to, p.dst);
      case Protocol::SSARLike: return ssar_like_acceptance(graph_, from, to, p.dst, ssar_threshold_);
      default: return true;
    }
  }

  double drop_probability(NodeId n) const {
    if (drop_model_) return drop_model_(n);
    return nodes_[n.value].behavior.drop_probability;
  }

  // Completes the transfer of `p` from `from` to `to`.
  TransferOutcome complete(NodeId from, NodeId to, const Packet& p, SimTime now) {
    learn(p);
    TransferOutcome out;
    out.decision = {p.id, from, to, false, ForwardReason::Accepted};
    if (p.expired_at(now)) {
      out.decision.reason = ForwardReason::TtlExpired;
      return out;
    }
    if (to != p.dst && !relay_eligible(to)) {
      out.decision.reason = ForwardReason::IneligibleRelay;
      return out;
    }
    out.transmitted = true;
    if (to == p.dst) {
      out.decision.accepted = true;
      out.delivered = !delivered_.test(p.id);
      delivered_.set(p.id);
      received_[to.value].set(p.id);
      touch(to);
      return out;
    }
    if (!p.intact()) {
      out.decision.reason = ForwardReason::IneligibleRelay;
      out.corrupt = true;
      return out;
    }
    const auto& node = nodes_[to.value];
    if (node.behavior.is_selfish()) {
      const double draw = uniform_(rng_);
      if (draw < drop_probability(to)) {
        out.decision.reason = ForwardReason::SelfishRefusal;
        out.discarded = true;
        return out;
      }
    }
    auto evicted = store(to, p);
    if (!evicted) {
      out.decision.reason = ForwardReason::BufferFull;
      return out;
    }
    out.evicted = std::move(*evicted);
    out.decision.accepted = true;
    return out;
  }

  // Runs one whole contact with `capacity` bytes available, alternating
  // direction after each transfer.
  std::vector<ForwardDecision> on_contact(NodeId a, NodeId b, double capacity, SimTime now) {
    std::vector<ForwardDecision> out;
    PacketSet offered_ab, offered_ba;
    bool a_turn = true;
    while (true) {
      auto pa = next_offer(a, b, offered_ab, now);
      auto pb = next_offer(b, a, offered_ba, now);
      if (!pa && !pb) break;
      const bool use_a = pa && (a_turn || !pb);
      const Packet p = use_a ? *pa : *pb;
      if (static_cast<double>(p.size) > capacity) break;
      capacity -= static_cast<double>(p.size);
      (use_a ? offered_ab : offered_ba).set(p.id);
      out.push_back(complete(use_a ? a : b, use_a ? b : a, p, now).decision);
      a_turn = !use_a;
    }
    return out;
  }

 private:
  void touch(NodeId n) { ++versions_[n.value]; }

  void learn(const Packet& p) {
    if (p.id >= packets_.size()) packets_.resize(p.id + 1);
    packets_[p.id] = p;
    addressed_[p.dst.value].set(p.id);
  }

  std::optional<std::vector<PacketId>> store(NodeId n, const Packet& p) {
    auto evicted = buffers_[n.value].insert(p);
    if (!evicted) return evicted;
    for (auto id : *evicted) held_[n.value].reset(id);
    held_[n.value].set(p.id);
    touch(n);
    return evicted;
  }

  Protocol protocol_;
  std::vector<NodeInfo> nodes_;
  std::vector<Buffer> buffers_;
  SocialGraph graph_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  double ssar_threshold_;
  DropModel drop_model_;
  std::vector<Packet> packets_;          // by id
  std::vector<PacketSet> held_;          // buffered copies per node
  std::vector<PacketSet> addressed_;     // packets destined to each node
  std::vector<PacketSet> received_;      // packets delivered to each node
  std::vector<PacketSet> originated_;    // packets created by each node
  PacketSet delivered_;
  std::vector<std::uint8_t> relay_eligible_;
  std::vector<std::uint64_t> versions_;
  std::uint64_t global_version_ = 0;
};

}  // namespace hbds
