// The discrete-event run loop: mobility, contact detection, traffic,
// store-carry-forward transfers and, under HBDS, elections, watchdog
// monitoring and the penalty escalator. Every observable step is written to
// the trace, from which the metrics are computed.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hbds/core.hpp"
#include "hbds/election.hpp"
#include "hbds/event_queue.hpp"
#include "hbds/honesty.hpp"
#include "hbds/ledger.hpp"
#include "hbds/metrics.hpp"
#include "hbds/mobility.hpp"
#include "hbds/routing.hpp"
#include "hbds/scenario.hpp"
#include "hbds/trace.hpp"
#include "hbds/watchdog.hpp"

namespace hbds {

class SimulationError : public std::runtime_error {
 public:
  SimulationError(SimTime t, const std::string& what)
      : std::runtime_error("t=" + std::to_string(t) + ": " + what), time_(t) {}
  SimTime time() const { return time_; }

 private:
  SimTime time_;
};

struct RunResult {
  MetricsReport metrics;
  Trace trace;
  double final_total_reputation = 0.0;
  std::set<PacketId> delivered;
};

class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    n_ = cfg_.node_count();
  }

  RunResult run() {
    setup();
    const SimTime end = cfg_.sim_duration;
    for (SimTime t = 0; t <= end; ++t) {
      now_ = t;
      if (t > 0) mobility_->advance(1.0);
      positions_ = mobility_->positions();
      for (const auto& ev : detector_->update(t, positions_)) {
        Event e{t, ev.edge == ContactEdge::Up ? EventKind::ContactUp : EventKind::ContactDown, ev.a, ev.b};
        queue_.push(e);
      }
      while (!queue_.empty() && queue_.top().time <= t) dispatch(queue_.pop());
      if (t < end) progress_transfers();
    }
    finish();
    RunResult r;
    r.metrics = compute_metrics(trace_);
    r.final_total_reputation = ledger_.total_reputation();
    for (PacketId id = 0; id < next_packet_; ++id)
      if (router_->delivered(id)) r.delivered.insert(id);
    r.trace = std::move(trace_);
    return r;
  }

 private:
  // Per-community election and monitoring state.
  struct CommunityState {
    std::vector<NodeId> members;  // sorted
    std::optional<NodeId> ch, ach, ih, previous_ach;
    PanelCursor cursor;
  };

  struct InFlight {
    Packet packet;
    int dir = 0;  // 0: a -> b, 1: b -> a
    double remaining = 0.0;
  };

  struct ActiveContact {
    NodeId a, b;
    SimTime start = 0;
    bool useful = false;
    bool a_turn = true;
    std::array<PacketSet, 2> offered;
    std::optional<InFlight> inflight;
    // Router versions of both ends when the last offer scan came up empty.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> idle_at;
  };

  struct Observation {
    PacketId packet = 0;
    NodeId relay;
    CommunityId community = 0;
    WatchdogPanel panel;
    std::array<bool, 3> in_range_at_handoff{};
    bool forwarded = true;  // ground truth: the relay kept custody
    bool tag_matches = true;
  };

  bool hbds() const { return cfg_.protocol == Protocol::HBDS; }
  bool is_terminal(NodeId n) const { return n.value < cfg_.n_terminal_nodes; }

  void fail(const std::string& what) const { throw SimulationError(now_, what); }

  // ---- setup -------------------------------------------------------------

  void setup() {
    const auto seed = cfg_.rng_seed;
    mobility_.emplace(cfg_, seed);
    detector_.emplace(n_, cfg_.tx_range);
    traffic_rng_ = make_stream(seed, kTraffic);
    placement_rng_ = make_stream(seed, kPlacement);
    auto protocol_rng = make_stream(seed, kProtocol);

    // Selfish terminals: a seeded shuffle, independent of the protocol.
    std::vector<std::uint32_t> order(cfg_.n_terminal_nodes);
    for (std::uint32_t i = 0; i < cfg_.n_terminal_nodes; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), placement_rng_);
    const auto k_selfish = std::min(cfg_.selfish_count(), cfg_.n_terminal_nodes);
    std::vector<Router::NodeInfo> infos(n_);
    for (std::uint32_t i = 0; i < k_selfish; ++i)
      infos[order[i]].behavior = BehaviorProfile::selfish(cfg_.selfish_drop_probability);
    for (std::uint32_t i = cfg_.n_terminal_nodes; i < n_; ++i) infos[i].infrastructure = true;
    router_.emplace(cfg_.protocol, infos, cfg_.terminal_buffer, cfg_.relay_buffer,
                    make_stream(seed, kBehaviour)());
    if (hbds()) router_->set_drop_model([this](NodeId node) { return hbds_drop(node); });

    roles_.assign(n_, Role::Member);
    for (std::uint32_t i = cfg_.n_terminal_nodes; i < n_; ++i) roles_[i] = Role::GW;
    expelled_.assign(n_, 0);

    // Home communities round-robin; each terminal may also share the
    // interests of one other community.
    communities_.assign(cfg_.n_communities, {});
    std::bernoulli_distribution extra(0.5);
    std::uniform_int_distribution<std::uint32_t> pick(0, cfg_.n_communities - 1);
    ledger_ = Ledger(PenaltyPolicy{cfg_.incentive_constants.f_pay, cfg_.expel_duration});
    if (cfg_.random_honesty_weights) honesty_.set_weights(HonestyWeights::random(protocol_rng));
    for (std::uint32_t i = 0; i < cfg_.n_terminal_nodes; ++i) {
      const NodeId node{i};
      const CommunityId c = i % cfg_.n_communities;
      communities_[c].members.push_back(node);
      ledger_.register_node(node, c);
      std::set<CommunityId> interests{c};
      if (cfg_.n_communities > 1 && extra(placement_rng_)) interests.insert(pick(placement_rng_));
      honesty_.set_communities(node, std::move(interests));
    }
    ledger_.set_observer([this](const RepDelta& d) {
      trace_.emit(now_, "rep")
          .add("node", d.node)
          .add("delta", d.amount)
          .add("cause", to_string(d.cause))
          .add("rep", ledger_.reputation(d.node));
    });

    schedule_next_packet(0);
    if (hbds())
      for (SimTime t = cfg_.election_period; t <= cfg_.sim_duration; t += cfg_.election_period)
        queue_.push({t, EventKind::ElectionDue, NodeId{}, NodeId{}, 0, 0});
  }

  void schedule_next_packet(SimTime from) {
    std::uniform_int_distribution<SimTime> gap(cfg_.packet_interval.min, cfg_.packet_interval.max);
    const SimTime t = from + gap(traffic_rng_);
    if (t <= cfg_.sim_duration) queue_.push({t, EventKind::PacketCreate, NodeId{}, NodeId{}, 0, 0});
  }

  // ---- events ------------------------------------------------------------

  void dispatch(const Event& e) {
    if (e.time < last_event_) fail("event executed out of time order");
    last_event_ = e.time;
    switch (e.kind) {
      case EventKind::ContactUp: contact_up(e.node, e.peer); break;
      case EventKind::ContactDown: contact_down(e.node, e.peer); break;
      case EventKind::PacketCreate: create_packet(); break;
      case EventKind::TtlExpiry: expire_packet(e.ref); break;
      case EventKind::ElectionDue: run_elections(); break;
      case EventKind::WatchdogTimeout: watchdog_timeout(e.ref); break;
      case EventKind::ExpulsionEnd: readmit(e.node); break;
    }
  }

  static std::pair<std::uint32_t, std::uint32_t> key(NodeId a, NodeId b) {
    return a < b ? std::pair{a.value, b.value} : std::pair{b.value, a.value};
  }

  void contact_up(NodeId a, NodeId b) {
    ActiveContact c;
    c.a = a;
    c.b = b;
    c.start = now_;
    contacts_.emplace(key(a, b), std::move(c));
    router_->record_encounter(a, b);
    trace_.emit(now_, "contact_up").add("a", a).add("b", b);
  }

  void contact_down(NodeId a, NodeId b) {
    auto it = contacts_.find(key(a, b));
    if (it == contacts_.end()) fail("contact down without a matching contact up");
    close_contact(it);
  }

  void close_contact(std::map<std::pair<std::uint32_t, std::uint32_t>, ActiveContact>::iterator it) {
    const auto& c = it->second;
    const SimTime length = now_ - c.start;
    trace_.emit(now_, "contact_down")
        .add("a", c.a)
        .add("b", c.b)
        .add("length", length)
        .add("useful", c.useful ? 1 : 0);
    if (hbds() && length > 0 && is_terminal(c.a) && is_terminal(c.b) && !expelled_[c.a.value] &&
        !expelled_[c.b.value])
      honesty_.record(ContactRecord{c.a, c.b, c.start, length, c.useful});
    contacts_.erase(it);
  }

  void create_packet() {
    std::uniform_int_distribution<std::uint32_t> node(0, cfg_.n_terminal_nodes - 1);
    std::uniform_int_distribution<std::int64_t> size(cfg_.packet_size.min, cfg_.packet_size.max);
    const NodeId src{node(traffic_rng_)};
    NodeId dst{node(traffic_rng_)};
    while (dst == src) dst = NodeId{node(traffic_rng_)};
    const auto p = Packet::make(next_packet_++, src, dst, size(traffic_rng_), now_, cfg_.packet_ttl);
    packets_.push_back(p);
    trace_.emit(now_, "create")
        .add("pkt", p.id)
        .add("src", src)
        .add("dst", dst)
        .add("size", p.size)
        .add("ttl", p.ttl);
    auto evicted = router_->originate(p);
    if (!evicted) {
      emit_drop(p.id, src, "buffer");
    } else {
      for (auto id : *evicted) emit_drop(id, src, "buffer");
    }
    check_buffer(src);
    const SimTime expiry = p.created_at + p.ttl + 1;
    if (expiry <= cfg_.sim_duration) queue_.push({expiry, EventKind::TtlExpiry, src, src, p.id});
    schedule_next_packet(now_);
  }

  void expire_packet(PacketId id) {
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (router_->drop_copy(NodeId{i}, id)) emit_drop(id, NodeId{i}, "ttl");
    }
  }

  void emit_drop(PacketId id, NodeId node, const char* reason) {
    trace_.emit(now_, "drop").add("pkt", id).add("node", node).add("reason", reason);
  }

  void check_buffer(NodeId n) const {
    const auto& b = router_->buffer(n);
    if (b.used() > b.capacity()) fail("buffer of node " + std::to_string(n.value) + " over capacity");
  }

  // ---- transfers ---------------------------------------------------------

  void progress_transfers() {
    if (cfg_.protocol == Protocol::SimBetLike && now_ - last_graph_refresh_ >= kGraphRefresh) {
      router_->refresh_social();
      last_graph_refresh_ = now_;
    }
    for (auto& [k, c] : contacts_) {
      double budget = cfg_.link_rate;
      while (budget > 0.0) {
        if (!c.inflight) {
          const std::pair<std::uint64_t, std::uint64_t> v{router_->version(c.a), router_->version(c.b)};
          if (c.idle_at == v) break;
          if (!start_transfer(c)) {
            c.idle_at = v;
            break;
          }
        }
        auto& f = *c.inflight;
        const double used = std::min(budget, f.remaining);
        budget -= used;
        f.remaining -= used;
        if (f.remaining > 0.0) break;
        InFlight done = std::move(f);
        c.inflight.reset();
        finish_transfer(c, done);
      }
    }
  }

  bool start_transfer(ActiveContact& c) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const int dir = (c.a_turn ? 0 : 1) ^ attempt;
      const NodeId from = dir == 0 ? c.a : c.b;
      const NodeId to = dir == 0 ? c.b : c.a;
      auto p = router_->next_offer(from, to, c.offered[dir], now_);
      if (!p) continue;
      c.offered[dir].set(p->id);
      c.inflight = InFlight{*p, dir, static_cast<double>(p->size)};
      return true;
    }
    return false;
  }

  void finish_transfer(ActiveContact& c, const InFlight& f) {
    c.a_turn = f.dir != 0;
    const NodeId from = f.dir == 0 ? c.a : c.b;
    const NodeId to = f.dir == 0 ? c.b : c.a;
    const Packet& p = f.packet;

    // Custody changed while the bytes were on the air: the copy is wasted.
    if (!router_->buffer(from).holds(p.id) || router_->holds(to, p)) {
      emit_forward(p, from, to, ForwardDecision{p.id, from, to, false, ForwardReason::IneligibleRelay}, true);
      return;
    }
    auto out = router_->complete(from, to, p, now_);
    if (out.decision.accepted && p.expired_at(now_)) fail("packet accepted after TTL expiry");
    emit_forward(p, from, to, out.decision, out.transmitted);
    if (out.delivered) {
      c.useful = true;
      trace_.emit(now_, "deliver")
          .add("pkt", p.id)
          .add("node", to)
          .add("delay", now_ - p.created_at)
          .add("hops_from", from);
      return;
    }
    if (out.decision.accepted) {
      c.useful = true;
      for (auto id : out.evicted) emit_drop(id, to, "buffer");
      check_buffer(to);
    }
    if (out.discarded) emit_drop(p.id, to, "selfish");
    if (out.corrupt) emit_drop(p.id, to, "integrity");
    if (hbds() && (out.decision.accepted || out.discarded) && to != p.dst && is_terminal(to))
      open_observation(p, to, !out.discarded);
  }

  void emit_forward(const Packet& p, NodeId from, NodeId to, const ForwardDecision& d, bool tx) {
    trace_.emit(now_, "forward")
        .add("pkt", p.id)
        .add("from", from)
        .add("to", to)
        .add("tx", tx ? 1 : 0)
        .add("accepted", d.accepted ? 1 : 0)
        .add("final", to == p.dst ? 1 : 0)
        .add("reason", to_string(d.reason));
  }

  // ---- HBDS incentives ---------------------------------------------------

  double hbds_drop(NodeId node) const {
    const auto& info = router_->info(node);
    if (!info.behavior.is_selfish()) return 0.0;
    const auto home = ledger_.home(node);
    HbdsIncentive inc;
    inc.reputation = ledger_.reputation(node);
    inc.community_median = home ? ledger_.median_reputation(communities_[*home].members) : 0.0;
    inc.f_pay = cfg_.incentive_constants.f_pay;
    inc.gain_threshold = cfg_.selfish_gain_threshold;
    inc.target_margin = cfg_.rep_target_margin;
    return hbds_effective_drop(info.behavior, inc);
  }

  std::vector<NodeId> expelled_members(const CommunityState& cs) const {
    std::vector<NodeId> out;
    for (NodeId m : cs.members)
      if (expelled_[m.value]) out.push_back(m);
    return out;
  }

  bool in_range(NodeId a, NodeId b) const {
    return distance(positions_[a.value], positions_[b.value]) <= cfg_.tx_range;
  }

  void open_observation(const Packet& p, NodeId relay, bool forwarded) {
    const auto home = ledger_.home(relay);
    if (!home) return;
    if (roles_[relay.value] == Role::CH) return;  // heads earn nothing for relaying
    auto& cs = communities_[*home];
    const auto excluded = expelled_members(cs);
    PanelRequest req{cs.members, cs.ach, cs.previous_ach, relay, excluded};
    auto panel = select_watchdogs(req, cs.cursor);
    if (!panel) {
      // Too few members to monitor: the IH pays on the relay's claim.
      trace_.emit(now_, "watchdog").add("obs", "none").add("relay", relay).add("pkt", p.id);
      ledger_.apply(RepDelta{relay, cfg_.incentive_constants.f_pay, DeltaCause::Forwarding});
      return;
    }
    Observation obs;
    obs.packet = p.id;
    obs.relay = relay;
    obs.community = *home;
    obs.panel = *panel;
    const auto wns = panel->members();
    for (std::size_t i = 0; i < 3; ++i) obs.in_range_at_handoff[i] = in_range(wns[i], relay);
    obs.forwarded = forwarded;
    obs.tag_matches = p.intact();
    const auto id = next_observation_++;
    observations_.emplace(id, obs);
    queue_.push({now_ + cfg_.watchdog_timeout, EventKind::WatchdogTimeout, relay, relay, id});
  }

  void watchdog_timeout(std::uint64_t id) {
    auto it = observations_.find(id);
    if (it == observations_.end()) return;
    const Observation obs = it->second;
    observations_.erase(it);
    const auto wns = obs.panel.members();

    // An expulsion since the handoff voids the observation: expelled nodes
    // neither report nor get settled.
    if (expelled_[obs.relay.value] ||
        std::any_of(wns.begin(), wns.end(), [this](NodeId w) { return expelled_[w.value] != 0; })) {
      emit_watchdog(id, obs).add("verdict", "void");
      return;
    }

    std::array<RelayObservation, 3> seen;
    for (std::size_t i = 0; i < 3; ++i) {
      seen[i].in_range = obs.in_range_at_handoff[i] && in_range(wns[i], obs.relay);
      seen[i].retransmitted = obs.forwarded;
      seen[i].tag_matches = obs.tag_matches;
      seen[i].prior_trust = trust_.get(wns[i], obs.relay).combined;
    }
    const auto reports = observe_relay(obs.panel, obs.packet, obs.relay, seen, election_round_);
    for (std::size_t i = 0; i < 3; ++i)
      if (seen[i].in_range) trust_.update(wns[i], obs.relay, reports[i].verdict == Verdict::Coop);
    const auto ia = importance_aspect(ledger_.reputation(wns[0]), ledger_.reputation(wns[1]),
                                      ledger_.reputation(wns[2]));
    const Verdict verdict = cia_aggregate(reports, ia);
    emit_watchdog(id, obs)
        .add("r1", to_string(reports[0].verdict))
        .add("r2", to_string(reports[1].verdict))
        .add("r3", to_string(reports[2].verdict))
        .add("verdict", to_string(verdict));

    const auto s = settle_forwarding(roles_[obs.relay.value], verdict, cfg_.incentive_constants);
    if (s.eligible) ledger_.apply(RepDelta{obs.relay, s.delta, DeltaCause::Forwarding});
    const auto wd = settle_watchdogs(reports, verdict, cfg_.incentive_constants);
    ledger_.apply_settlement(wd);
    if (s.strike) {
      ledger_.add_strike(obs.relay);
      const auto act = ledger_.escalate_penalty(obs.relay, now_);
      if (act.kind == PenaltyKind::Expel) expel(obs.relay, act);
    }
  }

  TraceLine emit_watchdog(std::uint64_t id, const Observation& obs) {
    const auto wns = obs.panel.members();
    TraceLine line = trace_.emit(now_, "watchdog");
    line.add("obs", id).add("relay", obs.relay).add("pkt", obs.packet).add("wn1", wns[0]).add("wn2", wns[1]).add(
        "wn3", wns[2]);
    return line;
  }

  void expel(NodeId n, const PenaltyAction& act) {
    const auto home = *ledger_.home(n);
    auto& cs = communities_[home];
    trace_.emit(now_, "expel")
        .add("node", n)
        .add("debt", act.debt)
        .add("until", act.expiry)
        .add("strikes", ledger_.strikes(n));
    expelled_[n.value] = 1;
    router_->set_relay_eligible(n, false);
    roles_[n.value] = Role::Expelled;
    if (cs.ch == n) {
      cs.ch = cs.ach;
      if (cs.ach) roles_[cs.ach->value] = Role::CH;
      cs.previous_ach = cs.ach;
      cs.ach.reset();
      trace_.emit(now_, "succession")
          .add("community", static_cast<std::uint64_t>(home))
          .add("ch", cs.ch ? std::to_string(cs.ch->value) : std::string(kUndefined));
    }
    if (cs.ach == n) cs.ach.reset();
    if (cs.ih == n) cs.ih.reset();
    if (cs.ch == n) fail("expelled node still holds the CH role");
    queue_.push({act.expiry, EventKind::ExpulsionEnd, n, n});
  }

  void readmit(NodeId n) {
    const auto ex = ledger_.expulsion(n);
    if (!ex) return;
    if (!ledger_.readmit(n, ex->debt, now_)) fail("readmission refused at expiry");
    expelled_[n.value] = 0;
    router_->set_relay_eligible(n, true);
    roles_[n.value] = Role::Member;
    trace_.emit(now_, "readmit").add("node", n).add("paid", ex->debt);
  }

  void run_elections() {
    ++election_round_;
    std::map<std::pair<NodeId, NodeId>, double> evaluated;
    for (CommunityId c = 0; c < communities_.size(); ++c) {
      auto& cs = communities_[c];
      std::vector<NodeId> eligible;
      for (NodeId m : cs.members)
        if (!expelled_[m.value]) eligible.push_back(m);
      HonestyMatrix fh;
      for (NodeId x : eligible)
        for (NodeId y : eligible) {
          if (x == y) continue;
          const double v = honesty_.evaluate(x, y);
          fh.set(x, y, v);
          evaluated[{x, y}] = v;
        }
      auto rec = run_election(election_round_, c, eligible, fh, cfg_.incentive_constants);
      if (!rec) {
        trace_.emit(now_, "election")
            .add("community", static_cast<std::uint64_t>(c))
            .add("round", election_round_)
            .add("held", 0);
        continue;
      }
      settle_election(*rec, ledger_, cs.members);
      if (!ledger_.views_consistent(c, cs.members)) fail("member RTable views diverge after CH_ack");
      for (NodeId m : eligible) roles_[m.value] = Role::Member;
      if (cs.ach) cs.previous_ach = cs.ach;
      cs.ch = rec->heads.ch;
      cs.ach = rec->heads.ach;
      cs.ih = rec->heads.ih;
      roles_[rec->heads.ch.value] = Role::CH;
      roles_[rec->heads.ach.value] = Role::ACH;
      roles_[rec->heads.ih.value] = Role::IH;
      trace_.emit(now_, "election")
          .add("community", static_cast<std::uint64_t>(c))
          .add("round", election_round_)
          .add("held", 1)
          .add("candidates", static_cast<std::uint64_t>(rec->candidates.size()))
          .add("ballots", static_cast<std::uint64_t>(rec->ballots.size()))
          .add("ch", rec->heads.ch)
          .add("ach", rec->heads.ach)
          .add("ih", rec->heads.ih);
    }
    honesty_.close_window(evaluated);
  }

  // ---- end of run --------------------------------------------------------

  void finish() {
    while (!contacts_.empty()) close_contact(contacts_.begin());
    std::uint64_t in_flight = 0;
    for (const auto& p : packets_) {
      if (router_->delivered(p.id)) continue;
      for (std::uint32_t i = 0; i < n_; ++i)
        if (router_->buffer(NodeId{i}).holds(p.id)) {
          ++in_flight;
          break;
        }
    }
    for (std::uint32_t i = 0; i < n_; ++i) {
      const NodeId node{i};
      trace_.emit(now_, "ledger")
          .add("node", node)
          .add("rep", ledger_.reputation(node))
          .add("strikes", ledger_.strikes(node))
          .add("role", to_string(roles_[i]));
    }
    trace_.emit(now_, "end")
        .add("protocol", to_string(cfg_.protocol))
        .add("seed", cfg_.rng_seed)
        .add("created", static_cast<std::uint64_t>(packets_.size()))
        .add("in_flight", in_flight)
        .add("total_rep", ledger_.total_reputation());
  }

  static constexpr SimTime kGraphRefresh = 60;

  ScenarioConfig cfg_;
  std::uint32_t n_ = 0;
  SimTime now_ = 0;
  SimTime last_event_ = 0;
  SimTime last_graph_refresh_ = -kGraphRefresh;

  std::optional<RandomWaypoint> mobility_;
  std::optional<ContactDetector> detector_;
  std::optional<Router> router_;
  std::mt19937_64 traffic_rng_, placement_rng_;
  std::vector<Vec2> positions_;
  std::vector<std::uint8_t> expelled_;
  std::vector<Role> roles_;
  std::vector<CommunityState> communities_;

  EventQueue queue_;
  Trace trace_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, ActiveContact> contacts_;
  std::vector<Packet> packets_;
  PacketId next_packet_ = 0;

  Ledger ledger_;
  HonestyTracker honesty_;
  TrustBook trust_;
  std::map<std::uint64_t, Observation> observations_;
  std::uint64_t next_observation_ = 0;
  std::uint64_t election_round_ = 0;
};

inline RunResult simulate(const ScenarioConfig& cfg) { return Simulation(cfg).run(); }

}  // namespace hbds
