#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hbds/event_queue.hpp"
#include "hbds/mobility.hpp"
#include "hbds/routing.hpp"
#include "hbds/scenario.hpp"
#include "hbds/simulator.hpp"

using namespace hbds;

namespace {

ScenarioConfig small(std::uint64_t seed = 1) {
  auto c = desk_profile();
  c.n_terminal_nodes = 20;
  c.sim_duration = 1800;
  c.rng_seed = seed;
  return c;
}

Event ev(SimTime t, EventKind kind, NodeId node = NodeId{}) {
  Event e;
  e.time = t;
  e.kind = kind;
  e.node = node;
  return e;
}

}  // namespace

TEST(Mobility, StationaryNodeNeverMoves) {
  auto c = desk_profile();
  c.n_terminal_nodes = 2;
  c.n_relay_nodes = 0;
  c.avg_speed = 0.0;
  RandomWaypoint rw(c, 4);
  const auto start = rw.positions();
  for (int t = 0; t < 3600; ++t) rw.advance();
  EXPECT_EQ(rw.positions(), start);
}

TEST(Mobility, SameSeedGivesIdenticalStreams) {
  auto c = small(7);
  EXPECT_EQ(generate_mobility(c, 500), generate_mobility(c, 500));
  auto d = c;
  d.rng_seed = 8;
  EXPECT_NE(generate_mobility(c, 50), generate_mobility(d, 50));
}

TEST(Mobility, RelaysStayPut) {
  auto c = small(3);
  const auto s = generate_mobility(c, 300);
  for (std::size_t i = c.n_terminal_nodes; i < c.node_count(); ++i) EXPECT_EQ(s.front()[i], s.back()[i]);
}

TEST(Mobility, ContainmentOverADayInTheLargeArea) {
  auto c = paper_profile();
  RandomWaypoint rw(c, 11);
  double max_step = 0.0;
  auto prev = rw.positions();
  for (SimTime t = 1; t <= 24 * 3600; ++t) {
    rw.advance();
    for (std::size_t i = 0; i < rw.size(); ++i) {
      const auto p = rw.position(i);
      ASSERT_GE(p.x, 0.0);
      ASSERT_LE(p.x, c.area_width);
      ASSERT_GE(p.y, 0.0);
      ASSERT_LE(p.y, c.area_height);
      max_step = std::max(max_step, distance(p, prev[i]));
      prev[i] = p;
    }
  }
  EXPECT_LE(max_step, 1.5 * 60.0 / 3.6 + 1e-9);
}

TEST(Mobility, ZeroAreaIsRejected) {
  auto c = small();
  c.area_height = 0.0;
  EXPECT_THROW(RandomWaypoint(c, 1), ValidationError);
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Contacts, FixedPairInRangeStaysUp) {
  ContactDetector d(2, 300.0);
  const std::vector<Vec2> pos{{0, 0}, {100, 0}};
  std::vector<ContactEvent> all;
  for (SimTime t = 0; t <= 1000; ++t)
    for (const auto& e : d.update(t, pos)) all.push_back(e);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].time, 0);
  EXPECT_EQ(all[0].edge, ContactEdge::Up);
}

TEST(Contacts, FixedPairOutOfRangeNeverMeets) {
  ContactDetector d(2, 300.0);
  const std::vector<Vec2> pos{{0, 0}, {400, 0}};
  for (SimTime t = 0; t <= 1000; ++t) EXPECT_TRUE(d.update(t, pos).empty());
}

TEST(Contacts, StraightCrossingMatchesChordTime) {
  // Offset 200 m, range 300 m: chord 2*sqrt(300^2 - 200^2) = 447.21 m.
  for (double speed : {5.0, 10.0, 16.7}) {
    ContactDetector d(2, 300.0);
    std::optional<SimTime> up, down;
    for (SimTime t = 0; t <= 400; ++t) {
      const std::vector<Vec2> pos{{0, 0}, {-800.0 + speed * static_cast<double>(t), 200.0}};
      for (const auto& e : d.update(t, pos)) (e.edge == ContactEdge::Up ? up : down) = e.time;
    }
    ASSERT_TRUE(up && down);
    const double chord = 2.0 * std::sqrt(300.0 * 300.0 - 200.0 * 200.0);
    EXPECT_NEAR(static_cast<double>(*down - *up), chord / speed, 1.0) << "speed " << speed;
  }
}

TEST(EventQueue, OrdersByTimeThenKindThenNode) {
  EventQueue q;
  q.push(ev(5, EventKind::PacketCreate, NodeId{0}));
  q.push(ev(5, EventKind::ContactUp, NodeId{3}));
  q.push(ev(5, EventKind::ContactUp, NodeId{1}));
  q.push(ev(2, EventKind::ElectionDue, NodeId{9}));
  q.push(ev(5, EventKind::ContactDown, NodeId{0}));
  std::vector<std::pair<SimTime, EventKind>> got;
  std::vector<NodeId> nodes;
  while (!q.empty()) {
    const auto e = q.pop();
    got.emplace_back(e.time, e.kind);
    nodes.push_back(e.node);
  }
  EXPECT_EQ(got.front(), std::pair(SimTime{2}, EventKind::ElectionDue));
  EXPECT_EQ(nodes[1], NodeId{1});
  EXPECT_EQ(nodes[2], NodeId{3});
  EXPECT_EQ(got[3].second, EventKind::ContactDown);
  EXPECT_EQ(got[4].second, EventKind::PacketCreate);
}

TEST(EventQueue, RandomPushesDequeueInNondecreasingTime) {
  std::mt19937_64 rng(21);
  EventQueue q;
  for (int i = 0; i < 5000; ++i)
    q.push(ev(static_cast<SimTime>(rng() % 1000), static_cast<EventKind>(rng() % 7),
            NodeId{static_cast<std::uint32_t>(rng() % 50)}));
  SimTime last = 0;
  while (!q.empty()) {
    const auto e = q.pop();
    ASSERT_GE(e.time, last);
    last = e.time;
    if (rng() % 4 == 0) q.push(ev(last + static_cast<SimTime>(rng() % 10), EventKind::TtlExpiry));
    if (q.size() > 20000) break;
  }
}

TEST(EventQueue, PushIntoThePastThrows) {
  EventQueue q;
  q.push(ev(10, EventKind::PacketCreate));
  q.pop();
  EXPECT_THROW(q.push(ev(9, EventKind::PacketCreate)), std::logic_error);
  EXPECT_NO_THROW(q.push(ev(10, EventKind::PacketCreate)));
}

TEST(Scenario, UnknownKeyIsFatal) {
  EXPECT_THROW(parse_scenario("area_width=100\nwarp_factor=9\n"), ValidationError);
  EXPECT_THROW(parse_scenario("just words\n"), ValidationError);
  EXPECT_THROW(parse_scenario("protocol=Spray\n"), ValidationError);
}

TEST(Scenario, TextRoundTrip) {
  auto c = paper_profile();
  c.selfish_fraction = 0.35;
  c.protocol = Protocol::SSARLike;
  c.incentive_constants = {2.0, 0.75, 0.25};
  c.random_honesty_weights = true;
  const auto back = parse_scenario(to_scenario_text(c));
  EXPECT_EQ(to_scenario_text(back), to_scenario_text(c));
  EXPECT_EQ(back.protocol, Protocol::SSARLike);
  EXPECT_EQ(back.incentive_constants.wn_pay, 0.25);
}

TEST(Scenario, CommentsAndBlanksAreIgnored) {
  const auto c = parse_scenario("# desk run\n\n  n_terminal_nodes = 30 \nselfish_fraction=0.4\n");
  EXPECT_EQ(c.n_terminal_nodes, 30u);
  EXPECT_EQ(c.selfish_fraction, 0.4);
}

TEST(Scenario, SelfishCountRoundsHalfUp) {
  auto c = desk_profile();
  c.n_terminal_nodes = 5;
  c.selfish_fraction = 0.5;
  EXPECT_EQ(c.selfish_count(), 3u);
  c.n_terminal_nodes = 50;
  c.selfish_fraction = 0.8;
  EXPECT_EQ(c.selfish_count(), 40u);
  c.selfish_fraction = 0.0;
  EXPECT_EQ(c.selfish_count(), 0u);
}

TEST(Scenario, InvalidValuesAreRejected) {
  EXPECT_THROW(parse_scenario("selfish_fraction=1.5\n"), ValidationError);
  EXPECT_THROW(parse_scenario("packet_interval=30,20\n"), ValidationError);
  EXPECT_THROW(parse_scenario("n_terminal_nodes=abc\n"), ValidationError);
  EXPECT_THROW(parse_scenario("area_width=0\n"), ValidationError);
}

TEST(Scenario, ProfilesMatchTheTableValues) {
  const auto p = paper_profile();
  EXPECT_EQ(p.area_width, 4500.0);
  EXPECT_EQ(p.area_height, 3500.0);
  EXPECT_EQ(p.n_terminal_nodes, 100u);
  EXPECT_EQ(p.n_relay_nodes, 5u);
  EXPECT_EQ(p.tx_range, 300.0);
  EXPECT_EQ(p.avg_speed, 60.0);
  EXPECT_EQ(p.sim_duration, 24 * 3600);
  EXPECT_EQ(p.packet_ttl, 320 * 60);
  EXPECT_EQ(p.terminal_buffer, 150'000'000);
  EXPECT_EQ(p.relay_buffer, 250'000'000);
}

TEST(Run, ZeroPacketRunIsVacuous) {
  auto c = small();
  c.sim_duration = 100;
  c.packet_interval = {200, 300};
  const auto r = simulate(c);
  EXPECT_EQ(r.metrics.packets_created, 0u);
  EXPECT_EQ(r.metrics.packets_delivered, 0u);
  EXPECT_EQ(r.metrics.packets_dropped, 0u);
  EXPECT_FALSE(r.metrics.overhead_ratio);
}

TEST(Run, SameSeedIsByteIdentical) {
  for (auto proto : {Protocol::HBDS, Protocol::SimBetLike}) {
    auto c = small(5);
    c.protocol = proto;
    c.selfish_fraction = 0.4;
    const auto a = simulate(c);
    const auto b = simulate(c);
    EXPECT_EQ(a.metrics, b.metrics);
    EXPECT_EQ(a.trace.text(), b.trace.text());
  }
}

TEST(Run, TraceTimesAreNondecreasingAndWithinTheRun) {
  auto c = small(2);
  c.selfish_fraction = 0.6;
  const auto r = simulate(c);
  SimTime last = 0;
  r.trace.for_each([&](const TraceRecord& rec) {
    EXPECT_GE(rec.t, last);
    EXPECT_LE(rec.t, c.sim_duration);
    last = rec.t;
  });
}

TEST(Run, PacketsAreCreatedAtConfiguredIntervals) {
  auto c = small(6);
  std::vector<SimTime> times;
  simulate(c).trace.for_each([&](const TraceRecord& rec) {
    if (rec.kind == "create") times.push_back(rec.t);
  });
  ASSERT_GT(times.size(), 2u);
  EXPECT_GE(times[0], c.packet_interval.min);
  for (std::size_t i = 1; i < times.size(); ++i) {
    EXPECT_GE(times[i] - times[i - 1], c.packet_interval.min);
    EXPECT_LE(times[i] - times[i - 1], c.packet_interval.max);
  }
}

TEST(Run, TightBuffersDropInsteadOfOverflowing) {
  auto c = small(3);
  c.terminal_buffer = 1'500'000;
  c.relay_buffer = 2'000'000;
  const auto r = simulate(c);
  std::uint64_t buffer_drops = 0;
  r.trace.for_each([&](const TraceRecord& rec) {
    if (rec.kind == "drop" && rec.at("reason") == "buffer") ++buffer_drops;
  });
  EXPECT_GT(buffer_drops, 0u);
}

TEST(Run, SelfishnessLowersDeliveryOverTenSeeds) {
  double clean = 0.0, selfish = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = desk_profile();
    c.rng_seed = seed;
    c.protocol = Protocol::NoIncentive;
    c.selfish_fraction = 0.0;
    clean += simulate(c).metrics.delivery_probability;
    c.selfish_fraction = 0.8;
    selfish += simulate(c).metrics.delivery_probability;
  }
  EXPECT_LT(selfish / 10.0, clean / 10.0);
}
