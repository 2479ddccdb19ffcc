// Random-waypoint mobility and tick-sampled contact detection.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "hbds/core.hpp"
#include "hbds/scenario.hpp"

namespace hbds {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Independent, reproducible RNG stream for one concern of a run.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return std::mt19937_64(z);
}

enum Stream : std::uint64_t { kMobility = 1, kTraffic = 2, kBehaviour = 3, kPlacement = 4, kProtocol = 5 };

class RandomWaypoint {
 public:
  RandomWaypoint(const ScenarioConfig& cfg, std::uint64_t seed)
      : width_(cfg.area_width), height_(cfg.area_height), rng_(make_stream(seed, kMobility)) {
    if (!(width_ > 0.0) || !(height_ > 0.0)) throw ValidationError("mobility: zero-area rectangle");
    const double v = cfg.avg_speed / 3.6;
    vmin_ = 0.5 * v;
    vmax_ = 1.5 * v;
    const auto n = cfg.node_count();
    nodes_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto& m = nodes_[i];
      m.stationary = i >= cfg.n_terminal_nodes;
      m.pos = random_point();
      m.target = m.stationary ? m.pos : random_point();
      m.speed = m.stationary ? 0.0 : random_speed();
    }
  }

  std::size_t size() const { return nodes_.size(); }
  Vec2 position(std::size_t i) const { return nodes_[i].pos; }
  std::vector<Vec2> positions() const {
    std::vector<Vec2> out;
    out.reserve(nodes_.size());
    for (const auto& m : nodes_) out.push_back(m.pos);
    return out;
  }

  void advance(double dt = 1.0) {
    for (auto& m : nodes_) {
      if (m.stationary || m.speed <= 0.0) continue;
      double budget = m.speed * dt;
      while (budget > 0.0) {
        const double d = distance(m.pos, m.target);
        if (d > budget) {
          m.pos.x += (m.target.x - m.pos.x) * budget / d;
          m.pos.y += (m.target.y - m.pos.y) * budget / d;
          break;
        }
        budget -= d;
        m.pos = m.target;
        m.target = random_point();
        m.speed = random_speed();
        if (m.speed <= 0.0) break;
      }
    }
  }

 private:
  struct Mover {
    Vec2 pos;
    Vec2 target;
    double speed = 0.0;
    bool stationary = false;
  };

  Vec2 random_point() {
    std::uniform_real_distribution<double> ux(0.0, width_), uy(0.0, height_);
    const double x = ux(rng_);
    return {x, uy(rng_)};
  }
  double random_speed() {
    if (vmax_ <= 0.0) return 0.0;
    std::uniform_real_distribution<double> u(vmin_, vmax_);
    return u(rng_);
  }

  double width_, height_;
  double vmin_ = 0.0, vmax_ = 0.0;
  std::mt19937_64 rng_;
  std::vector<Mover> nodes_;
};

// Position snapshots at every tick 0..ticks inclusive.
inline std::vector<std::vector<Vec2>> generate_mobility(const ScenarioConfig& cfg, SimTime ticks) {
  RandomWaypoint rw(cfg, cfg.rng_seed);
  std::vector<std::vector<Vec2>> out;
  out.reserve(static_cast<std::size_t>(ticks) + 1);
  out.push_back(rw.positions());
  for (SimTime t = 1; t <= ticks; ++t) {
    rw.advance();
    out.push_back(rw.positions());
  }
  return out;
}

enum class ContactEdge { Up, Down };

struct ContactEvent {
  SimTime time = 0;
  ContactEdge edge = ContactEdge::Up;
  NodeId a;
  NodeId b;
};

// Tracks pairwise range state between successive position samples.
class ContactDetector {
 public:
  ContactDetector(std::size_t n, double range) : n_(n), range_(range), up_(n * n, 0), since_(n * n, 0) {}

  // `active[i] == false` forces node i out of every contact.
  std::vector<ContactEvent> update(SimTime t, std::span<const Vec2> pos,
                                   std::span<const std::uint8_t> active = {}) {
    std::vector<ContactEvent> out;
    const double r2 = range_ * range_;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
        bool in = dx * dx + dy * dy <= r2;
        if (!active.empty() && (!active[i] || !active[j])) in = false;
        auto& st = up_[i * n_ + j];
        if (in && !st) {
          st = 1;
          since_[i * n_ + j] = t;
          out.push_back({t, ContactEdge::Up, NodeId(static_cast<std::uint32_t>(i)),
                         NodeId(static_cast<std::uint32_t>(j))});
        } else if (!in && st) {
          st = 0;
          out.push_back({t, ContactEdge::Down, NodeId(static_cast<std::uint32_t>(i)),
                         NodeId(static_cast<std::uint32_t>(j))});
        }
      }
    }
    return out;
  }

  bool connected(NodeId a, NodeId b) const {
    auto [i, j] = a < b ? std::pair{a.value, b.value} : std::pair{b.value, a.value};
    return up_[i * n_ + j] != 0;
  }
  SimTime up_since(NodeId a, NodeId b) const {
    auto [i, j] = a < b ? std::pair{a.value, b.value} : std::pair{b.value, a.value};
    return since_[i * n_ + j];
  }

 private:
  std::size_t n_;
  double range_;
  std::vector<std::uint8_t> up_;
  std::vector<SimTime> since_;
};

}  // namespace hbds
