// Time-ordered event queue with deterministic tie-breaking.

#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "hbds/core.hpp"

namespace hbds {

// Declaration order is the tie-break rank at equal timestamps.
enum class EventKind : std::uint8_t {
  ContactUp,
  ContactDown,
  PacketCreate,
  TtlExpiry,
  ElectionDue,
  WatchdogTimeout,
  ExpulsionEnd,
};

struct Event {
  SimTime time = 0;
  EventKind kind = EventKind::ContactUp;
  NodeId node;               // primary node (tie-break key)
  NodeId peer;               // contacts only
  std::uint64_t ref = 0;     // packet id, community id or observation id
  std::uint64_t seq = 0;     // insertion order, assigned by the queue
};

class EventQueue {
 public:
  void push(Event e) {
    if (e.time < now_) throw std::logic_error("event scheduled in the past");
    e.seq = next_seq_++;
    heap_.push(e);
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }
  SimTime now() const { return now_; }

  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    now_ = e.time;
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.kind != b.kind) return a.kind > b.kind;
      if (a.node != b.node) return a.node > b.node;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace hbds
