// Domain types shared by every HBDS module.

#pragma once

#include <compare>
#include <functional>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hbds {

// Simulated time in whole seconds. The engine ticks at 1 s.
using SimTime = std::int64_t;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

using CommunityId = std::uint32_t;

enum class Role { Member, CH, ACH, IH, GW, Expelled };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Member: return "Member";
    case Role::CH: return "CH";
    case Role::ACH: return "ACH";
    case Role::IH: return "IH";
    case Role::GW: return "GW";
    case Role::Expelled: return "Expelled";
  }
  return "?";
}

enum class BehaviorKind { Cooperative, Selfish };

struct BehaviorProfile {
  BehaviorKind kind = BehaviorKind::Cooperative;
  // Probability that a selfish node silently discards a relay request.
  double drop_probability = 0.0;

  static BehaviorProfile cooperative() { return {}; }
  static BehaviorProfile selfish(double p) { return {BehaviorKind::Selfish, p}; }

  bool is_selfish() const { return kind == BehaviorKind::Selfish; }
  bool valid() const {
    if (drop_probability < 0.0 || drop_probability > 1.0) return false;
    return kind == BehaviorKind::Cooperative ? drop_probability == 0.0
                                             : drop_probability > 0.0;
  }
};

struct NodeState {
  NodeId id;
  Role role = Role::Member;
  double reputation = 0.0;
  BehaviorProfile behavior;
  std::optional<CommunityId> community_id;
  std::uint32_t strike_count = 0;
};

struct ContactRecord {
  NodeId a;
  NodeId b;
  SimTime start = 0;
  SimTime length = 0;
  bool useful = false;

  NodeId other(NodeId self) const { return self == a ? b : a; }
  bool involves(NodeId n) const { return a == n || b == n; }
};

inline void validate_contact(const ContactRecord& c) {
  if (c.length <= 0) throw ValidationError("contact length must be positive");
  if (c.a == c.b) throw ValidationError("contact endpoints must differ");
}

using PacketId = std::uint64_t;

// FNV-1a over the immutable packet fields. Tamper detection only.
inline std::uint64_t digest_fields(PacketId id, NodeId src, NodeId dst, std::int64_t size,
                                   SimTime created_at, SimTime ttl) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(id);
  mix(src.value);
  mix(dst.value);
  mix(static_cast<std::uint64_t>(size));
  mix(static_cast<std::uint64_t>(created_at));
  mix(static_cast<std::uint64_t>(ttl));
  return h;
}

struct Packet {
  PacketId id = 0;
  NodeId src;
  NodeId dst;
  std::int64_t size = 0;  // bytes
  SimTime created_at = 0;
  SimTime ttl = 0;
  std::uint64_t integrity_tag = 0;

  static Packet make(PacketId id, NodeId src, NodeId dst, std::int64_t size, SimTime created_at,
                     SimTime ttl) {
    Packet p{id, src, dst, size, created_at, ttl, 0};
    p.integrity_tag = p.expected_tag();
    return p;
  }

  std::uint64_t expected_tag() const {
    return digest_fields(id, src, dst, size, created_at, ttl);
  }
  bool intact() const { return integrity_tag == expected_tag(); }
  bool expired_at(SimTime now) const { return now - created_at > ttl; }
};

struct RTableEntry {
  NodeId node;
  double reputation = 0.0;
  std::uint64_t last_updated = 0;  // election round index

  friend bool operator==(const RTableEntry&, const RTableEntry&) = default;
};

// Checks the per-node invariants. `current_ch` is the CH of the node's
// community if one is known, used for the role-exclusivity check.
inline bool validate_node_state(const NodeState& s, std::optional<NodeId> current_ch = {}) {
  if (!s.behavior.valid()) return false;
  if (s.role == Role::Expelled && current_ch && *current_ch == s.id) return false;
  return true;
}

}  // namespace hbds

template <>
struct std::hash<hbds::NodeId> {
  std::size_t operator()(hbds::NodeId n) const noexcept { return std::hash<std::uint32_t>{}(n.value); }
};
