#pragma once
// Core handle types shared by every module. Entities, relations and entity
// types are dense integer handles assigned in file order; relation ids are
// laid out in base/inverse pairs so that inverse lookup is a bit flip.

#include <cstdint>
#include <functional>
#include <vector>

namespace kgr {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using TypeId = std::uint32_t;

inline constexpr std::uint32_t kInvalidId = 0xFFFFFFFFu;

// Base relations get even ids, their inverses the following odd id.
inline constexpr RelationId inverse_of(RelationId r) { return r ^ 1u; }
inline constexpr bool is_inverse(RelationId r) { return (r & 1u) != 0; }

// Entity type every entity falls back to when no type map is supplied.
inline constexpr TypeId kDefaultTypeId = 0;

struct Triple {
    EntityId head = kInvalidId;
    RelationId relation = kInvalidId;
    EntityId tail = kInvalidId;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// One directed adjacency entry: relation taken and entity reached.
struct Edge {
    RelationId rel;
    EntityId dst;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// A relation path is an ordered sequence of (base or inverse) relation ids.
using RelationPath = std::vector<RelationId>;

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

struct PathHash {
    std::size_t operator()(const RelationPath& p) const {
        std::size_t h = 0x243f6a8885a308d3ull;
        for (RelationId r : p) h = hash_combine(h, r);
        return h;
    }
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const {
        std::size_t h = std::hash<EntityId>{}(t.head);
        h = hash_combine(h, t.relation);
        h = hash_combine(h, t.tail);
        return h;
    }
};

}  // namespace kgr
