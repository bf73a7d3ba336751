#pragma once
// Truncated all-pairs hop distances. One BFS per entity over the inverse-
// augmented adjacency records every entity within l_max hops; anything
// beyond that is treated as unreachable. Because every edge has its inverse
// the relation is symmetric, so a whole row can be served from either
// endpoint. Rows are sorted id arrays to keep memory bounded on large
// graphs (a dense matrix would not fit at tens of thousands of entities).

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kgr/knowledge_graph.hpp"
#include "kgr/types.hpp"

namespace kgr {

inline constexpr std::uint8_t kUnreachable = 0xFF;

class DistanceIndex {
public:
    struct Row {
        std::span<const EntityId> ids;     // sorted ascending
        std::span<const std::uint8_t> hops;
    };

    std::uint32_t l_max() const { return l_max_; }
    std::uint32_t num_entities() const { return static_cast<std::uint32_t>(offsets_.size() - 1); }

    // Hop count, or kUnreachable when v is farther than l_max from u.
    std::uint8_t distance(EntityId u, EntityId v) const;

    Row row(EntityId u) const {
        auto lo = offsets_[u], hi = offsets_[u + 1];
        return {{ids_.data() + lo, hi - lo}, {hops_.data() + lo, hi - lo}};
    }

    void save(const std::filesystem::path& path) const;
    static DistanceIndex load(const std::filesystem::path& path);

    friend DistanceIndex build_distance_index(const KnowledgeGraph& kg, std::uint32_t l_max,
                                              std::uint32_t threads);

private:
    std::uint32_t l_max_ = 0;
    std::vector<std::uint64_t> offsets_;  // per entity, into ids_/hops_
    std::vector<EntityId> ids_;
    std::vector<std::uint8_t> hops_;
};

DistanceIndex build_distance_index(const KnowledgeGraph& kg, std::uint32_t l_max,
                                   std::uint32_t threads = 1);

}  // namespace kgr
