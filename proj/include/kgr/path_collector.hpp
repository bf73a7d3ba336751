#pragma once
// Path collection over training triples.
//
// The distance-guided collector runs a pruned DFS per directed triple
// instance (each training triple is processed both as (h, r, t) and as
// (t, r^-1, h)). A neighbor v extends a partial path only when it is
// unvisited and dist[v][t] <= l_max - len(path) - 1, admissible neighbors
// are ordered nearest-to-target first (stable on adjacency order), and at
// most `branch` of them are expanded. Completed paths land in the bucket
// for (type of the instance head, instance relation).
//
// The random-walk collector is the sampling baseline: uniform walks from the
// head, recording the relation sequence the first time a walk reaches the
// tail. It is deterministic given the seed.

#include <cstdint>
#include <functional>

#include "kgr/distance_index.hpp"
#include "kgr/knowledge_graph.hpp"
#include "kgr/path_store.hpp"
#include "kgr/types.hpp"

namespace kgr {

inline constexpr std::uint32_t kUnlimitedBranch = 0xFFFFFFFFu;

struct CollectOptions {
    std::uint32_t l_max = 3;
    std::uint32_t branch = 30;  // kUnlimitedBranch disables the top-k cut
    // Hide the edge being explained (and its inverse) while searching for
    // that triple, so a fact never supports itself.
    bool exclude_target_edge = true;
    std::uint32_t threads = 1;
};

struct RandomWalkOptions {
    std::uint32_t l_max = 3;
    std::uint32_t walks_per_triple = 100;
    std::uint64_t seed = 13;
    bool exclude_target_edge = true;
    std::uint32_t threads = 1;
};

PathStore collect_paths(const KnowledgeGraph& kg, const DistanceIndex& index,
                        const CollectOptions& opts);

PathStore collect_paths_random_walk(const KnowledgeGraph& kg, const RandomWalkOptions& opts);

// Search for a single (possibly untrained) triple; every completed path is
// reported through `sink` in exploration order, including duplicates reached
// via distinct intermediate entities.
void collect_paths_for_triple(const KnowledgeGraph& kg, const DistanceIndex& index,
                              const Triple& triple, const CollectOptions& opts,
                              const std::function<void(const RelationPath&)>& sink);

// Number of DFS states pushed for one triple (the initial state included);
// instrumentation for the bounded-search checks.
std::uint64_t dfs_state_count(const KnowledgeGraph& kg, const DistanceIndex& index,
                              const Triple& triple, const CollectOptions& opts);

// The directed instances (base + inverse) collection iterates over, in
// order; exposed so statistics can walk the exact same sequence.
std::vector<Triple> directed_train_instances(const KnowledgeGraph& kg);

}  // namespace kgr
