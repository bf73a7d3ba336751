#pragma once
// Path reliability statistics over the training triples.
//
// traverse_path is the batched frontier walk: starting from {h: 1}, each
// relation of the path expands every frontier entity along matching edges,
// summing walk counts. Path probabilities P(p|r) = S/T aggregate, over all
// directed training instances of r, the walks that land on the instance
// tail (S) against all walks (T). Joint probabilities P(p_i, p_j|r) = JS/JT
// count, per instance, the co-executable pairs among the relation's top-M
// hop-ranked paths and how often both reach the tail.
//
// Instances of different relations never share state, so both computations
// parallelise over relations with additive merges.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgr/knowledge_graph.hpp"
#include "kgr/path_store.hpp"
#include "kgr/types.hpp"

namespace kgr {

using ReachSet = std::unordered_map<EntityId, std::uint64_t>;

// Hides the edges {(head, relation, tail_i)} and their inverses.
struct EdgeMask {
    EntityId head = kInvalidId;
    RelationId relation = kInvalidId;
    std::span<const EntityId> tails;  // sorted ascending

    bool masks(EntityId e0, RelationId rel, EntityId e1) const;
};

ReachSet traverse_path(const KnowledgeGraph& kg, EntityId h, const RelationPath& p,
                       const EdgeMask* mask = nullptr);

enum class CountMode {
    kMultiplicity,      // every walk is one reach event
    kDistinctEntities,  // each reached entity counts once per (head, relation) group
};

struct StatsOptions {
    bool exclude_target_edge = true;
    CountMode count_mode = CountMode::kMultiplicity;
    std::uint32_t threads = 1;
};

struct PathStat {
    RelationPath path;
    std::uint64_t success = 0;  // S
    std::uint64_t total = 0;    // T
    double probability() const { return static_cast<double>(success) / static_cast<double>(total); }
};

class RelationPathStats {
public:
    // Paths of r in canonical order (length, then relation-id sequence);
    // nullptr when the relation has no surviving paths.
    const std::vector<PathStat>* for_relation(RelationId r) const {
        auto it = by_relation_.find(r);
        return it == by_relation_.end() ? nullptr : &it->second;
    }
    const std::map<RelationId, std::vector<PathStat>>& all() const { return by_relation_; }
    std::uint64_t total_paths() const;

    // Index of `p` within for_relation(r), or kInvalidId.
    std::uint32_t index_of(RelationId r, const RelationPath& p) const;

    void add(RelationId r, PathStat stat) { by_relation_[r].push_back(std::move(stat)); }
    void sort_canonical();

    void save(const std::filesystem::path& path, const KnowledgeGraph& kg,
              const std::map<std::string, std::string>& meta) const;
    struct Loaded {
        RelationPathStats stats;
        std::map<std::string, std::string> meta;
    };
    static Loaded load(const std::filesystem::path& path, const KnowledgeGraph& kg);

private:
    std::map<RelationId, std::vector<PathStat>> by_relation_;
    mutable std::unordered_map<std::uint64_t, std::uint32_t> index_cache_;
    mutable bool index_built_ = false;
};

struct JointCount {
    std::uint64_t js = 0;
    std::uint64_t jt = 0;
    double probability() const { return static_cast<double>(js) / static_cast<double>(jt); }
};

class JointStats {
public:
    static std::uint64_t key(std::uint32_t i, std::uint32_t j) {
        if (i > j) std::swap(i, j);
        return (static_cast<std::uint64_t>(i) << 32) | j;
    }
    // i, j are indices into stats.for_relation(r); nullptr when unrecorded.
    const JointCount* find(RelationId r, std::uint32_t i, std::uint32_t j) const;
    void add(RelationId r, std::uint32_t i, std::uint32_t j, JointCount c) {
        by_relation_[r][key(i, j)] = c;
    }
    const std::map<RelationId, std::unordered_map<std::uint64_t, JointCount>>& all() const {
        return by_relation_;
    }
    std::uint64_t total_pairs() const;

    void save(const std::filesystem::path& path, const KnowledgeGraph& kg,
              const RelationPathStats& stats, const std::map<std::string, std::string>& meta) const;
    struct Loaded {
        JointStats joints;
        std::map<std::string, std::string> meta;
    };
    static Loaded load(const std::filesystem::path& path, const KnowledgeGraph& kg,
                       const RelationPathStats& stats);

private:
    std::map<RelationId, std::unordered_map<std::uint64_t, JointCount>> by_relation_;
};

RelationPathStats compute_path_probabilities(const KnowledgeGraph& kg, const PathStore& store,
                                             const StatsOptions& opts);

// Pairs are restricted to each relation's top-M paths ranked by the
// hop-adjusted probability with decay `alpha`.
JointStats compute_joint_probabilities(const KnowledgeGraph& kg, const RelationPathStats& stats,
                                       double alpha, std::uint32_t m_inter,
                                       const StatsOptions& opts);

}  // namespace kgr
