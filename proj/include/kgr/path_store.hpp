#pragma once
// Multiset of collected relation paths keyed by (head entity type, relation).
// Paths are interned once; buckets map path id -> occurrence count. Counts
// record how often a path was completed during collection; probabilities are
// recomputed later by traversal, so counts serve ranking and debugging.

#include <cstdint>
#include <filesystem>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgr/knowledge_graph.hpp"
#include "kgr/types.hpp"

namespace kgr {

class PathStore {
public:
    using Bucket = std::unordered_map<std::uint32_t, std::uint64_t>;  // path id -> count
    using BucketKey = std::pair<TypeId, RelationId>;

    std::uint32_t intern(const RelationPath& p) {
        auto it = path_ids_.find(p);
        if (it != path_ids_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(paths_.size());
        paths_.push_back(p);
        path_ids_.emplace(paths_.back(), id);
        return id;
    }

    void add(TypeId c, RelationId r, const RelationPath& p, std::uint64_t n = 1) {
        buckets_[{c, r}][intern(p)] += n;
    }

    const RelationPath& path(std::uint32_t id) const { return paths_[id]; }
    std::uint32_t num_paths() const { return static_cast<std::uint32_t>(paths_.size()); }

    const Bucket* bucket(TypeId c, RelationId r) const {
        auto it = buckets_.find({c, r});
        return it == buckets_.end() ? nullptr : &it->second;
    }
    const std::map<BucketKey, Bucket>& buckets() const { return buckets_; }

    std::uint64_t total_occurrences() const;
    std::uint64_t distinct_entries() const;  // (c, r, path) keys

    void merge(const PathStore& other);

    void save(const std::filesystem::path& path, const KnowledgeGraph& kg,
              const std::map<std::string, std::string>& meta) const;
    struct Loaded {
        PathStore store;
        std::map<std::string, std::string> meta;
    };
    static Loaded load(const std::filesystem::path& path, const KnowledgeGraph& kg);

private:
    std::vector<RelationPath> paths_;
    std::unordered_map<RelationPath, std::uint32_t, PathHash> path_ids_;
    std::map<BucketKey, Bucket> buckets_;
};

}  // namespace kgr
