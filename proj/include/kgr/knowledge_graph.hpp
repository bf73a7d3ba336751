#pragma once
// Immutable in-memory knowledge graph with inverse-relation augmentation.
//
// Loading builds vocabularies over the union of train/valid/test, keeps the
// splits verbatim, and materialises the training adjacency with one inverse
// edge per base edge. Adjacency order is insertion order, so everything
// downstream is deterministic given the input files. A second, relation-
// bucketed view of the same edges backs fast path traversal.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgr/types.hpp"
#include "kgr/vocab.hpp"

namespace kgr {

inline constexpr const char* kInverseSuffix = "_inv";
inline constexpr const char* kDefaultTypeName = "_default";

struct DatasetSplits {
    std::vector<Triple> train;
    std::vector<Triple> valid;
    std::vector<Triple> test;
};

struct LoadReport {
    std::uint64_t malformed_lines = 0;
    std::uint64_t duplicate_train_triples = 0;
    std::uint64_t unknown_type_entities = 0;
};

class KnowledgeGraph {
public:
    // --- vocabularies -----------------------------------------------------
    const Vocab& entities() const { return entities_; }
    const Vocab& relations() const { return relations_; }  // includes inverses
    const Vocab& entity_types() const { return types_; }
    std::uint32_t num_entities() const { return entities_.size(); }
    std::uint32_t num_relations() const { return relations_.size(); }
    std::uint32_t num_base_relations() const { return relations_.size() / 2; }

    // --- typing -----------------------------------------------------------
    TypeId entity_type(EntityId e) const { return type_of_[e]; }

    // --- adjacency --------------------------------------------------------
    std::span<const Edge> neighbors(EntityId u) const {
        return {adjacency_[u].data(), adjacency_[u].size()};
    }
    // Edges of u carrying relation r, in insertion order.
    std::span<const Edge> neighbors_via(EntityId u, RelationId r) const;
    std::uint64_t num_edges() const { return num_edges_; }

    // Training triples with exact duplicate lines removed (first wins);
    // this is the triple set walked by collection and statistics.
    const std::vector<Triple>& unique_train_triples() const { return unique_train_; }

    // --- construction -----------------------------------------------------
    // Register a base relation name; returns the base id (even). The name
    // must not end in the inverse suffix.
    RelationId add_base_relation(const std::string& name);
    EntityId add_entity(const std::string& name) { return ensure_entity(name); }
    // Adds the edge and its inverse to the adjacency, and records the triple
    // in unique_train_triples(). Duplicates are ignored.
    bool add_train_edge(EntityId h, RelationId r, EntityId t);
    void set_entity_type(EntityId e, const std::string& type_name);
    // Must be called once after the last add_train_edge.
    void finalize();

    // --- persistence ------------------------------------------------------
    // Writes entities.tsv / relations.tsv (id<TAB>name) into `dir`.
    void save_id_maps(const std::filesystem::path& dir) const;

private:
    friend struct DatasetLoader;
    EntityId ensure_entity(const std::string& name);

    Vocab entities_;
    Vocab relations_;
    Vocab types_;
    std::vector<TypeId> type_of_;
    std::vector<std::vector<Edge>> adjacency_;
    std::vector<Triple> unique_train_;
    std::uint64_t num_edges_ = 0;

    // relation-bucketed CSR over the same edges, built by finalize()
    std::vector<Edge> edges_by_rel_;
    std::vector<std::uint64_t> rel_view_offsets_;
};

struct LoadedDataset {
    KnowledgeGraph kg;
    DatasetSplits splits;
    LoadReport report;
};

// Reads train.txt / valid.txt / test.txt (head<TAB>relation<TAB>tail) from
// `dir` plus an optional entity<TAB>type map. Missing split files are fatal;
// malformed lines are dropped and counted.
LoadedDataset load_dataset(const std::filesystem::path& dir,
                           const std::optional<std::filesystem::path>& type_map = std::nullopt);

}  // namespace kgr
