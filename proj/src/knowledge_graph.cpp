#include "kgr/knowledge_graph.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace kgr {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

EntityId KnowledgeGraph::ensure_entity(const std::string& name) {
    EntityId id = entities_.get_or_add(name);
    if (id >= adjacency_.size()) {
        adjacency_.emplace_back();
        type_of_.push_back(kDefaultTypeId);
    }
    return id;
}

RelationId KnowledgeGraph::add_base_relation(const std::string& name) {
    if (ends_with(name, kInverseSuffix))
        throw std::runtime_error("relation name collides with the inverse suffix: " + name);
    RelationId existing = relations_.find(name);
    if (existing != kInvalidId) return existing;
    RelationId base = relations_.get_or_add(name);
    relations_.get_or_add(name + kInverseSuffix);
    return base;
}

bool KnowledgeGraph::add_train_edge(EntityId h, RelationId r, EntityId t) {
    Triple triple{h, r, t};
    if (std::find(unique_train_.begin(), unique_train_.end(), triple) != unique_train_.end())
        return false;
    unique_train_.push_back(triple);
    adjacency_[h].push_back({r, t});
    adjacency_[t].push_back({inverse_of(r), h});
    num_edges_ += 2;
    return true;
}

void KnowledgeGraph::set_entity_type(EntityId e, const std::string& type_name) {
    type_of_[e] = types_.get_or_add(type_name);
}

void KnowledgeGraph::finalize() {
    rel_view_offsets_.assign(num_entities() + 1, 0);
    for (EntityId u = 0; u < num_entities(); ++u)
        rel_view_offsets_[u + 1] = rel_view_offsets_[u] + adjacency_[u].size();
    edges_by_rel_.resize(num_edges_);
    for (EntityId u = 0; u < num_entities(); ++u) {
        auto begin = edges_by_rel_.begin() + static_cast<std::ptrdiff_t>(rel_view_offsets_[u]);
        std::copy(adjacency_[u].begin(), adjacency_[u].end(), begin);
        auto end = edges_by_rel_.begin() + static_cast<std::ptrdiff_t>(rel_view_offsets_[u + 1]);
        std::stable_sort(begin, end, [](const Edge& a, const Edge& b) { return a.rel < b.rel; });
    }
}

std::span<const Edge> KnowledgeGraph::neighbors_via(EntityId u, RelationId r) const {
    const Edge* base = edges_by_rel_.data();
    auto lo = base + rel_view_offsets_[u];
    auto hi = base + rel_view_offsets_[u + 1];
    auto range = std::equal_range(lo, hi, Edge{r, 0},
                                  [](const Edge& a, const Edge& b) { return a.rel < b.rel; });
    return {range.first, static_cast<std::size_t>(range.second - range.first)};
}

void KnowledgeGraph::save_id_maps(const std::filesystem::path& dir) const {
    std::ofstream ents(dir / "entities.tsv");
    for (std::uint32_t i = 0; i < entities_.size(); ++i)
        ents << i << '\t' << entities_.name(i) << '\n';
    std::ofstream rels(dir / "relations.tsv");
    for (std::uint32_t i = 0; i < relations_.size(); ++i)
        rels << i << '\t' << relations_.name(i) << '\n';
    if (!ents || !rels) throw std::runtime_error("failed writing id maps to " + dir.string());
}

namespace {

struct RawTriple {
    std::string h, r, t;
};

// head<TAB>relation<TAB>tail; anything else is malformed.
bool parse_triple_line(const std::string& line, RawTriple& out) {
    auto tab1 = line.find('\t');
    if (tab1 == std::string::npos) return false;
    auto tab2 = line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) return false;
    if (line.find('\t', tab2 + 1) != std::string::npos) return false;
    out.h = line.substr(0, tab1);
    out.r = line.substr(tab1 + 1, tab2 - tab1 - 1);
    out.t = line.substr(tab2 + 1);
    if (!out.t.empty() && out.t.back() == '\r') out.t.pop_back();
    return !out.h.empty() && !out.r.empty() && !out.t.empty();
}

std::vector<RawTriple> read_triple_file(const std::filesystem::path& path, LoadReport& report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing dataset file: " + path.string());
    std::vector<RawTriple> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RawTriple raw;
        if (parse_triple_line(line, raw))
            out.push_back(std::move(raw));
        else
            ++report.malformed_lines;
    }
    return out;
}

}  // namespace

struct DatasetLoader {
    static LoadedDataset run(const std::filesystem::path& dir,
                             const std::optional<std::filesystem::path>& type_map) {
        LoadedDataset ds;
        auto train_raw = read_triple_file(dir / "train.txt", ds.report);
        auto valid_raw = read_triple_file(dir / "valid.txt", ds.report);
        auto test_raw = read_triple_file(dir / "test.txt", ds.report);

        KnowledgeGraph& kg = ds.kg;
        kg.types_.get_or_add(kDefaultTypeName);

        auto intern = [&kg](const std::vector<RawTriple>& raw, std::vector<Triple>& out) {
            out.reserve(raw.size());
            for (const auto& rt : raw) {
                Triple t;
                t.head = kg.ensure_entity(rt.h);
                t.relation = kg.add_base_relation(rt.r);
                t.tail = kg.ensure_entity(rt.t);
                out.push_back(t);
            }
        };
        intern(train_raw, ds.splits.train);
        intern(valid_raw, ds.splits.valid);
        intern(test_raw, ds.splits.test);

        // adjacency from train only, deduplicated
        std::unordered_set<Triple, TripleHash> seen;
        seen.reserve(ds.splits.train.size() * 2);
        kg.unique_train_.reserve(ds.splits.train.size());
        for (const Triple& t : ds.splits.train) {
            if (!seen.insert(t).second) {
                ++ds.report.duplicate_train_triples;
                continue;
            }
            kg.unique_train_.push_back(t);
            kg.adjacency_[t.head].push_back({t.relation, t.tail});
            kg.adjacency_[t.tail].push_back({inverse_of(t.relation), t.head});
            kg.num_edges_ += 2;
        }

        if (type_map) {
            std::ifstream in(*type_map);
            if (!in) throw std::runtime_error("missing type map file: " + type_map->string());
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto tab = line.find('\t');
                if (tab == std::string::npos) {
                    ++ds.report.malformed_lines;
                    continue;
                }
                std::string ent = line.substr(0, tab);
                std::string type = line.substr(tab + 1);
                if (!type.empty() && type.back() == '\r') type.pop_back();
                EntityId e = kg.entities_.find(ent);
                if (e == kInvalidId) {
                    ++ds.report.unknown_type_entities;
                    continue;
                }
                kg.set_entity_type(e, type);
            }
        }

        kg.finalize();
        return ds;
    }
};

LoadedDataset load_dataset(const std::filesystem::path& dir,
                           const std::optional<std::filesystem::path>& type_map) {
    return DatasetLoader::run(dir, type_map);
}

}  // namespace kgr
