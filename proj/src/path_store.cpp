#include "kgr/path_store.hpp"

#include <algorithm>
#include <stdexcept>

#include "kgr/io_util.hpp"

namespace kgr {

std::uint64_t PathStore::total_occurrences() const {
    std::uint64_t total = 0;
    for (const auto& [key, bucket] : buckets_)
        for (const auto& [pid, n] : bucket) total += n;
    return total;
}

std::uint64_t PathStore::distinct_entries() const {
    std::uint64_t total = 0;
    for (const auto& [key, bucket] : buckets_) total += bucket.size();
    return total;
}

void PathStore::merge(const PathStore& other) {
    for (const auto& [key, bucket] : other.buckets_)
        for (const auto& [pid, n] : bucket) add(key.first, key.second, other.paths_[pid], n);
}

namespace {

std::string join_path(const RelationPath& p, const KnowledgeGraph& kg) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ',';
        out += kg.relations().name(p[i]);
    }
    return out;
}

RelationPath parse_path(const std::string& text, const KnowledgeGraph& kg) {
    RelationPath p;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string name =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        RelationId r = kg.relations().find(name);
        if (r == kInvalidId) throw std::runtime_error("unknown relation in path file: " + name);
        p.push_back(r);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return p;
}

}  // namespace

void PathStore::save(const std::filesystem::path& path, const KnowledgeGraph& kg,
                     const std::map<std::string, std::string>& meta) const {
    ArtifactHeader h;
    h.kind = "kgr.paths";
    h.set_u64("version", 1);
    for (const auto& [k, v] : meta) h.set(k, v);

    // canonical order: (type id, relation id, path relation-id sequence)
    std::vector<std::string> lines;
    for (const auto& [key, bucket] : buckets_) {
        std::vector<std::uint32_t> pids;
        pids.reserve(bucket.size());
        for (const auto& [pid, n] : bucket) pids.push_back(pid);
        std::sort(pids.begin(), pids.end(), [this](std::uint32_t a, std::uint32_t b) {
            return paths_[a] < paths_[b];
        });
        for (std::uint32_t pid : pids) {
            std::string line = kg.entity_types().name(key.first);
            line += '\t';
            line += kg.relations().name(key.second);
            line += '\t';
            line += join_path(paths_[pid], kg);
            line += '\t';
            line += std::to_string(bucket.at(pid));
            lines.push_back(std::move(line));
        }
    }
    write_artifact(path, h, lines);
}

PathStore::Loaded PathStore::load(const std::filesystem::path& path, const KnowledgeGraph& kg) {
    std::vector<std::string> lines;
    ArtifactHeader h = read_artifact(path, lines);
    if (h.kind != "kgr.paths") throw std::runtime_error("not a path store: " + path.string());
    Loaded out;
    out.meta = h.meta;
    for (const auto& line : lines) {
        auto cols = split_tabs(line);
        if (cols.size() != 4) throw std::runtime_error("corrupt path store line: " + line);
        TypeId c = kg.entity_types().find(cols[0]);
        RelationId r = kg.relations().find(cols[1]);
        if (c == kInvalidId || r == kInvalidId)
            throw std::runtime_error("path store references unknown vocab entry: " + line);
        out.store.add(c, r, parse_path(cols[2], kg), std::stoull(cols[3]));
    }
    return out;
}

}  // namespace kgr
