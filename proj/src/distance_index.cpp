#include "kgr/distance_index.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <stdexcept>
#include <thread>

#include "kgr/io_util.hpp"

namespace kgr {

std::uint8_t DistanceIndex::distance(EntityId u, EntityId v) const {
    auto r = row(u);
    auto it = std::lower_bound(r.ids.begin(), r.ids.end(), v);
    if (it == r.ids.end() || *it != v) return kUnreachable;
    return r.hops[static_cast<std::size_t>(it - r.ids.begin())];
}

namespace {

// BFS from src truncated at depth l_max; appends (id, hop) pairs sorted by id.
void bfs_row(const KnowledgeGraph& kg, EntityId src, std::uint32_t l_max,
             std::vector<std::uint32_t>& stamp, std::uint32_t epoch,
             std::vector<EntityId>& queue, std::vector<EntityId>& out_ids,
             std::vector<std::uint8_t>& out_hops) {
    queue.clear();
    queue.push_back(src);
    stamp[src] = epoch;
    std::size_t begin = 0, level_end = 1;
    std::uint8_t depth = 0;
    std::vector<std::pair<EntityId, std::uint8_t>> found;
    found.emplace_back(src, 0);
    while (begin < queue.size() && depth < l_max) {
        ++depth;
        for (; begin < level_end; ++begin) {
            EntityId u = queue[begin];
            for (const Edge& e : kg.neighbors(u)) {
                if (stamp[e.dst] == epoch) continue;
                stamp[e.dst] = epoch;
                queue.push_back(e.dst);
                found.emplace_back(e.dst, depth);
            }
        }
        level_end = queue.size();
    }
    std::sort(found.begin(), found.end());
    for (const auto& [id, hop] : found) {
        out_ids.push_back(id);
        out_hops.push_back(hop);
    }
}

}  // namespace

DistanceIndex build_distance_index(const KnowledgeGraph& kg, std::uint32_t l_max,
                                   std::uint32_t threads) {
    if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    const std::uint32_t n = kg.num_entities();
    DistanceIndex index;
    index.l_max_ = l_max;
    index.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);

    if (threads <= 1 || n < 256) {
        std::vector<std::uint32_t> stamp(n, 0);
        std::vector<EntityId> queue;
        for (EntityId u = 0; u < n; ++u) {
            bfs_row(kg, u, l_max, stamp, u + 1, queue, index.ids_, index.hops_);
            index.offsets_[u + 1] = index.ids_.size();
        }
        return index;
    }

    // Per-entity rows are independent; workers fill disjoint chunks that are
    // concatenated in entity order, so the result matches the serial build.
    const std::uint32_t nchunks = threads;
    std::vector<std::vector<EntityId>> chunk_ids(nchunks);
    std::vector<std::vector<std::uint8_t>> chunk_hops(nchunks);
    std::vector<std::vector<std::uint64_t>> chunk_sizes(nchunks);
    const std::uint32_t per = (n + nchunks - 1) / nchunks;
    std::vector<std::thread> workers;
    for (std::uint32_t c = 0; c < nchunks; ++c) {
        workers.emplace_back([&, c] {
            EntityId lo = c * per, hi = std::min(n, (c + 1) * per);
            std::vector<std::uint32_t> stamp(n, 0);
            std::vector<EntityId> queue;
            for (EntityId u = lo; u < hi; ++u) {
                bfs_row(kg, u, l_max, stamp, u - lo + 1, queue, chunk_ids[c], chunk_hops[c]);
                chunk_sizes[c].push_back(chunk_ids[c].size());
            }
        });
    }
    for (auto& w : workers) w.join();
    for (std::uint32_t c = 0; c < nchunks; ++c) {
        EntityId lo = c * per, hi = std::min(n, (c + 1) * per);
        for (EntityId u = lo; u < hi; ++u)
            index.offsets_[u + 1] = index.offsets_[lo] + chunk_sizes[c][u - lo];
        index.ids_.insert(index.ids_.end(), chunk_ids[c].begin(), chunk_ids[c].end());
        index.hops_.insert(index.hops_.end(), chunk_hops[c].begin(), chunk_hops[c].end());
    }
    return index;
}

void DistanceIndex::save(const std::filesystem::path& path) const {
    ArtifactHeader h;
    h.kind = "kgr.dist";
    h.set_u64("version", 1);
    h.set_u64("l_max", l_max_);
    h.set_u64("entities", num_entities());
    GzLineWriter w(path);
    std::string head = header_to_text(h);
    if (!head.empty() && head.back() == '\n') head.pop_back();
    w.write(head);
    // one direction only; symmetry and the zero diagonal are implicit
    std::string line;
    for (EntityId u = 0; u < num_entities(); ++u) {
        auto r = row(u);
        for (std::size_t i = 0; i < r.ids.size(); ++i) {
            if (r.ids[i] <= u) continue;
            line = std::to_string(u);
            line += '\t';
            line += std::to_string(r.ids[i]);
            line += '\t';
            line += std::to_string(r.hops[i]);
            w.write(line);
        }
    }
    w.close();
}

DistanceIndex DistanceIndex::load(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    ArtifactHeader h = read_artifact_gz(path, lines);
    if (h.kind != "kgr.dist") throw std::runtime_error("not a distance index: " + path.string());
    DistanceIndex index;
    index.l_max_ = static_cast<std::uint32_t>(h.require_u64("l_max"));
    const auto n = static_cast<std::uint32_t>(h.require_u64("entities"));

    auto parse = [](const std::string& line, EntityId& u, EntityId& v, unsigned& d) {
        const char* s = line.data();
        const char* end = s + line.size();
        auto r1 = std::from_chars(s, end, u);
        if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != '\t') return false;
        auto r2 = std::from_chars(r1.ptr + 1, end, v);
        if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != '\t') return false;
        auto r3 = std::from_chars(r2.ptr + 1, end, d);
        return r3.ec == std::errc{} && r3.ptr == end;
    };

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    for (EntityId u = 0; u < n; ++u) counts[u + 1] = 1;  // self entries
    EntityId u, v;
    unsigned d;
    for (const auto& line : lines) {
        if (!parse(line, u, v, d) || u >= n || v >= n)
            throw std::runtime_error("corrupt distance index line: " + line);
        ++counts[u + 1];
        ++counts[v + 1];
    }
    index.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (EntityId i = 0; i < n; ++i) index.offsets_[i + 1] = index.offsets_[i] + counts[i + 1];
    index.ids_.resize(index.offsets_[n]);
    index.hops_.resize(index.offsets_[n]);
    std::vector<std::uint64_t> cursor(index.offsets_.begin(), index.offsets_.end() - 1);
    auto put = [&](EntityId a, EntityId b, std::uint8_t hop) {
        index.ids_[cursor[a]] = b;
        index.hops_[cursor[a]] = hop;
        ++cursor[a];
    };
    for (EntityId i = 0; i < n; ++i) put(i, i, 0);
    for (const auto& line : lines) {
        parse(line, u, v, d);
        put(u, v, static_cast<std::uint8_t>(d));
        put(v, u, static_cast<std::uint8_t>(d));
    }
    // rows must be sorted by id for binary search
    for (EntityId i = 0; i < n; ++i) {
        auto lo = index.offsets_[i], hi = index.offsets_[i + 1];
        std::vector<std::pair<EntityId, std::uint8_t>> tmp;
        tmp.reserve(hi - lo);
        for (auto k = lo; k < hi; ++k) tmp.emplace_back(index.ids_[k], index.hops_[k]);
        std::sort(tmp.begin(), tmp.end());
        for (auto k = lo; k < hi; ++k) {
            index.ids_[k] = tmp[k - lo].first;
            index.hops_[k] = tmp[k - lo].second;
        }
    }
    return index;
}

}  // namespace kgr
