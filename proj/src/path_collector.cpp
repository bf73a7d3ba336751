#include "kgr/path_collector.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <thread>

namespace kgr {

std::vector<Triple> directed_train_instances(const KnowledgeGraph& kg) {
    std::vector<Triple> out;
    out.reserve(kg.unique_train_triples().size() * 2);
    for (const Triple& t : kg.unique_train_triples()) {
        if (t.head == t.tail) continue;  // a zero-length path is not a usable rule
        out.push_back(t);
        out.push_back({t.tail, inverse_of(t.relation), t.head});
    }
    return out;
}

namespace {

// Scratch reused across triples of one worker. The dense distance-to-target
// array is refreshed per target via an epoch stamp instead of a memset.
struct DfsScratch {
    std::vector<std::uint8_t> dist_to_t;
    std::vector<std::uint32_t> dist_stamp;
    std::uint32_t dist_epoch = 0;
    EntityId dist_target = kInvalidId;
    std::vector<char> on_path;
    std::vector<RelationId> path;
    std::vector<std::vector<std::pair<std::uint8_t, Edge>>> candidates;  // per depth

    explicit DfsScratch(std::uint32_t n, std::uint32_t l_max)
        : dist_to_t(n, kUnreachable), dist_stamp(n, 0), on_path(n, 0), candidates(l_max + 1) {}

    void load_target(const DistanceIndex& index, EntityId t) {
        if (dist_target == t) return;
        ++dist_epoch;
        dist_target = t;
        auto row = index.row(t);  // symmetric: dist[v][t] == dist[t][v]
        for (std::size_t i = 0; i < row.ids.size(); ++i) {
            dist_to_t[row.ids[i]] = row.hops[i];
            dist_stamp[row.ids[i]] = dist_epoch;
        }
    }

    std::uint8_t dist(EntityId v) const {
        return dist_stamp[v] == dist_epoch ? dist_to_t[v] : kUnreachable;
    }
};

struct DfsStats {
    std::uint64_t states_pushed = 0;
};

void dfs_collect(const KnowledgeGraph& kg, const Triple& inst, const CollectOptions& opts,
                 DfsScratch& scratch, EntityId u,
                 const std::function<void(const RelationPath&)>& sink, DfsStats& stats) {
    ++stats.states_pushed;
    if (u == inst.tail) {
        if (!scratch.path.empty()) sink(scratch.path);
        return;
    }
    const auto len = static_cast<std::uint32_t>(scratch.path.size());
    if (len >= opts.l_max) return;
    const int budget = static_cast<int>(opts.l_max) - static_cast<int>(len) - 1;

    auto& cands = scratch.candidates[len];
    cands.clear();
    const RelationId inv_rel = inverse_of(inst.relation);
    for (const Edge& e : kg.neighbors(u)) {
        if (scratch.on_path[e.dst]) continue;
        if (opts.exclude_target_edge) {
            if (u == inst.head && e.rel == inst.relation && e.dst == inst.tail) continue;
            if (u == inst.tail && e.rel == inv_rel && e.dst == inst.head) continue;
        }
        std::uint8_t d = scratch.dist(e.dst);
        if (d == kUnreachable || static_cast<int>(d) > budget) continue;
        cands.emplace_back(d, e);
    }
    // nearest to the target first; stable, so ties keep adjacency order
    std::stable_sort(cands.begin(), cands.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (cands.size() > opts.branch) cands.resize(opts.branch);

    for (const auto& [d, e] : cands) {
        scratch.path.push_back(e.rel);
        scratch.on_path[e.dst] = 1;
        dfs_collect(kg, inst, opts, scratch, e.dst, sink, stats);
        scratch.on_path[e.dst] = 0;
        scratch.path.pop_back();
    }
}

DfsStats run_one_triple(const KnowledgeGraph& kg, const DistanceIndex& index, const Triple& inst,
                        const CollectOptions& opts, DfsScratch& scratch,
                        const std::function<void(const RelationPath&)>& sink) {
    DfsStats stats;
    scratch.load_target(index, inst.tail);
    scratch.path.clear();
    scratch.on_path[inst.head] = 1;
    dfs_collect(kg, inst, opts, scratch, inst.head, sink, stats);
    scratch.on_path[inst.head] = 0;
    return stats;
}

void validate(const KnowledgeGraph& kg, const DistanceIndex& index, const CollectOptions& opts) {
    if (opts.l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    if (opts.branch < 1) throw std::invalid_argument("branch must be >= 1");
    if (index.l_max() != opts.l_max)
        throw std::invalid_argument("distance index was built with a different l_max");
    if (index.num_entities() != kg.num_entities())
        throw std::invalid_argument("distance index does not match this graph");
}

}  // namespace

PathStore collect_paths(const KnowledgeGraph& kg, const DistanceIndex& index,
                        const CollectOptions& opts) {
    validate(kg, index, opts);
    auto instances = directed_train_instances(kg);

    auto run_range = [&](std::size_t lo, std::size_t hi, PathStore& store) {
        DfsScratch scratch(kg.num_entities(), opts.l_max);
        for (std::size_t i = lo; i < hi; ++i) {
            const Triple& inst = instances[i];
            TypeId c = kg.entity_type(inst.head);
            run_one_triple(kg, index, inst, opts, scratch,
                           [&](const RelationPath& p) { store.add(c, inst.relation, p); });
        }
    };

    if (opts.threads <= 1 || instances.size() < 64) {
        PathStore store;
        run_range(0, instances.size(), store);
        return store;
    }
    std::uint32_t nthreads = opts.threads;
    std::vector<PathStore> partial(nthreads);
    std::vector<std::thread> workers;
    std::size_t per = (instances.size() + nthreads - 1) / nthreads;
    for (std::uint32_t c = 0; c < nthreads; ++c) {
        std::size_t lo = std::min(instances.size(), c * per);
        std::size_t hi = std::min(instances.size(), (c + 1) * per);
        workers.emplace_back([&, lo, hi, c] { run_range(lo, hi, partial[c]); });
    }
    for (auto& w : workers) w.join();
    PathStore store;
    for (auto& p : partial) store.merge(p);  // additive counts: order-independent
    return store;
}

void collect_paths_for_triple(const KnowledgeGraph& kg, const DistanceIndex& index,
                              const Triple& triple, const CollectOptions& opts,
                              const std::function<void(const RelationPath&)>& sink) {
    validate(kg, index, opts);
    if (triple.head == triple.tail) return;
    DfsScratch scratch(kg.num_entities(), opts.l_max);
    run_one_triple(kg, index, triple, opts, scratch, sink);
}

std::uint64_t dfs_state_count(const KnowledgeGraph& kg, const DistanceIndex& index,
                              const Triple& triple, const CollectOptions& opts) {
    validate(kg, index, opts);
    if (triple.head == triple.tail) return 0;
    DfsScratch scratch(kg.num_entities(), opts.l_max);
    auto stats = run_one_triple(kg, index, triple, opts, scratch, [](const RelationPath&) {});
    return stats.states_pushed;
}

PathStore collect_paths_random_walk(const KnowledgeGraph& kg, const RandomWalkOptions& opts) {
    if (opts.l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    if (opts.walks_per_triple < 1) throw std::invalid_argument("walks_per_triple must be >= 1");
    auto instances = directed_train_instances(kg);

    auto run_range = [&](std::size_t lo, std::size_t hi, PathStore& store) {
        RelationPath path;
        for (std::size_t i = lo; i < hi; ++i) {
            const Triple& inst = instances[i];
            TypeId c = kg.entity_type(inst.head);
            const RelationId inv_rel = inverse_of(inst.relation);
            // per-instance stream so the result is independent of threading
            std::mt19937_64 rng(hash_combine(opts.seed, i) | 1ull);
            for (std::uint32_t w = 0; w < opts.walks_per_triple; ++w) {
                EntityId cur = inst.head;
                path.clear();
                for (std::uint32_t hop = 0; hop < opts.l_max; ++hop) {
                    auto edges = kg.neighbors(cur);
                    std::size_t masked = edges.size();
                    if (opts.exclude_target_edge && (cur == inst.head || cur == inst.tail)) {
                        for (std::size_t k = 0; k < edges.size(); ++k) {
                            const Edge& e = edges[k];
                            bool fwd = cur == inst.head && e.rel == inst.relation &&
                                       e.dst == inst.tail;
                            bool bwd = cur == inst.tail && e.rel == inv_rel &&
                                       e.dst == inst.head;
                            if (fwd || bwd) {
                                masked = k;
                                break;
                            }
                        }
                    }
                    std::size_t n = edges.size() - (masked < edges.size() ? 1 : 0);
                    if (n == 0) break;
                    std::size_t pick =
                        std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
                    if (masked < edges.size() && pick >= masked) ++pick;
                    path.push_back(edges[pick].rel);
                    cur = edges[pick].dst;
                    if (cur == inst.tail) {
                        store.add(c, inst.relation, path);
                        break;
                    }
                }
            }
        }
    };

    if (opts.threads <= 1 || instances.size() < 64) {
        PathStore store;
        run_range(0, instances.size(), store);
        return store;
    }
    std::uint32_t nthreads = opts.threads;
    std::vector<PathStore> partial(nthreads);
    std::vector<std::thread> workers;
    std::size_t per = (instances.size() + nthreads - 1) / nthreads;
    for (std::uint32_t c = 0; c < nthreads; ++c) {
        std::size_t lo = std::min(instances.size(), c * per);
        std::size_t hi = std::min(instances.size(), (c + 1) * per);
        workers.emplace_back([&, lo, hi, c] { run_range(lo, hi, partial[c]); });
    }
    for (auto& w : workers) w.join();
    PathStore store;
    for (auto& p : partial) store.merge(p);
    return store;
}

}  // namespace kgr
