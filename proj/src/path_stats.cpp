#include "kgr/path_stats.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "kgr/io_util.hpp"
#include "kgr/path_collector.hpp"
#include "kgr/reasoner.hpp"

namespace kgr {

bool EdgeMask::masks(EntityId e0, RelationId rel, EntityId e1) const {
    if (rel == relation && e0 == head)
        return std::binary_search(tails.begin(), tails.end(), e1);
    if (rel == inverse_of(relation) && e1 == head)
        return std::binary_search(tails.begin(), tails.end(), e0);
    return false;
}

namespace {

// Frontier = list of (entity, walk count); the dense accumulator is reused
// across expansions via an epoch stamp.
struct Frontier {
    std::vector<std::pair<EntityId, std::uint64_t>> items;
};

struct TraversalScratch {
    std::vector<std::uint64_t> acc;
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
    std::vector<Frontier> levels;

    explicit TraversalScratch(std::uint32_t n, std::uint32_t depth)
        : acc(n, 0), stamp(n, 0), levels(depth + 1) {}

    // next += cur expanded along `rel`; returns false when the result is empty
    bool expand(const KnowledgeGraph& kg, const Frontier& cur, RelationId rel,
                const EdgeMask* mask, Frontier& next) {
        ++epoch;
        next.items.clear();
        for (const auto& [e0, c] : cur.items) {
            for (const Edge& e : kg.neighbors_via(e0, rel)) {
                if (mask && mask->masks(e0, rel, e.dst)) continue;
                if (stamp[e.dst] != epoch) {
                    stamp[e.dst] = epoch;
                    acc[e.dst] = 0;
                    next.items.emplace_back(e.dst, 0);
                }
                acc[e.dst] += c;
            }
        }
        for (auto& [ent, c] : next.items) c = acc[ent];
        return !next.items.empty();
    }
};

}  // namespace

ReachSet traverse_path(const KnowledgeGraph& kg, EntityId h, const RelationPath& p,
                       const EdgeMask* mask) {
    TraversalScratch scratch(kg.num_entities(), static_cast<std::uint32_t>(p.size()));
    scratch.levels[0].items = {{h, 1}};
    std::size_t depth = 0;
    for (RelationId rel : p) {
        if (!scratch.expand(kg, scratch.levels[depth], rel, mask, scratch.levels[depth + 1]))
            return {};
        ++depth;
    }
    ReachSet out;
    out.reserve(scratch.levels[depth].items.size());
    for (const auto& [e, c] : scratch.levels[depth].items) out.emplace(e, c);
    return out;
}

// ---------------------------------------------------------------------------
// Prefix trie over a batch of paths: shared prefixes are expanded once.

namespace {

struct PathTrie {
    struct Node {
        std::vector<std::pair<RelationId, std::uint32_t>> children;  // sorted by relation
        std::int64_t terminal = -1;                                  // slot of a finished path
    };
    std::vector<Node> nodes;

    explicit PathTrie(std::span<const RelationPath* const> paths) {
        nodes.emplace_back();
        for (std::size_t slot = 0; slot < paths.size(); ++slot) {
            std::uint32_t cur = 0;
            for (RelationId rel : *paths[slot]) {
                auto& ch = nodes[cur].children;
                auto it = std::lower_bound(ch.begin(), ch.end(), rel,
                                           [](const auto& a, RelationId r) { return a.first < r; });
                if (it == ch.end() || it->first != rel) {
                    it = ch.insert(it, {rel, static_cast<std::uint32_t>(nodes.size())});
                    std::uint32_t next = it->second;
                    nodes.emplace_back();
                    cur = next;
                } else {
                    cur = it->second;
                }
            }
            nodes[cur].terminal = static_cast<std::int64_t>(slot);
        }
    }
};

// Depth-first pass over the trie carrying frontiers; calls visit(slot,
// frontier) at every terminal reachable from h.
template <typename Visit>
void traverse_trie(const KnowledgeGraph& kg, const PathTrie& trie, EntityId h,
                   const EdgeMask* mask, TraversalScratch& scratch, Visit&& visit) {
    scratch.levels[0].items = {{h, 1}};
    struct Step {
        std::uint32_t node;
        std::size_t child = 0;
    };
    std::vector<Step> stack{{0, 0}};
    std::size_t depth = 0;
    if (trie.nodes[0].terminal >= 0) visit(trie.nodes[0].terminal, scratch.levels[0]);
    while (!stack.empty()) {
        Step& top = stack.back();
        const auto& node = trie.nodes[top.node];
        if (top.child >= node.children.size()) {
            stack.pop_back();
            if (depth) --depth;
            continue;
        }
        auto [rel, next_node] = node.children[top.child++];
        if (!scratch.expand(kg, scratch.levels[depth], rel, mask, scratch.levels[depth + 1]))
            continue;
        ++depth;
        if (trie.nodes[next_node].terminal >= 0)
            visit(trie.nodes[next_node].terminal, scratch.levels[depth]);
        stack.push_back({next_node, 0});
    }
}

std::uint32_t max_depth(std::span<const RelationPath* const> paths) {
    std::size_t d = 0;
    for (const auto* p : paths) d = std::max(d, p->size());
    return static_cast<std::uint32_t>(d);
}

// Directed instances grouped by relation, preserving instance order.
std::map<RelationId, std::vector<Triple>> instances_by_relation(const KnowledgeGraph& kg) {
    std::map<RelationId, std::vector<Triple>> out;
    for (const Triple& inst : directed_train_instances(kg)) out[inst.relation].push_back(inst);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Eq. 2: per-relation path probabilities.

namespace {

struct SuccTotal {
    std::uint64_t s = 0, t = 0;
};

// All buckets of one relation merged into (path pointer, per-type bucket) view.
struct RelationWork {
    RelationId relation;
    std::vector<const Triple*> instances;
    // per entity type: the store bucket (paths live in the store registry)
    std::vector<std::pair<TypeId, const PathStore::Bucket*>> buckets;
};

void accumulate_relation_stats(const KnowledgeGraph& kg, const PathStore& store,
                               const RelationWork& work, const StatsOptions& opts,
                               std::unordered_map<std::uint32_t, SuccTotal>& acc) {
    // one trie per type bucket, built lazily
    std::unordered_map<TypeId, std::pair<PathTrie, std::vector<std::uint32_t>>> tries;
    auto trie_for = [&](TypeId c) -> std::pair<PathTrie, std::vector<std::uint32_t>>* {
        auto it = tries.find(c);
        if (it != tries.end()) return &it->second;
        const PathStore::Bucket* bucket = store.bucket(c, work.relation);
        if (!bucket) return nullptr;
        std::vector<std::uint32_t> slots;  // slot -> store path id, canonical order
        slots.reserve(bucket->size());
        for (const auto& [pid, n] : *bucket) slots.push_back(pid);
        std::sort(slots.begin(), slots.end(), [&](std::uint32_t a, std::uint32_t b) {
            return store.path(a) < store.path(b);
        });
        std::vector<const RelationPath*> paths;
        paths.reserve(slots.size());
        for (auto pid : slots) paths.push_back(&store.path(pid));
        auto [ins, ok] =
            tries.emplace(c, std::make_pair(PathTrie(paths), std::move(slots)));
        return &ins->second;
    };

    TraversalScratch scratch(kg.num_entities(), 0);

    if (opts.count_mode == CountMode::kMultiplicity) {
        for (const Triple* inst : work.instances) {
            TypeId c = kg.entity_type(inst->head);
            auto* entry = trie_for(c);
            if (!entry) continue;
            auto& [trie, slots] = *entry;
            if (scratch.levels.size() < trie.nodes.size() + 1)
                scratch.levels.resize(std::max<std::size_t>(scratch.levels.size() * 2,
                                                            trie.nodes.size() + 1));
            EntityId masked_tail[1] = {inst->tail};
            EdgeMask mask{inst->head, inst->relation, {masked_tail, 1}};
            const EdgeMask* mask_ptr = opts.exclude_target_edge ? &mask : nullptr;
            traverse_trie(kg, trie, inst->head, mask_ptr, scratch,
                          [&](std::int64_t slot, const Frontier& f) {
                              auto& st = acc[slots[static_cast<std::size_t>(slot)]];
                              for (const auto& [e, cnt] : f.items) {
                                  st.t += cnt;
                                  if (e == inst->tail) st.s += cnt;
                              }
                          });
        }
        return;
    }

    // distinct-entity mode: one traversal per (head, relation) group; a
    // reached entity counts once, success counts gold tails reached
    std::vector<std::pair<EntityId, std::vector<EntityId>>> groups;
    std::unordered_map<EntityId, std::size_t> group_of;
    for (const Triple* inst : work.instances) {
        auto [it, fresh] = group_of.try_emplace(inst->head, groups.size());
        if (fresh) groups.push_back({inst->head, {}});
        groups[it->second].second.push_back(inst->tail);
    }
    for (auto& [head, tails] : groups) {
        std::sort(tails.begin(), tails.end());
        tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
        TypeId c = kg.entity_type(head);
        auto* entry = trie_for(c);
        if (!entry) continue;
        auto& [trie, slots] = *entry;
        if (scratch.levels.size() < trie.nodes.size() + 1)
            scratch.levels.resize(std::max<std::size_t>(scratch.levels.size() * 2,
                                                        trie.nodes.size() + 1));
        EdgeMask mask{head, work.relation, {tails.data(), tails.size()}};
        const EdgeMask* mask_ptr = opts.exclude_target_edge ? &mask : nullptr;
        traverse_trie(kg, trie, head, mask_ptr, scratch,
                      [&](std::int64_t slot, const Frontier& f) {
                          auto& st = acc[slots[static_cast<std::size_t>(slot)]];
                          st.t += f.items.size();
                          for (const auto& [e, cnt] : f.items)
                              if (std::binary_search(tails.begin(), tails.end(), e)) ++st.s;
                      });
    }
}

}  // namespace

RelationPathStats compute_path_probabilities(const KnowledgeGraph& kg, const PathStore& store,
                                             const StatsOptions& opts) {
    auto grouped = instances_by_relation(kg);
    std::vector<RelationWork> work;
    for (auto& [rel, insts] : grouped) {
        RelationWork w;
        w.relation = rel;
        for (const Triple& t : insts) w.instances.push_back(&t);
        work.push_back(std::move(w));
    }

    std::vector<std::unordered_map<std::uint32_t, SuccTotal>> results(work.size());
    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            accumulate_relation_stats(kg, store, work[i], opts, results[i]);
    };
    if (opts.threads <= 1 || work.size() < 2) {
        run_range(0, work.size());
    } else {
        std::vector<std::thread> workers;
        std::size_t per = (work.size() + opts.threads - 1) / opts.threads;
        for (std::uint32_t c = 0; c < opts.threads; ++c) {
            std::size_t lo = std::min(work.size(), c * per);
            std::size_t hi = std::min(work.size(), (c + 1) * per);
            if (lo < hi) workers.emplace_back([&, lo, hi] { run_range(lo, hi); });
        }
        for (auto& w : workers) w.join();
    }

    RelationPathStats stats;
    for (std::size_t i = 0; i < work.size(); ++i) {
        for (const auto& [pid, st] : results[i]) {
            if (st.t == 0 || st.s == 0) continue;  // unexecutable or never correct
            stats.add(work[i].relation, {store.path(pid), st.s, st.t});
        }
    }
    stats.sort_canonical();
    return stats;
}

// ---------------------------------------------------------------------------
// Eq. 3: joint probabilities among each relation's top-M hop-ranked paths.

JointStats compute_joint_probabilities(const KnowledgeGraph& kg, const RelationPathStats& stats,
                                       double alpha, std::uint32_t m_inter,
                                       const StatsOptions& opts) {
    if (m_inter < 2) throw std::invalid_argument("m_inter must be >= 2");
    auto grouped = instances_by_relation(kg);

    struct RelationJob {
        RelationId relation;
        const std::vector<Triple>* instances;
        const std::vector<PathStat>* paths;
    };
    std::vector<RelationJob> jobs;
    for (const auto& [rel, insts] : grouped) {
        const auto* paths = stats.for_relation(rel);
        if (paths && !paths->empty()) jobs.push_back({rel, &insts, paths});
    }

    std::vector<std::unordered_map<std::uint64_t, JointCount>> results(jobs.size());

    auto run_job = [&](std::size_t ji) {
        const RelationJob& job = jobs[ji];
        auto ranked = rank_relation_paths(*job.paths, alpha);
        const std::size_t m = std::min<std::size_t>(m_inter, ranked.size());
        if (m < 2) return;
        std::vector<const RelationPath*> pool_paths(m);
        std::vector<std::uint32_t> pool_stats_idx(m);
        for (std::size_t i = 0; i < m; ++i) {
            pool_stats_idx[i] = ranked[i].stats_index;
            pool_paths[i] = &(*job.paths)[ranked[i].stats_index].path;
        }
        PathTrie trie(pool_paths);

        // dense upper-triangle accumulators, m <= m_inter
        std::vector<std::uint32_t> jt(m * m, 0), js(m * m, 0);
        std::vector<char> exec(m), corr(m);
        std::vector<std::uint32_t> exec_list, corr_list;
        TraversalScratch scratch(kg.num_entities(),
                                 static_cast<std::uint32_t>(trie.nodes.size()));

        for (const Triple& inst : *job.instances) {
            std::fill(exec.begin(), exec.end(), 0);
            std::fill(corr.begin(), corr.end(), 0);
            exec_list.clear();
            corr_list.clear();
            EntityId masked_tail[1] = {inst.tail};
            EdgeMask mask{inst.head, inst.relation, {masked_tail, 1}};
            const EdgeMask* mask_ptr = opts.exclude_target_edge ? &mask : nullptr;
            traverse_trie(kg, trie, inst.head, mask_ptr, scratch,
                          [&](std::int64_t slot, const Frontier& f) {
                              auto s = static_cast<std::size_t>(slot);
                              exec[s] = 1;
                              exec_list.push_back(static_cast<std::uint32_t>(s));
                              for (const auto& [e, cnt] : f.items)
                                  if (e == inst.tail) {
                                      corr[s] = 1;
                                      corr_list.push_back(static_cast<std::uint32_t>(s));
                                      break;
                                  }
                          });
            std::sort(exec_list.begin(), exec_list.end());
            std::sort(corr_list.begin(), corr_list.end());
            for (std::size_t a = 0; a < exec_list.size(); ++a)
                for (std::size_t b = a + 1; b < exec_list.size(); ++b)
                    ++jt[exec_list[a] * m + exec_list[b]];
            for (std::size_t a = 0; a < corr_list.size(); ++a)
                for (std::size_t b = a + 1; b < corr_list.size(); ++b)
                    ++js[corr_list[a] * m + corr_list[b]];
        }

        auto& out = results[ji];
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b) {
                std::uint32_t t = jt[a * m + b];
                if (t == 0) continue;
                out[JointStats::key(pool_stats_idx[a], pool_stats_idx[b])] =
                    JointCount{js[a * m + b], t};
            }
    };

    if (opts.threads <= 1 || jobs.size() < 2) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
    } else {
        std::vector<std::thread> workers;
        std::size_t per = (jobs.size() + opts.threads - 1) / opts.threads;
        for (std::uint32_t c = 0; c < opts.threads; ++c) {
            std::size_t lo = std::min(jobs.size(), c * per);
            std::size_t hi = std::min(jobs.size(), (c + 1) * per);
            if (lo < hi)
                workers.emplace_back([&, lo, hi] {
                    for (std::size_t i = lo; i < hi; ++i) run_job(i);
                });
        }
        for (auto& w : workers) w.join();
    }

    JointStats joints;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        for (const auto& [key, count] : results[i])
            joints.add(jobs[i].relation, static_cast<std::uint32_t>(key >> 32),
                       static_cast<std::uint32_t>(key & 0xFFFFFFFFu), count);
    return joints;
}

// ---------------------------------------------------------------------------
// containers

std::uint64_t RelationPathStats::total_paths() const {
    std::uint64_t n = 0;
    for (const auto& [r, v] : by_relation_) n += v.size();
    return n;
}

void RelationPathStats::sort_canonical() {
    for (auto& [r, v] : by_relation_)
        std::sort(v.begin(), v.end(), [](const PathStat& a, const PathStat& b) {
            if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
            return a.path < b.path;
        });
    index_built_ = false;
    index_cache_.clear();
}

std::uint32_t RelationPathStats::index_of(RelationId r, const RelationPath& p) const {
    if (!index_built_) {
        PathHash hasher;
        for (const auto& [rel, v] : by_relation_)
            for (std::uint32_t i = 0; i < v.size(); ++i)
                index_cache_[hash_combine(hasher(v[i].path), rel)] = i;
        index_built_ = true;
    }
    auto it = index_cache_.find(hash_combine(PathHash{}(p), r));
    if (it == index_cache_.end()) return kInvalidId;
    const auto& v = by_relation_.at(r);
    if (it->second < v.size() && v[it->second].path == p) return it->second;
    return kInvalidId;
}

namespace {

std::string join_path_names(const RelationPath& p, const KnowledgeGraph& kg) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ',';
        out += kg.relations().name(p[i]);
    }
    return out;
}

RelationPath parse_path_names(const std::string& text, const KnowledgeGraph& kg) {
    RelationPath p;
    std::size_t start = 0;
    for (;;) {
        auto comma = text.find(',', start);
        std::string name =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        RelationId r = kg.relations().find(name);
        if (r == kInvalidId) throw std::runtime_error("unknown relation in stats file: " + name);
        p.push_back(r);
        if (comma == std::string::npos) return p;
        start = comma + 1;
    }
}

}  // namespace

void RelationPathStats::save(const std::filesystem::path& path, const KnowledgeGraph& kg,
                             const std::map<std::string, std::string>& meta) const {
    ArtifactHeader h;
    h.kind = "kgr.pathstats";
    h.set_u64("version", 1);
    for (const auto& [k, v] : meta) h.set(k, v);
    std::vector<std::string> lines;
    for (const auto& [rel, v] : by_relation_) {
        for (const PathStat& st : v) {
            std::string line = kg.relations().name(rel);
            line += '\t';
            line += join_path_names(st.path, kg);
            line += '\t';
            line += std::to_string(st.success);
            line += '\t';
            line += std::to_string(st.total);
            lines.push_back(std::move(line));
        }
    }
    write_artifact(path, h, lines);
}

RelationPathStats::Loaded RelationPathStats::load(const std::filesystem::path& path,
                                                  const KnowledgeGraph& kg) {
    std::vector<std::string> lines;
    ArtifactHeader h = read_artifact(path, lines);
    if (h.kind != "kgr.pathstats")
        throw std::runtime_error("not a path statistics file: " + path.string());
    Loaded out;
    out.meta = h.meta;
    for (const auto& line : lines) {
        auto cols = split_tabs(line);
        if (cols.size() != 4) throw std::runtime_error("corrupt stats line: " + line);
        RelationId r = kg.relations().find(cols[0]);
        if (r == kInvalidId) throw std::runtime_error("unknown relation in stats: " + cols[0]);
        out.stats.add(r, {parse_path_names(cols[1], kg), std::stoull(cols[2]),
                          std::stoull(cols[3])});
    }
    out.stats.sort_canonical();
    return out;
}

const JointCount* JointStats::find(RelationId r, std::uint32_t i, std::uint32_t j) const {
    auto it = by_relation_.find(r);
    if (it == by_relation_.end()) return nullptr;
    auto jt = it->second.find(key(i, j));
    return jt == it->second.end() ? nullptr : &jt->second;
}

std::uint64_t JointStats::total_pairs() const {
    std::uint64_t n = 0;
    for (const auto& [r, m] : by_relation_) n += m.size();
    return n;
}

void JointStats::save(const std::filesystem::path& path, const KnowledgeGraph& kg,
                      const RelationPathStats& stats,
                      const std::map<std::string, std::string>& meta) const {
    ArtifactHeader h;
    h.kind = "kgr.joints";
    h.set_u64("version", 1);
    for (const auto& [k, v] : meta) h.set(k, v);
    std::vector<std::string> lines;
    for (const auto& [rel, pairs] : by_relation_) {
        const auto* paths = stats.for_relation(rel);
        if (!paths) throw std::runtime_error("joint stats reference a relation missing from stats");
        std::vector<std::uint64_t> keys;
        keys.reserve(pairs.size());
        for (const auto& [k, v] : pairs) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        for (std::uint64_t k : keys) {
            const JointCount& c = pairs.at(k);
            auto i = static_cast<std::uint32_t>(k >> 32);
            auto j = static_cast<std::uint32_t>(k & 0xFFFFFFFFu);
            std::string line = kg.relations().name(rel);
            line += '\t';
            line += join_path_names((*paths)[i].path, kg);
            line += '\t';
            line += join_path_names((*paths)[j].path, kg);
            line += '\t';
            line += std::to_string(c.js);
            line += '\t';
            line += std::to_string(c.jt);
            lines.push_back(std::move(line));
        }
    }
    write_artifact(path, h, lines);
}

JointStats::Loaded JointStats::load(const std::filesystem::path& path, const KnowledgeGraph& kg,
                                    const RelationPathStats& stats) {
    std::vector<std::string> lines;
    ArtifactHeader h = read_artifact(path, lines);
    if (h.kind != "kgr.joints") throw std::runtime_error("not a joint stats file: " + path.string());
    Loaded out;
    out.meta = h.meta;
    for (const auto& line : lines) {
        auto cols = split_tabs(line);
        if (cols.size() != 5) throw std::runtime_error("corrupt joints line: " + line);
        RelationId r = kg.relations().find(cols[0]);
        if (r == kInvalidId) throw std::runtime_error("unknown relation in joints: " + cols[0]);
        std::uint32_t i = stats.index_of(r, parse_path_names(cols[1], kg));
        std::uint32_t j = stats.index_of(r, parse_path_names(cols[2], kg));
        if (i == kInvalidId || j == kInvalidId)
            throw std::runtime_error("joints reference a path missing from stats: " + line);
        out.joints.add(r, i, j, {std::stoull(cols[3]), std::stoull(cols[4])});
    }
    return out;
}

}  // namespace kgr
