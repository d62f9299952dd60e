#include "nib/neighborhoods.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <numeric>
#include <random>

#include "nib/errors.hpp"
#include "nib/rng.hpp"

namespace nib {

namespace {

template <class T>
std::vector<T> set_union_of(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <class T>
std::vector<T> set_minus(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Depth-first enumeration of simple paths of length <= r leaving `start`,
// never entering `center`; paths that end on a neighbor of center with a
// larger id than start are merged into `nodes`/`edges`.
class PathCollector {
public:
    PathCollector(const WeightedGraph& g, int r, NodeId center, std::vector<char> is_neighbor)
        : g_(g), r_(r), center_(center), is_neighbor_(std::move(is_neighbor)),
          on_path_(g.node_count(), 0) {}

    void collect_from(NodeId start, std::vector<NodeId>& nodes, std::vector<EdgeId>& edges) {
        start_ = start;
        nodes_ = &nodes;
        edges_ = &edges;
        on_path_[start] = 1;
        path_nodes_ = {start};
        path_edges_.clear();
        extend(start);
        on_path_[start] = 0;
    }

private:
    void extend(NodeId at) {
        if (static_cast<int>(path_edges_.size()) >= r_) return;
        for (const Adjacent& a : g_.neighbors(at)) {
            if (a.node == center_ || on_path_[a.node]) continue;
            on_path_[a.node] = 1;
            path_nodes_.push_back(a.node);
            path_edges_.push_back(a.edge);
            if (is_neighbor_[a.node] && a.node > start_) {
                nodes_->insert(nodes_->end(), path_nodes_.begin(), path_nodes_.end());
                edges_->insert(edges_->end(), path_edges_.begin(), path_edges_.end());
            }
            extend(a.node);
            path_edges_.pop_back();
            path_nodes_.pop_back();
            on_path_[a.node] = 0;
        }
    }

    const WeightedGraph& g_;
    int r_;
    NodeId center_;
    std::vector<char> is_neighbor_;
    std::vector<char> on_path_;
    NodeId start_ = 0;
    std::vector<NodeId>* nodes_ = nullptr;
    std::vector<EdgeId>* edges_ = nullptr;
    std::vector<NodeId> path_nodes_;
    std::vector<EdgeId> path_edges_;
};

// Union-find with path halving and union by size.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace

bool Neighborhood::contains_node(NodeId v) const {
    return std::binary_search(nodes.begin(), nodes.end(), v);
}

bool Neighborhood::contains_edge(EdgeId e) const {
    return std::binary_search(edges.begin(), edges.end(), e);
}

Neighborhood intersect(const Neighborhood& a, const Neighborhood& b) {
    Neighborhood out;
    std::set_intersection(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end(),
                          std::back_inserter(out.nodes));
    std::set_intersection(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
                          std::back_inserter(out.edges));
    return out;
}

Neighborhood build_primary(const WeightedGraph& g, int r, NodeId i) {
    if (i >= g.node_count()) throw InputError("node " + std::to_string(i) + " out of range");
    if (r < 0) throw InputError("loop bound must be nonnegative");
    Neighborhood nb;
    nb.nodes.push_back(i);
    std::vector<char> is_neighbor(g.node_count(), 0);
    for (const Adjacent& a : g.neighbors(i)) {
        nb.nodes.push_back(a.node);
        nb.edges.push_back(a.edge);
        is_neighbor[a.node] = 1;
    }
    if (r > 0) {
        PathCollector collector(g, r, i, is_neighbor);
        for (const Adjacent& a : g.neighbors(i)) collector.collect_from(a.node, nb.nodes, nb.edges);
    }
    sort_unique(nb.nodes);
    sort_unique(nb.edges);
    return nb;
}

NeighborhoodSystem::NeighborhoodSystem(const WeightedGraph& g, int r) : graph_(&g), r_(r) {
    if (r < 0) throw InputError("loop bound must be nonnegative");
    const std::size_t n = g.node_count();
    primary_.reserve(n);
    for (NodeId i = 0; i < n; ++i) primary_.push_back(build_primary(g, r, i));

    std::map<std::pair<std::vector<NodeId>, std::vector<EdgeId>>, std::size_t> ids;
    std::map<std::pair<NodeId, NodeId>, std::size_t> by_pair;
    pair_ids_.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j : primary_[i].nodes) {
            if (j == i) continue;
            auto key = std::minmax(i, j);
            auto cached = by_pair.find(key);
            std::size_t id;
            if (cached != by_pair.end()) {
                id = cached->second;
            } else {
                Neighborhood inter = intersect(primary_[i], primary_[j]);
                auto [it, inserted] = ids.emplace(std::make_pair(inter.nodes, inter.edges), intersections_.size());
                if (inserted) intersections_.push_back(std::move(inter));
                id = it->second;
                by_pair.emplace(key, id);
            }
            pair_ids_[i].emplace_back(j, id);
        }
    }
}

std::vector<NodeId> NeighborhoodSystem::partners(NodeId i) const {
    std::vector<NodeId> out;
    out.reserve(pair_ids_.at(i).size());
    for (const auto& [j, id] : pair_ids_[i]) out.push_back(j);
    return out;
}

std::optional<std::size_t> NeighborhoodSystem::find_intersection(NodeId i, NodeId j) const {
    if (i >= pair_ids_.size()) return std::nullopt;
    const auto& row = pair_ids_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& entry, NodeId x) { return entry.first < x; });
    if (it == row.end() || it->first != j) return std::nullopt;
    return it->second;
}

std::size_t NeighborhoodSystem::intersection_id(NodeId i, NodeId j) const {
    auto id = find_intersection(i, j);
    if (!id)
        throw InputError("node " + std::to_string(j) + " is not in the neighborhood of " + std::to_string(i));
    return *id;
}

Neighborhood NeighborhoodSystem::difference(NodeId i, NodeId j) const {
    intersection_id(i, j);  // validates the pair
    Neighborhood out;
    out.nodes.push_back(i);
    out.edges = set_minus(primary_[i].edges, primary_[j].edges);
    for (EdgeId e : out.edges) {
        out.nodes.push_back(graph_->edges()[e].u);
        out.nodes.push_back(graph_->edges()[e].v);
    }
    sort_unique(out.nodes);
    return out;
}

Neighborhood build_intersection(const WeightedGraph& g, int r, NodeId i, NodeId j) {
    Neighborhood ni = build_primary(g, r, i);
    if (j == i || !ni.contains_node(j))
        throw InputError("node " + std::to_string(j) + " is not in the neighborhood of " + std::to_string(i));
    return intersect(ni, build_primary(g, r, j));
}

Neighborhood build_difference(const WeightedGraph& g, int r, NodeId i, NodeId j) {
    Neighborhood ni = build_primary(g, r, i);
    if (j == i || !ni.contains_node(j))
        throw InputError("node " + std::to_string(j) + " is not in the neighborhood of " + std::to_string(i));
    Neighborhood nj = build_primary(g, r, j);
    Neighborhood out;
    out.nodes.push_back(i);
    out.edges = set_minus(ni.edges, nj.edges);
    for (EdgeId e : out.edges) {
        out.nodes.push_back(g.edges()[e].u);
        out.nodes.push_back(g.edges()[e].v);
    }
    sort_unique(out.nodes);
    return out;
}

EquivalenceClassing classify(const NeighborhoodSystem& system) {
    const WeightedGraph& g = system.graph();
    const auto& classes = system.intersections();
    EquivalenceClassing out;
    out.class_count = classes.size();
    out.membership.resize(g.node_count());
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (NodeId v : classes[c].nodes) out.membership[v].push_back(c);

    std::size_t next_id = classes.size();
    for (const auto& [k, w] : g.self_loops()) out.trivial_classes.emplace_back(k, next_id++);

    out.condition_holds = true;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& nodes = classes[c].nodes;
        for (NodeId k : nodes) {
            for (NodeId q : nodes) {
                if (k == q) continue;
                auto id = system.find_intersection(k, q);
                if (!id || *id != c) {
                    out.condition_holds = false;
                    out.witnesses.push_back({c, k, q});
                }
            }
        }
    }

    // Pivots count trivial self-loop classes as well.
    std::vector<std::vector<std::size_t>> all_membership = out.membership;
    for (const auto& [k, id] : out.trivial_classes) all_membership[k].push_back(id);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (all_membership[v].size() >= 2) {
            out.pivots.push_back(v);
            out.hyperedges.push_back(all_membership[v]);
        }
    }
    out.acyclic = is_hypernetwork_acyclic(out);
    out.loop_bound_fulfilled = out.condition_holds && out.acyclic;
    return out;
}

bool is_hypernetwork_acyclic(const EquivalenceClassing& classing) {
    std::size_t class_total = classing.class_count + classing.trivial_classes.size();
    DisjointSets sets(class_total + classing.pivots.size());
    for (std::size_t t = 0; t < classing.pivots.size(); ++t) {
        for (std::size_t c : classing.hyperedges[t]) {
            if (!sets.unite(c, class_total + t)) return false;
        }
    }
    return true;
}

const ScheduleStep& UnboundedSchedule::target_step(std::size_t target, NodeId k, NodeId q) const {
    for (const ScheduleStep& s : target_steps.at(target))
        if (s.k == k && s.q == q) return s;
    throw InputError("pair (" + std::to_string(k) + ", " + std::to_string(q) + ") is not scheduled for target " +
                     std::to_string(target));
}

const ScheduleStep& UnboundedSchedule::node_step(NodeId i, NodeId j) const {
    for (const ScheduleStep& s : node_steps.at(i))
        if (s.q == j) return s;
    throw InputError("node " + std::to_string(j) + " is not scheduled for node " + std::to_string(i));
}

UnboundedSchedule build_schedules(const NeighborhoodSystem& system, std::optional<std::uint64_t> seed) {
    const auto& inters = system.intersections();
    const std::size_t n = system.graph().node_count();
    UnboundedSchedule out;
    out.seed = seed;

    auto maybe_shuffle = [&](std::vector<std::pair<NodeId, NodeId>>& order, std::uint64_t stream) {
        if (!seed) return;
        SplitMix64 rng(derive_seed(*seed, stream));
        std::shuffle(order.begin(), order.end(), rng);
    };

    out.target_steps.resize(inters.size());
    for (std::size_t t = 0; t < inters.size(); ++t) {
        std::vector<std::pair<NodeId, NodeId>> order;
        for (NodeId k : inters[t].nodes)
            for (NodeId q : system.partners(k)) order.emplace_back(k, q);
        maybe_shuffle(order, t);
        std::vector<EdgeId> current = inters[t].edges;
        for (auto [k, q] : order) {
            const auto& add = system.intersection(k, q).edges;
            ScheduleStep step{k, q, current, set_minus(add, current)};
            current = set_union_of(current, add);
            out.target_steps[t].push_back(std::move(step));
        }
    }

    out.node_steps.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        std::vector<std::pair<NodeId, NodeId>> order;
        for (NodeId j : system.partners(i)) order.emplace_back(i, j);
        maybe_shuffle(order, inters.size() + i);
        std::vector<EdgeId> current;
        for (auto [k, j] : order) {
            const auto& add = system.intersection(i, j).edges;
            ScheduleStep step{i, j, current, set_minus(add, current)};
            current = set_union_of(current, add);
            out.node_steps[i].push_back(std::move(step));
        }
    }
    return out;
}

std::vector<NeighborhoodSizes> neighborhood_size_report(const NeighborhoodSystem& system) {
    const WeightedGraph& g = system.graph();
    std::vector<NeighborhoodSizes> out;
    for (NodeId i = 0; i < g.node_count(); ++i) {
        const Neighborhood& ni = system.primary(i);
        for (NodeId j : system.partners(i)) {
            const Neighborhood& inter = system.intersection(i, j);
            // N_{j \ i}: node j plus the edges of N_j missing from N_i.
            std::vector<EdgeId> diff_edges = set_minus(system.primary(j).edges, ni.edges);
            std::vector<NodeId> diff_nodes{j};
            for (EdgeId e : diff_edges) {
                diff_nodes.push_back(g.edges()[e].u);
                diff_nodes.push_back(g.edges()[e].v);
            }
            sort_unique(diff_nodes);
            out.push_back({i, j, ni.nodes.size(), ni.edges.size(), inter.nodes.size(), inter.edges.size(),
                           diff_nodes.size(), diff_edges.size()});
        }
    }
    return out;
}

}  // namespace nib
