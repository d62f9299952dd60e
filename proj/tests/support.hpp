#pragma once

// Graph builders shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "nib/graph.hpp"
#include "nib/rng.hpp"

namespace nib::testing {

using Pairs = std::vector<std::pair<NodeId, NodeId>>;

inline WeightedGraph from_pairs(std::size_t n, const Pairs& pairs, double w = 1.0) {
    std::vector<Edge> edges;
    for (auto [u, v] : pairs) edges.push_back({u, v, w});
    return WeightedGraph(n, edges);
}

inline WeightedGraph complete(std::size_t n) {
    Pairs pairs;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    return from_pairs(n, pairs);
}

inline WeightedGraph cycle(std::size_t n) {
    Pairs pairs;
    for (NodeId u = 0; u < n; ++u) pairs.emplace_back(u, static_cast<NodeId>((u + 1) % n));
    return from_pairs(n, pairs);
}

inline WeightedGraph path(std::size_t n) {
    Pairs pairs;
    for (NodeId u = 0; u + 1 < n; ++u) pairs.emplace_back(u, u + 1);
    return from_pairs(n, pairs);
}

inline WeightedGraph star(std::size_t leaves) {
    Pairs pairs;
    for (NodeId v = 1; v <= leaves; ++v) pairs.emplace_back(0, v);
    return from_pairs(leaves + 1, pairs);
}

/// The 4-node example matrix: all ones off the diagonal except between the
/// last two nodes.
inline WeightedGraph four_node_example() { return from_pairs(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}); }

/// `count` copies of K_k; the last node of copy c is joined by one edge to the
/// first node of copy c + 1 (cyclically).
inline WeightedGraph clique_ring(std::size_t count, std::size_t k) {
    Pairs pairs;
    for (std::size_t c = 0; c < count; ++c) {
        auto base = static_cast<NodeId>(c * k);
        for (NodeId a = 0; a < k; ++a)
            for (NodeId b = a + 1; b < k; ++b) pairs.emplace_back(base + a, base + b);
        pairs.emplace_back(base + static_cast<NodeId>(k - 1), static_cast<NodeId>(((c + 1) % count) * k));
    }
    return from_pairs(count * k, pairs);
}

/// `count` copies of K_k where consecutive copies share one vertex.
inline WeightedGraph clique_chain(std::size_t count, std::size_t k) {
    Pairs pairs;
    for (std::size_t c = 0; c < count; ++c) {
        auto base = static_cast<NodeId>(c * (k - 1));
        for (NodeId a = 0; a < k; ++a)
            for (NodeId b = a + 1; b < k; ++b) pairs.emplace_back(base + a, base + b);
    }
    return from_pairs(count * (k - 1) + 1, pairs);
}

/// Same edges, weights drawn uniformly from [-1, 1).
inline WeightedGraph with_random_weights(const WeightedGraph& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Edge> edges = g.edges();
    for (Edge& e : edges) {
        do {
            e.w = 2.0 * rng.uniform() - 1.0;
        } while (e.w == 0.0);
    }
    return WeightedGraph(g.node_count(), edges);
}

/// One representative per isomorphism class of connected simple graphs with
/// 2 <= n <= max_n nodes and at most max_edges edges.
inline std::vector<WeightedGraph> small_connected_graphs(std::size_t max_n, std::size_t max_edges) {
    std::vector<WeightedGraph> out;
    for (std::size_t n = 2; n <= max_n; ++n) {
        Pairs slots;
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = u + 1; v < n; ++v) slots.emplace_back(u, v);
        std::vector<std::vector<NodeId>> perms;
        std::vector<NodeId> perm(n);
        std::iota(perm.begin(), perm.end(), 0u);
        do perms.push_back(perm);
        while (std::next_permutation(perm.begin(), perm.end()));
        std::vector<std::vector<int>> slot_of(n, std::vector<int>(n, -1));
        for (std::size_t s = 0; s < slots.size(); ++s) {
            slot_of[slots[s].first][slots[s].second] = static_cast<int>(s);
            slot_of[slots[s].second][slots[s].first] = static_cast<int>(s);
        }
        std::set<std::uint32_t> seen;
        for (std::uint32_t mask = 1; mask < (1u << slots.size()); ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_edges) continue;
            if (static_cast<std::size_t>(__builtin_popcount(mask)) < n - 1) continue;
            std::uint32_t canon = mask;
            for (const auto& p : perms) {
                std::uint32_t image = 0;
                for (std::size_t s = 0; s < slots.size(); ++s)
                    if (mask >> s & 1u) image |= 1u << slot_of[p[slots[s].first]][p[slots[s].second]];
                canon = std::min(canon, image);
            }
            if (!seen.insert(canon).second) continue;
            Pairs pairs;
            for (std::size_t s = 0; s < slots.size(); ++s)
                if (canon >> s & 1u) pairs.push_back(slots[s]);
            WeightedGraph g = from_pairs(n, pairs);
            if (g.connected()) out.push_back(std::move(g));
        }
    }
    return out;
}

}  // namespace nib::testing
