#include "nib/local_average.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "nib/errors.hpp"
#include "nib/rng.hpp"

namespace nib {

namespace {

constexpr std::size_t kMaxEnumeratedEdges = 30;

std::uint64_t reach_mask(std::size_t node_count, std::span<const LocalEdge> edges, std::uint64_t occupied,
                         std::vector<std::uint32_t>& parent) {
    parent.resize(node_count);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!(occupied >> e & 1)) continue;
        auto a = find(edges[e].a);
        auto b = find(edges[e].b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::uint64_t mask = 0;
    for (std::size_t v = 1; v < node_count; ++v)
        if (find(static_cast<std::uint32_t>(v)) == 0) mask |= std::uint64_t{1} << (v - 1);
    return mask;
}

ReachDistribution finish(std::size_t member_count, const std::unordered_map<std::uint64_t, double>& acc,
                         bool exact, std::size_t samples) {
    ReachDistribution dist;
    dist.member_count = member_count;
    dist.exact = exact;
    dist.samples = samples;
    for (const auto& [mask, prob] : acc)
        if (prob > 0.0) dist.outcomes.emplace_back(mask, prob);
    std::sort(dist.outcomes.begin(), dist.outcomes.end());
    return dist;
}

void check_size(std::size_t member_count) {
    if (member_count > kMaxLocalMembers)
        throw InputError("local problem with " + std::to_string(member_count) + " members exceeds the limit of " +
                         std::to_string(kMaxLocalMembers));
}

}  // namespace

ReachDistribution enumerate_reach(std::size_t member_count, std::span<const LocalEdge> edges, double p) {
    check_size(member_count);
    if (edges.size() > kMaxEnumeratedEdges)
        throw InputError("too many edges for exact enumeration: " + std::to_string(edges.size()));
    const std::size_t m = edges.size();
    std::vector<double> present(m + 1), absent(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        present[k] = std::pow(p, static_cast<double>(k));
        absent[k] = std::pow(1.0 - p, static_cast<double>(k));
    }
    std::unordered_map<std::uint64_t, double> acc;
    std::vector<std::uint32_t> parent;
    const std::uint64_t configs = std::uint64_t{1} << m;
    for (std::uint64_t occ = 0; occ < configs; ++occ) {
        auto k = static_cast<std::size_t>(__builtin_popcountll(occ));
        double weight = present[k] * absent[m - k];
        if (weight == 0.0) continue;
        acc[reach_mask(member_count + 1, edges, occ, parent)] += weight;
    }
    return finish(member_count, acc, true, 0);
}

ReachDistribution sample_reach(std::size_t member_count, std::span<const LocalEdge> edges, double p,
                               std::size_t samples, std::uint64_t seed) {
    check_size(member_count);
    if (edges.size() > 64) throw InputError("local problem with more than 64 edges");
    if (samples == 0) throw InputError("Monte Carlo averaging needs at least one sample");
    std::unordered_map<std::uint64_t, double> acc;
    std::vector<std::uint32_t> parent;
    const double unit = 1.0 / static_cast<double>(samples);
    for (std::size_t t = 0; t < samples; ++t) {
        SplitMix64 rng(derive_seed(seed, t));
        std::uint64_t occ = 0;
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (rng.uniform() < p) occ |= std::uint64_t{1} << e;
        acc[reach_mask(member_count + 1, edges, occ, parent)] += unit;
    }
    return finish(member_count, acc, false, samples);
}

}  // namespace nib
