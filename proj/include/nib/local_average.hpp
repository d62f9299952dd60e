#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nib/message_plan.hpp"

namespace nib {

/// Distribution of the member set reachable from the root over the occupied
/// edges of a local problem. Bit m of a mask is member m.
struct ReachDistribution {
    std::size_t member_count = 0;
    std::vector<std::pair<std::uint64_t, double>> outcomes;
    bool exact = true;
    std::size_t samples = 0;
};

/// Largest member count a local problem may have (bitmask width).
inline constexpr std::size_t kMaxLocalMembers = 63;

/// Averages over all 2^|edges| occupation configurations.
ReachDistribution enumerate_reach(std::size_t member_count, std::span<const LocalEdge> edges, double p);

/// Empirical distribution from `samples` independent configurations.
ReachDistribution sample_reach(std::size_t member_count, std::span<const LocalEdge> edges, double p,
                               std::size_t samples, std::uint64_t seed);

/// < prod_{m reached} y_m >.
template <class T>
T average_product(const ReachDistribution& dist, std::span<const T> y, const T& one) {
    T total = one * 0.0;
    for (const auto& [mask, prob] : dist.outcomes) {
        T term = one;
        for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) term *= y[static_cast<std::size_t>(__builtin_ctzll(bits))];
        total += term * prob;
    }
    return total;
}

/// d/dy_m < prod_{reached} y > = < [m reached] prod_{reached, != m} y >.
template <class T>
T average_partial(const ReachDistribution& dist, std::span<const T> y, std::size_t member, const T& one) {
    T total = one * 0.0;
    const std::uint64_t bit = std::uint64_t{1} << member;
    for (const auto& [mask, prob] : dist.outcomes) {
        if (!(mask & bit)) continue;
        T term = one;
        for (std::uint64_t bits = mask & ~bit; bits != 0; bits &= bits - 1)
            term *= y[static_cast<std::size_t>(__builtin_ctzll(bits))];
        total += term * prob;
    }
    return total;
}

}  // namespace nib
