#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nib/graph.hpp"
#include "nib/neighborhoods.hpp"

namespace nib {

/// Edge of a local problem. Local index 0 is the root, index m + 1 is members[m].
struct LocalEdge {
    std::uint32_t a;
    std::uint32_t b;
    EdgeId id;
};

/// One local problem: walks or occupied paths leaving `root` inside `edges`,
/// with every reached member dressed by the product (percolation) or sum
/// (spectra) of its input messages.
struct MessageSpec {
    NodeId root = 0;
    /// Bounded: class id. Unbounded: intersection id of (root, partner).
    std::size_t source = 0;
    NodeId partner = 0;
    /// Bounded: class id. Unbounded: intersection id receiving the message.
    std::size_t target = 0;
    std::vector<NodeId> members;
    std::vector<LocalEdge> edges;
    /// inputs[m]: ids of the messages arriving at members[m].
    std::vector<std::vector<std::size_t>> inputs;
    /// counted[m] == 0 marks a member that connects paths but is not itself
    /// dressed or counted (only produced by the literal schedule rule).
    std::vector<char> counted;
};

enum class PlanKind { bounded, unbounded };

/// Edge set a scheduled unbounded message averages over.
enum class ScheduleEdgeRule {
    residual,  ///< N_{k∩q} minus the edges already incorporated
    literal,   ///< the incorporated set itself
};

struct MessagePlan {
    PlanKind kind = PlanKind::bounded;
    std::vector<MessageSpec> messages;
    /// Local problems whose combination at node i gives the node observable.
    std::vector<std::vector<MessageSpec>> node_factors;
};

/// One message per (class, member) pair with at least one class edge at the member.
MessagePlan plan_bounded(const NeighborhoodSystem& system, const EquivalenceClassing& classing);

/// One message per scheduled (source pair, target intersection) with a nonempty edge set.
MessagePlan plan_unbounded(const NeighborhoodSystem& system, const UnboundedSchedule& schedule,
                           ScheduleEdgeRule rule = ScheduleEdgeRule::residual);

}  // namespace nib
