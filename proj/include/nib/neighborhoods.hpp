#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nib/graph.hpp"

namespace nib {

/// A subgraph given by sorted node and edge id lists.
struct Neighborhood {
    std::vector<NodeId> nodes;
    std::vector<EdgeId> edges;

    bool contains_node(NodeId v) const;
    bool contains_edge(EdgeId e) const;
    friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

Neighborhood intersect(const Neighborhood& a, const Neighborhood& b);

/// Node i, its neighbors and their edges to i, plus every node and edge on a
/// simple path of length <= r that joins two distinct neighbors of i without
/// passing through i.
Neighborhood build_primary(const WeightedGraph& g, int r, NodeId i);

/// Primary neighborhoods of every node and the distinct pairwise intersections.
class NeighborhoodSystem {
public:
    NeighborhoodSystem(const WeightedGraph& g, int r);
    /// The system keeps a reference to the graph.
    NeighborhoodSystem(WeightedGraph&&, int) = delete;

    int loop_bound() const noexcept { return r_; }
    const WeightedGraph& graph() const noexcept { return *graph_; }
    const Neighborhood& primary(NodeId i) const { return primary_.at(i); }

    /// Nodes of N_i other than i, ascending.
    std::vector<NodeId> partners(NodeId i) const;

    /// Distinct intersection neighborhoods; the index is the intersection id.
    const std::vector<Neighborhood>& intersections() const noexcept { return intersections_; }
    /// Id of N_i ∩ N_j. Throws InputError unless j is in N_i and j != i.
    std::size_t intersection_id(NodeId i, NodeId j) const;
    std::optional<std::size_t> find_intersection(NodeId i, NodeId j) const;
    const Neighborhood& intersection(NodeId i, NodeId j) const {
        return intersections_[intersection_id(i, j)];
    }

    /// Node i plus the edges of N_i absent from N_j, with their endpoints.
    Neighborhood difference(NodeId i, NodeId j) const;

private:
    const WeightedGraph* graph_;
    int r_;
    std::vector<Neighborhood> primary_;
    std::vector<Neighborhood> intersections_;
    // per node i: (j, intersection id), sorted by j
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> pair_ids_;
};

Neighborhood build_intersection(const WeightedGraph& g, int r, NodeId i, NodeId j);
Neighborhood build_difference(const WeightedGraph& g, int r, NodeId i, NodeId j);

/// A pair (k, q) whose intersection differs from the class it belongs to.
struct ConditionWitness {
    std::size_t class_id;
    NodeId k;
    NodeId q;
};

/// Deduplicated intersections read as equivalence classes, with pivots,
/// hyperedges and the loop-bound verdict.
struct EquivalenceClassing {
    /// Class c is system.intersections()[c].
    std::size_t class_count = 0;
    /// membership[v]: ids of nontrivial classes whose node set contains v.
    std::vector<std::vector<std::size_t>> membership;
    std::vector<NodeId> pivots;
    /// hyperedges[t] lists the classes containing pivots[t].
    std::vector<std::vector<std::size_t>> hyperedges;
    /// (k, id) for every self-loop class {k, (k, k)}; ids follow the nontrivial ones.
    std::vector<std::pair<NodeId, std::size_t>> trivial_classes;
    bool condition_holds = false;
    std::vector<ConditionWitness> witnesses;
    bool acyclic = false;
    bool loop_bound_fulfilled = false;
};

EquivalenceClassing classify(const NeighborhoodSystem& system);

/// True iff the bipartite class/pivot incidence graph is a forest.
bool is_hypernetwork_acyclic(const EquivalenceClassing& classing);

/// One step of an accumulation schedule: the set already incorporated right
/// before (k, q) is visited, and the part of N_k ∩ N_q not yet incorporated.
struct ScheduleStep {
    NodeId k;
    NodeId q;
    std::vector<EdgeId> before;
    std::vector<EdgeId> residual;
};

/// Order-dependent overcounting schedules for the unbounded regime.
struct UnboundedSchedule {
    /// per intersection id: visits (k in the intersection, q in N_k \ {k}).
    std::vector<std::vector<ScheduleStep>> target_steps;
    /// per node i: visits (i, j) for j in N_i \ {i}; `before` starts empty.
    std::vector<std::vector<ScheduleStep>> node_steps;
    std::optional<std::uint64_t> seed;

    const ScheduleStep& target_step(std::size_t target, NodeId k, NodeId q) const;
    const ScheduleStep& node_step(NodeId i, NodeId j) const;
};

/// Canonical order visits (k, q) and j ascending; a seed shuffles each list.
UnboundedSchedule build_schedules(const NeighborhoodSystem& system,
                                  std::optional<std::uint64_t> seed = std::nullopt);

struct NeighborhoodSizes {
    NodeId i;
    NodeId j;
    std::size_t primary_nodes, primary_edges;           // N_i
    std::size_t intersection_nodes, intersection_edges; // N_i ∩ N_j
    std::size_t difference_nodes, difference_edges;     // N_{j \ i}
};

std::vector<NeighborhoodSizes> neighborhood_size_report(const NeighborhoodSystem& system);

}  // namespace nib
