#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace nib {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    NodeId u;
    NodeId v;
    double w;
    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Adjacent {
    NodeId node;
    EdgeId edge;
};

/// Undirected simple graph with real edge weights and optional self-loops.
///
/// Non-loop edges are stored once with u < v, sorted lexicographically; their
/// position in edges() is the EdgeId used throughout the library. Self-loops
/// are kept apart and never receive an EdgeId. Immutable after construction.
class WeightedGraph {
public:
    WeightedGraph() = default;

    /// Builds the canonical form. Identical duplicates (in either orientation)
    /// are merged; duplicates with different weights are rejected.
    WeightedGraph(std::size_t n, std::span<const Edge> edges);

    std::size_t node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::span<const Adjacent> neighbors(NodeId i) const;
    std::size_t degree(NodeId i) const { return neighbors(i).size(); }

    std::optional<EdgeId> edge_id(NodeId u, NodeId v) const;
    /// Weight of (u, v) or of the self-loop when u == v; 0 if absent.
    double weight(NodeId u, NodeId v) const;

    bool has_self_loop(NodeId k) const { return self_loops_.count(k) != 0; }
    double self_loop_weight(NodeId k) const;
    const std::map<NodeId, double>& self_loops() const noexcept { return self_loops_; }

    bool connected() const noexcept { return connected_; }

    /// Every stored entry, self-loops included, as (u, v, w) with u <= v.
    std::vector<Edge> all_entries() const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::map<NodeId, double> self_loops_;
    std::vector<std::size_t> offsets_;
    std::vector<Adjacent> adjacency_;
    bool connected_ = false;
};

/// Bond-occupation probability.
struct OccupationModel {
    double p = 0.5;

    explicit OccupationModel(double prob);
    /// Probability of one configuration with `occupied` of `total` edges present.
    double configuration_weight(std::size_t occupied, std::size_t total) const;
};

struct ValidationReport {
    bool connected = false;
    bool has_self_loops = false;
    std::size_t n = 0;
    std::size_t edges = 0;
};

/// Parses "u v [w]" lines; '#' starts a comment. Node count is max id + 1.
WeightedGraph load_edge_list(std::istream& in);
WeightedGraph load_edge_list(std::string_view text);

/// Writes the canonical edge list, self-loops included, one "u v w" per line.
void write_edge_list(std::ostream& out, const WeightedGraph& g);

struct MatrixEntry {
    std::size_t i;
    std::size_t j;
    double value;
};

/// Graph of a symmetric matrix: (i, j) is an edge iff the entry is nonzero,
/// diagonal entries become self-loops. Either triangle, or both, may be given.
/// n = 0 infers the dimension from the largest index.
WeightedGraph from_symmetric_matrix(std::span<const MatrixEntry> entries, std::size_t n = 0);

/// Coordinate format: header "n nnz" followed by nnz lines "i j value".
WeightedGraph load_matrix(std::istream& in);
WeightedGraph load_matrix(std::string_view text);

/// Dense row-major n x n copy of the matrix a graph represents.
std::vector<double> to_dense(const WeightedGraph& g);

ValidationReport validate(const WeightedGraph& g);

/// Removes every self-loop (k, k), multiplying the weight of (assignment[k], k)
/// by the loop weight, one loop at a time in ascending k.
WeightedGraph absorb_self_loops(const WeightedGraph& g, const std::map<NodeId, NodeId>& assignment);

}  // namespace nib
