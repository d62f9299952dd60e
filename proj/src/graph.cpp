#include "nib/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nib/errors.hpp"

namespace nib {

namespace {

constexpr double kAsymmetryTolerance = 1e-12;
constexpr std::size_t kMaxNodes = std::size_t{1} << 28;

std::string trim_comment(std::string line) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    return line;
}

NodeId parse_id(const std::string& token, std::size_t line_no) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw InputError("line " + std::to_string(line_no) + ": node id overflows: " + token);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw InputError("line " + std::to_string(line_no) + ": not an integer node id: " + token);
    if (value < 0) throw InputError("line " + std::to_string(line_no) + ": negative node id " + token);
    if (static_cast<unsigned long long>(value) >= kMaxNodes)
        throw InputError("line " + std::to_string(line_no) + ": node id overflows: " + token);
    return static_cast<NodeId>(value);
}

double parse_real(const std::string& token, std::size_t line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        if (used != token.size() || !std::isfinite(v)) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw InputError("line " + std::to_string(line_no) + ": not a finite real: " + token);
    }
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(t);
    return tokens;
}

}  // namespace

WeightedGraph::WeightedGraph(std::size_t n, std::span<const Edge> edges) : n_(n) {
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u >= n || e.v >= n)
            throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                             ") out of range for " + std::to_string(n) + " nodes");
        if (e.u == e.v) {
            auto [it, inserted] = self_loops_.emplace(e.u, e.w);
            if (!inserted && it->second != e.w)
                throw InputError("conflicting weights for self-loop at " + std::to_string(e.u));
            continue;
        }
        canon.push_back(e.u < e.v ? e : Edge{e.v, e.u, e.w});
    }
    std::sort(canon.begin(), canon.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    for (const Edge& e : canon) {
        if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
            if (edges_.back().w != e.w)
                throw InputError("conflicting weights for edge (" + std::to_string(e.u) + ", " +
                                 std::to_string(e.v) + ")");
            continue;
        }
        edges_.push_back(e);
    }

    std::vector<std::size_t> degree(n_, 0);
    for (const Edge& e : edges_) {
        ++degree[e.u];
        ++degree[e.v];
    }
    offsets_.assign(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
        adjacency_[cursor[edges_[id].u]++] = {edges_[id].v, id};
        adjacency_[cursor[edges_[id].v]++] = {edges_[id].u, id};
    }
    for (std::size_t i = 0; i < n_; ++i) {
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
                  [](const Adjacent& a, const Adjacent& b) { return a.node < b.node; });
    }

    // Connectivity by breadth-first search from node 0.
    if (n_ == 0) {
        connected_ = false;
    } else {
        std::vector<char> seen(n_, 0);
        std::vector<NodeId> queue{0};
        seen[0] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (const Adjacent& a : neighbors(queue[head])) {
                if (!seen[a.node]) {
                    seen[a.node] = 1;
                    queue.push_back(a.node);
                }
            }
        }
        connected_ = queue.size() == n_;
    }
}

std::span<const Adjacent> WeightedGraph::neighbors(NodeId i) const {
    if (i >= n_) throw InputError("node " + std::to_string(i) + " out of range");
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::optional<EdgeId> WeightedGraph::edge_id(NodeId u, NodeId v) const {
    if (u >= n_ || v >= n_ || u == v) return std::nullopt;
    auto adj = neighbors(u);
    auto it = std::lower_bound(adj.begin(), adj.end(), v,
                               [](const Adjacent& a, NodeId x) { return a.node < x; });
    if (it == adj.end() || it->node != v) return std::nullopt;
    return it->edge;
}

double WeightedGraph::weight(NodeId u, NodeId v) const {
    if (u == v) return self_loop_weight(u);
    auto id = edge_id(u, v);
    return id ? edges_[*id].w : 0.0;
}

double WeightedGraph::self_loop_weight(NodeId k) const {
    auto it = self_loops_.find(k);
    return it == self_loops_.end() ? 0.0 : it->second;
}

std::vector<Edge> WeightedGraph::all_entries() const {
    std::vector<Edge> out = edges_;
    for (const auto& [k, w] : self_loops_) out.push_back({k, k, w});
    std::sort(out.begin(), out.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    return out;
}

OccupationModel::OccupationModel(double prob) : p(prob) {
    if (!(prob >= 0.0 && prob <= 1.0)) throw InputError("occupation probability must lie in [0, 1]");
}

double OccupationModel::configuration_weight(std::size_t occupied, std::size_t total) const {
    return std::pow(p, static_cast<double>(occupied)) *
           std::pow(1.0 - p, static_cast<double>(total - occupied));
}

WeightedGraph load_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    std::size_t n = 0;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        auto tokens = split(trim_comment(line));
        if (tokens.empty()) continue;
        if (tokens.size() < 2 || tokens.size() > 3)
            throw InputError("line " + std::to_string(line_no) + ": expected 'u v [w]'");
        NodeId u = parse_id(tokens[0], line_no);
        NodeId v = parse_id(tokens[1], line_no);
        double w = tokens.size() == 3 ? parse_real(tokens[2], line_no) : 1.0;
        edges.push_back({u, v, w});
        n = std::max<std::size_t>(n, std::max(u, v) + std::size_t{1});
    }
    if (edges.empty()) throw InputError("empty graph: no edges found");
    return WeightedGraph(n, edges);
}

WeightedGraph load_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
    auto old = out.precision(17);
    for (const Edge& e : g.all_entries()) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
    out.precision(old);
}

WeightedGraph from_symmetric_matrix(std::span<const MatrixEntry> entries, std::size_t n) {
    std::map<std::pair<std::size_t, std::size_t>, double> seen;
    std::size_t dim = n;
    for (const MatrixEntry& e : entries) {
        if (!std::isfinite(e.value)) throw InputError("non-finite matrix entry");
        if (n != 0 && (e.i >= n || e.j >= n))
            throw InputError("matrix index (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                             ") out of range");
        if (std::max(e.i, e.j) >= kMaxNodes) throw InputError("matrix index overflows");
        dim = std::max(dim, std::max(e.i, e.j) + 1);
        auto key = std::minmax(e.i, e.j);
        auto [it, inserted] = seen.emplace(key, e.value);
        if (!inserted && std::abs(it->second - e.value) > kAsymmetryTolerance)
            throw InputError("asymmetric matrix: entries (" + std::to_string(e.i) + ", " +
                             std::to_string(e.j) + ") disagree");
    }
    if (dim == 0) throw InputError("empty matrix");
    std::vector<Edge> edges;
    for (const auto& [key, value] : seen) {
        if (value == 0.0) continue;
        edges.push_back({static_cast<NodeId>(key.first), static_cast<NodeId>(key.second), value});
    }
    return WeightedGraph(dim, edges);
}

WeightedGraph load_matrix(std::istream& in) {
    std::size_t line_no = 0;
    std::optional<std::pair<std::size_t, std::size_t>> header;
    std::vector<MatrixEntry> entries;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        auto tokens = split(trim_comment(line));
        if (tokens.empty()) continue;
        if (!header) {
            if (tokens.size() != 2) throw InputError("line " + std::to_string(line_no) + ": expected header 'n nnz'");
            header = {parse_id(tokens[0], line_no), parse_id(tokens[1], line_no)};
            continue;
        }
        if (tokens.size() != 3) throw InputError("line " + std::to_string(line_no) + ": expected 'i j value'");
        entries.push_back({parse_id(tokens[0], line_no), parse_id(tokens[1], line_no),
                           parse_real(tokens[2], line_no)});
    }
    if (!header) throw InputError("missing matrix header");
    if (header->first == 0) throw InputError("empty matrix");
    if (entries.size() != header->second)
        throw InputError("header announces " + std::to_string(header->second) + " entries, found " +
                         std::to_string(entries.size()));
    return from_symmetric_matrix(entries, header->first);
}

WeightedGraph load_matrix(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_matrix(in);
}

std::vector<double> to_dense(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> a(n * n, 0.0);
    for (const Edge& e : g.all_entries()) {
        a[e.u * n + e.v] = e.w;
        a[e.v * n + e.u] = e.w;
    }
    return a;
}

ValidationReport validate(const WeightedGraph& g) {
    return {g.connected(), !g.self_loops().empty(), g.node_count(), g.edge_count()};
}

WeightedGraph absorb_self_loops(const WeightedGraph& g, const std::map<NodeId, NodeId>& assignment) {
    std::vector<Edge> edges = g.edges();
    for (const auto& [k, loop_weight] : g.self_loops()) {
        auto it = assignment.find(k);
        if (it == assignment.end()) throw InputError("no absorbing neighbor assigned to self-loop at " + std::to_string(k));
        NodeId j = it->second;
        if (j == k) throw InputError("self-loop at " + std::to_string(k) + " cannot be absorbed into itself");
        auto id = g.edge_id(j, k);
        if (!id)
            throw InputError("cannot absorb self-loop at " + std::to_string(k) + ": " + std::to_string(j) +
                             " is not a neighbor");
        edges[*id].w *= loop_weight;
    }
    return WeightedGraph(g.node_count(), edges);
}

}  // namespace nib
