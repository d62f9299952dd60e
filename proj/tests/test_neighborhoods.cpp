#include <doctest.h>

#include <algorithm>
#include <functional>
#include <iterator>
#include <set>

#include "nib/errors.hpp"
#include "nib/neighborhoods.hpp"
#include "support.hpp"

using namespace nib;
using testing::from_pairs;

namespace {

Neighborhood hood(std::vector<NodeId> nodes, std::vector<EdgeId> edges) {
    return Neighborhood{std::move(nodes), std::move(edges)};
}

std::vector<EdgeId> ids(const WeightedGraph& g, const testing::Pairs& pairs) {
    std::vector<EdgeId> out;
    for (auto [u, v] : pairs) out.push_back(*g.edge_id(u, v));
    std::sort(out.begin(), out.end());
    return out;
}

// Every node sequence of length <= r + 1 is tried, adjacency checked afterwards.
Neighborhood brute_primary(const WeightedGraph& g, int r, NodeId i) {
    std::set<NodeId> nodes{i};
    std::set<EdgeId> edges;
    for (const Adjacent& a : g.neighbors(i)) {
        nodes.insert(a.node);
        edges.insert(a.edge);
    }
    const std::size_t n = g.node_count();
    std::vector<NodeId> seq;
    std::function<void()> grow = [&] {
        if (seq.size() >= 2) {
            bool ok = g.weight(i, seq.front()) != 0.0 && g.weight(i, seq.back()) != 0.0 && seq.front() != seq.back();
            for (std::size_t k = 0; ok && k + 1 < seq.size(); ++k) ok = g.edge_id(seq[k], seq[k + 1]).has_value();
            if (ok) {
                for (std::size_t k = 0; k < seq.size(); ++k) nodes.insert(seq[k]);
                for (std::size_t k = 0; k + 1 < seq.size(); ++k) edges.insert(*g.edge_id(seq[k], seq[k + 1]));
            }
        }
        if (static_cast<int>(seq.size()) >= r + 1) return;
        for (NodeId v = 0; v < n; ++v) {
            if (v == i || std::find(seq.begin(), seq.end(), v) != seq.end()) continue;
            seq.push_back(v);
            grow();
            seq.pop_back();
        }
    };
    grow();
    return hood({nodes.begin(), nodes.end()}, {edges.begin(), edges.end()});
}

// Forest test by counting: a graph is a forest iff |E| = |V| - components.
bool incidence_is_forest(const EquivalenceClassing& c) {
    const std::size_t classes = c.class_count + c.trivial_classes.size();
    const std::size_t vertices = classes + c.pivots.size();
    std::vector<std::vector<std::size_t>> adj(vertices);
    std::size_t edge_count = 0;
    for (std::size_t t = 0; t < c.pivots.size(); ++t) {
        for (std::size_t cls : c.hyperedges[t]) {
            adj[classes + t].push_back(cls);
            adj[cls].push_back(classes + t);
            ++edge_count;
        }
    }
    std::vector<char> seen(vertices, 0);
    std::size_t components = 0;
    for (std::size_t s = 0; s < vertices; ++s) {
        if (seen[s]) continue;
        ++components;
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
    }
    return edge_count + components == vertices;
}

bool subset(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<EdgeId> set_union_of(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
    std::vector<EdgeId> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<EdgeId> set_minus(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
    std::vector<EdgeId> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

WeightedGraph two_triangles_sharing_edge() { return from_pairs(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}); }

}  // namespace

TEST_SUITE("neighborhoods") {
    TEST_CASE("tree primaries are stars at every r") {
        WeightedGraph tree = from_pairs(6, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}});
        for (int r : {0, 1, 3}) {
            Neighborhood n1 = build_primary(tree, r, 1);
            CHECK(n1.nodes == std::vector<NodeId>{0, 1, 2, 3});
            CHECK(n1.edges == ids(tree, {{0, 1}, {1, 2}, {1, 3}}));
        }
    }

    TEST_CASE("triangle at r = 1 is a single primary") {
        WeightedGraph k3 = testing::complete(3);
        Neighborhood n0 = build_primary(k3, 1, 0);
        CHECK(n0.nodes == std::vector<NodeId>{0, 1, 2});
        CHECK(n0.edges.size() == 3);
        CHECK(build_primary(k3, 0, 0).edges.size() == 2);
    }

    TEST_CASE("four-node example primary of node 2 at r = 1") {
        WeightedGraph g = testing::four_node_example();
        Neighborhood n2 = build_primary(g, 1, 2);
        CHECK(n2.nodes == std::vector<NodeId>{0, 1, 2});
        CHECK(n2.edges == ids(g, {{0, 2}, {1, 2}, {0, 1}}));
    }

    TEST_CASE("intersections") {
        WeightedGraph tree = testing::path(4);
        Neighborhood t = build_intersection(tree, 0, 1, 2);
        CHECK(t.nodes == std::vector<NodeId>{1, 2});
        CHECK(t.edges == ids(tree, {{1, 2}}));

        WeightedGraph k3 = testing::complete(3);
        CHECK(build_intersection(k3, 1, 0, 1).edges.size() == 3);

        WeightedGraph g = testing::four_node_example();
        Neighborhood cut = intersect(build_primary(g, 1, 2), build_primary(g, 1, 3));
        CHECK(cut.nodes == std::vector<NodeId>{0, 1});
        CHECK(cut.edges == ids(g, {{0, 1}}));
        // 2 and 3 are not adjacent, so the pair is not a valid intersection.
        CHECK_THROWS_AS(build_intersection(g, 1, 2, 3), InputError);
        CHECK_THROWS_AS(build_intersection(g, 1, 2, 2), InputError);
    }

    TEST_CASE("differences") {
        WeightedGraph tree = testing::star(3);
        Neighborhood d = build_difference(tree, 0, 0, 1);
        CHECK(d.nodes == std::vector<NodeId>{0, 2, 3});
        CHECK(d.edges == ids(tree, {{0, 2}, {0, 3}}));

        WeightedGraph k3 = testing::complete(3);
        Neighborhood same = build_difference(k3, 1, 0, 1);
        CHECK(same.nodes == std::vector<NodeId>{0});
        CHECK(same.edges.empty());
        Neighborhood star = build_difference(k3, 0, 0, 1);
        CHECK(star.nodes == std::vector<NodeId>{0, 2});
        CHECK(star.edges == ids(k3, {{0, 2}}));
    }

    TEST_CASE("primaries match a brute-force path search on all small graphs") {
        for (const WeightedGraph& g : testing::small_connected_graphs(5, 10)) {
            for (int r : {0, 1, 2, 3}) {
                for (NodeId i = 0; i < g.node_count(); ++i) {
                    Neighborhood fast = build_primary(g, r, i);
                    Neighborhood slow = brute_primary(g, r, i);
                    REQUIRE(fast.nodes == slow.nodes);
                    REQUIRE(fast.edges == slow.edges);
                }
            }
        }
    }

    TEST_CASE("set identities and monotonicity in r") {
        for (const WeightedGraph& g : testing::small_connected_graphs(5, 8)) {
            for (int r : {0, 1, 2}) {
                NeighborhoodSystem sys(g, r);
                NeighborhoodSystem next(g, r + 1);
                for (NodeId i = 0; i < g.node_count(); ++i) {
                    CHECK(subset(sys.primary(i).edges, next.primary(i).edges));
                    for (NodeId j : sys.partners(i)) {
                        const Neighborhood& ij = sys.intersection(i, j);
                        CHECK(subset(ij.edges, sys.primary(i).edges));
                        if (sys.primary(j).contains_node(i)) CHECK(sys.intersection_id(i, j) == sys.intersection_id(j, i));
                        std::vector<EdgeId> both = set_union_of(ij.edges, sys.difference(i, j).edges);
                        CHECK(subset(sys.primary(i).edges, both));
                    }
                }
            }
        }
    }

    TEST_CASE("tree at r = 0: classes are the edges and the bound holds") {
        WeightedGraph tree = from_pairs(6, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}});
        NeighborhoodSystem sys(tree, 0);
        EquivalenceClassing c = classify(sys);
        CHECK(c.class_count == tree.edge_count());
        for (const Neighborhood& cls : sys.intersections()) CHECK(cls.edges.size() == 1);
        CHECK(c.condition_holds);
        CHECK(c.acyclic);
        CHECK(c.loop_bound_fulfilled);
        CHECK(c.pivots == std::vector<NodeId>{1, 3});
        CHECK(is_hypernetwork_acyclic(c));
    }

    TEST_CASE("triangle at r = 1 forms one class without pivots") {
        WeightedGraph k3 = testing::complete(3);
        NeighborhoodSystem sys(k3, 1);
        EquivalenceClassing c = classify(sys);
        CHECK(c.class_count == 1);
        CHECK(c.pivots.empty());
        CHECK(c.loop_bound_fulfilled);
    }

    TEST_CASE("four-cycle at r = 0 fails the class condition") {
        WeightedGraph c4 = testing::cycle(4);
        NeighborhoodSystem sys(c4, 0);
        EquivalenceClassing c = classify(sys);
        CHECK_FALSE(c.loop_bound_fulfilled);
        NeighborhoodSystem wide(c4, 2);
        CHECK(classify(wide).loop_bound_fulfilled);
    }

    TEST_CASE("four-node example is fulfilled at r = 2 but not r = 1") {
        WeightedGraph g = testing::four_node_example();
        CHECK_FALSE(classify(NeighborhoodSystem(g, 1)).loop_bound_fulfilled);
        CHECK(classify(NeighborhoodSystem(g, 2)).loop_bound_fulfilled);
    }

    TEST_CASE("self-loops add trivial classes that count toward pivots") {
        WeightedGraph g = load_edge_list("0 1\n1 1 2\n");
        EquivalenceClassing c = classify(NeighborhoodSystem(g, 0));
        REQUIRE(c.trivial_classes.size() == 1);
        CHECK(c.trivial_classes[0].first == 1);
        CHECK(c.trivial_classes[0].second == c.class_count);
        CHECK(std::find(c.pivots.begin(), c.pivots.end(), 1u) != c.pivots.end());
        CHECK(c.loop_bound_fulfilled);
    }

    TEST_CASE("acyclicity verdict agrees with a counting forest test") {
        std::vector<WeightedGraph> graphs = testing::small_connected_graphs(5, 8);
        graphs.push_back(two_triangles_sharing_edge());
        graphs.push_back(load_edge_list("0 1\n1 2\n2 0\n2 2 1\n0 3\n"));
        for (const WeightedGraph& g : graphs) {
            for (int r : {0, 1, 2}) {
                EquivalenceClassing c = classify(NeighborhoodSystem(g, r));
                CHECK(c.acyclic == incidence_is_forest(c));
                CHECK(c.acyclic == is_hypernetwork_acyclic(c));
                CHECK(c.loop_bound_fulfilled == (c.acyclic && c.condition_holds));
                CHECK(c.condition_holds == c.witnesses.empty());
            }
        }
    }

    TEST_CASE("fulfilled classings reproduce every class from any member pair") {
        for (const WeightedGraph& g : testing::small_connected_graphs(6, 8)) {
            for (int r : {0, 1, 2}) {
                NeighborhoodSystem sys(g, r);
                EquivalenceClassing c = classify(sys);
                if (!c.loop_bound_fulfilled) continue;
                for (const Neighborhood& cls : sys.intersections())
                    for (NodeId k : cls.nodes)
                        for (NodeId q : cls.nodes) {
                            if (k == q) continue;
                            Neighborhood again = build_intersection(g, r, k, q);
                            CHECK(again.nodes == cls.nodes);
                            CHECK(again.edges == cls.edges);
                        }
            }
        }
    }

    TEST_CASE("trees are fulfilled at r = 0") {
        for (const WeightedGraph& g : testing::small_connected_graphs(6, 5)) {
            if (g.edge_count() != g.node_count() - 1) continue;
            CHECK(classify(NeighborhoodSystem(g, 0)).loop_bound_fulfilled);
        }
    }

    TEST_CASE("schedules on a tree start from the single edge") {
        WeightedGraph tree = testing::path(4);
        NeighborhoodSystem sys(tree, 0);
        UnboundedSchedule s = build_schedules(sys);
        for (std::size_t t = 0; t < sys.intersections().size(); ++t) {
            REQUIRE_FALSE(s.target_steps[t].empty());
            CHECK(s.target_steps[t].front().before == sys.intersections()[t].edges);
        }
        for (NodeId i = 0; i < tree.node_count(); ++i) {
            REQUIRE_FALSE(s.node_steps[i].empty());
            CHECK(s.node_steps[i].front().before.empty());
        }
    }

    TEST_CASE("triangle at r = 0: replay of the accumulation for target (0, 1)") {
        WeightedGraph k3 = testing::complete(3);
        NeighborhoodSystem sys(k3, 0);
        UnboundedSchedule s = build_schedules(sys);
        const std::size_t t = sys.intersection_id(0, 1);
        const auto& steps = s.target_steps[t];
        // N_0 and N_1 both hold node 2 at r = 0, so k runs over {0, 1, 2}.
        std::vector<std::pair<NodeId, NodeId>> order;
        for (const ScheduleStep& st : steps) order.emplace_back(st.k, st.q);
        CHECK(order == std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}});
        const EdgeId e01 = *k3.edge_id(0, 1), e02 = *k3.edge_id(0, 2), e12 = *k3.edge_id(1, 2);
        std::vector<EdgeId> acc{e01};
        for (const ScheduleStep& st : steps) {
            CHECK(st.before == acc);
            std::vector<EdgeId> region = sys.intersection(st.k, st.q).edges;
            CHECK(st.residual == set_minus(region, acc));
            acc = set_union_of(acc, region);
        }
        CHECK(s.target_step(t, 1, 2).before == std::vector<EdgeId>{e01, e02});
        CHECK(s.target_step(t, 1, 2).residual == std::vector<EdgeId>{e12});
    }

    TEST_CASE("schedule snapshots never shrink, also under a shuffled order") {
        for (std::optional<std::uint64_t> seed : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{7}}) {
            WeightedGraph ring = testing::clique_ring(3, 3);
            NeighborhoodSystem sys(ring, 1);
            UnboundedSchedule s = build_schedules(sys, seed);
            for (const auto& steps : s.target_steps)
                for (std::size_t k = 1; k < steps.size(); ++k) CHECK(subset(steps[k - 1].before, steps[k].before));
            for (const auto& steps : s.node_steps)
                for (std::size_t k = 1; k < steps.size(); ++k) CHECK(subset(steps[k - 1].before, steps[k].before));
        }
    }

    TEST_CASE("size report") {
        WeightedGraph p5 = testing::path(5);
        for (const NeighborhoodSizes& s : neighborhood_size_report(NeighborhoodSystem(p5, 0)))
            CHECK(s.intersection_nodes == 2);
        WeightedGraph k3 = testing::complete(3);
        for (const NeighborhoodSizes& s : neighborhood_size_report(NeighborhoodSystem(k3, 1))) {
            CHECK(s.intersection_nodes == 3);
            CHECK(s.primary_nodes == 3);
        }
    }
}
