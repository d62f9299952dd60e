#include "nib/message_plan.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace nib {

namespace {

// Builds root/members/edges for the given edge set; empty members if the root
// has no incident edge in the set (the message is then identically trivial).
MessageSpec make_local(const WeightedGraph& g, NodeId root, const std::vector<EdgeId>& edge_set) {
    MessageSpec spec;
    spec.root = root;
    bool root_touched = false;
    for (EdgeId e : edge_set) {
        const Edge& edge = g.edges()[e];
        if (edge.u == root || edge.v == root) root_touched = true;
    }
    if (!root_touched) return spec;
    std::vector<NodeId> members;
    for (EdgeId e : edge_set) {
        const Edge& edge = g.edges()[e];
        if (edge.u != root) members.push_back(edge.u);
        if (edge.v != root) members.push_back(edge.v);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    auto local = [&](NodeId v) -> std::uint32_t {
        if (v == root) return 0;
        return static_cast<std::uint32_t>(std::lower_bound(members.begin(), members.end(), v) - members.begin() + 1);
    };
    for (EdgeId e : edge_set) {
        const Edge& edge = g.edges()[e];
        spec.edges.push_back({local(edge.u), local(edge.v), e});
    }
    spec.members = std::move(members);
    spec.inputs.resize(spec.members.size());
    spec.counted.assign(spec.members.size(), 1);
    return spec;
}

}  // namespace

MessagePlan plan_bounded(const NeighborhoodSystem& system, const EquivalenceClassing& classing) {
    const WeightedGraph& g = system.graph();
    const auto& classes = system.intersections();
    MessagePlan plan;
    plan.kind = PlanKind::bounded;

    std::map<std::pair<std::size_t, NodeId>, std::size_t> index;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (NodeId k : classes[c].nodes) {
            MessageSpec spec = make_local(g, k, classes[c].edges);
            if (spec.edges.empty()) continue;
            spec.source = c;
            spec.target = c;
            spec.partner = k;
            index.emplace(std::make_pair(c, k), plan.messages.size());
            plan.messages.push_back(std::move(spec));
        }
    }
    for (MessageSpec& spec : plan.messages) {
        for (std::size_t m = 0; m < spec.members.size(); ++m) {
            NodeId s = spec.members[m];
            for (std::size_t other : classing.membership[s]) {
                if (other == spec.source) continue;
                if (auto it = index.find({other, s}); it != index.end()) spec.inputs[m].push_back(it->second);
            }
        }
    }
    plan.node_factors.resize(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) {
        for (std::size_t c : classing.membership[i]) {
            if (auto it = index.find({c, i}); it != index.end()) plan.node_factors[i].push_back(plan.messages[it->second]);
        }
    }
    return plan;
}

MessagePlan plan_unbounded(const NeighborhoodSystem& system, const UnboundedSchedule& schedule,
                           ScheduleEdgeRule rule) {
    const WeightedGraph& g = system.graph();
    MessagePlan plan;
    plan.kind = PlanKind::unbounded;

    // (target intersection, k, q) -> message id
    std::map<std::tuple<std::size_t, NodeId, NodeId>, std::size_t> index;
    for (std::size_t t = 0; t < schedule.target_steps.size(); ++t) {
        for (const ScheduleStep& step : schedule.target_steps[t]) {
            const auto& edge_set = rule == ScheduleEdgeRule::residual ? step.residual : step.before;
            MessageSpec spec = make_local(g, step.k, edge_set);
            if (spec.edges.empty()) continue;
            spec.source = system.intersection_id(step.k, step.q);
            spec.partner = step.q;
            spec.target = t;
            index.emplace(std::make_tuple(t, step.k, step.q), plan.messages.size());
            plan.messages.push_back(std::move(spec));
        }
    }

    // A member p of a problem whose messages are addressed to intersection t
    // receives every message (p, s) -> t.
    auto wire = [&](MessageSpec& spec, std::size_t addressed_to, const Neighborhood& counted_region) {
        for (std::size_t m = 0; m < spec.members.size(); ++m) {
            NodeId p = spec.members[m];
            if (!counted_region.contains_node(p)) {
                spec.counted[m] = 0;
                continue;
            }
            for (NodeId s : system.partners(p)) {
                if (auto it = index.find({addressed_to, p, s}); it != index.end()) spec.inputs[m].push_back(it->second);
            }
        }
    };
    for (MessageSpec& spec : plan.messages) {
        wire(spec, spec.source, system.intersections()[spec.source]);
    }

    plan.node_factors.resize(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) {
        for (const ScheduleStep& step : schedule.node_steps[i]) {
            const auto& edge_set = rule == ScheduleEdgeRule::residual ? step.residual : step.before;
            MessageSpec spec = make_local(g, i, edge_set);
            if (spec.edges.empty()) continue;
            spec.source = system.intersection_id(i, step.q);
            spec.partner = step.q;
            spec.target = spec.source;
            wire(spec, spec.source, system.intersections()[spec.source]);
            plan.node_factors[i].push_back(std::move(spec));
        }
    }
    return plan;
}

}  // namespace nib
