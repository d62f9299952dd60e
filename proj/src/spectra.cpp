#include "nib/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nib/errors.hpp"
#include "nib/parallel.hpp"

namespace nib {

std::string to_string(DiagonalRule rule) {
    switch (rule) {
        case DiagonalRule::resolvent: return "resolvent";
        case DiagonalRule::literal_product: return "literal_product";
        case DiagonalRule::inverse_factor: return "inverse_factor";
    }
    return "resolvent";
}

DiagonalRule parse_diagonal_rule(std::string_view text) {
    if (text == "resolvent") return DiagonalRule::resolvent;
    if (text == "literal_product" || text == "literal") return DiagonalRule::literal_product;
    if (text == "inverse_factor") return DiagonalRule::inverse_factor;
    throw InputError("unknown diagonal rule '" + std::string(text) + "'");
}

double XGrid::at(std::size_t k) const {
    if (count <= 1) return min;
    return min + (max - min) * static_cast<double>(k) / static_cast<double>(count - 1);
}

void SpectralConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("eta must be positive");
    if (grid.count == 0) throw InputError("grid needs at least one point");
    if (!(grid.max >= grid.min)) throw InputError("grid max must not be below grid min");
    if (r < 0) throw InputError("loop bound r must be nonnegative");
    if (!(tol > 0.0)) throw InputError("tolerance must be positive");
    if (max_iter == 0) throw InputError("max_iter must be positive");
    if (!(damping >= 0.0 && damping < 1.0)) throw InputError("damping must lie in [0, 1)");
}

cplx node_factor(std::span<const cplx> incoming, std::optional<double> self_loop, cplx z) {
    cplx f = 1.0 / z;
    for (cplx h : incoming) f *= z / (z - h);
    if (self_loop) f *= z / (z - *self_loop);
    return f;
}

cplx diagonal_entry(DiagonalRule rule, std::span<const cplx> incoming, std::optional<double> self_loop, cplx z) {
    switch (rule) {
        case DiagonalRule::resolvent: {
            cplx d = z - self_loop.value_or(0.0);
            for (cplx h : incoming) d -= h;
            return d;
        }
        case DiagonalRule::literal_product: {
            cplx d = 1.0;
            for (cplx h : incoming) d *= z - h;
            if (self_loop) d *= z - *self_loop;
            return d;
        }
        case DiagonalRule::inverse_factor: return 1.0 / node_factor(incoming, self_loop, z);
    }
    throw InputError("unknown diagonal rule");
}

std::vector<cplx> lu_solve(std::vector<cplx> M, std::vector<cplx> b) {
    const std::size_t n = b.size();
    if (M.size() != n * n) throw InputError("lu_solve: matrix and vector sizes disagree");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(M[row * n + col]) > std::abs(M[pivot * n + col])) pivot = row;
        if (std::abs(M[pivot * n + col]) == 0.0) throw NumericalError("singular local system");
        if (pivot != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(M[col * n + k], M[pivot * n + k]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t row = col + 1; row < n; ++row) {
            cplx factor = M[row * n + col] / M[col * n + col];
            if (factor == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) M[row * n + k] -= factor * M[col * n + k];
            b[row] -= factor * b[col];
        }
    }
    for (std::size_t row = n; row-- > 0;) {
        cplx acc = b[row];
        for (std::size_t k = row + 1; k < n; ++k) acc -= M[row * n + k] * b[k];
        b[row] = acc / M[row * n + row];
    }
    return b;
}

LocalSystem build_local_system(const WeightedGraph& g, const MessageSpec& spec, std::span<const cplx> H, cplx z,
                               DiagonalRule rule) {
    LocalSystem sys;
    const std::size_t n = spec.members.size();
    sys.members = spec.members;
    sys.v.assign(n, 0.0);
    sys.A_local.assign(n * n, 0.0);
    sys.D.resize(n);
    for (const LocalEdge& e : spec.edges) {
        double w = g.edges()[e.id].w;
        if (e.a == 0 || e.b == 0) {
            sys.v[(e.a == 0 ? e.b : e.a) - 1] = w;
        } else {
            sys.A_local[(e.a - 1) * n + (e.b - 1)] = w;
            sys.A_local[(e.b - 1) * n + (e.a - 1)] = w;
        }
    }
    std::vector<cplx> incoming;
    for (std::size_t m = 0; m < n; ++m) {
        incoming.clear();
        if (spec.counted[m])
            for (std::size_t in : spec.inputs[m]) incoming.push_back(H[in]);
        std::optional<double> loop;
        if (g.has_self_loop(spec.members[m])) loop = g.self_loop_weight(spec.members[m]);
        sys.D[m] = diagonal_entry(rule, incoming, loop, z);
    }
    return sys;
}

cplx solve_local(const LocalSystem& system) {
    const std::size_t n = system.size();
    std::vector<cplx> M(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) M[a * n + b] = (a == b ? system.D[a] : 0.0) - system.A_local[a * n + b];
    std::vector<cplx> x = lu_solve(std::move(M), system.v);
    cplx total = 0.0;
    for (std::size_t a = 0; a < n; ++a) total += system.v[a] * x[a];
    return total;
}

SpectralModel::SpectralModel(const WeightedGraph& g, MessagePlan plan, const SpectralConfig& config)
    : graph_(&g), plan_(std::move(plan)), config_(config) {
    config_.validate();
}

SpectralMessageState SpectralModel::initial_state() const {
    SpectralMessageState state;
    state.H.assign(plan_.messages.size(), 0.0);
    for (const auto& [k, w] : graph_->self_loops()) state.trivial.emplace_back(k, w);
    return state;
}

SpectralSweep SpectralModel::update(const SpectralMessageState& state, cplx z) const {
    if (state.H.size() != plan_.messages.size()) throw InputError("state does not match the message plan");
    SpectralSweep out;
    out.state = state;
    std::vector<cplx> fresh(state.H.size());
    std::vector<double> change(state.H.size(), 0.0);
    parallel_for(plan_.messages.size(), config_.threads, [&](std::size_t m) {
        cplx value = solve_local(build_local_system(*graph_, plan_.messages[m], state.H, z, config_.rule));
        value = config_.damping * state.H[m] + (1.0 - config_.damping) * value;
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
            throw NumericalError("non-finite spectral message " + std::to_string(m));
        change[m] = std::abs(value - state.H[m]);
        fresh[m] = value;
    });
    for (std::size_t m = 0; m < fresh.size(); ++m) {
        out.max_delta = std::max(out.max_delta, change[m]);
        out.max_imag = std::max(out.max_imag, fresh[m].imag());
    }
    out.state.H = std::move(fresh);
    out.state.iterations = state.iterations + 1;
    out.state.last_delta = out.max_delta;
    return out;
}

SpectralSolve SpectralModel::solve(SpectralMessageState state, cplx z) const {
    SpectralSolve out;
    if (plan_.messages.empty()) {
        out.state = std::move(state);
        out.converged = true;
        return out;
    }
    for (std::size_t it = 0; it < config_.max_iter; ++it) {
        SpectralSweep sweep = update(state, z);
        state = std::move(sweep.state);
        if (sweep.max_imag > 1e-9) out.sign_ok = false;
        if (sweep.max_delta < config_.tol) {
            out.converged = true;
            break;
        }
    }
    out.state = std::move(state);
    return out;
}

cplx SpectralModel::infer_node(const SpectralMessageState& state, NodeId i, cplx z) const {
    if (i >= plan_.node_factors.size()) throw InputError("node " + std::to_string(i) + " out of range");
    cplx total = graph_->has_self_loop(i) ? graph_->self_loop_weight(i) : 0.0;
    for (const MessageSpec& factor : plan_.node_factors[i])
        total += solve_local(build_local_system(*graph_, factor, state.H, z, config_.rule));
    return total;
}

SpectralSweep update_message_spectral(const SpectralModel& model, const SpectralMessageState& state, cplx z) {
    return model.update(state, z);
}

cplx infer_node_spectral(const SpectralModel& model, const SpectralMessageState& state, NodeId i, cplx z) {
    return model.infer_node(state, i, z);
}

DensityValue density_at(std::span<const cplx> H_nodes, cplx z) {
    DensityValue out;
    if (H_nodes.empty()) return out;
    double acc = 0.0;
    for (cplx h : H_nodes) acc += (1.0 / (z - h)).imag();
    out.raw = -acc / (static_cast<double>(H_nodes.size()) * std::numbers::pi);
    out.rho = std::max(out.raw, 0.0);
    out.clipped = out.raw < -1e-9;
    return out;
}

MessagePlan SpectralEngine::make_plan(const WeightedGraph& g, const SpectralConfig& config, MethodMode& mode,
                                      bool& fulfilled) {
    config.validate();
    NeighborhoodSystem system(g, config.r);
    EquivalenceClassing classing = classify(system);
    fulfilled = classing.loop_bound_fulfilled;
    mode = config.mode;
    if (mode == MethodMode::automatic) mode = fulfilled ? MethodMode::bounded : MethodMode::unbounded;
    if (mode == MethodMode::bounded && !fulfilled)
        throw LoopBoundError("bounded mode requested but the loop bound r = " + std::to_string(config.r) +
                             " is not fulfilled");
    if (mode == MethodMode::bounded) return plan_bounded(system, classing);
    return plan_unbounded(system, build_schedules(system, config.schedule_seed), config.schedule_rule);
}

SpectralEngine::SpectralEngine(const WeightedGraph& g, const SpectralConfig& config)
    : model_(g, make_plan(g, config, mode_, fulfilled_), config) {}

SpectralEngine::Point SpectralEngine::evaluate(cplx z, const SpectralMessageState* warm) const {
    Point point;
    point.solve = model_.solve(warm ? *warm : model_.initial_state(), z);
    const std::size_t n = model_.graph().node_count();
    point.H_nodes.resize(n);
    for (NodeId i = 0; i < n; ++i) point.H_nodes[i] = model_.infer_node(point.solve.state, i, z);
    return point;
}

double trapezoid(std::span<const double> xs, std::span<const double> ys) {
    double total = 0.0;
    for (std::size_t k = 1; k < xs.size() && k < ys.size(); ++k) total += 0.5 * (xs[k] - xs[k - 1]) * (ys[k] + ys[k - 1]);
    return total;
}

SpectrumReport sweep(const WeightedGraph& g, const SpectralConfig& config) {
    // With independent grid points the threads go to the grid, not to the
    // messages inside each point.
    const bool grid_parallel = !config.warm_start && config.threads > 1;
    SpectralConfig inner = config;
    if (grid_parallel) inner.threads = 1;
    SpectralEngine engine(g, inner);
    SpectrumReport report;
    report.eta = config.eta;
    report.r = config.r;
    report.mode = engine.mode();
    report.loop_bound_fulfilled = engine.loop_bound_fulfilled();
    report.rule = config.rule;
    report.warm_start = config.warm_start;
    report.message_count = engine.model().plan().messages.size();
    report.rows.resize(config.grid.count);

    auto run_point = [&](std::size_t k, const SpectralMessageState* warm) -> SpectralMessageState {
        SpectrumRow& row = report.rows[k];
        row.x = config.grid.at(k);
        const cplx z(row.x, config.eta);
        try {
            SpectralEngine::Point point = engine.evaluate(z, warm);
            DensityValue d = density_at(point.H_nodes, z);
            row.rho = d.rho;
            row.raw = d.raw;
            row.iterations = point.solve.state.iterations;
            row.converged = point.solve.converged && point.solve.sign_ok;
            if (!point.solve.converged) {
                row.error = "no convergence within " + std::to_string(config.max_iter) + " sweeps";
            } else if (!point.solve.sign_ok) {
                row.error = "message left the lower half plane";
            } else if (d.clipped) {
                row.error = "negative density clipped";
            }
            point.solve.state.iterations = 0;
            return std::move(point.solve.state);
        } catch (const NumericalError& e) {
            row.converged = false;
            row.error = e.what();
            return engine.model().initial_state();
        }
    };
    if (config.warm_start) {
        SpectralMessageState state = engine.model().initial_state();
        for (std::size_t k = 0; k < config.grid.count; ++k) state = run_point(k, &state);
    } else if (grid_parallel) {
        parallel_for(config.grid.count, config.threads, [&](std::size_t k) { run_point(k, nullptr); });
    } else {
        for (std::size_t k = 0; k < config.grid.count; ++k) run_point(k, nullptr);
    }

    std::vector<double> xs(report.rows.size()), ys(report.rows.size());
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        xs[k] = report.rows[k].x;
        ys[k] = report.rows[k].rho;
        if (!report.rows[k].converged) report.all_converged = false;
    }
    report.mass_estimate = trapezoid(xs, ys);
    return report;
}

}  // namespace nib
