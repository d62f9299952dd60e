#include "nib/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nib/errors.hpp"
#include "nib/parallel.hpp"
#include "nib/rng.hpp"

namespace nib {

namespace {

using DistKey = std::pair<std::size_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>>;

DistKey key_of(const MessageSpec& spec) {
    DistKey key{spec.members.size(), {}};
    key.second.reserve(spec.edges.size());
    for (const LocalEdge& e : spec.edges) key.second.emplace_back(std::min(e.a, e.b), std::max(e.a, e.b));
    std::sort(key.second.begin(), key.second.end());
    return key;
}

double distance(double a, double b) { return std::abs(a - b); }
double distance(const TruncatedSeries& a, const TruncatedSeries& b) { return max_abs_diff(a, b); }

bool finite(double v) { return std::isfinite(v); }
bool finite(const TruncatedSeries& s) {
    return std::all_of(s.coefficients().begin(), s.coefficients().end(), [](double c) { return std::isfinite(c); });
}

double blend(double old_value, double computed, double damping) {
    return damping * old_value + (1.0 - damping) * computed;
}
TruncatedSeries blend(const TruncatedSeries& old_value, TruncatedSeries computed, double damping) {
    if (damping == 0.0) return computed;
    return old_value * damping + computed * (1.0 - damping);
}

}  // namespace

std::string to_string(MethodMode mode) {
    switch (mode) {
        case MethodMode::bounded: return "bounded";
        case MethodMode::unbounded: return "unbounded";
        case MethodMode::automatic: return "auto";
    }
    return "auto";
}

MethodMode parse_mode(std::string_view text) {
    if (text == "bounded") return MethodMode::bounded;
    if (text == "unbounded") return MethodMode::unbounded;
    if (text == "auto") return MethodMode::automatic;
    throw InputError("unknown mode '" + std::string(text) + "' (expected auto, bounded or unbounded)");
}

void PercConfig::validate() const {
    OccupationModel check(p);
    if (r < 0) throw InputError("loop bound r must be nonnegative");
    if (!(tol > 0.0)) throw InputError("tolerance must be positive");
    if (max_iter == 0) throw InputError("max_iter must be positive");
    if (!(damping >= 0.0 && damping < 1.0)) throw InputError("damping must lie in [0, 1)");
    if (!std::isfinite(z)) throw InputError("z must be finite");
    if (mc_samples == 0) throw InputError("mc_samples must be positive");
}

PercolationModel::PercolationModel(const WeightedGraph& g, MessagePlan plan, const PercConfig& config)
    : graph_(&g), plan_(std::move(plan)), config_(config) {
    config_.validate();
    std::map<DistKey, std::shared_ptr<const ReachDistribution>> cache;
    auto dist_for = [&](const MessageSpec& spec) {
        DistKey key = key_of(spec);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        std::shared_ptr<const ReachDistribution> dist;
        if (spec.edges.size() <= config_.enum_threshold) {
            dist = std::make_shared<ReachDistribution>(enumerate_reach(spec.members.size(), spec.edges, config_.p));
        } else {
            dist = std::make_shared<ReachDistribution>(sample_reach(spec.members.size(), spec.edges, config_.p,
                                                                    config_.mc_samples,
                                                                    derive_seed(config_.seed, cache.size())));
        }
        cache.emplace(std::move(key), dist);
        return dist;
    };
    message_dist_.reserve(plan_.messages.size());
    for (const MessageSpec& spec : plan_.messages) message_dist_.push_back(dist_for(spec));
    factor_dist_.resize(plan_.node_factors.size());
    for (std::size_t i = 0; i < plan_.node_factors.size(); ++i)
        for (const MessageSpec& spec : plan_.node_factors[i]) factor_dist_[i].push_back(dist_for(spec));
}

bool PercolationModel::exact_averaging() const noexcept {
    auto exact = [](const auto& d) { return d->exact; };
    if (!std::all_of(message_dist_.begin(), message_dist_.end(), exact)) return false;
    return std::all_of(factor_dist_.begin(), factor_dist_.end(),
                       [&](const auto& row) { return std::all_of(row.begin(), row.end(), exact); });
}

PercMessageState PercolationModel::initial_scalar(double z) const {
    PercMessageState state;
    state.z = z;
    std::vector<double> h(plan_.messages.size(), 0.0);
    if (config_.random_init) {
        for (std::size_t m = 0; m < h.size(); ++m) h[m] = SplitMix64(derive_seed(config_.seed, m)).uniform();
    }
    state.reduced = std::move(h);
    return state;
}

PercMessageState PercolationModel::initial_series() const {
    if (config_.s_max == 0) throw InputError("series mode needs s_max >= 1");
    PercMessageState state;
    state.reduced = std::vector<TruncatedSeries>(plan_.messages.size(), TruncatedSeries(config_.s_max, 1.0));
    return state;
}

template <class T>
std::vector<T> PercolationModel::dressed_inputs(const MessageSpec& spec, std::span<const T> h, const T& z) const {
    T one;
    if constexpr (std::is_same_v<T, double>) {
        one = 1.0;
    } else {
        one = TruncatedSeries(z.max_degree(), 1.0);
    }
    std::vector<T> y;
    y.reserve(spec.members.size());
    for (std::size_t m = 0; m < spec.members.size(); ++m) {
        if (!spec.counted[m]) {
            y.push_back(one);
            continue;
        }
        T acc = z;
        for (std::size_t in : spec.inputs[m]) acc *= h[in];
        y.push_back(std::move(acc));
    }
    return y;
}

namespace {

template <class T>
T unit_like(const T& z) {
    if constexpr (std::is_same_v<T, double>) {
        (void)z;
        return 1.0;
    } else {
        return TruncatedSeries(z.max_degree(), 1.0);
    }
}

template <class T>
T z_value(const PercMessageState& state, const PercConfig& config) {
    if constexpr (std::is_same_v<T, double>) {
        (void)config;
        return state.z;
    } else {
        return TruncatedSeries::variable(config.s_max);
    }
}

}  // namespace

PercSweep PercolationModel::update(const PercMessageState& state) const {
    PercSweep out;
    out.state = state;
    std::visit(
        [&](const auto& old_values) {
            using T = typename std::decay_t<decltype(old_values)>::value_type;
            if (old_values.size() != plan_.messages.size()) throw InputError("state does not match the message plan");
            const T z = z_value<T>(state, config_);
            const T one = unit_like(z);
            std::vector<T> fresh(old_values.size(), one);
            std::vector<double> change(old_values.size(), 0.0);
            std::span<const T> h(old_values);
            parallel_for(plan_.messages.size(), config_.threads, [&](std::size_t m) {
                std::vector<T> y = dressed_inputs<T>(plan_.messages[m], h, z);
                T value = average_product<T>(*message_dist_[m], y, one);
                value = blend(old_values[m], std::move(value), config_.damping);
                if (!finite(value)) throw NumericalError("non-finite percolation message " + std::to_string(m));
                change[m] = distance(value, old_values[m]);
                fresh[m] = std::move(value);
            });
            out.max_delta = change.empty() ? 0.0 : *std::max_element(change.begin(), change.end());
            out.state.reduced = std::move(fresh);
        },
        state.reduced);
    out.state.iterations = state.iterations + 1;
    out.state.last_delta = out.max_delta;
    return out;
}

PercSolve PercolationModel::solve(PercMessageState state) const {
    if (plan_.messages.empty()) {
        state.last_delta = 0.0;
        return {std::move(state), true};
    }
    while (state.iterations < config_.max_iter) {
        PercSweep sweep = update(state);
        state = std::move(sweep.state);
        if (sweep.max_delta < config_.tol) return {std::move(state), true};
    }
    return {std::move(state), false};
}

GenValue PercolationModel::message(const PercMessageState& state, std::size_t m) const {
    return std::visit(
        [&](const auto& values) -> GenValue {
            using T = typename std::decay_t<decltype(values)>::value_type;
            T z = z_value<T>(state, config_);
            return z * values.at(m);
        },
        state.reduced);
}

GenValue PercolationModel::infer_node(const PercMessageState& state, NodeId i) const {
    if (i >= plan_.node_factors.size()) throw InputError("node " + std::to_string(i) + " out of range");
    return std::visit(
        [&](const auto& values) -> GenValue {
            using T = typename std::decay_t<decltype(values)>::value_type;
            const T z = z_value<T>(state, config_);
            const T one = unit_like(z);
            T total = z;
            std::span<const T> h(values);
            for (std::size_t f = 0; f < plan_.node_factors[i].size(); ++f) {
                std::vector<T> y = dressed_inputs<T>(plan_.node_factors[i][f], h, z);
                total *= average_product<T>(*factor_dist_[i][f], y, one);
            }
            return total;
        },
        state.reduced);
}

namespace {

// d/dz of z * prod_a h_a at z = 1.
double dressed_derivative(const std::vector<std::size_t>& inputs, std::span<const double> h,
                          std::span<const double> dh) {
    double total = 1.0;
    for (std::size_t a : inputs) total *= h[a];
    for (std::size_t a = 0; a < inputs.size(); ++a) {
        double term = dh[inputs[a]];
        for (std::size_t b = 0; b < inputs.size(); ++b)
            if (b != a) term *= h[inputs[b]];
        total += term;
    }
    return total;
}

}  // namespace

std::vector<double> PercolationModel::derivative_messages(const PercMessageState& at_one) const {
    if (at_one.is_series() || at_one.z != 1.0)
        throw InputError("derivative messages need a scalar state evaluated at z = 1");
    const auto& h = std::get<std::vector<double>>(at_one.reduced);
    const std::size_t count = plan_.messages.size();
    // Partials of each local average at the converged inputs.
    std::vector<std::vector<double>> partials(count);
    parallel_for(count, config_.threads, [&](std::size_t m) {
        const MessageSpec& spec = plan_.messages[m];
        std::vector<double> y = dressed_inputs<double>(spec, h, 1.0);
        partials[m].resize(spec.members.size());
        for (std::size_t k = 0; k < spec.members.size(); ++k)
            partials[m][k] = spec.counted[k] ? average_partial<double>(*message_dist_[m], y, k, 1.0) : 0.0;
    });
    std::vector<double> dh(count, 0.0);
    for (std::size_t iter = 0; iter < config_.max_iter; ++iter) {
        std::vector<double> fresh(count, 0.0);
        std::vector<double> change(count, 0.0);
        parallel_for(count, config_.threads, [&](std::size_t m) {
            const MessageSpec& spec = plan_.messages[m];
            double value = 0.0;
            for (std::size_t k = 0; k < spec.members.size(); ++k) {
                if (!spec.counted[k] || partials[m][k] == 0.0) continue;
                value += partials[m][k] * dressed_derivative(spec.inputs[k], h, dh);
            }
            value = blend(dh[m], value, config_.damping);
            if (!std::isfinite(value)) throw NumericalError("derivative messages diverged");
            change[m] = std::abs(value - dh[m]);
            fresh[m] = value;
        });
        dh = std::move(fresh);
        double delta = count == 0 ? 0.0 : *std::max_element(change.begin(), change.end());
        if (delta < config_.tol) return dh;
    }
    throw ConvergenceError("derivative messages did not converge within " + std::to_string(config_.max_iter) +
                           " sweeps");
}

double PercolationModel::expected_size(const PercMessageState& at_one, std::span<const double> derivatives,
                                       NodeId i) const {
    if (at_one.is_series() || at_one.z != 1.0)
        throw InputError("expected size needs a scalar state evaluated at z = 1");
    const auto& h = std::get<std::vector<double>>(at_one.reduced);
    const auto& factors = plan_.node_factors.at(i);
    std::vector<double> values(factors.size());
    std::vector<double> slopes(factors.size(), 0.0);
    for (std::size_t f = 0; f < factors.size(); ++f) {
        const MessageSpec& spec = factors[f];
        std::vector<double> y = dressed_inputs<double>(spec, h, 1.0);
        values[f] = average_product<double>(*factor_dist_[i][f], y, 1.0);
        for (std::size_t k = 0; k < spec.members.size(); ++k) {
            if (!spec.counted[k]) continue;
            double partial = average_partial<double>(*factor_dist_[i][f], y, k, 1.0);
            if (partial != 0.0) slopes[f] += partial * dressed_derivative(spec.inputs[k], h, derivatives);
        }
    }
    double total = std::accumulate(values.begin(), values.end(), 1.0, std::multiplies<>());
    for (std::size_t f = 0; f < factors.size(); ++f) {
        double others = 1.0;
        for (std::size_t g = 0; g < factors.size(); ++g)
            if (g != f) others *= values[g];
        total += others * slopes[f];
    }
    return total;
}

PercSweep update_bounded(const PercolationModel& model, const PercMessageState& state) {
    if (model.plan().kind != PlanKind::bounded) throw InputError("model was not built from a bounded plan");
    return model.update(state);
}

PercSweep update_unbounded(const PercolationModel& model, const PercMessageState& state) {
    if (model.plan().kind != PlanKind::unbounded) throw InputError("model was not built from an unbounded plan");
    return model.update(state);
}

GEvaluation eval_G(const WeightedGraph& g, const Neighborhood& cls, NodeId root, const std::map<NodeId, GenValue>& y,
                   const PercConfig& config) {
    if (!cls.contains_node(root)) throw InputError("root is not a member of the class");
    std::optional<std::size_t> series_degree;
    bool any_scalar = false;
    for (NodeId k : cls.nodes) {
        if (k == root) continue;
        auto it = y.find(k);
        if (it == y.end()) throw InputError("missing input for member " + std::to_string(k));
        if (const auto* s = std::get_if<TruncatedSeries>(&it->second)) {
            if (series_degree && *series_degree != s->max_degree()) throw InputError("series inputs disagree on degree");
            series_degree = s->max_degree();
        } else {
            any_scalar = true;
        }
    }
    if (any_scalar && series_degree) throw InputError("mixed scalar and series inputs");

    // Members are the nodes the root's paths can reach through class edges.
    std::vector<EdgeId> edges = cls.edges;
    MessageSpec spec;
    spec.root = root;
    {
        std::vector<NodeId> members;
        for (EdgeId e : edges) {
            for (NodeId v : {g.edges()[e].u, g.edges()[e].v})
                if (v != root) members.push_back(v);
        }
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        auto local = [&](NodeId v) -> std::uint32_t {
            if (v == root) return 0;
            return static_cast<std::uint32_t>(std::lower_bound(members.begin(), members.end(), v) - members.begin() + 1);
        };
        for (EdgeId e : edges) spec.edges.push_back({local(g.edges()[e].u), local(g.edges()[e].v), e});
        spec.members = std::move(members);
    }
    ReachDistribution dist = spec.edges.size() <= config.enum_threshold
                                 ? enumerate_reach(spec.members.size(), spec.edges, config.p)
                                 : sample_reach(spec.members.size(), spec.edges, config.p, config.mc_samples,
                                                derive_seed(config.seed, 0));

    GEvaluation out;
    auto run = [&](auto one) {
        using T = decltype(one);
        std::vector<T> values;
        for (NodeId k : spec.members) values.push_back(std::get<T>(y.at(k)));
        out.value = average_product<T>(dist, values, one);
        for (NodeId k : cls.nodes) {
            if (k == root) continue;
            auto pos = std::lower_bound(spec.members.begin(), spec.members.end(), k);
            if (pos == spec.members.end() || *pos != k) {
                out.partials[k] = one * 0.0;
            } else {
                out.partials[k] = average_partial<T>(dist, values, static_cast<std::size_t>(pos - spec.members.begin()), one);
            }
        }
    };
    if (series_degree) {
        run(TruncatedSeries(*series_degree, 1.0));
    } else {
        run(1.0);
    }
    return out;
}

double small_cluster_prob(const GenValue& h) {
    if (const auto* s = std::get_if<TruncatedSeries>(&h)) return s->sum();
    return std::get<double>(h);
}

double percolating_fraction(std::span<const double> h1) {
    if (h1.empty()) return 0.0;
    return 1.0 - std::accumulate(h1.begin(), h1.end(), 0.0) / static_cast<double>(h1.size());
}

PercolationReport run_percolation(const WeightedGraph& g, const PercConfig& config) {
    config.validate();
    if (!g.connected()) throw InputError("percolation needs a connected base graph");
    NeighborhoodSystem system(g, config.r);
    EquivalenceClassing classing = classify(system);

    PercolationReport report;
    report.p = config.p;
    report.r = config.r;
    report.z = config.z;
    report.s_max = config.s_max;
    report.loop_bound_fulfilled = classing.loop_bound_fulfilled;
    report.mode = config.mode;
    if (config.mode == MethodMode::automatic)
        report.mode = classing.loop_bound_fulfilled ? MethodMode::bounded : MethodMode::unbounded;
    if (report.mode == MethodMode::bounded && !classing.loop_bound_fulfilled)
        throw LoopBoundError("bounded mode requested but the loop bound r = " + std::to_string(config.r) +
                             " is not fulfilled");

    MessagePlan plan = report.mode == MethodMode::bounded
                           ? plan_bounded(system, classing)
                           : plan_unbounded(system, build_schedules(system, config.schedule_seed), config.schedule_rule);
    PercolationModel model(g, std::move(plan), config);
    report.message_count = model.plan().messages.size();
    report.exact_averaging = model.exact_averaging();

    const std::size_t n = g.node_count();
    report.nodes.resize(n);
    for (NodeId i = 0; i < n; ++i) report.nodes[i].id = i;

    PercSolve at_one = model.solve(model.initial_scalar(1.0));
    report.iterations = at_one.state.iterations;
    report.delta = at_one.state.last_delta;
    std::vector<double> h1(n);
    for (NodeId i = 0; i < n; ++i) {
        h1[i] = small_cluster_prob(model.infer_node(at_one.state, i));
        report.nodes[i].h1 = h1[i];
    }
    report.S = percolating_fraction(h1);
    if (!at_one.converged) {
        report.converged = false;
        report.error = "messages did not converge within " + std::to_string(config.max_iter) + " sweeps";
        return report;
    }

    try {
        std::vector<double> dh = model.derivative_messages(at_one.state);
        for (NodeId i = 0; i < n; ++i) report.nodes[i].mean_size = model.expected_size(at_one.state, dh, i);
    } catch (const ConvergenceError& e) {
        report.converged = false;
        report.error = e.what();
        return report;
    }

    if (config.s_max > 0) {
        PercSolve series = model.solve(model.initial_series());
        report.series_iterations = series.state.iterations;
        for (NodeId i = 0; i < n; ++i) {
            auto h = std::get<TruncatedSeries>(model.infer_node(series.state, i));
            auto& node = report.nodes[i];
            node.pi.assign(h.coefficients().begin() + 1, h.coefficients().end());
            node.tail = 1.0 - h.sum();
        }
        if (!series.converged) {
            report.converged = false;
            report.error = "series messages did not converge within " + std::to_string(config.max_iter) + " sweeps";
            return report;
        }
    }

    if (config.z != 1.0) {
        PercSolve at_z = model.solve(model.initial_scalar(config.z));
        for (NodeId i = 0; i < n; ++i) report.nodes[i].hz = std::get<double>(model.infer_node(at_z.state, i));
        if (!at_z.converged) {
            report.converged = false;
            report.error = "messages at z did not converge within " + std::to_string(config.max_iter) + " sweeps";
        }
    }
    return report;
}

}  // namespace nib
