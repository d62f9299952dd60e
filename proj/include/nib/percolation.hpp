#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nib/graph.hpp"
#include "nib/local_average.hpp"
#include "nib/message_plan.hpp"
#include "nib/neighborhoods.hpp"
#include "nib/series.hpp"

namespace nib {

enum class MethodMode { bounded, unbounded, automatic };

std::string to_string(MethodMode mode);
MethodMode parse_mode(std::string_view text);

struct PercConfig {
    double p = 0.5;
    int r = 0;
    MethodMode mode = MethodMode::automatic;
    /// Extra real evaluation point reported as H_i(z) when != 1.
    double z = 1.0;
    /// Largest cluster size resolved by the series pass; 0 skips it.
    std::size_t s_max = 0;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    /// new = damping * old + (1 - damping) * computed
    double damping = 0.0;
    /// Local problems with more edges than this are averaged by sampling.
    std::size_t enum_threshold = 16;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 0;
    ScheduleEdgeRule schedule_rule = ScheduleEdgeRule::residual;
    std::optional<std::uint64_t> schedule_seed;
    /// Scalar messages start uniformly random in [0, 1] instead of 0.
    bool random_init = false;
    unsigned threads = 1;

    void validate() const;
};

/// Message values, stored reduced: h = H / z, where H is the cluster-size
/// generating function seen through one class (or scheduled pair).
struct PercMessageState {
    std::variant<std::vector<double>, std::vector<TruncatedSeries>> reduced;
    double z = 1.0;
    std::size_t iterations = 0;
    double last_delta = std::numeric_limits<double>::infinity();

    bool is_series() const { return reduced.index() == 1; }
};

struct PercSweep {
    PercMessageState state;
    double max_delta = 0.0;
};

struct PercSolve {
    PercMessageState state;
    bool converged = false;
};

/// Bond-percolation message passing over a fixed message plan.
class PercolationModel {
public:
    PercolationModel(const WeightedGraph& g, MessagePlan plan, const PercConfig& config);
    PercolationModel(WeightedGraph&&, MessagePlan, const PercConfig&) = delete;

    const MessagePlan& plan() const noexcept { return plan_; }
    const PercConfig& config() const noexcept { return config_; }
    /// True when every local average is an exact enumeration.
    bool exact_averaging() const noexcept;

    PercMessageState initial_scalar(double z) const;
    PercMessageState initial_series() const;

    /// One synchronous sweep: every message recomputed from `state`.
    PercSweep update(const PercMessageState& state) const;
    /// Sweeps until the max change drops below tol or max_iter is reached.
    PercSolve solve(PercMessageState state) const;

    /// H = z * h for message m.
    GenValue message(const PercMessageState& state, std::size_t m) const;
    /// Cluster-size generating function of node i, H_i(z).
    GenValue infer_node(const PercMessageState& state, NodeId i) const;

    /// dH/dz at z = 1 for every message, reduced (dh/dz), by fixed-point iteration.
    std::vector<double> derivative_messages(const PercMessageState& at_one) const;
    /// <s_i> = H_i'(1).
    double expected_size(const PercMessageState& at_one, std::span<const double> derivatives, NodeId i) const;

private:
    template <class T>
    std::vector<T> dressed_inputs(const MessageSpec& spec, std::span<const T> h, const T& z) const;

    const WeightedGraph* graph_;
    MessagePlan plan_;
    PercConfig config_;
    std::vector<std::shared_ptr<const ReachDistribution>> message_dist_;
    std::vector<std::vector<std::shared_ptr<const ReachDistribution>>> factor_dist_;
};

PercSweep update_bounded(const PercolationModel& model, const PercMessageState& state);
PercSweep update_unbounded(const PercolationModel& model, const PercMessageState& state);

struct GEvaluation {
    GenValue value;
    std::map<NodeId, GenValue> partials;
};

/// < prod_{k reached from root inside cls} y_k > over occupation configurations
/// of the class edges, and its partial derivatives in each y_k.
GEvaluation eval_G(const WeightedGraph& g, const Neighborhood& cls, NodeId root,
                   const std::map<NodeId, GenValue>& y, const PercConfig& config);

/// H_i(1): a scalar evaluation at z = 1, or the coefficient sum of a series.
double small_cluster_prob(const GenValue& h);

/// S = 1 - mean_i H_i(1).
double percolating_fraction(std::span<const double> h1);

struct NodeObservables {
    NodeId id = 0;
    double h1 = 0.0;
    double mean_size = 0.0;
    /// pi[s - 1] = pi_i(s) for s = 1..s_max.
    std::vector<double> pi;
    /// 1 - sum_s pi_i(s): mass beyond s_max, giant cluster included.
    double tail = 0.0;
    std::optional<double> hz;
};

struct PercolationReport {
    double p = 0.0;
    int r = 0;
    MethodMode mode = MethodMode::bounded;
    bool loop_bound_fulfilled = false;
    double z = 1.0;
    std::size_t s_max = 0;
    double S = 0.0;
    std::size_t iterations = 0;
    double delta = 0.0;
    std::size_t series_iterations = 0;
    std::size_t message_count = 0;
    bool exact_averaging = true;
    bool converged = true;
    std::string error;
    std::vector<NodeObservables> nodes;
};

/// Classifies, selects the mode, iterates and infers every observable.
/// Throws InputError on a disconnected graph and LoopBoundError when bounded
/// mode is forced on an unfulfilled graph. A convergence failure is reported
/// through `converged`/`error` with the partial state's observables.
PercolationReport run_percolation(const WeightedGraph& g, const PercConfig& config);

}  // namespace nib
