#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nib/graph.hpp"
#include "nib/message_plan.hpp"
#include "nib/neighborhoods.hpp"
#include "nib/percolation.hpp"

namespace nib {

using cplx = std::complex<double>;

/// How the diagonal entry D_ss of a local system is formed from the
/// messages arriving at member s from its other classes.
enum class DiagonalRule {
    resolvent,        ///< z - A_ss - sum H   (default; exact on fulfilled graphs)
    literal_product,  ///< prod (z - H), trivial class included
    inverse_factor,   ///< 1 / F with F = (1/z) prod z/(z - H)
};

std::string to_string(DiagonalRule rule);
DiagonalRule parse_diagonal_rule(std::string_view text);

struct XGrid {
    double min = -3.0;
    double max = 3.0;
    std::size_t count = 601;

    double at(std::size_t k) const;
};

struct SpectralConfig {
    double eta = 0.05;
    XGrid grid;
    int r = 0;
    MethodMode mode = MethodMode::automatic;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    double damping = 0.0;
    bool warm_start = false;
    DiagonalRule rule = DiagonalRule::resolvent;
    ScheduleEdgeRule schedule_rule = ScheduleEdgeRule::residual;
    std::optional<std::uint64_t> schedule_seed;
    unsigned threads = 1;

    void validate() const;
};

struct SpectralMessageState {
    std::vector<cplx> H;
    /// [A]_kk for every node carrying a self-loop.
    std::vector<std::pair<NodeId, double>> trivial;
    std::size_t iterations = 0;
    double last_delta = 0.0;
};

/// Dense local problem for one message: H = v^T (D - A_local)^{-1} v.
struct LocalSystem {
    std::vector<NodeId> members;
    std::vector<cplx> v;
    /// Row-major members.size() squared, symmetric.
    std::vector<double> A_local;
    std::vector<cplx> D;

    std::size_t size() const noexcept { return members.size(); }
};

/// F = (1/z) prod_m z / (z - H_m), with a factor z / (z - a) when the node has
/// a self-loop of weight a.
cplx node_factor(std::span<const cplx> incoming, std::optional<double> self_loop, cplx z);

/// Diagonal entry for a member under the given rule.
cplx diagonal_entry(DiagonalRule rule, std::span<const cplx> incoming, std::optional<double> self_loop, cplx z);

/// Solves M x = b by LU with partial pivoting; M is row-major n x n and is
/// overwritten. Throws NumericalError on a zero pivot.
std::vector<cplx> lu_solve(std::vector<cplx> M, std::vector<cplx> b);

LocalSystem build_local_system(const WeightedGraph& g, const MessageSpec& spec, std::span<const cplx> H, cplx z,
                               DiagonalRule rule);

/// v^T (D - A_local)^{-1} v.
cplx solve_local(const LocalSystem& system);

struct SpectralSweep {
    SpectralMessageState state;
    double max_delta = 0.0;
    /// Largest Im H seen in the sweep; positive values break the resolvent sign.
    double max_imag = 0.0;
};

struct SpectralSolve {
    SpectralMessageState state;
    bool converged = false;
    bool sign_ok = true;
};

class SpectralModel {
public:
    SpectralModel(const WeightedGraph& g, MessagePlan plan, const SpectralConfig& config);
    SpectralModel(WeightedGraph&&, MessagePlan, const SpectralConfig&) = delete;

    const MessagePlan& plan() const noexcept { return plan_; }
    const SpectralConfig& config() const noexcept { return config_; }
    const WeightedGraph& graph() const noexcept { return *graph_; }

    SpectralMessageState initial_state() const;
    SpectralSweep update(const SpectralMessageState& state, cplx z) const;
    SpectralSolve solve(SpectralMessageState state, cplx z) const;

    /// H_i(z) = A_ii + sum of the walk sums of node i's factors.
    cplx infer_node(const SpectralMessageState& state, NodeId i, cplx z) const;

private:
    const WeightedGraph* graph_;
    MessagePlan plan_;
    SpectralConfig config_;
};

SpectralSweep update_message_spectral(const SpectralModel& model, const SpectralMessageState& state, cplx z);
cplx infer_node_spectral(const SpectralModel& model, const SpectralMessageState& state, NodeId i, cplx z);

struct DensityValue {
    double rho = 0.0;
    double raw = 0.0;
    bool clipped = false;
};

/// rho = -(1 / (n pi)) Im sum_i 1 / (z - H_i).
DensityValue density_at(std::span<const cplx> H_nodes, cplx z);

/// Classified and planned spectral problem reused across z values.
class SpectralEngine {
public:
    SpectralEngine(const WeightedGraph& g, const SpectralConfig& config);
    SpectralEngine(WeightedGraph&&, const SpectralConfig&) = delete;

    MethodMode mode() const noexcept { return mode_; }
    bool loop_bound_fulfilled() const noexcept { return fulfilled_; }
    const SpectralModel& model() const noexcept { return model_; }

    struct Point {
        std::vector<cplx> H_nodes;
        SpectralSolve solve;
    };
    Point evaluate(cplx z, const SpectralMessageState* warm = nullptr) const;

private:
    static MessagePlan make_plan(const WeightedGraph& g, const SpectralConfig& config, MethodMode& mode,
                                 bool& fulfilled);

    MethodMode mode_ = MethodMode::bounded;
    bool fulfilled_ = false;
    SpectralModel model_;
};

struct SpectrumRow {
    double x = 0.0;
    double rho = 0.0;
    double raw = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    std::string error;
};

struct SpectrumReport {
    double eta = 0.0;
    int r = 0;
    MethodMode mode = MethodMode::bounded;
    bool loop_bound_fulfilled = false;
    DiagonalRule rule = DiagonalRule::resolvent;
    bool warm_start = false;
    std::size_t message_count = 0;
    std::vector<SpectrumRow> rows;
    /// Trapezoid integral of the clipped density over the grid.
    double mass_estimate = 0.0;
    bool all_converged = true;
};

/// Runs the method at every grid point. Per-point failures are recorded in
/// the row and the sweep continues. Throws LoopBoundError when bounded mode
/// is forced on an unfulfilled system.
SpectrumReport sweep(const WeightedGraph& g, const SpectralConfig& config);

/// Trapezoid integral of samples ys over equally spaced xs.
double trapezoid(std::span<const double> xs, std::span<const double> ys);

}  // namespace nib
