#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nib/graph.hpp"

namespace nib {

/// Largest edge count the exhaustive enumeration accepts.
inline constexpr std::size_t kMaxEnumerationEdges = 24;

struct ExactPercolation {
    double p = 0.0;
    /// pi[i][s - 1] = probability that node i lies in a cluster of s nodes.
    std::vector<std::vector<double>> pi;
    std::vector<double> mean_size;
    /// sum_s pi_i(s); 1 up to rounding on a finite graph.
    std::vector<double> h1;
    /// Expected largest-cluster fraction.
    double giant_fraction = 0.0;
};

/// Sums over all 2^|E| occupation configurations. Self-loops play no role.
ExactPercolation exact_percolation_enumeration(const WeightedGraph& g, double p, unsigned threads = 1);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

struct McPercolation {
    double p = 0.0;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::size_t s_max = 0;
    /// pi[i][s - 1] for s = 1..s_max.
    std::vector<std::vector<McEstimate>> pi;
    std::vector<McEstimate> mean_size;
    McEstimate giant_fraction;
};

/// Independent edge coins per trial; trial t draws from SplitMix64 seeded
/// with derive_seed(seed, t). Results do not depend on `threads`.
/// s_max = 0 tracks every size up to n.
McPercolation mc_percolation(const WeightedGraph& g, double p, std::size_t trials, std::uint64_t seed,
                             std::size_t s_max = 0, unsigned threads = 1);

/// Cyclic Jacobi on a row-major symmetric n x n matrix; eigenvalues ascending.
std::vector<double> dense_eigenvalues(std::span<const double> A, std::size_t n, double tol = 1e-12);

/// -(1 / (n pi)) Im sum_k 1 / (x + i eta - lambda_k).
double exact_density(std::span<const double> eigs, double x, double eta);

/// [(zI - A)^{-1}]_ii by a dense complex solve.
std::complex<double> resolvent_diagonal(std::span<const double> A, std::size_t n, std::complex<double> z,
                                        std::size_t i);
/// Every diagonal entry of (zI - A)^{-1} from one factorization.
std::vector<std::complex<double>> resolvent_diagonals(std::span<const double> A, std::size_t n,
                                                      std::complex<double> z);

/// [A^s]_ii via s matrix-vector products starting from e_i.
double diag_power(std::span<const double> A, std::size_t n, std::size_t s, std::size_t i);

}  // namespace nib
