#include "nib/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nib/errors.hpp"
#include "nib/parallel.hpp"
#include "nib/rng.hpp"

namespace nib {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0u); }

    void reset() {
        std::iota(parent_.begin(), parent_.end(), 0u);
        std::fill(size_.begin(), size_.end(), 1u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }
    std::uint32_t size_of(std::uint32_t x) { return size_[find(x)]; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

std::uint32_t largest_component(UnionFind& uf, std::size_t n) {
    std::uint32_t best = 0;
    for (std::uint32_t v = 0; v < n; ++v) best = std::max(best, uf.size_of(v));
    return best;
}

}  // namespace

ExactPercolation exact_percolation_enumeration(const WeightedGraph& g, double p, unsigned threads) {
    OccupationModel model(p);
    const std::size_t m = g.edge_count();
    const std::size_t n = g.node_count();
    if (m > kMaxEnumerationEdges)
        throw InputError("exact enumeration supports at most " + std::to_string(kMaxEnumerationEdges) + " edges, got " +
                         std::to_string(m));
    const std::uint64_t configs = std::uint64_t{1} << m;
    // Fixed blocks so the floating-point summation order never depends on threads.
    const std::uint64_t block = std::min<std::uint64_t>(configs, 4096);
    const std::size_t blocks = static_cast<std::size_t>(configs / block);
    struct Partial {
        std::vector<double> pi;
        double giant = 0.0;
    };
    std::vector<Partial> partial(blocks);
    const auto& edges = g.edges();
    parallel_for(blocks, threads, [&](std::size_t b) {
        Partial& acc = partial[b];
        acc.pi.assign(n * n, 0.0);
        UnionFind uf(n);
        for (std::uint64_t mask = b * block; mask < (b + 1) * block; ++mask) {
            uf.reset();
            for (std::size_t e = 0; e < m; ++e)
                if (mask >> e & 1U) uf.unite(edges[e].u, edges[e].v);
            const auto k = static_cast<std::size_t>(std::popcount(mask));
            const double w = model.configuration_weight(k, m);
            if (w == 0.0) continue;
            for (std::uint32_t v = 0; v < n; ++v) acc.pi[v * n + uf.size_of(v) - 1] += w;
            acc.giant += w * static_cast<double>(largest_component(uf, n)) / static_cast<double>(n);
        }
    });
    ExactPercolation out;
    out.p = p;
    out.pi.assign(n, std::vector<double>(n, 0.0));
    for (const Partial& acc : partial) {
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t s = 0; s < n; ++s) out.pi[v][s] += acc.pi[v * n + s];
        out.giant_fraction += acc.giant;
    }
    out.mean_size.resize(n);
    out.h1.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        double mean = 0.0, total = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            mean += static_cast<double>(s + 1) * out.pi[v][s];
            total += out.pi[v][s];
        }
        out.mean_size[v] = mean;
        out.h1[v] = total;
    }
    return out;
}

namespace {

McEstimate estimate(std::uint64_t sum, std::uint64_t sum_sq, std::size_t trials, double scale = 1.0) {
    McEstimate e;
    e.trials = trials;
    const double t = static_cast<double>(trials);
    const double s = static_cast<double>(sum);
    e.mean = s / t * scale;
    if (trials > 1) {
        double var = (static_cast<double>(sum_sq) - s * s / t) / (t - 1.0);
        e.std_error = std::sqrt(std::max(var, 0.0) / t) * scale;
    }
    return e;
}

}  // namespace

McPercolation mc_percolation(const WeightedGraph& g, double p, std::size_t trials, std::uint64_t seed,
                             std::size_t s_max, unsigned threads) {
    OccupationModel check(p);
    if (trials == 0) throw InputError("mc_percolation needs at least one trial");
    const std::size_t n = g.node_count();
    if (s_max == 0 || s_max > n) s_max = n;
    const auto& edges = g.edges();

    struct Counts {
        std::vector<std::uint64_t> pi;  // n * s_max
        std::vector<std::uint64_t> size_sum, size_sq;
        std::uint64_t giant_sum = 0, giant_sq = 0;
    };
    unsigned workers = threads == 0 ? default_threads() : threads;
    workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(workers, trials)));
    std::vector<Counts> counts(workers);
    const std::size_t chunk = (trials + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t w) {
        Counts& c = counts[w];
        c.pi.assign(n * s_max, 0);
        c.size_sum.assign(n, 0);
        c.size_sq.assign(n, 0);
        UnionFind uf(n);
        const std::size_t end = std::min(trials, (w + 1) * chunk);
        for (std::size_t t = w * chunk; t < end; ++t) {
            SplitMix64 rng(derive_seed(seed, t));
            uf.reset();
            for (const Edge& e : edges)
                if (rng.uniform() < p) uf.unite(e.u, e.v);
            for (std::uint32_t v = 0; v < n; ++v) {
                const std::uint64_t s = uf.size_of(v);
                if (s <= s_max) ++c.pi[v * s_max + s - 1];
                c.size_sum[v] += s;
                c.size_sq[v] += s * s;
            }
            const std::uint64_t big = largest_component(uf, n);
            c.giant_sum += big;
            c.giant_sq += big * big;
        }
    });

    Counts total;
    total.pi.assign(n * s_max, 0);
    total.size_sum.assign(n, 0);
    total.size_sq.assign(n, 0);
    for (const Counts& c : counts) {
        for (std::size_t k = 0; k < total.pi.size(); ++k) total.pi[k] += c.pi[k];
        for (std::size_t v = 0; v < n; ++v) {
            total.size_sum[v] += c.size_sum[v];
            total.size_sq[v] += c.size_sq[v];
        }
        total.giant_sum += c.giant_sum;
        total.giant_sq += c.giant_sq;
    }

    McPercolation out;
    out.p = p;
    out.seed = seed;
    out.trials = trials;
    out.s_max = s_max;
    out.pi.assign(n, std::vector<McEstimate>(s_max));
    out.mean_size.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t s = 0; s < s_max; ++s) {
            const std::uint64_t hits = total.pi[v * s_max + s];
            out.pi[v][s] = estimate(hits, hits, trials);
        }
        out.mean_size[v] = estimate(total.size_sum[v], total.size_sq[v], trials);
    }
    out.giant_fraction = estimate(total.giant_sum, total.giant_sq, trials, 1.0 / static_cast<double>(n));
    return out;
}

std::vector<double> dense_eigenvalues(std::span<const double> A, std::size_t n, double tol) {
    if (A.size() != n * n) throw InputError("matrix size does not match n");
    if (n > 2048) throw InputError("dense eigensolver limited to n <= 2048");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(A[i * n + j] - A[j * n + i]) > 1e-12) throw InputError("matrix is not symmetric");
    std::vector<double> a(A.begin(), A.end());
    auto off_mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a[i * n + j] * a[i * n + j];
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 100 && off_mass() >= tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eigs(n);
    for (std::size_t i = 0; i < n; ++i) eigs[i] = a[i * n + i];
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

double exact_density(std::span<const double> eigs, double x, double eta) {
    if (!(eta > 0.0)) throw InputError("eta must be positive");
    if (eigs.empty()) return 0.0;
    const std::complex<double> z(x, eta);
    double acc = 0.0;
    for (double lambda : eigs) acc += (1.0 / (z - lambda)).imag();
    return -acc / (static_cast<double>(eigs.size()) * std::numbers::pi);
}

namespace {

Eigen::MatrixXcd shifted(std::span<const double> A, std::size_t n, std::complex<double> z) {
    if (A.size() != n * n) throw InputError("matrix size does not match n");
    Eigen::MatrixXcd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (i == j ? z : 0.0) - A[i * n + j];
    return M;
}

}  // namespace

std::complex<double> resolvent_diagonal(std::span<const double> A, std::size_t n, std::complex<double> z,
                                        std::size_t i) {
    if (i >= n) throw InputError("row index out of range");
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    Eigen::VectorXcd x = shifted(A, n, z).partialPivLu().solve(e);
    return x(static_cast<Eigen::Index>(i));
}

std::vector<std::complex<double>> resolvent_diagonals(std::span<const double> A, std::size_t n,
                                                      std::complex<double> z) {
    Eigen::MatrixXcd inv = shifted(A, n, z).partialPivLu().inverse();
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    return out;
}

double diag_power(std::span<const double> A, std::size_t n, std::size_t s, std::size_t i) {
    if (A.size() != n * n) throw InputError("matrix size does not match n");
    if (i >= n) throw InputError("row index out of range");
    std::vector<double> v(n, 0.0), next(n);
    v[i] = 1.0;
    for (std::size_t step = 0; step < s; ++step) {
        for (std::size_t r = 0; r < n; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < n; ++c) acc += A[r * n + c] * v[c];
            next[r] = acc;
        }
        v.swap(next);
    }
    return v[i];
}

}  // namespace nib
