#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nib/errors.hpp"
#include "nib/oracle.hpp"
#include "nib/spectra.hpp"
#include "support.hpp"

using namespace nib;

TEST_SUITE("oracle") {
    TEST_CASE("enumeration on a single edge") {
        ExactPercolation ex = exact_percolation_enumeration(testing::path(2), 0.3);
        CHECK(ex.pi[0][0] == doctest::Approx(0.7));
        CHECK(ex.pi[0][1] == doctest::Approx(0.3));
        CHECK(ex.mean_size[1] == doctest::Approx(1.3));
    }

    TEST_CASE("enumeration on the triangle at p = 1/2") {
        ExactPercolation ex = exact_percolation_enumeration(testing::complete(3), 0.5);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(ex.pi[i] == std::vector<double>{0.25, 0.25, 0.5});
            CHECK(ex.mean_size[i] == 2.25);
            CHECK(ex.h1[i] == 1.0);
        }
    }

    TEST_CASE("p = 1 puts every node in one cluster") {
        WeightedGraph g = testing::clique_ring(2, 3);
        ExactPercolation ex = exact_percolation_enumeration(g, 1.0);
        for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(ex.pi[i].back() == 1.0);
        CHECK(ex.giant_fraction == 1.0);
    }

    TEST_CASE("enumeration limits and thread independence") {
        CHECK_THROWS_AS(exact_percolation_enumeration(testing::complete(8), 0.5), InputError);
        WeightedGraph g = testing::clique_ring(3, 3);
        ExactPercolation a = exact_percolation_enumeration(g, 0.37, 1);
        ExactPercolation b = exact_percolation_enumeration(g, 0.37, 3);
        CHECK(a.pi == b.pi);
        CHECK(a.mean_size == b.mean_size);
    }

    TEST_CASE("Monte Carlo at p = 0 is deterministic") {
        McPercolation mc = mc_percolation(testing::complete(3), 0.0, 100, 1);
        for (const auto& row : mc.pi) {
            CHECK(row[0].mean == 1.0);
            CHECK(row[0].std_error == 0.0);
        }
    }

    TEST_CASE("Monte Carlo on the triangle matches enumeration") {
        McPercolation mc = mc_percolation(testing::complete(3), 0.5, 1000000, 42);
        for (const auto& row : mc.pi) CHECK(std::abs(row[2].mean - 0.5) <= 3 * row[2].std_error);
    }

    TEST_CASE("Monte Carlo mean size on a single edge") {
        McPercolation mc = mc_percolation(testing::path(2), 0.3, 100000, 7);
        CHECK(std::abs(mc.mean_size[0].mean - 1.3) <= 3 * mc.mean_size[0].std_error);
        CHECK(mc.mean_size[0].trials == 100000);
    }

    TEST_CASE("Monte Carlo is reproducible and thread independent") {
        WeightedGraph g = testing::clique_ring(3, 4);
        McPercolation a = mc_percolation(g, 0.4, 20000, 9, 0, 1);
        McPercolation b = mc_percolation(g, 0.4, 20000, 9, 0, 4);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            CHECK(a.mean_size[i].mean == b.mean_size[i].mean);
            for (std::size_t s = 0; s < a.s_max; ++s) CHECK(a.pi[i][s].mean == b.pi[i][s].mean);
        }
        McPercolation c = mc_percolation(g, 0.4, 20000, 10, 0, 1);
        CHECK(c.mean_size[0].mean != a.mean_size[0].mean);
    }

    TEST_CASE("Monte Carlo agrees with enumeration on small graphs") {
        std::size_t flagged = 0, failed = 0;
        for (const WeightedGraph& g : {testing::cycle(5), testing::four_node_example(), testing::clique_chain(2, 3)}) {
            ExactPercolation ex = exact_percolation_enumeration(g, 0.45);
            McPercolation mc = mc_percolation(g, 0.45, 200000, 123);
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                for (std::size_t s = 0; s < g.node_count(); ++s) {
                    double d = std::abs(mc.pi[i][s].mean - ex.pi[i][s]);
                    double se = mc.pi[i][s].std_error;
                    if (d > 4 * se + 1e-12) ++failed;
                    else if (d > 3 * se + 1e-12) ++flagged;
                }
            }
        }
        CHECK(failed == 0);
        MESSAGE("values between 3 and 4 standard errors: " << flagged);
    }

    TEST_CASE("eigenvalues of small matrices") {
        std::vector<double> flip{0, 1, 1, 0};
        auto e = dense_eigenvalues(flip, 2);
        CHECK(e[0] == doctest::Approx(-1));
        CHECK(e[1] == doctest::Approx(1));
        auto k3 = dense_eigenvalues(to_dense(testing::complete(3)), 3);
        CHECK(k3[0] == doctest::Approx(-1));
        CHECK(k3[1] == doctest::Approx(-1));
        CHECK(k3[2] == doctest::Approx(2));
        std::vector<double> diag{3, 0, 0, 0, -1, 0, 0, 0, 2};
        CHECK(dense_eigenvalues(diag, 3) == std::vector<double>{-1, 2, 3});
        std::vector<double> skew{0, 1, 2, 0};
        CHECK_THROWS_AS(dense_eigenvalues(skew, 2), InputError);
    }

    TEST_CASE("eigenvalues preserve trace and Frobenius norm") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            WeightedGraph g = testing::with_random_weights(testing::clique_ring(3, 4), seed);
            std::vector<double> A = to_dense(g);
            const std::size_t n = g.node_count();
            auto eigs = dense_eigenvalues(A, n);
            double trace = 0, frob = 0, s1 = 0, s2 = 0;
            for (std::size_t i = 0; i < n; ++i) trace += A[i * n + i];
            for (double a : A) frob += a * a;
            for (double l : eigs) {
                s1 += l;
                s2 += l * l;
            }
            CHECK(std::abs(s1 - trace) < 1e-9);
            CHECK(std::abs(s2 - frob) < 1e-9);
        }
    }

    TEST_CASE("broadened density integrates to one") {
        for (const WeightedGraph& g : {testing::complete(3), testing::cycle(6), testing::four_node_example()}) {
            auto eigs = dense_eigenvalues(to_dense(g), g.node_count());
            const double eta = 0.05;
            const double lo = eigs.front() - 20 * eta, hi = eigs.back() + 20 * eta;
            std::vector<double> xs, ys;
            for (std::size_t k = 0; k <= 4000; ++k) {
                double x = lo + (hi - lo) * static_cast<double>(k) / 4000.0;
                xs.push_back(x);
                ys.push_back(exact_density(eigs, x, eta));
            }
            CHECK(std::abs(trapezoid(xs, ys) - 1.0) <= 0.02);
        }
    }

    TEST_CASE("resolvent diagonals") {
        const std::complex<double> z(0.3, 0.05);
        std::vector<double> one{0.8};
        CHECK(std::abs(resolvent_diagonal(one, 1, z, 0) - 1.0 / (z - 0.8)) < 1e-14);
        std::vector<double> flip{0, 1, 1, 0};
        CHECK(std::abs(resolvent_diagonal(flip, 2, z, 1) - z / (z * z - 1.0)) < 1e-13);
        std::vector<double> diag{2, 0, 0, -1};
        auto all = resolvent_diagonals(diag, 2, z);
        CHECK(std::abs(all[0] - 1.0 / (z - 2.0)) < 1e-14);
        CHECK(std::abs(all[1] - 1.0 / (z + 1.0)) < 1e-14);
    }

    TEST_CASE("diagonal matrix powers") {
        std::vector<double> A = to_dense(testing::complete(3));
        CHECK(diag_power(A, 3, 0, 1) == 1.0);
        CHECK(diag_power(A, 3, 2, 0) == 2.0);
        CHECK(diag_power(A, 3, 3, 2) == 2.0);
    }
}
