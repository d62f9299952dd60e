#include <doctest.h>

#include <cmath>

#include "nib/errors.hpp"
#include "nib/local_average.hpp"
#include "nib/series.hpp"

using namespace nib;

namespace {

// Root 0 plus members 1..m in local numbering.
std::vector<LocalEdge> triangle_edges() { return {{0, 1, 0}, {0, 2, 1}, {1, 2, 2}}; }

double reach_probability(const ReachDistribution& d, std::size_t member) {
    double total = 0.0;
    for (const auto& [mask, prob] : d.outcomes)
        if (mask >> member & 1U) total += prob;
    return total;
}

}  // namespace

TEST_SUITE("series") {
    TEST_CASE("construction and evaluation") {
        TruncatedSeries z = TruncatedSeries::variable(3);
        CHECK(z.coefficients() == std::vector<double>{0, 1, 0, 0});
        TruncatedSeries c(2, 5.0);
        CHECK(c[0] == 5.0);
        CHECK(c[7] == 0.0);
        TruncatedSeries poly(3, {1.0, 2.0, 3.0});
        CHECK(poly.max_degree() == 3);
        CHECK(poly.evaluate(2.0) == doctest::Approx(1 + 4 + 12));
        CHECK(poly.sum() == 6.0);
    }

    TEST_CASE("products drop terms beyond the cap") {
        TruncatedSeries a(3, {1.0, 1.0});
        TruncatedSeries sq = a * a;  // 1 + 2z + z^2
        CHECK(sq.coefficients() == std::vector<double>{1, 2, 1, 0});
        TruncatedSeries cube = sq * a * a;  // (1 + z)^4 truncated at z^3
        CHECK(cube.coefficients() == std::vector<double>{1, 4, 6, 4});
    }

    TEST_CASE("shift multiplies by z and discards the top coefficient") {
        TruncatedSeries a(2, {1.0, 2.0, 3.0});
        a.shift();
        CHECK(a.coefficients() == std::vector<double>{0, 1, 2});
    }

    TEST_CASE("sums, scaling, difference") {
        TruncatedSeries a(2, {1.0, 2.0});
        TruncatedSeries b(2, {0.5, 0.0, 4.0});
        CHECK((a + b).coefficients() == std::vector<double>{1.5, 2, 4});
        CHECK((a * 2.0).coefficients() == std::vector<double>{2, 4, 0});
        CHECK(max_abs_diff(a, b) == 4.0);
    }
}

TEST_SUITE("local_average") {
    TEST_CASE("single edge: two configurations") {
        std::vector<LocalEdge> e{{0, 1, 0}};
        ReachDistribution d = enumerate_reach(1, e, 0.3);
        CHECK(d.exact);
        std::vector<double> y{0.7};
        // G = (1 - p) + p t
        CHECK(average_product<double>(d, y, 1.0) == doctest::Approx(0.7 + 0.3 * 0.7));
        CHECK(average_partial<double>(d, y, 0, 1.0) == doctest::Approx(0.3));
    }

    TEST_CASE("triangle rooted at a corner, p = 1/2") {
        ReachDistribution d = enumerate_reach(2, triangle_edges(), 0.5);
        std::vector<double> ones{1.0, 1.0}, zeros{0.0, 0.0};
        CHECK(average_product<double>(d, ones, 1.0) == doctest::Approx(1.0));
        CHECK(average_partial<double>(d, ones, 0, 1.0) == doctest::Approx(0.625));
        CHECK(average_partial<double>(d, ones, 1, 1.0) == doctest::Approx(0.625));
        CHECK(average_product<double>(d, zeros, 1.0) == doctest::Approx(0.25));
        CHECK(reach_probability(d, 0) == doctest::Approx(0.625));
    }

    TEST_CASE("series inputs produce the cluster-size polynomial") {
        // Root of a triangle with members dressed by z: G(z) = 1/4 + 1/4 z + 1/2 z^2.
        ReachDistribution d = enumerate_reach(2, triangle_edges(), 0.5);
        TruncatedSeries z = TruncatedSeries::variable(4);
        std::vector<TruncatedSeries> y{z, z};
        TruncatedSeries g = average_product<TruncatedSeries>(d, y, TruncatedSeries(4, 1.0));
        CHECK(g[0] == doctest::Approx(0.25));
        CHECK(g[1] == doctest::Approx(0.25));
        CHECK(g[2] == doctest::Approx(0.5));
        CHECK(g[3] == 0.0);
    }

    TEST_CASE("probabilities sum to one and degenerate p are deterministic") {
        for (double p : {0.0, 0.2, 1.0}) {
            ReachDistribution d = enumerate_reach(2, triangle_edges(), p);
            double total = 0.0;
            for (const auto& [mask, prob] : d.outcomes) total += prob;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
            if (p == 0.0) CHECK(d.outcomes.size() == 1);
            if (p == 1.0) CHECK(d.outcomes == std::vector<std::pair<std::uint64_t, double>>{{3, 1.0}});
        }
    }

    TEST_CASE("sampling approaches the enumeration") {
        ReachDistribution exact = enumerate_reach(2, triangle_edges(), 0.4);
        ReachDistribution mc = sample_reach(2, triangle_edges(), 0.4, 200000, 11);
        CHECK_FALSE(mc.exact);
        CHECK(mc.samples == 200000);
        const double pr = reach_probability(exact, 1);
        const double se = std::sqrt(pr * (1 - pr) / 200000.0);
        CHECK(std::abs(reach_probability(mc, 1) - pr) < 4 * se);
        ReachDistribution again = sample_reach(2, triangle_edges(), 0.4, 200000, 11);
        CHECK(again.outcomes == mc.outcomes);
    }

    TEST_CASE("size limits") {
        std::vector<LocalEdge> many;
        for (std::uint32_t k = 0; k < 31; ++k) many.push_back({0, 1, k});
        CHECK_THROWS_AS(enumerate_reach(1, many, 0.5), InputError);
        CHECK_THROWS_AS(enumerate_reach(kMaxLocalMembers + 1, {}, 0.5), InputError);
    }
}
