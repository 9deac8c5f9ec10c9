#include "kpzsim/noise.hpp"
#include "kpzsim/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace kpzsim;

TEST_CASE("empirical cdf")
{
    const EmpiricalCdf F({3.0, 1.0, 2.0});
    CHECK(F(0.5) == doctest::Approx(0.0));
    CHECK(F(1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(F(2.5) == doctest::Approx(2.0 / 3.0));
    CHECK(F(10.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(EmpiricalCdf({}), std::invalid_argument);
}

TEST_CASE("two-sample KS distance")
{
    SUBCASE("identical multisets give zero")
    {
        const std::vector<double> a{1.0, 2.0, 2.0, 5.0};
        CHECK(ks_distance(a, a) == doctest::Approx(0.0));
    }
    SUBCASE("disjointly supported samples give one")
    {
        const std::vector<double> a{0.0, 1.0}, b{5.0, 6.0};
        CHECK(ks_distance(a, b) == doctest::Approx(1.0));
    }
    SUBCASE("two Bernoulli batches stay below the 1% critical value")
    {
        const EnvironmentNoise n(99);
        std::vector<double> a, b;
        for (int i = 0; i < 10000; ++i) {
            a.push_back(n.bernoulli(i, Channel::ic_bernoulli, 1, 0.5) ? 1.0 : 0.0);
            b.push_back(n.bernoulli(i, Channel::ic_bernoulli, 2, 0.5) ? 1.0 : 0.0);
        }
        CHECK(ks_distance(a, b) < ks_critical(0.01, a.size(), b.size()));
    }
}

TEST_CASE("chi-square machinery")
{
    // classic quantiles
    CHECK(chi_square_cdf(3.841, 1) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(chi_square_cdf(18.475, 7) == doctest::Approx(0.99).epsilon(1e-3));
    CHECK(chi_square_quantile(0.95, 1) == doctest::Approx(3.841).epsilon(1e-3));

    const EnvironmentNoise n(17);
    std::vector<std::int64_t> counts(4, 0);
    for (int i = 0; i < 40000; ++i) {
        const int c = (n.bernoulli(i, Channel::ic_bernoulli, 3, 0.5) ? 2 : 0) +
                      (n.bernoulli(i, Channel::ic_bernoulli, 4, 0.5) ? 1 : 0);
        ++counts[c];
    }
    const std::vector<double> expect(4, 0.25);
    const auto res = chi_square_test(counts, expect);
    CHECK(res.dof == 3);
    CHECK(res.p_value > 0.01);

    const std::vector<std::int64_t> tiny{1, 2};
    const std::vector<double> half{0.5, 0.5};
    CHECK_THROWS_AS(chi_square_test(tiny, half), std::invalid_argument);
}

TEST_CASE("normal quantile brackets familiar values")
{
    CHECK(normal_upper_quantile(0.025) == doctest::Approx(1.959964).epsilon(1e-4));
    CHECK(normal_upper_quantile(0.005) == doctest::Approx(2.575829).epsilon(1e-4));
}

TEST_CASE("fractions are exact")
{
    const Fraction q(1, 3), b(3, 5);
    CHECK(q * b == Fraction(1, 5));
    CHECK(q * b + (Fraction::one() - q * b) == Fraction::one());
    CHECK(Fraction(2, 4) == Fraction(1, 2));
    CHECK_THROWS_AS(Fraction(1, 0), std::invalid_argument);
}
