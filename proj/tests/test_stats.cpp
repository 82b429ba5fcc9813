#include <doctest.h>

#include <cmath>

#include "sentipred/stats.hpp"

using namespace sentipred::stats;

TEST_CASE("normal quantile hits tabulated values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-7));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035).epsilon(1e-7));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963985).epsilon(1e-7));
    CHECK(normal_quantile(0.75) == doctest::Approx(0.6744897502).epsilon(1e-7));
    CHECK_THROWS(normal_quantile(0.0));
    CHECK_THROWS(normal_quantile(1.0));
}

TEST_CASE("incomplete beta matches reference values") {
    // I_x(a, b) reference values from the regularized incomplete beta.
    CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-10));
    CHECK(incomplete_beta(0.5, 0.5, 0.25) ==
          doctest::Approx(2.0 / 3.141592653589793 * std::asin(0.5)).epsilon(1e-10));
}

TEST_CASE("t p-values match known two-sided quantiles") {
    // t = 2.228 with 10 df is the 97.5% point -> p = 0.05
    CHECK(t_pvalue_two_sided(2.2281388520, 10) == doctest::Approx(0.05).epsilon(1e-6));
    // t = 1.96, df -> large approaches the normal p = 0.05
    CHECK(t_pvalue_two_sided(1.959963985, 100000) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(t_pvalue_two_sided(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("F survival function matches known critical points") {
    // F(1, 10) at 4.9646 is the 95% point
    CHECK(f_sf(4.9646027437, 1, 10) == doctest::Approx(0.05).epsilon(1e-6));
    // F(3, 20) at 3.0984 is the 95% point
    CHECK(f_sf(3.0983912017, 3, 20) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(f_sf(0.0, 2, 5) == doctest::Approx(1.0));
}

TEST_CASE("pearson correlation basics") {
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
    CHECK(pearson({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0));
    CHECK(pearson({1, 1, 1}, {1, 2, 3}) == 0.0);  // constant side
}

TEST_CASE("mean and variance") {
    CHECK(mean({1, 2, 3, 4}) == doctest::Approx(2.5));
    CHECK(variance({1, 2, 3, 4}) == doctest::Approx(5.0 / 3.0));
    CHECK(variance({7}) == 0.0);
}
