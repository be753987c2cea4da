#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wr/rng.hpp"
#include "wr/stats.hpp"

TEST_CASE("kolmogorov tail values hit the classical landmarks") {
    // Critical values of the Kolmogorov distribution: Q(1.3581) = 0.05,
    // Q(1.6276) = 0.01.
    CHECK(wr::kolmogorov_q(1.3581) == Catch::Approx(0.05).margin(1e-3));
    CHECK(wr::kolmogorov_q(1.6276) == Catch::Approx(0.01).margin(1e-3));
    CHECK(wr::kolmogorov_q(1e-9) == Catch::Approx(1.0).margin(1e-6));
    CHECK(wr::kolmogorov_q(6.0) == Catch::Approx(0.0).margin(1e-12));
    // Reference values straddling the series crossover, computed with both
    // the direct alternating series and its theta-function transform summed
    // to machine precision (the two agree to 3e-16 here).
    CHECK(wr::kolmogorov_q(1.1799) == Catch::Approx(0.12351204971188678).margin(1e-12));
    CHECK(wr::kolmogorov_q(1.1801) == Catch::Approx(0.12339559161939273).margin(1e-12));
}

TEST_CASE("regularized gamma tail and chi-square tail behave") {
    CHECK(wr::regularized_gamma_q(0.5, 0.0) == Catch::Approx(1.0));
    CHECK(wr::regularized_gamma_q(2.0, 200.0) == Catch::Approx(0.0).margin(1e-12));
    // 1% critical value of chi-square with one degree of freedom.
    CHECK(wr::chi_square_tail(6.635, 1) == Catch::Approx(0.01).margin(1e-3));
    // With two degrees of freedom the tail is exactly exp(-x/2).
    for (double x : {0.5, 2.0, 4.60517, 9.21034})
        CHECK(wr::chi_square_tail(x, 2) == Catch::Approx(std::exp(-0.5 * x)).epsilon(1e-10));
    CHECK_THROWS_AS(wr::chi_square_tail(1.0, 0), std::invalid_argument);
}

TEST_CASE("the log-slope fit recovers a synthetic exponential rate") {
    const std::vector<double> betas = {2.0, 2.5, 3.0, 3.5};
    std::vector<std::vector<double>> groups;
    for (double b : betas)
        groups.emplace_back(150, 0.37 * std::exp(3.0 * b));
    const auto fit = wr::fit_log_slope(betas, groups);
    CHECK(fit.slope == Catch::Approx(3.0).margin(1e-9));
    CHECK(fit.slope_stderr == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(fit.betas == betas);
    REQUIRE(fit.log_means.size() == betas.size());

    // Scaling every sample shifts the intercept, not the slope.
    for (auto& g : groups)
        for (auto& x : g) x *= 7.0;
    const auto scaled = wr::fit_log_slope(betas, groups);
    CHECK(scaled.slope == Catch::Approx(fit.slope).margin(1e-9));
}

TEST_CASE("the log-slope fit rejects unusable inputs") {
    const std::vector<double> betas = {2.0, 2.5, 3.0};
    std::vector<std::vector<double>> groups(3, std::vector<double>(150, 1.0));
    CHECK_NOTHROW(wr::fit_log_slope(betas, groups));

    groups[1].resize(99);
    CHECK_THROWS_AS(wr::fit_log_slope(betas, groups), std::invalid_argument);
    groups[1].assign(150, 0.0);
    CHECK_THROWS_AS(wr::fit_log_slope(betas, groups), std::invalid_argument);
    groups[1].assign(150, 1.0);

    CHECK_THROWS_AS(wr::fit_log_slope({2.0, 2.5}, {groups[0], groups[1]}),
                    std::invalid_argument);
    CHECK_THROWS_AS(wr::fit_log_slope({2.0, 2.0, 3.0}, groups), std::invalid_argument);
    CHECK_THROWS_AS(wr::fit_log_slope({2.0, 2.5, 3.0, 3.5}, groups), std::invalid_argument);
}

TEST_CASE("the KS test accepts true unit exponentials and rejects uniforms") {
    wr::Rng rng(777);
    std::vector<double> expo;
    expo.reserve(10'000);
    for (int i = 0; i < 10'000; ++i)
        expo.push_back(-std::log(1.0 - rng.next_double()));
    const auto good = wr::ks_unit_exponential(expo);
    CHECK(good.n == expo.size());
    CHECK(good.statistic > 0.0);
    CHECK(good.p_value >= 0.01);
    CHECK_FALSE(good.reject);

    std::vector<double> unif;
    unif.reserve(10'000);
    for (int i = 0; i < 10'000; ++i) unif.push_back(rng.next_double());
    const auto bad = wr::ks_unit_exponential(unif);
    CHECK(bad.reject);
    CHECK(bad.p_value < 1e-6);
}

TEST_CASE("the KS test validates its inputs") {
    std::vector<double> short_input(199, 1.0);
    CHECK_THROWS_AS(wr::ks_unit_exponential(short_input), std::invalid_argument);
    std::vector<double> constant(500, 1.0);
    CHECK_THROWS_AS(wr::ks_unit_exponential(constant), std::invalid_argument);
    std::vector<double> negative(500, 1.0);
    negative[7] = -0.25;
    CHECK_THROWS_AS(wr::ks_unit_exponential(negative), std::invalid_argument);
}

TEST_CASE("the chi-square exit test scores uniformity") {
    const auto balanced = wr::chi_square_uniform_exit({500, 500});
    CHECK(balanced.statistic == Catch::Approx(0.0));
    CHECK(balanced.p_value == Catch::Approx(1.0));
    CHECK_FALSE(balanced.reject);

    const auto three = wr::chi_square_uniform_exit({200, 200, 200});
    CHECK(three.p_value == Catch::Approx(1.0));

    const auto lopsided = wr::chi_square_uniform_exit({1000, 0});
    CHECK(lopsided.reject);
    CHECK(lopsided.p_value < 1e-9);

    CHECK_THROWS_WITH(wr::chi_square_uniform_exit({1000}),
                      Catch::Matchers::ContainsSubstring("M >= 3"));
    CHECK_THROWS_AS(wr::chi_square_uniform_exit({30, 30}), std::invalid_argument);
}

TEST_CASE("the mean-ratio bootstrap brackets simple ratios") {
    std::vector<double> denom;
    for (int i = 1; i <= 100; ++i) denom.push_back(static_cast<double>(i));
    std::vector<double> numer;
    for (double x : denom) numer.push_back(2.0 * x);

    const auto est = wr::geometric_sum_ratio(numer, denom);
    CHECK(est.ratio == Catch::Approx(2.0));
    CHECK(est.ci_low <= 2.0);
    CHECK(est.ci_high >= 2.0);
    CHECK(est.ci_low < est.ci_high);

    const auto same = wr::geometric_sum_ratio(denom, denom);
    CHECK(same.ratio == Catch::Approx(1.0));
    CHECK(same.ci_low <= 1.0);
    CHECK(same.ci_high >= 1.0);

    // Fixed resample seed: repeated calls agree bit for bit.
    const auto again = wr::geometric_sum_ratio(numer, denom);
    CHECK(again.ci_low == est.ci_low);
    CHECK(again.ci_high == est.ci_high);

    CHECK_THROWS_AS(wr::geometric_sum_ratio({}, denom), std::invalid_argument);
    CHECK_THROWS_AS(wr::geometric_sum_ratio(numer, {}), std::invalid_argument);
}

TEST_CASE("relaxation times are finite, positive, and grow with beta") {
    wr::Lattice lat(2, 2, wr::BoundaryCondition::open);
    wr::LandscapeGraph g(lat, 2);
    double prev = 0.0;
    for (double beta : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const auto k = wr::exact_kernel(g, beta);
        const double relax = wr::relaxation_time(k, wr::gibbs_distribution(g, beta));
        CHECK(relax > 1.0);
        CHECK(relax > prev);
        prev = relax;
    }
    const auto k = wr::exact_kernel(g, 1.0);
    CHECK_THROWS_AS(wr::relaxation_time(k, std::vector<double>(3, 0.1)), std::invalid_argument);
}

TEST_CASE("the spectral mixing exponent matches the barrier on the small board") {
    wr::Lattice lat(2, 2, wr::BoundaryCondition::open);
    const auto fit = wr::spectral_mixing_exponent(lat, 2, {2.0, 2.5, 3.0, 3.5, 4.0});
    CHECK(fit.slope > 2.7);
    CHECK(fit.slope < 3.3);
    CHECK(fit.slope_stderr < 0.2);
}
