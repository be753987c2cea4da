// Statistical verification utilities: least-squares slopes of log mean
// hitting times against inverse temperature, a one-sample Kolmogorov-
// Smirnov test against the unit-mean exponential, a chi-square uniformity
// test for exit distributions, a bootstrap ratio estimate for the
// geometric-sum identity, and exact spectral mixing exponents.
//
// The tail functions (Kolmogorov Q and the regularized incomplete gamma)
// are implemented here directly; tests pin them against published critical
// values.
#pragma once

#include "wr/dynamics.hpp"
#include "wr/landscape.hpp"
#include "wr/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wr {

/// Asymptotic Kolmogorov survival function
///   Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
/// the limit law of sqrt(n) * D_n. The alternating series converges fast
/// for large arguments; for small ones it is numerically useless, so there
/// the theta-transformed form
///   1 - Q(lambda) = (sqrt(2 pi)/lambda) * sum_{odd k} exp(-k^2 pi^2 / (8 lambda^2))
/// is used instead. Crossover near 1.18 keeps both branches comfortably
/// inside their fast-convergence regions.
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        const double f = M_PI * M_PI / (8.0 * lambda * lambda);
        double sum = 0.0;
        for (int k = 1; k <= 19; k += 2) {
            const double term = std::exp(-static_cast<double>(k) * k * f);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return 1.0 - std::sqrt(2.0 * M_PI) / lambda * sum;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * static_cast<double>(k) * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::max(0.0, 2.0 * sum);
}

/// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a), via the
/// standard split: power series for the lower function when x < a+1,
/// modified Lentz continued fraction otherwise.
inline double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0)
        throw std::invalid_argument("regularized_gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < 10000; ++k) {
            term *= x / (a + k);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefactor);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k < 10000; ++k) {
        const double an = -static_cast<double>(k) * (k - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(log_prefactor);
}

/// Chi-square upper tail with df degrees of freedom.
inline double chi_square_tail(double statistic, int df) {
    if (df < 1) throw std::invalid_argument("chi_square_tail: df must be >= 1");
    return regularized_gamma_q(0.5 * df, 0.5 * statistic);
}

struct SlopeFit {
    std::vector<double> betas;
    std::vector<double> log_means;
    double slope = 0.0;
    double slope_stderr = 0.0;
};

namespace detail {

inline SlopeFit ols_fit(std::vector<double> betas, std::vector<double> ys) {
    const std::size_t n = betas.size();
    if (n < 3 || ys.size() != n)
        throw std::invalid_argument("slope fit: need at least 3 matching grid points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(betas[i] > betas[i - 1]))
            throw std::invalid_argument("slope fit: betas must be strictly increasing");
    const double xbar = std::accumulate(betas.begin(), betas.end(), 0.0) / n;
    const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (betas[i] - xbar) * (betas[i] - xbar);
        sxy += (betas[i] - xbar) * (ys[i] - ybar);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    const double intercept = ybar - fit.slope * xbar;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (intercept + fit.slope * betas[i]);
        ssr += r * r;
    }
    fit.slope_stderr = (n > 2) ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
    fit.betas = std::move(betas);
    fit.log_means = std::move(ys);
    return fit;
}

} // namespace detail

/// Ordinary least squares of log(sample mean) against beta, one sample
/// group per grid point. The slope estimates the exponential growth rate
/// of the mean hitting time.
inline SlopeFit fit_log_slope(const std::vector<double>& betas,
                              const std::vector<std::vector<double>>& groups,
                              std::size_t min_group = 100) {
    if (groups.size() != betas.size())
        throw std::invalid_argument("fit_log_slope: one sample group per beta required");
    std::vector<double> log_means;
    log_means.reserve(groups.size());
    for (const auto& g : groups) {
        if (g.size() < min_group)
            throw std::invalid_argument("fit_log_slope: a group has fewer than " +
                                        std::to_string(min_group) + " samples");
        const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        if (!(mean > 0.0)) throw std::invalid_argument("fit_log_slope: nonpositive group mean");
        log_means.push_back(std::log(mean));
    }
    return detail::ols_fit(betas, log_means);
}

struct TestReport {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    double significance = 0.01;
    bool reject = false;
};

/// One-sample Kolmogorov-Smirnov test of mean-scaled samples against the
/// unit-mean exponential distribution, with the asymptotic p-value
/// Q(sqrt(n) * D).
inline TestReport ks_unit_exponential(std::vector<double> scaled, double significance = 0.01) {
    const std::size_t n = scaled.size();
    if (n < 200) throw std::invalid_argument("ks_unit_exponential: need at least 200 samples");
    const double first = scaled.front();
    bool constant = true;
    for (double x : scaled) {
        if (x < 0.0) throw std::invalid_argument("ks_unit_exponential: negative sample");
        constant = constant && (x == first);
    }
    if (constant) throw std::invalid_argument("ks_unit_exponential: zero-variance input");
    std::sort(scaled.begin(), scaled.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-scaled[i]);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max({d, cdf - lo, hi - cdf});
    }
    TestReport rep;
    rep.statistic = d;
    rep.n = n;
    rep.significance = significance;
    rep.p_value = kolmogorov_q(std::sqrt(static_cast<double>(n)) * d);
    rep.reject = rep.p_value < significance;
    return rep;
}

/// Chi-square test of exit counts against the uniform distribution over the
/// M-1 other stable states; M-2 degrees of freedom. Meaningless for M=2
/// (a single category), which is rejected as an error.
inline TestReport chi_square_uniform_exit(const std::vector<std::uint64_t>& counts,
                                          double significance = 0.01) {
    const std::size_t categories = counts.size();
    if (categories < 2)
        throw std::invalid_argument("chi_square_uniform_exit: needs M >= 3 (at least two exit states)");
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total < 50 * categories)
        throw std::invalid_argument("chi_square_uniform_exit: need at least 50 counts per category");
    const double expected = static_cast<double>(total) / static_cast<double>(categories);
    double stat = 0.0;
    for (std::uint64_t c : counts) {
        const double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    TestReport rep;
    rep.statistic = stat;
    rep.n = total;
    rep.significance = significance;
    rep.p_value = chi_square_tail(stat, static_cast<int>(categories) - 1);
    rep.reject = rep.p_value < significance;
    return rep;
}

struct RatioEstimate {
    double ratio = 0.0;
    double ci_low = 0.0;  ///< 2.5% bootstrap percentile
    double ci_high = 0.0; ///< 97.5% bootstrap percentile
};

/// Ratio of sample means numer/denom with a percentile bootstrap confidence
/// interval (fixed resample seed, so results are reproducible).
inline RatioEstimate geometric_sum_ratio(const std::vector<double>& numer,
                                         const std::vector<double>& denom,
                                         int resamples = 1000,
                                         std::uint64_t resample_seed = 0x5eedb007u) {
    if (numer.empty() || denom.empty())
        throw std::invalid_argument("geometric_sum_ratio: empty sample set");
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    RatioEstimate est;
    est.ratio = mean(numer) / mean(denom);
    Rng rng(resample_seed);
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        double sn = 0.0, sd = 0.0;
        for (std::size_t i = 0; i < numer.size(); ++i)
            sn += numer[rng.next_below(numer.size())];
        for (std::size_t i = 0; i < denom.size(); ++i)
            sd += denom[rng.next_below(denom.size())];
        ratios.push_back((sn / static_cast<double>(numer.size())) /
                         (sd / static_cast<double>(denom.size())));
    }
    std::sort(ratios.begin(), ratios.end());
    const auto pick = [&](double q) {
        const std::size_t idx = static_cast<std::size_t>(q * (ratios.size() - 1));
        return ratios[idx];
    };
    est.ci_low = pick(0.025);
    est.ci_high = pick(0.975);
    return est;
}

/// Relaxation time 1/(1 - lambda*) of the kernel, where lambda* is the
/// largest nontrivial eigenvalue magnitude. The kernel is symmetrized with
/// the Gibbs weights (S = D^(1/2) P D^(-1/2)), which preserves the spectrum
/// and allows a self-adjoint solver.
inline double relaxation_time(const ExactKernel& kernel, const std::vector<double>& mu) {
    const std::size_t n = kernel.n;
    if (mu.size() != n) throw std::invalid_argument("relaxation_time: weight size mismatch");
    Eigen::MatrixXd s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::sqrt(mu[i] / mu[j]) * kernel.P[i * n + j];
    // Up to round-off the symmetrized matrix is exactly symmetric; average
    // away the round-off so the self-adjoint solver sees a clean input.
    Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("relaxation_time: eigenvalue computation failed");
    const auto& ev = solver.eigenvalues(); // ascending
    const std::size_t m = static_cast<std::size_t>(ev.size());
    if (m < 2) throw std::invalid_argument("relaxation_time: kernel too small");
    const double second = std::max(std::fabs(ev(0)), std::fabs(ev(static_cast<Eigen::Index>(m - 2))));
    if (second >= 1.0) throw std::runtime_error("relaxation_time: degenerate spectral gap");
    return 1.0 / (1.0 - second);
}

/// Exact mixing exponent estimate: relaxation times from the exact kernel
/// across a beta grid, fitted on a log scale. For reversible finite chains
/// the relaxation time and the total-variation mixing time share their
/// exponential growth rate, which is the quantity of interest; computing
/// matrix powers to a TV threshold at large beta would be numerically
/// hopeless.
inline SlopeFit spectral_mixing_exponent(const Lattice& lat, int M,
                                         const std::vector<double>& beta_grid,
                                         std::size_t max_states = 20'000) {
    LandscapeGraph g(lat, M, max_states);
    std::vector<double> log_relax;
    log_relax.reserve(beta_grid.size());
    for (double beta : beta_grid) {
        const ExactKernel k = exact_kernel(g, beta, max_states);
        log_relax.push_back(std::log(relaxation_time(k, gibbs_distribution(g, beta))));
    }
    return detail::ols_fit(beta_grid, log_relax);
}

} // namespace wr
