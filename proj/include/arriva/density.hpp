#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/models/model.hpp"
#include "arriva/rng.hpp"

namespace arriva {

/// Monte Carlo one-step-ahead density of the arrival count.
struct DensityForecast {
    std::vector<double> draws;  // simulated counts, integer-valued, >= 0
    std::string source;         // lognormal | poisson | negbin
};

/// Families covered by the density exercise: the benchmark, the ARMAX and
/// SARMAX pairs (lognormal), and the two count distributions.
inline bool density_supported(ModelFamily f) {
    switch (f) {
        case ModelFamily::srw:
        case ModelFamily::armax:
        case ModelFamily::armax_garch:
        case ModelFamily::sarmax:
        case ModelFamily::sarmax_garch:
        case ModelFamily::poisson:
        case ModelFamily::negbin:
            return true;
        default:
            return false;
    }
}

/// Draw cores, shared by the fitted-model path and the store-replay path.
inline DensityForecast draw_lognormal_counts(double log_mean, double log_variance,
                                             std::uint64_t seed, std::size_t n_draws) {
    if (log_variance < 0.0)
        throw std::invalid_argument("draw_lognormal_counts: negative variance");
    DensityForecast out;
    out.source = "lognormal";
    out.draws.resize(n_draws);
    Rng rng(seed);
    const double sd = std::sqrt(log_variance);
    for (double& d : out.draws)
        d = std::max(0.0, std::floor(std::exp(log_mean + sd * rng.normal()) + 0.5));
    return out;
}

inline DensityForecast draw_poisson_counts(double mu, std::uint64_t seed, std::size_t n_draws) {
    DensityForecast out;
    out.source = "poisson";
    out.draws.resize(n_draws);
    Rng rng(seed);
    for (double& d : out.draws) d = static_cast<double>(rng.poisson(mu));
    return out;
}

inline DensityForecast draw_negbin_counts(double mu, double alpha, std::uint64_t seed,
                                          std::size_t n_draws) {
    if (alpha < 0.0) throw std::domain_error("draw_negbin_counts: negative dispersion");
    DensityForecast out;
    out.source = "negbin";
    out.draws.resize(n_draws);
    Rng rng(seed);
    for (double& d : out.draws) d = static_cast<double>(rng.negbin(mu, alpha));
    return out;
}

/// Draws the one-step density: lognormal with the forecast mean and variance
/// (conditional variance when a GARCH layer is present, residual variance
/// otherwise), Poisson at the forecast arrival rate, or Negative Binomial
/// with the in-sample dispersion estimate.
inline DensityForecast simulate_density(const FittedModel& fitted, std::uint64_t seed,
                                        std::size_t n_draws = 1000) {
    if (!density_supported(fitted.spec.family))
        throw std::invalid_argument("simulate_density: family outside the density scope");
    const auto path = fitted.forecast_path(1);
    const ModelForecast& one = path[0];

    if (fitted.spec.family == ModelFamily::poisson)
        return draw_poisson_counts(one.point, seed, n_draws);
    if (fitted.spec.family == ModelFamily::negbin)
        return draw_negbin_counts(one.point, std::get<CountFit>(fitted.inner).alpha, seed,
                                  n_draws);
    if (!one.log_point || !one.variance)
        throw std::invalid_argument("simulate_density: missing log-scale mean or variance");
    return draw_lognormal_counts(*one.log_point, std::max(0.0, *one.variance), seed, n_draws);
}

/// Ranked probability score sum_{j=0..J} [F(j) - I(actual <= j)]^2 with F the
/// empirical CDF of the draws and J the larger of the realized count and the
/// largest draw. Evaluated segment-wise between jump points.
inline double ranked_probability_score(const DensityForecast& density, long long actual) {
    if (density.draws.empty()) throw std::invalid_argument("ranked_probability_score: no draws");
    std::vector<double> sorted = density.draws;
    std::sort(sorted.begin(), sorted.end());
    const double y = static_cast<double>(actual);
    const double j_max = std::max(y, sorted.back());
    const double n = static_cast<double>(sorted.size());

    // Breakpoints where either the CDF or the indicator can change.
    std::vector<double> breaks;
    breaks.reserve(sorted.size() + 2);
    breaks.push_back(0.0);
    for (double v : sorted) {
        const double ceil_v = std::ceil(v);
        if (breaks.back() != ceil_v && ceil_v <= j_max) breaks.push_back(ceil_v);
    }
    if (y + 0.0 <= j_max && breaks.back() != y) breaks.push_back(y);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double rps = 0.0;
    for (std::size_t s = 0; s < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = s + 1 < breaks.size() ? breaks[s + 1] : j_max + 1.0;
        const double count_j = b - a;  // integers j in [a, b)
        if (count_j <= 0.0) continue;
        const double f =
            static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), a) -
                                sorted.begin()) /
            n;
        const double indicator = y <= a ? 1.0 : 0.0;
        rps += count_j * (f - indicator) * (f - indicator);
    }
    return rps;
}

inline double average_rps(std::span<const DensityForecast> densities,
                          std::span<const long long> actuals) {
    if (densities.size() != actuals.size() || densities.empty())
        throw std::invalid_argument("average_rps: misaligned inputs");
    double total = 0.0;
    for (std::size_t t = 0; t < densities.size(); ++t)
        total += ranked_probability_score(densities[t], actuals[t]);
    return total / static_cast<double>(densities.size());
}

/// Linear interpolation of order statistics.
inline double quantile_of_draws(std::vector<double> draws, double q) {
    if (draws.empty()) throw std::invalid_argument("quantile_of_draws: no draws");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile_of_draws: q in [0,1]");
    std::sort(draws.begin(), draws.end());
    const double h = q * static_cast<double>(draws.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= draws.size()) return draws.back();
    return draws[lo] + (h - static_cast<double>(lo)) * (draws[lo + 1] - draws[lo]);
}

/// Empirical coverage of the central theta-probability interval: the share
/// of actuals strictly inside (q_{(1-theta)/2}, q_{(1+theta)/2}).
inline double empirical_coverage(std::span<const DensityForecast> densities,
                                 std::span<const long long> actuals, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("empirical_coverage: theta in (0,1)");
    if (densities.size() != actuals.size() || densities.empty())
        throw std::invalid_argument("empirical_coverage: misaligned inputs");
    std::size_t inside = 0;
    for (std::size_t t = 0; t < densities.size(); ++t) {
        const double lo = quantile_of_draws(densities[t].draws, (1.0 - theta) / 2.0);
        const double hi = quantile_of_draws(densities[t].draws, (1.0 + theta) / 2.0);
        const double y = static_cast<double>(actuals[t]);
        if (y > lo && y < hi) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(densities.size());
}

/// Bias-corrected retransformation of a log-scale forecast,
/// exp(yhat + sigma2/2); the naive transform is exp(yhat).
inline double optimal_point_forecast(double log_point, double sigma2) {
    if (sigma2 < 0.0) throw std::invalid_argument("optimal_point_forecast: negative variance");
    return std::exp(log_point + 0.5 * sigma2);
}

/// RMSFE of optimal over naive transforms for one producer's h=1 log
/// forecasts; below one means the correction helped.
inline double optimal_naive_rmsfe_ratio(std::span<const double> log_points,
                                        std::span<const double> sigma2,
                                        std::span<const long long> actuals) {
    if (log_points.size() != sigma2.size() || log_points.size() != actuals.size() ||
        log_points.empty())
        throw std::invalid_argument("optimal_naive_rmsfe_ratio: misaligned inputs");
    double sse_naive = 0.0, sse_opt = 0.0;
    for (std::size_t t = 0; t < log_points.size(); ++t) {
        const double y = static_cast<double>(actuals[t]);
        const double naive = std::exp(log_points[t]);
        const double opt = optimal_point_forecast(log_points[t], sigma2[t]);
        sse_naive += (y - naive) * (y - naive);
        sse_opt += (y - opt) * (y - opt);
    }
    return std::sqrt(sse_opt) / std::sqrt(sse_naive);
}

}  // namespace arriva
