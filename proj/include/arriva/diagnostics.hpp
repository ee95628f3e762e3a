#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "arriva/linalg.hpp"
#include "arriva/models/counts.hpp"
#include "arriva/models/spec.hpp"
#include "arriva/series.hpp"
#include "arriva/stats.hpp"

namespace arriva {

struct DiagnosticResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
};

/// Breusch-Godfrey style LM test: residuals regressed on a constant and their
/// own lags 1..max_order; T R^2 against chi-square(max_order).
inline DiagnosticResult lm_serial_corr(std::span<const double> residuals, int max_order = 8) {
    const std::size_t n = residuals.size();
    if (n <= static_cast<std::size_t>(max_order) + 8)
        throw std::invalid_argument("lm_serial_corr: residual series too short");
    if (variance(residuals) <= 0.0)
        throw std::invalid_argument("lm_serial_corr: degenerate residuals");
    const std::size_t m = static_cast<std::size_t>(max_order);
    Matrix x(n - m, m + 1);
    std::vector<double> dep(n - m);
    for (std::size_t t = m; t < n; ++t) {
        x(t - m, 0) = 1.0;
        for (std::size_t j = 1; j <= m; ++j) x(t - m, j) = residuals[t - j];
        dep[t - m] = residuals[t];
    }
    const OlsFit fit = ols(x, dep);
    const double stat = static_cast<double>(n - m) * fit.r_squared();
    return {stat, stats::chi2_sf(stat, static_cast<double>(max_order)),
            static_cast<double>(max_order)};
}

/// ARCH LM at order one: squared residuals on a constant and their first lag.
inline DiagnosticResult lm_arch(std::span<const double> residuals) {
    const std::size_t n = residuals.size();
    if (n < 20) throw std::invalid_argument("lm_arch: residual series too short");
    if (variance(residuals) <= 0.0) throw std::invalid_argument("lm_arch: degenerate residuals");
    Matrix x(n - 1, 2);
    std::vector<double> dep(n - 1);
    for (std::size_t t = 1; t < n; ++t) {
        x(t - 1, 0) = 1.0;
        x(t - 1, 1) = residuals[t - 1] * residuals[t - 1];
        dep[t - 1] = residuals[t] * residuals[t];
    }
    const OlsFit fit = ols(x, dep);
    const double stat = static_cast<double>(n - 1) * fit.r_squared();
    return {stat, stats::chi2_sf(stat, 1.0), 1.0};
}

/// Seasonality in the variance: squared residuals on a constant plus six
/// day-of-week dummies, F-test of the joint nullity of the dummies.
inline DiagnosticResult seasonal_variance_ftest(std::span<const double> residuals,
                                                std::span<const int> weekdays) {
    const std::size_t n = residuals.size();
    if (weekdays.size() != n)
        throw std::invalid_argument("seasonal_variance_ftest: weekday alignment mismatch");
    if (n < 21) throw std::invalid_argument("seasonal_variance_ftest: series too short");
    std::vector<double> u2(n);
    for (std::size_t t = 0; t < n; ++t) u2[t] = residuals[t] * residuals[t];
    if (variance(u2) <= 0.0) return {0.0, 1.0, 6.0};  // constant squared residuals

    Matrix x(n, 7);  // constant + Tue..Sun
    for (std::size_t t = 0; t < n; ++t) {
        x(t, 0) = 1.0;
        if (weekdays[t] >= 1) x(t, static_cast<std::size_t>(weekdays[t])) = 1.0;
    }
    const OlsFit unrestricted = ols(x, u2);
    double rss0 = 0.0;
    const double m = mean(u2);
    for (double v : u2) rss0 += (v - m) * (v - m);
    const double d2 = static_cast<double>(n - 7);
    const double f_stat = ((rss0 - unrestricted.rss) / 6.0) / (unrestricted.rss / d2);
    return {f_stat, stats::f_sf(f_stat, 6.0, d2), 6.0};
}

/// Cameron-Trivedi overdispersion test against var = mu (1 + alpha mu): fit
/// the Poisson regression, then the auxiliary regression of (e^2 - Y) on
/// mu^2 in its variance-standardized form (both sides divided by mu sqrt(2),
/// the null standard deviation of e^2 - Y), with squared residuals inflated
/// by n/(n-k) for the Poisson degrees of freedom. Two-sided normal p-value.
inline DiagnosticResult overdispersion_test(const ArrivalSeries& s, std::size_t begin,
                                            std::size_t end, const FitOptions& opts = {}) {
    ModelSpec spec = default_spec(ModelFamily::poisson);
    const std::vector<long long> window(s.counts().begin() + static_cast<std::ptrdiff_t>(begin),
                                        s.counts().begin() + static_cast<std::ptrdiff_t>(end));
    const CountFit fit = fit_count(spec, window, static_cast<int>(s.weekday(begin)), opts);
    const std::size_t n = fit.mu.size();
    if (n <= fit.beta.size() + 2)
        throw std::invalid_argument("overdispersion_test: window too short");
    const double dof_inflation =
        static_cast<double>(n) / static_cast<double>(n - fit.beta.size());
    double szw = 0.0, sww = 0.0;
    auto standardized = [&](std::size_t t) {
        const double y = static_cast<double>(window[t + 1]);
        const double e2 = dof_inflation * fit.residuals[t] * fit.residuals[t];
        return (e2 - y) / (fit.mu[t] * std::sqrt(2.0));
    };
    for (std::size_t t = 0; t < n; ++t) {
        const double w = fit.mu[t] / std::sqrt(2.0);
        szw += standardized(t) * w;
        sww += w * w;
    }
    const double alpha_hat = szw / sww;
    double rss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double w = fit.mu[t] / std::sqrt(2.0);
        const double e = standardized(t) - alpha_hat * w;
        rss += e * e;
    }
    const double se = std::sqrt(rss / static_cast<double>(n - 1) / sww);
    const double t_stat = alpha_hat / se;
    return {t_stat, stats::normal_two_sided_p(t_stat), static_cast<double>(n - 1)};
}

inline DiagnosticResult overdispersion_test(const ArrivalSeries& s, const FitOptions& opts = {}) {
    return overdispersion_test(s, 0, s.size(), opts);
}

}  // namespace arriva
