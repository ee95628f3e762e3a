#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "arriva/linalg.hpp"

namespace arriva {

struct GarchParams {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    bool admissible() const {
        return omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0;
    }
};

namespace garch {

/// Conditional variance path sigma2_t = omega + alpha u_{t-1}^2 + beta
/// sigma2_{t-1}, started from the sample variance of the residuals.
inline std::vector<double> variance_path(std::span<const double> u, const GarchParams& p) {
    std::vector<double> s2(u.size());
    if (u.empty()) return s2;
    double prev = std::max(variance(u), 1e-12);
    double prev_u2 = prev;  // presample squared shock set to its expectation
    for (std::size_t t = 0; t < u.size(); ++t) {
        s2[t] = p.omega + p.alpha * prev_u2 + p.beta * prev;
        prev = s2[t];
        prev_u2 = u[t] * u[t];
    }
    return s2;
}

/// Gaussian log likelihood of residuals under the GARCH(1,1) recursion.
inline double loglik(std::span<const double> u, const GarchParams& p) {
    if (!p.admissible()) return -std::numeric_limits<double>::infinity();
    const std::vector<double> s2 = variance_path(u, p);
    double ll = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        if (s2[t] <= 0.0) return -std::numeric_limits<double>::infinity();
        ll += -0.5 * (std::log(2.0 * M_PI) + std::log(s2[t]) + u[t] * u[t] / s2[t]);
    }
    return ll;
}

/// Analytic score of the log likelihood in (omega, alpha, beta); the
/// derivative of the variance recursion is itself recursive.
inline std::array<double, 3> score(std::span<const double> u, const GarchParams& p) {
    const std::vector<double> s2 = variance_path(u, p);
    const double s2_0 = std::max(variance(u), 1e-12);
    std::array<double, 3> ds2_prev{0.0, 0.0, 0.0};  // presample variance is parameter-free
    std::array<double, 3> g{0.0, 0.0, 0.0};
    double prev_s2 = s2_0, prev_u2 = s2_0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        std::array<double, 3> ds2{1.0 + p.beta * ds2_prev[0], prev_u2 + p.beta * ds2_prev[1],
                                  prev_s2 + p.beta * ds2_prev[2]};
        const double w = 0.5 * (u[t] * u[t] / (s2[t] * s2[t]) - 1.0 / s2[t]);
        for (int i = 0; i < 3; ++i) g[i] += w * ds2[i];
        ds2_prev = ds2;
        prev_s2 = s2[t];
        prev_u2 = u[t] * u[t];
    }
    return g;
}

/// Method-of-moments starting values from the autocorrelation of squared
/// residuals: rho1 pins the ARCH coefficient, rho2/rho1 the persistence.
inline GarchParams moment_initials(std::span<const double> u) {
    const std::size_t n = u.size();
    std::vector<double> u2(n);
    for (std::size_t t = 0; t < n; ++t) u2[t] = u[t] * u[t];
    const double m = mean(u2);
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double d = u2[t] - m;
        c0 += d * d;
        if (t >= 1) c1 += d * (u2[t - 1] - m);
        if (t >= 2) c2 += d * (u2[t - 2] - m);
    }
    const double rho1 = c0 > 0.0 ? c1 / c0 : 0.0;
    const double rho2 = c0 > 0.0 ? c2 / c0 : 0.0;
    GarchParams p;
    p.alpha = std::clamp(rho1, 0.02, 0.30);
    const double persistence =
        std::clamp(rho1 > 1e-4 ? rho2 / rho1 : 0.0, p.alpha + 0.02, 0.97);
    p.beta = persistence - p.alpha;
    p.omega = std::max(variance(u), 1e-10) * (1.0 - persistence);
    return p;
}

/// h-step variance forecasts E[sigma2_{T+j}], j = 1..h, given the last
/// in-sample shock and variance.
inline std::vector<double> variance_forecast(double last_u2, double last_s2, const GarchParams& p,
                                             std::size_t h) {
    std::vector<double> out(h);
    double v = p.omega + p.alpha * last_u2 + p.beta * last_s2;
    for (std::size_t j = 0; j < h; ++j) {
        out[j] = v;
        v = p.omega + (p.alpha + p.beta) * v;
    }
    return out;
}

}  // namespace garch
}  // namespace arriva
