#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace arriva {

/// Lag polynomials in "recursion convention": a dense coefficient vector c
/// (index = lag, c[0] unused) representing either an AR operator
/// 1 - sum_i c_i L^i or an MA operator 1 + sum_i c_i L^i. Multiplicative
/// seasonal structure is expanded into this dense form once per evaluation.
namespace lagpoly {

/// Expands (1 -/+ sum over lags1)(1 -/+ sum over lags2). `sign` is -1 for AR
/// factors and +1 for MA factors; the result is in the same convention, i.e.
/// for AR the returned c satisfies 1 - sum c_i L^i = product of factors.
inline std::vector<double> expand_two_factor(std::span<const int> lags1,
                                             std::span<const double> coefs1,
                                             std::span<const int> lags2,
                                             std::span<const double> coefs2, int sign) {
    int max_lag = 0;
    for (int l : lags1) max_lag = std::max(max_lag, l);
    int max2 = 0;
    for (int l : lags2) max2 = std::max(max2, l);
    max_lag += max2;
    std::vector<double> c(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (std::size_t i = 0; i < lags1.size(); ++i) c[static_cast<std::size_t>(lags1[i])] += coefs1[i];
    for (std::size_t j = 0; j < lags2.size(); ++j) c[static_cast<std::size_t>(lags2[j])] += coefs2[j];
    // Cross terms: AR factors multiply as (1-A)(1-B) = 1-(A+B)+AB, so the
    // product coefficient enters with the opposite sign of the singles.
    for (std::size_t i = 0; i < lags1.size(); ++i)
        for (std::size_t j = 0; j < lags2.size(); ++j)
            c[static_cast<std::size_t>(lags1[i] + lags2[j])] +=
                static_cast<double>(sign) * coefs1[i] * coefs2[j];
    return c;
}

/// Multiplies an expanded polynomial (recursion convention, AR sign) by
/// differencing factors (1 - L)^d (1 - L^7)^ds.
inline std::vector<double> multiply_differences(std::vector<double> c, int d, int seasonal_d) {
    auto multiply_by = [](const std::vector<double>& a, int lag) {
        // (1 - sum a_i L^i)(1 - L^lag) = 1 - [sum a_i L^i + L^lag - sum a_i L^{i+lag}]
        std::vector<double> out(a.size() + static_cast<std::size_t>(lag), 0.0);
        for (std::size_t i = 1; i < a.size(); ++i) out[i] += a[i];
        out[static_cast<std::size_t>(lag)] += 1.0;
        for (std::size_t i = 1; i < a.size(); ++i) out[i + static_cast<std::size_t>(lag)] -= a[i];
        return out;
    };
    for (int k = 0; k < d; ++k) c = multiply_by(c, 1);
    for (int k = 0; k < seasonal_d; ++k) c = multiply_by(c, 7);
    return c;
}

inline int max_lag(std::span<const double> c) {
    for (std::size_t i = c.size(); i-- > 1;)
        if (c[i] != 0.0) return static_cast<int>(i);
    return 0;
}

/// Schur-Cohn stability test by the step-down (inverse Levinson) recursion:
/// all roots of 1 - sum c_i z^i lie outside the unit circle iff every
/// reflection coefficient has modulus below one. Pass MA polynomials with
/// negated coefficients to test invertibility.
inline bool roots_outside_unit_circle(std::span<const double> c, double margin = 1e-7) {
    const int p = max_lag(c);
    if (p == 0) return true;
    std::vector<double> a(c.begin() + 1, c.begin() + p + 1);
    for (int m = p; m >= 1; --m) {
        const double kappa = a[static_cast<std::size_t>(m - 1)];
        if (std::abs(kappa) >= 1.0 - margin) return false;
        const double denom = 1.0 - kappa * kappa;
        std::vector<double> next(static_cast<std::size_t>(m - 1));
        for (int i = 0; i < m - 1; ++i)
            next[static_cast<std::size_t>(i)] =
                (a[static_cast<std::size_t>(i)] +
                 kappa * a[static_cast<std::size_t>(m - 2 - i)]) /
                denom;
        a = std::move(next);
    }
    return true;
}

/// Moving-average (psi) weights of the process a(L) y = b(L) eps, both in
/// recursion convention, for j = 0..count-1. Valid for nonstationary a(L)
/// (e.g. with differencing folded in) since only finitely many are formed.
inline std::vector<double> psi_weights(std::span<const double> a, std::span<const double> b,
                                       std::size_t count) {
    std::vector<double> psi(count, 0.0);
    if (count == 0) return psi;
    psi[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        double v = j < b.size() ? b[j] : 0.0;
        const std::size_t imax = std::min(j, a.size() > 0 ? a.size() - 1 : 0);
        for (std::size_t i = 1; i <= imax; ++i) v += a[i] * psi[j - i];
        psi[j] = v;
    }
    return psi;
}

}  // namespace lagpoly
}  // namespace arriva
