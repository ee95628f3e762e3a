#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arriva/calendar.hpp"
#include "arriva/rng.hpp"
#include "arriva/series.hpp"

namespace arriva {

/// Synthetic daily-arrival generator: weekday levels plus an ARMA anomaly
/// with (optionally) GARCH(1,1) innovations on the log scale, exponentiated
/// and rounded to counts. Deterministic per seed.
struct DgpSpec {
    Date start = Date::from_ymd(2013, 1, 7);  // a Monday
    std::size_t length = 749;
    std::array<double, 7> weekday_levels{8.0, 7.9, 7.8, 7.7, 7.6, 7.2, 6.8};  // log scale
    std::vector<std::pair<int, double>> ar;  // expanded lag polynomial terms (lag, coef)
    std::vector<std::pair<int, double>> ma;
    double garch_omega = 0.0;  // alpha = beta = 0 means homoskedastic with sd `sigma`
    double garch_alpha = 0.0;
    double garch_beta = 0.0;
    double sigma = 0.1;
    std::vector<Date> closing_days;  // optional zero days injected after generation
};

inline ArrivalSeries simulate_dgp(const DgpSpec& spec, std::uint64_t seed) {
    double ar_abs = 0.0;
    int max_lag = 0;
    for (auto [lag, coef] : spec.ar) {
        if (lag <= 0) throw std::invalid_argument("simulate_dgp: AR lag must be positive");
        ar_abs += std::abs(coef);
        max_lag = std::max(max_lag, lag);
    }
    for (auto [lag, coef] : spec.ma) {
        if (lag <= 0) throw std::invalid_argument("simulate_dgp: MA lag must be positive");
        max_lag = std::max(max_lag, lag);
    }
    if (ar_abs >= 1.0)
        throw std::invalid_argument("simulate_dgp: explosive AR coefficients (sum |phi| >= 1)");
    const bool garch = spec.garch_alpha != 0.0 || spec.garch_beta != 0.0;
    if (garch) {
        if (spec.garch_omega <= 0.0 || spec.garch_alpha < 0.0 || spec.garch_beta < 0.0 ||
            spec.garch_alpha + spec.garch_beta >= 1.0)
            throw std::invalid_argument("simulate_dgp: GARCH parameters violate stationarity");
    } else if (spec.sigma < 0.0) {
        throw std::invalid_argument("simulate_dgp: negative innovation sd");
    }

    Rng rng(derive_seed(seed, "dgp"));
    const std::size_t burn = 500 + static_cast<std::size_t>(max_lag);
    const std::size_t total = burn + spec.length;
    std::vector<double> u(total, 0.0), eps(total, 0.0);
    double sigma2 = garch ? spec.garch_omega / (1.0 - spec.garch_alpha - spec.garch_beta)
                          : spec.sigma * spec.sigma;
    for (std::size_t t = 0; t < total; ++t) {
        if (garch && t > 0)
            sigma2 = spec.garch_omega + spec.garch_alpha * eps[t - 1] * eps[t - 1] +
                     spec.garch_beta * sigma2;
        eps[t] = std::sqrt(sigma2) * rng.normal();
        double v = eps[t];
        for (auto [lag, coef] : spec.ar)
            if (t >= static_cast<std::size_t>(lag)) v += coef * u[t - lag];
        for (auto [lag, coef] : spec.ma)
            if (t >= static_cast<std::size_t>(lag)) v += coef * eps[t - lag];
        if (!std::isfinite(v) || std::abs(v) > 1e6)
            throw std::invalid_argument("simulate_dgp: generated series exploded");
        u[t] = v;
    }

    std::vector<long long> counts(spec.length);
    for (std::size_t i = 0; i < spec.length; ++i) {
        const Date d = spec.start + static_cast<std::int32_t>(i);
        const double logy =
            spec.weekday_levels[static_cast<std::size_t>(d.weekday())] + u[burn + i];
        // Round half-up, floor at 1 so logs stay finite.
        counts[i] = std::max(1LL, static_cast<long long>(std::floor(std::exp(logy) + 0.5)));
    }
    for (Date d : spec.closing_days) {
        const std::int32_t off = d - spec.start;
        if (off >= 0 && static_cast<std::size_t>(off) < spec.length) counts[off] = 0;
    }
    return ArrivalSeries(spec.start, std::move(counts), spec.closing_days);
}

}  // namespace arriva
