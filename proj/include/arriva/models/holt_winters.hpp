#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arriva/models/common.hpp"
#include "arriva/optimize.hpp"

namespace arriva {

/// Multiplicative Holt-Winters with weekly seasonality on the (positive) log
/// series. States are initialized from the first two weeks: level = their
/// mean, trend = 0, seasonal factors = weekday averages normalized to unit
/// product. Smoothing constants minimize the in-sample one-step squared
/// error after the initialization fortnight.
struct HoltWintersFit {
    double alpha = 0.0;  // level
    double beta = 0.0;   // trend
    double gamma = 0.0;  // seasonal
    double level = 0.0;
    double trend = 0.0;
    std::array<double, 7> seasonal{};  // by weekday
    double sse = 0.0;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::size_t n_params = 0;
    std::vector<double> residuals;  // one-step errors, t >= 14
    int last_weekday = 0;

    std::vector<std::pair<std::string, double>> named_params() const {
        return {{"hw.alpha", alpha}, {"hw.beta", beta}, {"hw.gamma", gamma}};
    }
};

namespace hw_detail {

struct State {
    double level = 0.0;
    double trend = 0.0;
    std::array<double, 7> seasonal{};
};

inline State initial_state(std::span<const double> y, int first_weekday) {
    double m = 0.0;
    for (std::size_t t = 0; t < 14; ++t) m += y[t];
    m /= 14.0;
    if (!(m > 0.0)) throw std::domain_error("fit_holt_winters: nonpositive level");
    State s{m, 0.0, {}};
    std::array<double, 7> sum{};
    for (std::size_t t = 0; t < 14; ++t)
        sum[static_cast<std::size_t>((first_weekday + static_cast<int>(t)) % 7)] += y[t];
    double log_geo = 0.0;
    for (int w = 0; w < 7; ++w) {
        const double f = sum[static_cast<std::size_t>(w)] / 2.0 / m;
        if (!(f > 0.0)) throw std::domain_error("fit_holt_winters: nonpositive seasonal factor");
        s.seasonal[static_cast<std::size_t>(w)] = f;
        log_geo += std::log(f);
    }
    const double geo = std::exp(log_geo / 7.0);  // normalize product to 1
    for (auto& f : s.seasonal) f /= geo;
    return s;
}

/// Runs the recursion, returns the SSE over t >= 14 and (optionally) fills
/// the residuals and final state.
inline double run(std::span<const double> y, int first_weekday, double a, double b, double g,
                  State* final_state = nullptr, std::vector<double>* residuals = nullptr) {
    State s = initial_state(y, first_weekday);
    double sse = 0.0;
    if (residuals) residuals->clear();
    for (std::size_t t = 0; t < y.size(); ++t) {
        const std::size_t wd = static_cast<std::size_t>((first_weekday + static_cast<int>(t)) % 7);
        const double s_prev = s.seasonal[wd];
        const double fc = (s.level + s.trend) * s_prev;
        if (t >= 14) {
            const double e = y[t] - fc;
            sse += e * e;
            if (residuals) residuals->push_back(e);
        }
        const double l_prev = s.level;
        if (!(s_prev > 0.0) || !(s.level > 0.0))
            return std::numeric_limits<double>::infinity();
        s.level = a * (y[t] / s_prev) + (1.0 - a) * (s.level + s.trend);
        s.trend = b * (s.level - l_prev) + (1.0 - b) * s.trend;
        s.seasonal[wd] = g * (y[t] / s.level) + (1.0 - g) * s_prev;
    }
    if (final_state) *final_state = s;
    return sse;
}

}  // namespace hw_detail

inline HoltWintersFit fit_holt_winters(std::span<const double> y, int first_weekday) {
    if (y.size() < 28) throw std::invalid_argument("fit_holt_winters: window too short");
    for (double v : y)
        if (!(v > 0.0))
            throw std::domain_error("fit_holt_winters: multiplicative form needs positive data");

    // Coarse grid, then simplex refinement.
    double best_sse = std::numeric_limits<double>::infinity();
    std::array<double, 3> best{0.2, 0.05, 0.2};
    for (double a = 0.05; a <= 0.96; a += 0.1)
        for (double b = 0.0; b <= 0.31; b += 0.1)
            for (double g = 0.05; g <= 0.96; g += 0.1) {
                const double sse = hw_detail::run(y, first_weekday, a, b, g);
                if (sse < best_sse) {
                    best_sse = sse;
                    best = {a, b, g};
                }
            }
    const std::array<double, 3> lo{0.0, 0.0, 0.0}, hi{1.0, 1.0, 1.0};
    OptimResult nm = nelder_mead(
        [&](std::span<const double> th) {
            return hw_detail::run(y, first_weekday, th[0], th[1], th[2]);
        },
        {best[0], best[1], best[2]}, lo, hi, 0.05, 600);
    if (nm.fval < best_sse) {
        best_sse = nm.fval;
        best = {nm.x[0], nm.x[1], nm.x[2]};
    }

    HoltWintersFit f;
    f.alpha = best[0];
    f.beta = best[1];
    f.gamma = best[2];
    hw_detail::State s;
    f.sse = hw_detail::run(y, first_weekday, f.alpha, f.beta, f.gamma, &s, &f.residuals);
    f.level = s.level;
    f.trend = s.trend;
    f.seasonal = s.seasonal;
    f.last_weekday = (first_weekday + static_cast<int>(y.size()) - 1) % 7;
    const auto n_eff = static_cast<double>(f.residuals.size());
    f.sigma2 = f.sse / n_eff;
    f.loglik = f.sigma2 > 0.0
                   ? -0.5 * n_eff * (std::log(2.0 * M_PI) + std::log(f.sigma2) + 1.0)
                   : 0.0;
    f.n_params = 4;
    const auto ic = information_criteria(f.loglik, f.n_params, f.residuals.size());
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

/// Reruns the recursion at fixed smoothing constants on a new window.
inline HoltWintersFit holt_winters_at(std::span<const double> y, int first_weekday, double a,
                                      double b, double g) {
    if (y.size() < 28) throw std::invalid_argument("holt_winters_at: window too short");
    HoltWintersFit f;
    f.alpha = a;
    f.beta = b;
    f.gamma = g;
    hw_detail::State s;
    f.sse = hw_detail::run(y, first_weekday, a, b, g, &s, &f.residuals);
    f.level = s.level;
    f.trend = s.trend;
    f.seasonal = s.seasonal;
    f.last_weekday = (first_weekday + static_cast<int>(y.size()) - 1) % 7;
    const auto n_eff = static_cast<double>(f.residuals.size());
    f.sigma2 = f.sse / n_eff;
    f.loglik = f.sigma2 > 0.0
                   ? -0.5 * n_eff * (std::log(2.0 * M_PI) + std::log(f.sigma2) + 1.0)
                   : 0.0;
    f.n_params = 4;
    const auto ic = information_criteria(f.loglik, f.n_params, f.residuals.size());
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

inline std::vector<double> holt_winters_forecast_path(const HoltWintersFit& f,
                                                      std::size_t horizons) {
    std::vector<double> out(horizons);
    for (std::size_t j = 1; j <= horizons; ++j) {
        const std::size_t wd =
            static_cast<std::size_t>((f.last_weekday + static_cast<int>(j)) % 7);
        out[j - 1] = (f.level + static_cast<double>(j) * f.trend) * f.seasonal[wd];
    }
    return out;
}

}  // namespace arriva
