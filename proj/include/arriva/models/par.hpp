#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arriva/linalg.hpp"
#include "arriva/models/common.hpp"
#include "arriva/models/spec.hpp"

namespace arriva {

/// Periodic AR(2): intercept and the coefficients on y_{t-1}, y_{t-2} differ
/// by day of week. Estimated as one OLS with weekday-interacted regressors,
/// which is equivalent to seven per-weekday regressions with pooled variance.
struct ParFit {
    std::array<std::array<double, 3>, 7> coef{};  // per weekday: intercept, phi1, phi2
    std::array<std::array<double, 3>, 7> std_errors{};
    double sigma2 = 0.0;
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::size_t n_params = 0;
    std::vector<double> residuals;
    std::vector<double> y_tail;  // last two log observations
    int last_weekday = 0;

    std::vector<std::pair<std::string, double>> named_params() const {
        static const char* days[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
        std::vector<std::pair<std::string, double>> out;
        for (int w = 0; w < 7; ++w) {
            out.emplace_back(std::string("par.") + days[w] + ".const", coef[w][0]);
            out.emplace_back(std::string("par.") + days[w] + ".phi1", coef[w][1]);
            out.emplace_back(std::string("par.") + days[w] + ".phi2", coef[w][2]);
        }
        return out;
    }
};

inline ParFit fit_par(std::span<const double> y, int first_weekday) {
    const std::size_t n = y.size();
    if (n < 23) throw std::invalid_argument("fit_par: window too short for per-weekday AR(2)");
    std::array<int, 7> per_day{};
    for (std::size_t t = 2; t < n; ++t) ++per_day[(first_weekday + static_cast<int>(t)) % 7];
    for (int w = 0; w < 7; ++w)
        if (per_day[w] < 4)
            throw std::invalid_argument("fit_par: insufficient observations for weekday " +
                                        std::to_string(w));

    Matrix x(n - 2, 21);
    std::vector<double> dep(n - 2);
    for (std::size_t t = 2; t < n; ++t) {
        const std::size_t wd = static_cast<std::size_t>((first_weekday + static_cast<int>(t)) % 7);
        x(t - 2, 3 * wd + 0) = 1.0;
        x(t - 2, 3 * wd + 1) = y[t - 1];
        x(t - 2, 3 * wd + 2) = y[t - 2];
        dep[t - 2] = y[t];
    }
    OlsFit fit;
    try {
        fit = ols(x, dep, /*want_std_errors=*/true);
    } catch (const std::runtime_error&) {
        // Degenerate windows (an exactly periodic series makes the lag columns
        // constant within a weekday equation) get a vanishing ridge instead.
        Matrix g = linalg::gram(x);
        double trace = 0.0;
        for (std::size_t i = 0; i < 21; ++i) trace += g(i, i);
        for (std::size_t i = 0; i < 21; ++i) g(i, i) += 1e-10 * trace / 21.0;
        fit.coef = linalg::solve_spd(g, linalg::xty(x, dep));
        fit.fitted.resize(n - 2);
        fit.residuals.resize(n - 2);
        fit.std_errors.assign(21, 0.0);
        for (std::size_t t = 0; t < n - 2; ++t) {
            double v = 0.0;
            for (std::size_t j = 0; j < 21; ++j) v += x(t, j) * fit.coef[j];
            fit.fitted[t] = v;
            fit.residuals[t] = dep[t] - v;
            fit.rss += fit.residuals[t] * fit.residuals[t];
        }
    }

    ParFit f;
    for (int w = 0; w < 7; ++w)
        for (int j = 0; j < 3; ++j) {
            f.coef[w][j] = fit.coef[static_cast<std::size_t>(3 * w + j)];
            f.std_errors[w][j] = fit.std_errors[static_cast<std::size_t>(3 * w + j)];
        }
    f.residuals = std::move(fit.residuals);
    const auto n_eff = static_cast<double>(n - 2);
    f.sigma2 = fit.rss / n_eff;
    f.loglik = f.sigma2 > 0.0
                   ? -0.5 * n_eff * (std::log(2.0 * M_PI) + std::log(f.sigma2) + 1.0)
                   : 0.0;
    f.n_params = 22;
    const auto ic = information_criteria(f.loglik, f.n_params, n - 2);
    f.sic = ic.sic;
    f.aic = ic.aic;
    f.y_tail = {y[n - 2], y[n - 1]};
    f.last_weekday = (first_weekday + static_cast<int>(n) - 1) % 7;
    return f;
}

inline std::vector<double> par_forecast_path(const ParFit& f, std::size_t horizons) {
    std::vector<double> out(horizons);
    double y1 = f.y_tail[1], y2 = f.y_tail[0];  // y_{T}, y_{T-1}
    for (std::size_t j = 1; j <= horizons; ++j) {
        const std::size_t wd =
            static_cast<std::size_t>((f.last_weekday + static_cast<int>(j)) % 7);
        const double v = f.coef[wd][0] + f.coef[wd][1] * y1 + f.coef[wd][2] * y2;
        out[j - 1] = v;
        y2 = y1;
        y1 = v;
    }
    return out;
}

}  // namespace arriva
