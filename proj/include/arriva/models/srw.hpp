#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "arriva/models/common.hpp"

namespace arriva {

/// Seasonal random walk benchmark: the forecast for any target is the count
/// observed on the most recent same weekday inside the window (chained for
/// horizons past one week).
struct SrwFit {
    std::vector<long long> y;       // window counts
    std::vector<double> residuals;  // level-scale Y_t - Y_{t-7}
    double log_resid_var = 0.0;     // mean squared log-scale error (no estimated mean)
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::size_t n_params = 1;
};

inline SrwFit fit_srw(std::span<const long long> counts) {
    if (counts.size() < 14) throw std::invalid_argument("fit_srw: need at least two weeks");
    SrwFit f;
    f.y.assign(counts.begin(), counts.end());
    double ss_log = 0.0;
    for (std::size_t t = 7; t < counts.size(); ++t) {
        f.residuals.push_back(static_cast<double>(counts[t] - counts[t - 7]));
        const double d = std::log(static_cast<double>(counts[t])) -
                         std::log(static_cast<double>(counts[t - 7]));
        ss_log += d * d;
    }
    const auto n_eff = static_cast<double>(f.residuals.size());
    f.log_resid_var = ss_log / n_eff;
    f.loglik = f.log_resid_var > 0.0
                   ? -0.5 * n_eff *
                         (std::log(2.0 * M_PI) + std::log(f.log_resid_var) + 1.0)
                   : 0.0;
    const auto ic = information_criteria(f.loglik, f.n_params, f.residuals.size());
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

/// Level forecast: the window value at the latest same-weekday date, i.e.
/// index n-1 + h - 7*ceil(h/7).
inline double srw_forecast(const SrwFit& f, std::size_t h) {
    const std::size_t weeks_back = (h + 6) / 7;
    const std::size_t idx = f.y.size() - 1 + h - 7 * weeks_back;
    return static_cast<double>(f.y[idx]);
}

/// Log-scale forecast error variance grows with the number of chained weeks.
inline double srw_log_variance(const SrwFit& f, std::size_t h) {
    return f.log_resid_var * static_cast<double>((h + 6) / 7);
}

}  // namespace arriva
