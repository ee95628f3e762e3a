#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arriva/linalg.hpp"
#include "arriva/models/common.hpp"
#include "arriva/models/spec.hpp"
#include "arriva/optimize.hpp"

namespace arriva {

constexpr double kTvdGammaCap = 100.0;

/// AR model whose dummy coefficients shift along a logistic transition in
/// scaled time: y_t = sum_s [d0_s + d1_s G(t)] D_st + sum_i phi_i y_{t-i} + e,
/// G(t) = 1 / (1 + exp(-gamma (t/T - c))). Nonlinear least squares, profiled:
/// for fixed (gamma, c) the model is linear, so the outer search is 2-D.
struct TvdFit {
    std::array<double, 7> delta0{};
    std::array<double, 7> delta1{};
    std::vector<int> ar_lags;
    std::vector<double> phi;
    double gamma = 0.0;
    double c = 0.5;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::size_t n_params = 0;
    std::vector<double> residuals;
    std::vector<double> y;  // window (needed to seed forecast lags)
    std::size_t window_len = 0;
    int last_weekday = 0;
    bool flagged = false;
    std::string note;

    double transition(double t_index) const {
        return 1.0 / (1.0 + std::exp(-gamma * (t_index / static_cast<double>(window_len) - c)));
    }

    std::vector<std::pair<std::string, double>> named_params() const {
        static const char* days[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
        std::vector<std::pair<std::string, double>> out;
        for (int s = 0; s < 7; ++s) out.emplace_back(std::string("delta0.") + days[s], delta0[s]);
        for (int s = 0; s < 7; ++s) out.emplace_back(std::string("delta1.") + days[s], delta1[s]);
        for (std::size_t i = 0; i < ar_lags.size(); ++i)
            out.emplace_back("ar." + std::to_string(ar_lags[i]), phi[i]);
        out.emplace_back("gamma", gamma);
        out.emplace_back("c", c);
        return out;
    }
};

namespace tvd_detail {

struct ProfileResult {
    double ssr = std::numeric_limits<double>::infinity();
    std::vector<double> coef;  // [d0 (7), d1 (7), phi...]
    std::vector<double> residuals;
};

inline ProfileResult profile_ols(std::span<const double> y, int first_weekday,
                                 std::span<const int> ar_lags, double gamma, double c) {
    const std::size_t n = y.size();
    std::size_t m = 0;
    for (int l : ar_lags) m = std::max(m, static_cast<std::size_t>(l));
    const std::size_t rows = n - m;
    const std::size_t k = 14 + ar_lags.size();
    Matrix x(rows, k);
    std::vector<double> dep(rows);
    for (std::size_t t = m; t < n; ++t) {
        const std::size_t wd = static_cast<std::size_t>((first_weekday + static_cast<int>(t)) % 7);
        const double g =
            1.0 / (1.0 + std::exp(-gamma * (static_cast<double>(t) / static_cast<double>(n) - c)));
        x(t - m, wd) = 1.0;
        x(t - m, 7 + wd) = g;
        for (std::size_t i = 0; i < ar_lags.size(); ++i)
            x(t - m, 14 + i) = y[t - static_cast<std::size_t>(ar_lags[i])];
        dep[t - m] = y[t];
    }
    ProfileResult r;
    try {
        OlsFit fit = ols(x, dep);
        r.ssr = fit.rss;
        r.coef = std::move(fit.coef);
        r.residuals = std::move(fit.residuals);
    } catch (const std::runtime_error&) {
        // Singular design (e.g. gamma ~ 0 makes G constant); reject the point.
    }
    return r;
}

}  // namespace tvd_detail

/// Assembles a fit from a solved profile at a given transition.
inline TvdFit fit_tvd_from_profile(const ModelSpec& spec, std::span<const double> y,
                                   int first_weekday, double gamma, double c,
                                   tvd_detail::ProfileResult profile) {
    TvdFit f;
    f.ar_lags = spec.ar_lags;
    for (int s = 0; s < 7; ++s) {
        f.delta0[s] = profile.coef[static_cast<std::size_t>(s)];
        f.delta1[s] = profile.coef[static_cast<std::size_t>(7 + s)];
    }
    f.phi.assign(profile.coef.begin() + 14, profile.coef.end());
    f.gamma = gamma;
    f.c = c;
    if (f.gamma >= kTvdGammaCap - 1e-9) {
        f.flagged = true;
        f.note = "transition speed capped (near-step seasonal change)";
    }
    const double ssr = profile.ssr;
    f.residuals = std::move(profile.residuals);
    f.y.assign(y.begin(), y.end());
    f.window_len = y.size();
    f.last_weekday = (first_weekday + static_cast<int>(y.size()) - 1) % 7;
    const auto n_eff = static_cast<double>(f.residuals.size());
    f.sigma2 = ssr / n_eff;
    f.loglik = -0.5 * n_eff * (std::log(2.0 * M_PI) + std::log(std::max(f.sigma2, 1e-300)) + 1.0);
    f.n_params = 14 + f.ar_lags.size() + 2 + 1;
    const auto ic = information_criteria(f.loglik, f.n_params, f.residuals.size());
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

inline TvdFit fit_tvd_ar(const ModelSpec& spec, std::span<const double> y, int first_weekday) {
    const std::vector<int>& lags = spec.ar_lags;
    const std::size_t n = y.size();
    if (n < 56) throw std::invalid_argument("fit_tvd_ar: window too short");

    double best_gamma = 10.0, best_c = 0.5;
    tvd_detail::ProfileResult best;
    for (double g : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, kTvdGammaCap}) {
        for (double c = 0.1; c <= 0.91; c += 0.1) {
            auto r = tvd_detail::profile_ols(y, first_weekday, lags, g, c);
            if (r.ssr < best.ssr) {
                best = std::move(r);
                best_gamma = g;
                best_c = c;
            }
        }
    }
    // Continuous refinement of the transition location and speed.
    const std::array<double, 2> lo{0.1, 0.0}, hi{kTvdGammaCap, 1.0};
    OptimResult nm = nelder_mead(
        [&](std::span<const double> th) {
            return tvd_detail::profile_ols(y, first_weekday, lags, th[0], th[1]).ssr;
        },
        {best_gamma, best_c}, lo, hi, 0.05, 400);
    if (nm.fval < best.ssr) {
        best_gamma = nm.x[0];
        best_c = nm.x[1];
        best = tvd_detail::profile_ols(y, first_weekday, lags, best_gamma, best_c);
    }
    if (best.coef.empty()) throw std::runtime_error("fit_tvd_ar: no admissible transition found");
    return fit_tvd_from_profile(spec, y, first_weekday, best_gamma, best_c, std::move(best));
}

inline std::vector<double> tvd_forecast_path(const TvdFit& f, std::size_t horizons) {
    std::vector<double> out(horizons);
    const std::size_t n = f.y.size();
    auto value_at = [&](std::ptrdiff_t idx) {
        return idx < static_cast<std::ptrdiff_t>(n) ? f.y[static_cast<std::size_t>(idx)]
                                                    : out[static_cast<std::size_t>(idx) - n];
    };
    for (std::size_t j = 1; j <= horizons; ++j) {
        const std::size_t wd =
            static_cast<std::size_t>((f.last_weekday + static_cast<int>(j)) % 7);
        const double g = f.transition(static_cast<double>(n + j - 1));
        double v = f.delta0[wd] + f.delta1[wd] * g;
        for (std::size_t i = 0; i < f.ar_lags.size(); ++i)
            v += f.phi[i] * value_at(static_cast<std::ptrdiff_t>(n + j - 1) - f.ar_lags[i]);
        out[j - 1] = v;
    }
    return out;
}

}  // namespace arriva
