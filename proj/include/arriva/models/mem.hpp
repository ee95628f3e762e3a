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
#include "arriva/optimize.hpp"

namespace arriva {

/// Multiplicative error model on the seasonally standardized ratio
/// x_t = y_t / yhat_SR,t: x_t = mu_t eps_t with unit-mean errors and
/// mu_t = omega + alpha x_{t-1} + dummy shifts (Monday absorbed by omega).
/// Estimated by exponential QMLE, maximizing sum(-log mu_t - x_t / mu_t).
struct MemFit {
    double omega = 0.0;
    double alpha = 0.0;
    std::array<double, 6> day_shift{};  // Tue..Sun relative to Monday
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::size_t n_params = 0;
    std::vector<double> residuals;  // x_t / mu_t - 1
    std::vector<double> mu;
    std::vector<double> x;  // ratio series over the window
    int last_weekday = 0;

    double mu_at(double x_prev, int weekday) const {
        double v = omega + alpha * x_prev;
        if (weekday >= 1) v += day_shift[static_cast<std::size_t>(weekday - 1)];
        return v;
    }

    std::vector<std::pair<std::string, double>> named_params() const {
        static const char* days[6] = {"tue", "wed", "thu", "fri", "sat", "sun"};
        std::vector<std::pair<std::string, double>> out{{"mem.omega", omega},
                                                        {"mem.alpha", alpha}};
        for (int i = 0; i < 6; ++i)
            out.emplace_back(std::string("mem.") + days[i], day_shift[static_cast<std::size_t>(i)]);
        return out;
    }
};

namespace mem_detail {

inline double mu_of(std::span<const double> theta, double x_prev, int weekday) {
    double v = theta[0] + theta[1] * x_prev;
    if (weekday >= 1) v += theta[static_cast<std::size_t>(1 + weekday)];
    return v;
}

struct Likelihood {
    std::span<const double> x;
    int first_weekday;

    double loglik(std::span<const double> theta) const {
        double ll = 0.0;
        for (std::size_t t = 1; t < x.size(); ++t) {
            const int wd = (first_weekday + static_cast<int>(t)) % 7;
            const double mu = mu_of(theta, x[t - 1], wd);
            if (mu <= 1e-10) return -std::numeric_limits<double>::infinity();
            ll += -std::log(mu) - x[t] / mu;
        }
        return ll;
    }

    std::vector<double> score(std::span<const double> theta) const {
        std::vector<double> g(8, 0.0);
        for (std::size_t t = 1; t < x.size(); ++t) {
            const int wd = (first_weekday + static_cast<int>(t)) % 7;
            const double mu = mu_of(theta, x[t - 1], wd);
            const double w = (x[t] / mu - 1.0) / mu;
            g[0] += w;
            g[1] += w * x[t - 1];
            if (wd >= 1) g[static_cast<std::size_t>(1 + wd)] += w;
        }
        return g;
    }
};

}  // namespace mem_detail

inline MemFit fit_mem(std::span<const double> ratio, int first_weekday,
                      const FitOptions& opts = {}) {
    if (ratio.size() < 15) throw std::invalid_argument("fit_mem: window too short");
    for (double v : ratio)
        if (!(v > 0.0)) throw std::invalid_argument("fit_mem: ratio series must be positive");

    mem_detail::Likelihood lik{ratio, first_weekday};
    const double xbar = mean(ratio);
    std::vector<double> x0{0.7 * xbar, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<double> lo{1e-6, -0.95, -2, -2, -2, -2, -2, -2};
    std::vector<double> hi{5.0, 0.95, 2, 2, 2, 2, 2, 2};
    auto objective = [&](std::span<const double> th) { return -lik.loglik(th); };
    auto gradient = [&](std::span<const double> th) {
        std::vector<double> g = lik.score(th);
        for (double& v : g) v = -v;
        return g;
    };
    OptimOptions oo;
    oo.seed = opts.seed;
    oo.starts = opts.starts;
    oo.max_iterations = opts.max_iterations;
    OptimResult best = minimize_multistart(objective, x0, lo, hi, gradient, oo);
    if (!std::isfinite(best.fval)) throw std::runtime_error("fit_mem: QMLE did not converge");

    MemFit f;
    f.omega = best.x[0];
    f.alpha = best.x[1];
    for (int i = 0; i < 6; ++i) f.day_shift[static_cast<std::size_t>(i)] = best.x[static_cast<std::size_t>(2 + i)];
    f.loglik = -best.fval;
    f.n_params = 8;
    f.x.assign(ratio.begin(), ratio.end());
    f.last_weekday = (first_weekday + static_cast<int>(ratio.size()) - 1) % 7;
    f.mu.resize(ratio.size() - 1);
    f.residuals.resize(ratio.size() - 1);
    for (std::size_t t = 1; t < ratio.size(); ++t) {
        const int wd = (first_weekday + static_cast<int>(t)) % 7;
        f.mu[t - 1] = f.mu_at(ratio[t - 1], wd);
        f.residuals[t - 1] = ratio[t] / f.mu[t - 1] - 1.0;
    }
    const auto ic = information_criteria(f.loglik, f.n_params, ratio.size() - 1);
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

/// Evaluates the MEM at fixed parameters (omega, alpha, shifts...) on a new
/// window: the refit-throttle path.
inline MemFit mem_fit_at(std::span<const double> ratio, int first_weekday,
                         const std::vector<double>& params) {
    if (params.size() != 8) throw std::invalid_argument("mem_fit_at: expected 8 parameters");
    mem_detail::Likelihood lik{ratio, first_weekday};
    MemFit f;
    f.omega = params[0];
    f.alpha = params[1];
    for (int i = 0; i < 6; ++i)
        f.day_shift[static_cast<std::size_t>(i)] = params[static_cast<std::size_t>(2 + i)];
    f.loglik = lik.loglik(params);
    f.n_params = 8;
    f.x.assign(ratio.begin(), ratio.end());
    f.last_weekday = (first_weekday + static_cast<int>(ratio.size()) - 1) % 7;
    f.mu.resize(ratio.size() - 1);
    f.residuals.resize(ratio.size() - 1);
    for (std::size_t t = 1; t < ratio.size(); ++t) {
        const int wd = (first_weekday + static_cast<int>(t)) % 7;
        f.mu[t - 1] = f.mu_at(ratio[t - 1], wd);
        f.residuals[t - 1] = ratio[t] / f.mu[t - 1] - 1.0;
    }
    const auto ic = information_criteria(f.loglik, f.n_params, ratio.size() - 1);
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

inline std::vector<double> mem_forecast_path(const MemFit& f, std::size_t horizons) {
    std::vector<double> out(horizons);
    double prev = f.x.back();
    for (std::size_t j = 1; j <= horizons; ++j) {
        const int wd = (f.last_weekday + static_cast<int>(j)) % 7;
        out[j - 1] = f.mu_at(prev, wd);
        prev = out[j - 1];
    }
    return out;
}

}  // namespace arriva
