#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arriva/linalg.hpp"
#include "arriva/models/common.hpp"
#include "arriva/models/spec.hpp"
#include "arriva/optimize.hpp"
#include "arriva/stats.hpp"

namespace arriva {

/// Dynamic count regressions on the level series: mean mu_t = exp(x_t' beta)
/// with day-of-week dummies and the lagged count entering as log(1 + Y_{t-1}).
/// Distributions: Poisson, Negative Binomial (gamma-mixed Poisson, variance
/// mu(1 + alpha mu)), and a continuous Exponential density.
struct CountFit {
    ModelSpec spec;
    std::vector<double> beta;  // 7 dummy coefficients + lag coefficient
    double alpha = 0.0;        // NegBin dispersion; 0 for the other families
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::size_t n_params = 0;
    std::vector<double> mu;         // fitted means, aligned to t = 1..n-1
    std::vector<double> residuals;  // response residuals Y - mu
    std::vector<long long> y;       // window counts
    int last_weekday = 0;
    bool flagged = false;
    std::string note;

    std::size_t n_obs() const { return mu.size(); }

    std::vector<std::pair<std::string, double>> named_params() const {
        static const char* days[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
        std::vector<std::pair<std::string, double>> out;
        for (int i = 0; i < 7; ++i) out.emplace_back(std::string("beta.") + days[i], beta[i]);
        out.emplace_back("beta.lag", beta[7]);
        if (spec.family == ModelFamily::negbin) out.emplace_back("dispersion", alpha);
        return out;
    }
};

namespace count_detail {

struct Design {
    Matrix x;                // [dummies, log(1+Y_{t-1})], rows t = 1..n-1
    std::vector<double> y;   // response, same alignment
};

inline Design build_design(std::span<const long long> counts, int first_weekday) {
    const std::size_t n = counts.size();
    if (n < 15) throw std::invalid_argument("fit_count: need at least two weeks of data");
    Design d;
    d.x = Matrix(n - 1, 8);
    d.y.resize(n - 1);
    for (std::size_t t = 1; t < n; ++t) {
        const int wd = (first_weekday + static_cast<int>(t)) % 7;
        d.x(t - 1, static_cast<std::size_t>(wd)) = 1.0;
        d.x(t - 1, 7) = std::log1p(static_cast<double>(counts[t - 1]));
        d.y[t - 1] = static_cast<double>(counts[t]);
    }
    return d;
}

inline double mu_of(const Matrix& x, std::span<const double> beta, std::size_t row) {
    double v = 0.0;
    auto r = x.row(row);
    for (std::size_t j = 0; j < r.size(); ++j) v += r[j] * beta[j];
    return std::exp(std::min(v, 60.0));  // cap keeps the optimizer out of overflow
}

}  // namespace count_detail

/// Negative Binomial log density with a stable small-dispersion branch (the
/// alpha -> 0 limit is the Poisson likelihood plus (alpha/2)[(y-mu)^2 - y]).
/// The expansion needs alpha (mu + y) small, not just alpha: otherwise the
/// exact form applies.
inline double negbin_logpdf(double y, double mu, double alpha) {
    if (alpha < 1e-6 && alpha * (mu + y) < 1e-4) {
        const double pois = -mu + y * std::log(mu) - std::lgamma(y + 1.0);
        return pois + 0.5 * alpha * ((y - mu) * (y - mu) - y);
    }
    const double r = 1.0 / alpha;
    return std::lgamma(y + r) - std::lgamma(r) - std::lgamma(y + 1.0) + r * std::log(r) -
           r * std::log(r + mu) + y * std::log(mu) - y * std::log(r + mu);
}

/// Log likelihood and analytic score for the three count families; the score
/// layout matches the packed parameters (beta..., [alpha]).
struct CountLikelihood {
    const count_detail::Design& design;
    ModelFamily family;

    double loglik(std::span<const double> theta) const {
        const std::size_t n = design.y.size();
        double ll = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double mu = count_detail::mu_of(design.x, theta.subspan(0, 8), t);
            const double y = design.y[t];
            switch (family) {
                case ModelFamily::poisson:
                    ll += -mu + y * std::log(mu) - std::lgamma(y + 1.0);
                    break;
                case ModelFamily::negbin:
                    ll += negbin_logpdf(y, mu, theta[8]);
                    break;
                case ModelFamily::exponential:
                    ll += -std::log(mu) - y / mu;
                    break;
                default:
                    throw std::logic_error("CountLikelihood: not a count family");
            }
        }
        return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
    }

    std::vector<double> score(std::span<const double> theta) const {
        const std::size_t n = design.y.size();
        const bool nb = family == ModelFamily::negbin;
        std::vector<double> g(nb ? 9 : 8, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double mu = count_detail::mu_of(design.x, theta.subspan(0, 8), t);
            const double y = design.y[t];
            double w = 0.0;  // d loglik / d (x'beta)
            switch (family) {
                case ModelFamily::poisson:
                    w = y - mu;
                    break;
                case ModelFamily::negbin:
                    w = (y - mu) / (1.0 + theta[8] * mu);
                    break;
                case ModelFamily::exponential:
                    w = y / mu - 1.0;
                    break;
                default:
                    break;
            }
            auto r = design.x.row(t);
            for (std::size_t j = 0; j < 8; ++j) g[j] += w * r[j];
            if (nb) {
                const double a = theta[8];
                const double r1 = 1.0 / a;
                // d/d alpha = -r^2 d/d r of the NB log density.
                const double dldr = stats::digamma(y + r1) - stats::digamma(r1) + std::log(r1) +
                                    1.0 - std::log(r1 + mu) - (r1 + y) / (r1 + mu);
                g[8] += -r1 * r1 * dldr;
            }
        }
        return g;
    }
};

inline CountFit fit_count(const ModelSpec& spec, std::span<const long long> counts,
                          int first_weekday, const FitOptions& opts = {}) {
    if (spec.family != ModelFamily::poisson && spec.family != ModelFamily::negbin &&
        spec.family != ModelFamily::exponential)
        throw std::invalid_argument("fit_count: not a count family");
    const count_detail::Design design = count_detail::build_design(counts, first_weekday);
    const bool nb = spec.family == ModelFamily::negbin;

    // Log-link OLS start: regress log Y on the design.
    std::vector<double> logy(design.y.size());
    for (std::size_t t = 0; t < logy.size(); ++t) logy[t] = std::log(std::max(design.y[t], 0.5));
    OlsFit init = ols(design.x, logy);
    std::vector<double> x0 = init.coef;

    CountLikelihood lik{design, spec.family};
    if (nb) {
        // Moment start for the dispersion from the Poisson-style fit.
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < design.y.size(); ++t) {
            const double mu = count_detail::mu_of(design.x, x0, t);
            num += (design.y[t] - mu) * (design.y[t] - mu) - mu;
            den += mu * mu;
        }
        x0.push_back(std::clamp(den > 0.0 ? num / den : 0.01, 1e-6, 5.0));
    }
    std::vector<double> lo(x0.size(), -30.0), hi(x0.size(), 30.0);
    lo[7] = -1.2;  // lag coefficient; past one the forecast recursion explodes
    hi[7] = 1.2;
    if (nb) {
        lo.back() = 1e-8;
        hi.back() = 50.0;
    }
    x0[7] = std::clamp(x0[7], lo[7], hi[7]);

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
    if (!std::isfinite(best.fval)) throw std::runtime_error("fit_count: likelihood did not converge");

    CountFit f;
    f.spec = spec;
    f.beta.assign(best.x.begin(), best.x.begin() + 8);
    f.alpha = nb ? best.x[8] : 0.0;
    if (nb && f.alpha <= 2e-8) {
        f.flagged = true;
        f.note = "dispersion at zero boundary";
    }
    f.loglik = -best.fval;
    f.n_params = best.x.size();
    f.y.assign(counts.begin(), counts.end());
    f.last_weekday = (first_weekday + static_cast<int>(counts.size()) - 1) % 7;
    f.mu.resize(design.y.size());
    f.residuals.resize(design.y.size());
    for (std::size_t t = 0; t < design.y.size(); ++t) {
        f.mu[t] = count_detail::mu_of(design.x, f.beta, t);
        f.residuals[t] = design.y[t] - f.mu[t];
    }
    const auto ic = information_criteria(f.loglik, f.n_params, f.n_obs());
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

/// Evaluates a count model at fixed parameters (beta..., [alpha]) on a new
/// window: the refit-throttle path.
inline CountFit count_fit_at(const ModelSpec& spec, std::span<const long long> counts,
                             int first_weekday, const std::vector<double>& params) {
    const bool nb = spec.family == ModelFamily::negbin;
    if (params.size() != (nb ? 9u : 8u))
        throw std::invalid_argument("count_fit_at: parameter vector does not match family");
    const count_detail::Design design = count_detail::build_design(counts, first_weekday);
    CountLikelihood lik{design, spec.family};
    CountFit f;
    f.spec = spec;
    f.beta.assign(params.begin(), params.begin() + 8);
    f.alpha = nb ? params[8] : 0.0;
    f.loglik = lik.loglik(params);
    f.n_params = params.size();
    f.y.assign(counts.begin(), counts.end());
    f.last_weekday = (first_weekday + static_cast<int>(counts.size()) - 1) % 7;
    f.mu.resize(design.y.size());
    f.residuals.resize(design.y.size());
    for (std::size_t t = 0; t < design.y.size(); ++t) {
        f.mu[t] = count_detail::mu_of(design.x, f.beta, t);
        f.residuals[t] = design.y[t] - f.mu[t];
    }
    const auto ic = information_criteria(f.loglik, f.n_params, f.n_obs());
    f.sic = ic.sic;
    f.aic = ic.aic;
    return f;
}

/// Multi-step mean forecasts with the conditional expectation plugged into
/// the lagged-count regressor.
inline std::vector<double> count_forecast_path(const CountFit& f, std::size_t horizons) {
    std::vector<double> out(horizons);
    double prev = static_cast<double>(f.y.back());
    for (std::size_t j = 1; j <= horizons; ++j) {
        const int wd = (f.last_weekday + static_cast<int>(j)) % 7;
        const double lin = f.beta[static_cast<std::size_t>(wd)] + f.beta[7] * std::log1p(prev);
        out[j - 1] = std::exp(std::min(lin, 60.0));
        prev = out[j - 1];
    }
    return out;
}

}  // namespace arriva
