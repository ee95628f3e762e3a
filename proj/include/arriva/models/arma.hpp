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
#include "arriva/models/garch.hpp"
#include "arriva/models/lagpoly.hpp"
#include "arriva/models/spec.hpp"
#include "arriva/optimize.hpp"

namespace arriva {

/// Regression on day-of-week dummies with multiplicative seasonal ARMA
/// errors, estimated by conditional Gaussian maximum likelihood (presample
/// innovations zero, presample observations conditioned upon). Optionally a
/// jointly estimated GARCH(1,1) innovation variance. Differencing flags turn
/// the same machinery into the airline model.
struct ArmaFit {
    ModelSpec spec;
    std::vector<double> beta;  // dummy coefficients, Mon..Sun (empty when no dummies)
    std::vector<double> ar, sar, ma, sma;
    GarchParams garch_params;
    double sigma2 = 0.0;  // CSS innovation variance (GARCH: unconditional level)
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::size_t n_params = 0;

    std::vector<double> dep;        // dependent series on the model's own scale
    std::vector<double> z;          // after differencing (== dep when none)
    std::vector<double> eps;        // innovations aligned to z, zeros before presample
    std::vector<double> cond_var;   // aligned to eps; empty without GARCH
    int presample = 0;              // conditioned-upon z observations
    int diff_loss = 0;              // observations consumed by differencing
    int last_weekday = 0;           // weekday index of the final window date
    bool flagged = false;
    std::string note;

    std::size_t n_obs() const { return z.size() - static_cast<std::size_t>(presample); }

    /// Innovations over the estimation range (the model's residual series).
    std::vector<double> residuals() const {
        return {eps.begin() + presample, eps.end()};
    }

    std::vector<std::pair<std::string, double>> named_params() const {
        std::vector<std::pair<std::string, double>> out;
        static const char* days[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
        for (std::size_t i = 0; i < beta.size(); ++i)
            out.emplace_back(std::string("beta.") + days[i], beta[i]);
        auto add = [&](const char* tag, const std::vector<int>& lags,
                       const std::vector<double>& coefs) {
            for (std::size_t i = 0; i < lags.size(); ++i)
                out.emplace_back(std::string(tag) + "." + std::to_string(lags[i]), coefs[i]);
        };
        add("ar", spec.ar_lags, ar);
        add("sar", spec.sar_lags, sar);
        add("ma", spec.ma_lags, ma);
        add("sma", spec.sma_lags, sma);
        if (spec.garch) {
            out.emplace_back("garch.omega", garch_params.omega);
            out.emplace_back("garch.alpha", garch_params.alpha);
            out.emplace_back("garch.beta", garch_params.beta);
        } else {
            out.emplace_back("sigma2", sigma2);
        }
        return out;
    }
};

namespace detail {

struct ArmaLayout {
    std::size_t kx = 0;  // dummy columns
    std::size_t nar = 0, nsar = 0, nma = 0, nsma = 0;
    bool garch = false;
    std::size_t size() const { return kx + nar + nsar + nma + nsma + (garch ? 3 : 0); }
};

struct ArmaEval {
    double neg_loglik = std::numeric_limits<double>::infinity();
    double sigma2 = 0.0;
    double loglik = -std::numeric_limits<double>::infinity();
};

/// Sparse (lag, coefficient) view of a dense recursion polynomial.
inline std::vector<std::pair<int, double>> sparsify(const std::vector<double>& dense) {
    std::vector<std::pair<int, double>> s;
    for (std::size_t i = 1; i < dense.size(); ++i)
        if (dense[i] != 0.0) s.emplace_back(static_cast<int>(i), dense[i]);
    return s;
}

}  // namespace detail

class RegArmaModel {
  public:
    /// `dep` is the dependent series over the window on its own scale;
    /// `first_weekday` the weekday index of the window's first date.
    RegArmaModel(ModelSpec spec, std::vector<double> dep, int first_weekday)
        : spec_(std::move(spec)), dep_(std::move(dep)), first_weekday_(first_weekday) {
        spec_.validate();
        if (dep_.size() < 14)
            throw std::invalid_argument("fit_linear_arma: need at least two weeks of data");
        diff_loss_ = (spec_.diff ? 1 : 0) + (spec_.seasonal_diff ? 7 : 0);
        const std::size_t nz = dep_.size() - static_cast<std::size_t>(diff_loss_);
        z_.resize(nz);
        for (std::size_t t = 0; t < nz; ++t) {
            const std::size_t s = t + static_cast<std::size_t>(diff_loss_);
            double v = dep_[s];
            if (spec_.diff && spec_.seasonal_diff)
                v += -dep_[s - 1] - dep_[s - 7] + dep_[s - 8];
            else if (spec_.diff)
                v += -dep_[s - 1];
            else if (spec_.seasonal_diff)
                v += -dep_[s - 7];
            z_[t] = v;
        }
        layout_.kx = spec_.include_dummies ? 7 : 0;
        layout_.nar = spec_.ar_lags.size();
        layout_.nsar = spec_.sar_lags.size();
        layout_.nma = spec_.ma_lags.size();
        layout_.nsma = spec_.sma_lags.size();
        layout_.garch = spec_.garch;

        // Presample: conditioned-upon observations = max expanded AR lag.
        int m = 0;
        for (int l : spec_.ar_lags) m = std::max(m, l);
        int ms = 0;
        for (int l : spec_.sar_lags) ms = std::max(ms, l);
        presample_ = m + ms;
        if (z_.size() <= static_cast<std::size_t>(presample_) + 14)
            throw std::invalid_argument("fit_linear_arma: window too short for the lag structure");
    }

    ArmaFit fit(const FitOptions& opts) const {
        std::vector<double> x0 = initial_params();
        if (opts.warm_start && opts.warm_start->size() == layout_.size()) x0 = *opts.warm_start;
        std::vector<double> lo(layout_.size()), hi(layout_.size());
        bounds(lo, hi);

        auto objective = [this](std::span<const double> theta) {
            return evaluate(theta).neg_loglik;
        };
        OptimOptions oo;
        oo.seed = opts.seed;
        oo.starts = opts.starts;
        oo.max_iterations = opts.max_iterations;
        OptimResult best = minimize_multistart(objective, x0, lo, hi, {}, oo);
        if (!std::isfinite(best.fval))
            throw std::runtime_error("fit_linear_arma: likelihood not finite at any start");
        if (layout_.garch) {
            // Boundary screen: when the variance dynamics do not improve on a
            // constant variance beyond the 5% boundary LR threshold, the
            // (alpha, beta) directions are spurious structure and the fit is
            // reported at the degenerate point. Kept fits are local ML optima;
            // degenerate ones are flagged.
            ModelSpec flat_spec = spec_;
            flat_spec.garch = false;
            RegArmaModel flat(flat_spec, dep_, first_weekday_);
            FitOptions fo;
            fo.seed = opts.seed;
            fo.starts = opts.starts;
            fo.max_iterations = opts.max_iterations;
            ArmaFit css = flat.fit(fo);
            if (2.0 * (-best.fval - css.loglik) < 4.2) {
                std::vector<double> theta = pack(css);
                theta.push_back(css.sigma2);  // omega: the ML constant variance
                theta.push_back(0.0);
                theta.push_back(0.0);
                ArmaFit degenerate = assemble(theta);
                degenerate.flagged = true;
                degenerate.note = "no material ARCH in residuals; constant variance reported";
                return degenerate;
            }
        }
        return assemble(best.x);
    }

    /// Evaluates the model at fixed parameters (no optimization): used when a
    /// refit throttle holds the previous origin's estimates while the state
    /// recursions advance over the new window.
    ArmaFit fit_at(const std::vector<double>& theta) const {
        if (theta.size() != layout_.size())
            throw std::invalid_argument("fit_at: parameter vector does not match specification");
        return assemble(theta);
    }

    std::size_t n_free_params() const { return layout_.size(); }

    /// Packs an existing fit's parameters for warm starts.
    static std::vector<double> pack(const ArmaFit& f) {
        std::vector<double> theta;
        theta.insert(theta.end(), f.beta.begin(), f.beta.end());
        for (const auto* v : {&f.ar, &f.sar, &f.ma, &f.sma})
            theta.insert(theta.end(), v->begin(), v->end());
        if (f.spec.garch) {
            theta.push_back(f.garch_params.omega);
            theta.push_back(f.garch_params.alpha);
            theta.push_back(f.garch_params.beta);
        }
        return theta;
    }

  private:
    void bounds(std::vector<double>& lo, std::vector<double>& hi) const {
        std::size_t i = 0;
        for (; i < layout_.kx; ++i) {
            lo[i] = -50.0;
            hi[i] = 50.0;
        }
        for (std::size_t j = 0; j < layout_.nar + layout_.nsar + layout_.nma + layout_.nsma;
             ++j, ++i) {
            lo[i] = -0.98;
            hi[i] = 0.98;
        }
        if (layout_.garch) {
            const double vz = std::max(variance(z_), 1e-10);
            lo[i] = 1e-10;
            hi[i] = 10.0 * vz;
            ++i;  // omega
            lo[i] = 0.0;
            hi[i] = 0.995;
            ++i;  // alpha
            lo[i] = 0.0;
            hi[i] = 0.995;
            ++i;  // beta
        }
    }

    std::vector<double> initial_params() const {
        std::vector<double> theta(layout_.size(), 0.0);
        // Dummy coefficients start at weekday means of z.
        std::array<double, 7> sum{};
        std::array<int, 7> cnt{};
        for (std::size_t t = 0; t < z_.size(); ++t) {
            const int wd = weekday_of_z(t);
            sum[static_cast<std::size_t>(wd)] += z_[t];
            ++cnt[static_cast<std::size_t>(wd)];
        }
        for (std::size_t j = 0; j < layout_.kx; ++j)
            theta[j] = cnt[j] > 0 ? sum[j] / cnt[j] : 0.0;

        // AR starts from lagged-residual regressions, MA at small values.
        std::vector<double> u(z_.size());
        for (std::size_t t = 0; t < z_.size(); ++t)
            u[t] = z_[t] - (layout_.kx ? theta[static_cast<std::size_t>(weekday_of_z(t))] : 0.0);
        std::size_t i = layout_.kx;
        auto acf_at = [&](int lag) {
            double num = 0.0, den = 0.0;
            for (std::size_t t = static_cast<std::size_t>(lag); t < u.size(); ++t)
                num += u[t] * u[t - static_cast<std::size_t>(lag)];
            for (double v : u) den += v * v;
            return den > 0.0 ? std::clamp(num / den, -0.9, 0.9) : 0.0;
        };
        for (int l : spec_.ar_lags) theta[i++] = acf_at(l);
        for (int l : spec_.sar_lags) theta[i++] = acf_at(l);
        for (std::size_t j = 0; j < layout_.nma + layout_.nsma; ++j) theta[i++] = 0.05;
        if (layout_.garch) {
            const GarchParams g0 = garch::moment_initials(u);
            theta[i++] = g0.omega;
            theta[i++] = g0.alpha;
            theta[i++] = g0.beta;
        }
        return theta;
    }

    int weekday_of_z(std::size_t t) const {
        return (first_weekday_ + diff_loss_ + static_cast<int>(t)) % 7;
    }

    detail::ArmaEval evaluate(std::span<const double> theta) const {
        thread_local std::vector<double> u, eps;
        detail::ArmaEval ev;
        const std::size_t n = z_.size();
        u.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            double v = z_[t];
            if (layout_.kx) v -= theta[static_cast<std::size_t>(weekday_of_z(t))];
            u[t] = v;
        }
        const auto [a, b] = polynomials(theta);
        eps.assign(n, 0.0);
        const std::size_t m = static_cast<std::size_t>(presample_);
        for (std::size_t t = m; t < n; ++t) {
            double e = u[t];
            for (auto [lag, c] : a) {
                const auto l = static_cast<std::size_t>(lag);
                if (t >= l) e -= c * u[t - l];
            }
            for (auto [lag, c] : b) {
                const auto l = static_cast<std::size_t>(lag);
                if (t >= m + l) e -= c * eps[t - l];
            }
            if (!std::isfinite(e) || std::abs(e) > 1e8) return ev;  // divergent recursion
            eps[t] = e;
        }
        const std::size_t n_eff = n - m;
        if (layout_.garch) {
            GarchParams g{theta[layout_.size() - 3], theta[layout_.size() - 2],
                          theta[layout_.size() - 1]};
            if (!(g.alpha + g.beta < 0.9995) || g.omega <= 0.0) return ev;
            const double ll =
                garch::loglik(std::span<const double>(eps).subspan(m), g);
            if (!std::isfinite(ll)) return ev;
            ev.loglik = ll;
            ev.neg_loglik = -ll;
            return ev;
        }
        double rss = 0.0;
        for (std::size_t t = m; t < n; ++t) rss += eps[t] * eps[t];
        const double s2 = rss / static_cast<double>(n_eff);
        if (!(s2 > 0.0)) return ev;
        ev.sigma2 = s2;
        ev.loglik = -0.5 * static_cast<double>(n_eff) * (std::log(2.0 * M_PI) + std::log(s2) + 1.0);
        ev.neg_loglik = -ev.loglik;
        return ev;
    }

    std::pair<std::vector<std::pair<int, double>>, std::vector<std::pair<int, double>>>
    polynomials(std::span<const double> theta) const {
        std::size_t i = layout_.kx;
        const std::span<const double> ar = theta.subspan(i, layout_.nar);
        i += layout_.nar;
        const std::span<const double> sar = theta.subspan(i, layout_.nsar);
        i += layout_.nsar;
        const std::span<const double> ma = theta.subspan(i, layout_.nma);
        i += layout_.nma;
        const std::span<const double> sma = theta.subspan(i, layout_.nsma);
        const std::vector<double> a =
            lagpoly::expand_two_factor(spec_.ar_lags, ar, spec_.sar_lags, sar, -1);
        const std::vector<double> b =
            lagpoly::expand_two_factor(spec_.ma_lags, ma, spec_.sma_lags, sma, +1);
        return {detail::sparsify(a), detail::sparsify(b)};
    }

    ArmaFit assemble(const std::vector<double>& theta) const {
        ArmaFit f;
        f.spec = spec_;
        f.dep = dep_;
        f.z = z_;
        f.presample = presample_;
        f.diff_loss = diff_loss_;
        f.last_weekday = (first_weekday_ + static_cast<int>(dep_.size()) - 1) % 7;
        std::size_t i = 0;
        f.beta.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(layout_.kx));
        i = layout_.kx;
        auto take = [&](std::size_t count) {
            std::vector<double> v(theta.begin() + static_cast<std::ptrdiff_t>(i),
                                  theta.begin() + static_cast<std::ptrdiff_t>(i + count));
            i += count;
            return v;
        };
        f.ar = take(layout_.nar);
        f.sar = take(layout_.nsar);
        f.ma = take(layout_.nma);
        f.sma = take(layout_.nsma);
        if (layout_.garch)
            f.garch_params = {theta[i], theta[i + 1], theta[i + 2]};

        const detail::ArmaEval ev = evaluate(theta);
        f.loglik = ev.loglik;
        // Recompute innovation path for storage.
        const std::size_t n = z_.size();
        std::vector<double> u(n);
        for (std::size_t t = 0; t < n; ++t) {
            double v = z_[t];
            if (layout_.kx) v -= f.beta[static_cast<std::size_t>(weekday_of_z(t))];
            u[t] = v;
        }
        const auto [a, b] = polynomials(theta);
        f.eps.assign(n, 0.0);
        const std::size_t m = static_cast<std::size_t>(presample_);
        for (std::size_t t = m; t < n; ++t) {
            double e = u[t];
            for (auto [lag, c] : a)
                if (t >= static_cast<std::size_t>(lag)) e -= c * u[t - static_cast<std::size_t>(lag)];
            for (auto [lag, c] : b)
                if (t >= m + static_cast<std::size_t>(lag))
                    e -= c * f.eps[t - static_cast<std::size_t>(lag)];
            f.eps[t] = e;
        }
        if (layout_.garch) {
            const auto tail = std::span<const double>(f.eps).subspan(m);
            std::vector<double> cv = garch::variance_path(tail, f.garch_params);
            f.cond_var.assign(n, 0.0);
            std::copy(cv.begin(), cv.end(), f.cond_var.begin() + static_cast<std::ptrdiff_t>(m));
            f.sigma2 = f.garch_params.omega /
                       std::max(1e-10, 1.0 - f.garch_params.alpha - f.garch_params.beta);
            if (f.garch_params.alpha + f.garch_params.beta > 0.99) {
                f.flagged = true;
                f.note = "garch persistence at boundary";
            }
        } else {
            f.sigma2 = ev.sigma2;
        }
        f.n_params = layout_.size() + (layout_.garch ? 0 : 1);  // + concentrated sigma2
        const auto ic = information_criteria(f.loglik, f.n_params, f.n_obs());
        f.sic = ic.sic;
        f.aic = ic.aic;

        // Stationarity / invertibility of the fitted factors.
        std::vector<double> a_dense =
            lagpoly::expand_two_factor(spec_.ar_lags, f.ar, spec_.sar_lags, f.sar, -1);
        std::vector<double> b_dense =
            lagpoly::expand_two_factor(spec_.ma_lags, f.ma, spec_.sma_lags, f.sma, +1);
        for (double& c : b_dense) c = -c;  // invertibility test wants AR convention
        if (!lagpoly::roots_outside_unit_circle(a_dense)) {
            f.flagged = true;
            f.note += std::string(f.note.empty() ? "" : "; ") + "AR roots near/inside unit circle";
        }
        if (!lagpoly::roots_outside_unit_circle(b_dense)) {
            f.flagged = true;
            f.note += std::string(f.note.empty() ? "" : "; ") + "MA roots near/inside unit circle";
        }
        return f;
    }

    ModelSpec spec_;
    std::vector<double> dep_;
    int first_weekday_;
    std::vector<double> z_;
    int presample_ = 0;
    int diff_loss_ = 0;
    detail::ArmaLayout layout_;
};

inline ArmaFit fit_linear_arma(const ModelSpec& spec, std::vector<double> dep, int first_weekday,
                               const FitOptions& opts = {}) {
    return RegArmaModel(spec, std::move(dep), first_weekday).fit(opts);
}

/// Adds a GARCH(1,1) layer to an already specified mean model and jointly
/// re-estimates mean and variance parameters, warm-started from the mean fit.
inline ArmaFit fit_garch_layer(const ArmaFit& mean_fit, int first_weekday,
                               const FitOptions& opts = {}) {
    ModelSpec spec = mean_fit.spec;
    spec.garch = true;
    std::vector<double> warm = RegArmaModel::pack(mean_fit);
    const GarchParams g0 = garch::moment_initials(mean_fit.residuals());
    warm.push_back(g0.omega);
    warm.push_back(g0.alpha);
    warm.push_back(g0.beta);
    FitOptions o = opts;
    o.warm_start = &warm;
    return RegArmaModel(spec, mean_fit.dep, first_weekday).fit(o);
}

struct ArmaForecastPath {
    std::vector<double> log_point;  // indexed h-1, on the dependent's scale
    std::vector<double> variance;   // forecast error variance, same scale
};

/// Iterates the mean recursion with future innovations at zero and derives
/// the h-step error variance from the truncated MA representation, with
/// per-step conditional variances from the GARCH recursion when present.
inline ArmaForecastPath arma_forecast_path(const ArmaFit& f, std::size_t horizons) {
    ArmaForecastPath out;
    out.log_point.resize(horizons);
    out.variance.resize(horizons);
    const std::vector<double> a_dense =
        lagpoly::expand_two_factor(f.spec.ar_lags, f.ar, f.spec.sar_lags, f.sar, -1);
    const std::vector<double> b_dense =
        lagpoly::expand_two_factor(f.spec.ma_lags, f.ma, f.spec.sma_lags, f.sma, +1);
    const auto a = detail::sparsify(a_dense);
    const auto b = detail::sparsify(b_dense);

    const std::size_t nz = f.z.size();
    // Regression errors on the z scale (z minus dummy effect).
    std::vector<double> u(nz);
    for (std::size_t t = 0; t < nz; ++t) {
        double v = f.z[t];
        if (!f.beta.empty()) {
            const int wd = (f.last_weekday - static_cast<int>(nz - 1 - t) % 7 + 14) % 7;
            v -= f.beta[static_cast<std::size_t>(wd)];
        }
        u[t] = v;
    }
    std::vector<double> u_future(horizons), zhat(horizons);
    for (std::size_t j = 1; j <= horizons; ++j) {
        double v = 0.0;
        for (auto [lag, c] : a) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(nz + j - 1) - lag;
            if (idx < 0) continue;
            const double uv = idx < static_cast<std::ptrdiff_t>(nz)
                                  ? u[static_cast<std::size_t>(idx)]
                                  : u_future[static_cast<std::size_t>(idx) - nz];
            v += c * uv;
        }
        for (auto [lag, c] : b) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(nz + j - 1) - lag;
            if (idx >= static_cast<std::ptrdiff_t>(f.presample) &&
                idx < static_cast<std::ptrdiff_t>(nz))
                v += c * f.eps[static_cast<std::size_t>(idx)];
        }
        u_future[j - 1] = v;
        const int wd = (f.last_weekday + static_cast<int>(j)) % 7;
        zhat[j - 1] = v + (f.beta.empty() ? 0.0 : f.beta[static_cast<std::size_t>(wd)]);
    }

    // Undo differencing for the point path.
    if (f.diff_loss == 0) {
        out.log_point = zhat;
    } else {
        const std::size_t ny = f.dep.size();
        auto dep_at = [&](std::ptrdiff_t idx, const std::vector<double>& future) {
            return idx < static_cast<std::ptrdiff_t>(ny)
                       ? f.dep[static_cast<std::size_t>(idx)]
                       : future[static_cast<std::size_t>(idx) - ny];
        };
        for (std::size_t j = 1; j <= horizons; ++j) {
            const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(ny + j - 1);
            double v = zhat[j - 1];
            if (f.spec.diff && f.spec.seasonal_diff)
                v += dep_at(t - 1, out.log_point) + dep_at(t - 7, out.log_point) -
                     dep_at(t - 8, out.log_point);
            else if (f.spec.diff)
                v += dep_at(t - 1, out.log_point);
            else if (f.spec.seasonal_diff)
                v += dep_at(t - 7, out.log_point);
            out.log_point[j - 1] = v;
        }
    }

    // Psi weights of the (possibly integrated) process.
    const std::vector<double> a_full = lagpoly::multiply_differences(
        a_dense, f.spec.diff ? 1 : 0, f.spec.seasonal_diff ? 1 : 0);
    const std::vector<double> psi = lagpoly::psi_weights(a_full, b_dense, horizons);

    std::vector<double> step_var(horizons, f.sigma2);
    if (f.spec.garch && !f.cond_var.empty()) {
        const double last_u2 = f.eps.back() * f.eps.back();
        step_var = garch::variance_forecast(last_u2, f.cond_var.back(), f.garch_params, horizons);
    }
    for (std::size_t h = 1; h <= horizons; ++h) {
        double v = 0.0;
        for (std::size_t j = 1; j <= h; ++j) v += psi[h - j] * psi[h - j] * step_var[j - 1];
        out.variance[h - 1] = v;
    }
    return out;
}

}  // namespace arriva
