#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "arriva/rng.hpp"

namespace arriva {

struct OptimOptions {
    int max_iterations = 500;
    double rel_tol = 1e-8;       // relative objective change
    double grad_tol = 1e-7;      // projected gradient infinity norm
    double grad_step = 1e-6;     // numerical gradient relative step
    int starts = 5;              // multi-start count (first start is x0 itself)
    double start_spread = 0.25;  // perturbation scale for extra starts
    std::uint64_t seed = 1;
};

struct OptimResult {
    std::vector<double> x;
    double fval = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// True when `candidate` beats `incumbent` by a clear margin (used to keep
/// the earliest start along flat objective ridges).
inline bool clearly_better(double candidate, double incumbent) {
    if (!std::isfinite(incumbent)) return candidate < incumbent;
    return candidate < incumbent - 1e-7 * (std::abs(incumbent) + 1.0);
}

namespace detail {

inline void clip_to_bounds(std::vector<double>& x, std::span<const double> lo,
                           std::span<const double> hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

template <class F>
std::vector<double> numerical_gradient(F&& f, const std::vector<double>& x,
                                       std::span<const double> lo, std::span<const double> hi,
                                       double rel_step) {
    const std::size_t k = x.size();
    std::vector<double> g(k), xp = x;
    for (std::size_t i = 0; i < k; ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        const double up = std::min(x[i] + h, hi[i]);
        const double dn = std::max(x[i] - h, lo[i]);
        xp[i] = up;
        const double fu = f(std::span<const double>(xp));
        xp[i] = dn;
        const double fd = f(std::span<const double>(xp));
        xp[i] = x[i];
        g[i] = (up > dn) ? (fu - fd) / (up - dn) : 0.0;
    }
    return g;
}

}  // namespace detail

/// Box-constrained quasi-Newton (BFGS on the inverse Hessian with gradient
/// projection at active bounds and a backtracking Armijo line search).
/// `grad` may be empty, in which case central differences are used.
template <class F>
OptimResult minimize_bounded(F&& f, std::vector<double> x0, std::span<const double> lo,
                             std::span<const double> hi,
                             const std::function<std::vector<double>(std::span<const double>)>& grad = {},
                             const OptimOptions& opts = {}) {
    const std::size_t k = x0.size();
    detail::clip_to_bounds(x0, lo, hi);
    OptimResult res;
    res.x = x0;
    res.fval = f(std::span<const double>(x0));
    if (!std::isfinite(res.fval)) return res;

    auto gradient = [&](const std::vector<double>& x) {
        return grad ? grad(std::span<const double>(x))
                    : detail::numerical_gradient(f, x, lo, hi, opts.grad_step);
    };

    std::vector<double> h_inv(k * k, 0.0);  // inverse Hessian approximation
    auto reset_h = [&] {
        std::fill(h_inv.begin(), h_inv.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i) h_inv[i * k + i] = 1.0;
    };
    reset_h();

    std::vector<double> g = gradient(res.x);
    const double bound_eps = 1e-10;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter + 1;

        // Projected gradient: components pushing out of an active bound are dead.
        std::vector<bool> active(k, false);
        double pg_norm = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const bool at_lo = res.x[i] <= lo[i] + bound_eps && g[i] > 0.0;
            const bool at_hi = res.x[i] >= hi[i] - bound_eps && g[i] < 0.0;
            active[i] = at_lo || at_hi;
            if (!active[i]) pg_norm = std::max(pg_norm, std::abs(g[i]));
        }
        if (pg_norm < opts.grad_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> d(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            if (active[i]) continue;
            for (std::size_t j = 0; j < k; ++j)
                if (!active[j]) d[i] -= h_inv[i * k + j] * g[j];
        }
        double gd = 0.0;
        for (std::size_t i = 0; i < k; ++i) gd += g[i] * d[i];
        if (!(gd < 0.0)) {  // not a descent direction: steepest descent restart
            reset_h();
            for (std::size_t i = 0; i < k; ++i) d[i] = active[i] ? 0.0 : -g[i];
            gd = 0.0;
            for (std::size_t i = 0; i < k; ++i) gd += g[i] * d[i];
            if (!(gd < 0.0)) {
                res.converged = true;
                break;
            }
        }

        // Backtracking line search on the projected path.
        double alpha = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        std::vector<double> x_new(k);
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < k; ++i)
                x_new[i] = std::clamp(res.x[i] + alpha * d[i], lo[i], hi[i]);
            f_new = f(std::span<const double>(x_new));
            if (std::isfinite(f_new) && f_new <= res.fval + 1e-4 * alpha * gd) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            res.converged = true;  // no further progress along any tried step
            break;
        }

        std::vector<double> g_new = gradient(x_new);
        std::vector<double> s(k), yv(k);
        double sy = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            s[i] = x_new[i] - res.x[i];
            yv[i] = g_new[i] - g[i];
            sy += s[i] * yv[i];
        }

        const double f_old = res.fval;
        res.x = x_new;
        res.fval = f_new;
        g = std::move(g_new);

        if (std::abs(f_old - f_new) <= opts.rel_tol * (std::abs(f_old) + 1e-12)) {
            res.converged = true;
            break;
        }

        if (sy > 1e-12) {
            // BFGS inverse update: H <- (I - s y'/sy) H (I - y s'/sy) + s s'/sy
            std::vector<double> hy(k, 0.0);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) hy[i] += h_inv[i * k + j] * yv[j];
            double yhy = 0.0;
            for (std::size_t i = 0; i < k; ++i) yhy += yv[i] * hy[i];
            const double c = (sy + yhy) / (sy * sy);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j)
                    h_inv[i * k + j] +=
                        c * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        } else {
            reset_h();
        }
    }
    return res;
}

/// Multi-start wrapper: the first start is x0, the remainder are bounded
/// perturbations of it. A later start replaces the incumbent only on a
/// clear improvement, so along flat likelihood ridges the earliest start
/// wins and results stay reproducible.
template <class F>
OptimResult minimize_multistart(F&& f, const std::vector<double>& x0, std::span<const double> lo,
                                std::span<const double> hi,
                                const std::function<std::vector<double>(std::span<const double>)>& grad = {},
                                const OptimOptions& opts = {}) {
    Rng rng(derive_seed(opts.seed, "multistart"));
    OptimResult best;
    for (int s = 0; s < std::max(1, opts.starts); ++s) {
        std::vector<double> start = x0;
        if (s > 0) {
            for (std::size_t i = 0; i < start.size(); ++i) {
                const double scale = opts.start_spread * std::max(0.05, std::abs(x0[i]));
                start[i] = std::clamp(x0[i] + scale * rng.normal(), lo[i], hi[i]);
            }
        }
        OptimResult r = minimize_bounded(f, std::move(start), lo, hi, grad, opts);
        if (clearly_better(r.fval, best.fval)) best = std::move(r);
    }
    return best;
}

/// Nelder-Mead with bound clipping; used as the derivative-free cross-check
/// and for low-dimensional smoothing-constant searches.
template <class F>
OptimResult nelder_mead(F&& f, std::vector<double> x0, std::span<const double> lo,
                        std::span<const double> hi, double initial_step = 0.1,
                        int max_iterations = 2000, double tol = 1e-10) {
    const std::size_t k = x0.size();
    detail::clip_to_bounds(x0, lo, hi);
    std::vector<std::vector<double>> simplex(k + 1, x0);
    std::vector<double> fv(k + 1);
    for (std::size_t i = 0; i < k; ++i) {
        double step = initial_step * std::max(1.0, std::abs(x0[i]));
        if (simplex[i + 1][i] + step > hi[i]) step = -step;
        simplex[i + 1][i] = std::clamp(simplex[i + 1][i] + step, lo[i], hi[i]);
    }
    for (std::size_t i = 0; i <= k; ++i) fv[i] = f(std::span<const double>(simplex[i]));

    OptimResult res;
    auto order = [&] {
        for (std::size_t i = 1; i <= k; ++i) {
            std::size_t j = i;
            while (j > 0 && fv[j] < fv[j - 1]) {
                std::swap(fv[j], fv[j - 1]);
                std::swap(simplex[j], simplex[j - 1]);
                --j;
            }
        }
    };
    order();

    std::vector<double> centroid(k), xr(k), xe(k), xc(k);
    for (int iter = 0; iter < max_iterations; ++iter) {
        res.iterations = iter + 1;
        if (std::abs(fv[k] - fv[0]) <= tol * (std::abs(fv[0]) + 1e-12)) {
            res.converged = true;
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) centroid[j] += simplex[i][j] / static_cast<double>(k);

        auto reflect = [&](std::vector<double>& out, double coef) {
            for (std::size_t j = 0; j < k; ++j)
                out[j] = std::clamp(centroid[j] + coef * (centroid[j] - simplex[k][j]), lo[j], hi[j]);
        };
        reflect(xr, 1.0);
        const double fr = f(std::span<const double>(xr));
        if (fr < fv[0]) {
            reflect(xe, 2.0);
            const double fe = f(std::span<const double>(xe));
            if (fe < fr) {
                simplex[k] = xe;
                fv[k] = fe;
            } else {
                simplex[k] = xr;
                fv[k] = fr;
            }
        } else if (fr < fv[k - 1]) {
            simplex[k] = xr;
            fv[k] = fr;
        } else {
            reflect(xc, fr < fv[k] ? 0.5 : -0.5);
            const double fc = f(std::span<const double>(xc));
            if (fc < std::min(fr, fv[k])) {
                simplex[k] = xc;
                fv[k] = fc;
            } else {
                for (std::size_t i = 1; i <= k; ++i) {
                    for (std::size_t j = 0; j < k; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = f(std::span<const double>(simplex[i]));
                }
            }
        }
        order();
    }
    res.x = simplex[0];
    res.fval = fv[0];
    return res;
}

}  // namespace arriva
