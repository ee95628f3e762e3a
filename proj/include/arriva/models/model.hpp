#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arriva/models/arma.hpp"
#include "arriva/models/counts.hpp"
#include "arriva/models/holt_winters.hpp"
#include "arriva/models/mem.hpp"
#include "arriva/models/par.hpp"
#include "arriva/models/spec.hpp"
#include "arriva/models/srw.hpp"
#include "arriva/models/tvd_ar.hpp"
#include "arriva/series.hpp"
#include "arriva/spline.hpp"

namespace arriva {

/// One model's view of one future date.
struct ModelForecast {
    double point = 0.0;  // level scale (calls)
    std::optional<double> log_point;
    std::optional<double> variance;  // log-scale forecast error variance
};

/// A fitted model of any family, with the uniform surface the engine needs:
/// information criteria, residuals, named parameters, and a forecast path.
class FittedModel {
  public:
    ModelSpec spec;
    double loglik = 0.0;
    double sic = 0.0, aic = 0.0;
    std::vector<double> residuals;
    std::vector<double> cond_variance;  // empty unless a GARCH layer is present
    std::size_t window_begin = 0, window_end = 0;
    bool flagged = false;
    std::string note;

    using Inner =
        std::variant<SrwFit, ArmaFit, CountFit, ParFit, TvdFit, MemFit, HoltWintersFit>;
    Inner inner;

    // Reconstruction state for ratio-dependent families.
    double spline_level = 0.0;         // flat extrapolation level (spline_sarx)
    std::array<double, 7> ysr{};       // weekday log means (mem)

    std::vector<std::pair<std::string, double>> named_params() const {
        return std::visit(
            [](const auto& f) -> std::vector<std::pair<std::string, double>> {
                if constexpr (std::is_same_v<std::decay_t<decltype(f)>, SrwFit>)
                    return {};
                else
                    return f.named_params();
            },
            inner);
    }

    /// Packed free parameters for warm starts / refit holds; empty for the
    /// families whose search state is re-derived instead.
    std::vector<double> packed_params() const {
        if (const auto* a = std::get_if<ArmaFit>(&inner)) return RegArmaModel::pack(*a);
        if (const auto* c = std::get_if<CountFit>(&inner)) {
            std::vector<double> v = c->beta;
            if (c->spec.family == ModelFamily::negbin) v.push_back(c->alpha);
            return v;
        }
        if (const auto* m = std::get_if<MemFit>(&inner)) {
            std::vector<double> v{m->omega, m->alpha};
            v.insert(v.end(), m->day_shift.begin(), m->day_shift.end());
            return v;
        }
        if (const auto* t = std::get_if<TvdFit>(&inner)) return {t->gamma, t->c};
        if (const auto* h = std::get_if<HoltWintersFit>(&inner))
            return {h->alpha, h->beta, h->gamma};
        return {};
    }

    std::vector<ModelForecast> forecast_path(std::size_t horizons) const;
};

namespace model_detail {

inline std::vector<ModelForecast> from_log_path(const std::vector<double>& log_points,
                                                const std::vector<double>* variances = nullptr) {
    std::vector<ModelForecast> out(log_points.size());
    for (std::size_t i = 0; i < log_points.size(); ++i) {
        out[i].log_point = log_points[i];
        out[i].point = std::exp(log_points[i]);
        if (variances) out[i].variance = (*variances)[i];
    }
    return out;
}

}  // namespace model_detail

inline std::vector<ModelForecast> FittedModel::forecast_path(std::size_t horizons) const {
    if (horizons == 0 || horizons > kMaxHorizon)
        throw std::invalid_argument("forecast_path: horizon outside 1..28");
    if (const auto* s = std::get_if<SrwFit>(&inner)) {
        std::vector<ModelForecast> out(horizons);
        for (std::size_t h = 1; h <= horizons; ++h) {
            out[h - 1].point = srw_forecast(*s, h);
            out[h - 1].log_point = std::log(out[h - 1].point);
            out[h - 1].variance = srw_log_variance(*s, h);
        }
        return out;
    }
    if (const auto* a = std::get_if<ArmaFit>(&inner)) {
        ArmaForecastPath path = arma_forecast_path(*a, horizons);
        if (spec.family == ModelFamily::spline_sarx) {
            for (std::size_t i = 0; i < horizons; ++i) {
                path.log_point[i] *= spline_level;
                path.variance[i] *= spline_level * spline_level;
            }
        }
        return model_detail::from_log_path(path.log_point, &path.variance);
    }
    if (const auto* c = std::get_if<CountFit>(&inner)) {
        const std::vector<double> mu = count_forecast_path(*c, horizons);
        std::vector<ModelForecast> out(horizons);
        for (std::size_t i = 0; i < horizons; ++i) out[i].point = mu[i];
        return out;
    }
    if (const auto* p = std::get_if<ParFit>(&inner))
        return model_detail::from_log_path(par_forecast_path(*p, horizons));
    if (const auto* t = std::get_if<TvdFit>(&inner))
        return model_detail::from_log_path(tvd_forecast_path(*t, horizons));
    if (const auto* m = std::get_if<MemFit>(&inner)) {
        std::vector<double> ratio = mem_forecast_path(*m, horizons);
        std::vector<double> log_points(horizons);
        for (std::size_t j = 1; j <= horizons; ++j) {
            const std::size_t wd =
                static_cast<std::size_t>((m->last_weekday + static_cast<int>(j)) % 7);
            log_points[j - 1] = ratio[j - 1] * ysr[wd];
        }
        return model_detail::from_log_path(log_points);
    }
    const auto& h = std::get<HoltWintersFit>(inner);
    return model_detail::from_log_path(holt_winters_forecast_path(h, horizons));
}

/// Fits `spec` on the window [begin, end) of the series. `hold_params`, when
/// nonempty, skips the nonlinear search and evaluates at those parameters
/// (the refit-throttle path); linear stages are always recomputed.
inline FittedModel fit_model(const ModelSpec& spec, const ArrivalSeries& series,
                             std::size_t begin, std::size_t end, const FitOptions& opts = {},
                             const std::vector<double>& hold_params = {}) {
    if (end > series.size() || begin >= end)
        throw std::invalid_argument("fit_model: bad window");
    if (end - begin < 14)
        throw std::invalid_argument("fit_model: window shorter than two weeks");
    const int first_weekday = static_cast<int>(series.weekday(begin));

    FittedModel out;
    out.spec = spec;
    out.window_begin = begin;
    out.window_end = end;

    auto log_window = [&] {
        std::vector<double> y(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            const long long c = series.count(i);
            if (c <= 0)
                throw std::domain_error("fit_model: nonpositive count inside window at " +
                                        series.date(i).to_string());
            y[i - begin] = std::log(static_cast<double>(c));
        }
        return y;
    };
    auto counts_window = [&] {
        return std::vector<long long>(series.counts().begin() + static_cast<std::ptrdiff_t>(begin),
                                      series.counts().begin() + static_cast<std::ptrdiff_t>(end));
    };

    auto finish = [&](auto&& fit) {
        out.loglik = fit.loglik;
        out.sic = fit.sic;
        out.aic = fit.aic;
        out.inner = std::forward<decltype(fit)>(fit);
    };

    switch (spec.family) {
        case ModelFamily::srw: {
            finish(fit_srw(counts_window()));
            const auto& f = std::get<SrwFit>(out.inner);
            out.residuals = f.residuals;
            break;
        }
        case ModelFamily::armax:
        case ModelFamily::sarmax:
        case ModelFamily::airline: {
            RegArmaModel model(spec, log_window(), first_weekday);
            ArmaFit f = hold_params.empty() ? model.fit(opts) : model.fit_at(hold_params);
            out.residuals = f.residuals();
            out.flagged = f.flagged;
            out.note = f.note;
            finish(std::move(f));
            break;
        }
        case ModelFamily::armax_garch:
        case ModelFamily::sarmax_garch: {
            RegArmaModel model(spec, log_window(), first_weekday);
            ArmaFit f;
            if (!hold_params.empty()) {
                f = model.fit_at(hold_params);
            } else if (opts.warm_start && opts.warm_start->size() == model.n_free_params()) {
                f = model.fit(opts);
            } else {
                // Two-stage start: mean model first, then the joint fit.
                ModelSpec mean_spec = spec;
                mean_spec.garch = false;
                ArmaFit mean = fit_linear_arma(mean_spec, log_window(), first_weekday, opts);
                f = fit_garch_layer(mean, first_weekday, opts);
            }
            out.residuals = f.residuals();
            out.cond_variance.assign(f.cond_var.begin() + f.presample, f.cond_var.end());
            out.flagged = f.flagged;
            out.note = f.note;
            finish(std::move(f));
            break;
        }
        case ModelFamily::spline_sarx: {
            const std::vector<double> y = log_window();
            const SplineFit spl = spline_fit(series, y, begin, end);
            std::vector<double> ratio(y.size());
            for (std::size_t t = 0; t < y.size(); ++t) {
                if (std::abs(spl.fitted_values[t]) < 0.1)
                    throw std::domain_error("fit_model: spline level too close to zero");
                ratio[t] = y[t] / spl.fitted_values[t];
            }
            RegArmaModel model(spec, std::move(ratio), first_weekday);
            ArmaFit f = hold_params.empty() ? model.fit(opts) : model.fit_at(hold_params);
            out.residuals = f.residuals();
            out.flagged = f.flagged;
            out.note = f.note;
            out.spline_level = spl.fitted_values.back();
            finish(std::move(f));
            break;
        }
        case ModelFamily::par: {
            ParFit f = fit_par(log_window(), first_weekday);
            out.residuals = f.residuals;
            finish(std::move(f));
            break;
        }
        case ModelFamily::tvd_ar: {
            TvdFit f;
            if (hold_params.size() == 2) {
                // Hold the transition, re-profile the linear coefficients.
                const std::vector<double> y = log_window();
                auto pr =
                    tvd_detail::profile_ols(y, first_weekday, spec.ar_lags, hold_params[0],
                                            hold_params[1]);
                if (!pr.coef.empty()) {
                    f = fit_tvd_from_profile(spec, y, first_weekday, hold_params[0],
                                             hold_params[1], std::move(pr));
                } else {
                    f = fit_tvd_ar(spec, y, first_weekday);
                }
            } else {
                f = fit_tvd_ar(spec, log_window(), first_weekday);
            }
            out.residuals = f.residuals;
            out.flagged = f.flagged;
            out.note = f.note;
            finish(std::move(f));
            break;
        }
        case ModelFamily::poisson:
        case ModelFamily::negbin:
        case ModelFamily::exponential: {
            const std::vector<long long> cw = counts_window();
            CountFit f;
            if (!hold_params.empty()) {
                f = count_fit_at(spec, cw, first_weekday, hold_params);
            } else {
                f = fit_count(spec, cw, first_weekday, opts);
            }
            out.residuals = f.residuals;
            out.flagged = f.flagged;
            out.note = f.note;
            finish(std::move(f));
            break;
        }
        case ModelFamily::mem: {
            const std::vector<double> y = log_window();
            const DummyFit dsr = dummy_fit(y, day_dummies(series, begin, end));
            std::vector<double> ratio(y.size());
            for (std::size_t t = 0; t < y.size(); ++t) ratio[t] = y[t] / dsr.fitted[t];
            MemFit f = hold_params.empty() ? fit_mem(ratio, first_weekday, opts)
                                           : mem_fit_at(ratio, first_weekday, hold_params);
            out.residuals = f.residuals;
            out.ysr = dsr.weekday_means;
            finish(std::move(f));
            break;
        }
        case ModelFamily::holt_winters: {
            const std::vector<double> y = log_window();
            HoltWintersFit f = hold_params.size() == 3
                                   ? holt_winters_at(y, first_weekday, hold_params[0],
                                                     hold_params[1], hold_params[2])
                                   : fit_holt_winters(y, first_weekday);
            out.residuals = f.residuals;
            finish(std::move(f));
            break;
        }
    }
    return out;
}

}  // namespace arriva
