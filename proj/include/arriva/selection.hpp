#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "arriva/diagnostics.hpp"
#include "arriva/models/arma.hpp"
#include "arriva/models/model.hpp"
#include "arriva/series.hpp"
#include "arriva/stats.hpp"

namespace arriva {

/// Specification search settings. The lag searches are greedy-forward on the
/// information criterion (an exhaustive subset scan over 28 lags is not
/// tractable), which matches the sparse printed specifications well.
struct SelectionOptions {
    std::vector<int> ar_candidates{1, 2, 3, 4, 5, 6, 7, 8, 14, 21, 28};
    std::vector<int> ma_candidates{1, 2, 3, 7};
    std::vector<int> seasonal_candidates{7, 14, 21, 28};
    double significance = 0.05;
    int lm_order = 8;
    int max_terms = 6;
    FitOptions fit;
};

struct SelectionResult {
    ModelSpec spec;
    double sic = std::numeric_limits<double>::infinity();
    bool lm_clean = false;
    bool flagged = false;  // set when no candidate passes the LM screen
    std::string note;
};

namespace selection_detail {

struct Candidate {
    ModelSpec spec;
    double sic;
    double loglik;
};

inline std::optional<Candidate> try_fit(const ModelSpec& spec, const std::vector<double>& y,
                                        int first_weekday, const FitOptions& opts) {
    try {
        ArmaFit f = fit_linear_arma(spec, y, first_weekday, opts);
        return Candidate{spec, f.sic, f.loglik};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

/// Backward stepwise: drop the ARMA term whose likelihood-ratio test is least
/// significant until every retained term clears the significance level.
/// Dummies are never dropped (the printed specifications always keep them).
inline Candidate stepwise_prune(Candidate cand, const std::vector<double>& y, int first_weekday,
                                const SelectionOptions& sel) {
    for (;;) {
        struct Removal {
            int which;  // 0 ar, 1 sar, 2 ma, 3 sma
            std::size_t index;
            double lr_p;
            Candidate fit;
        };
        std::optional<Removal> weakest;
        auto consider = [&](int which, std::vector<int> ModelSpec::*member) {
            const std::vector<int>& lags = cand.spec.*member;
            for (std::size_t i = 0; i < lags.size(); ++i) {
                ModelSpec reduced = cand.spec;
                (reduced.*member).erase((reduced.*member).begin() + static_cast<std::ptrdiff_t>(i));
                auto fit = try_fit(reduced, y, first_weekday, sel.fit);
                if (!fit) continue;
                const double lr = std::max(0.0, 2.0 * (cand.loglik - fit->loglik));
                const double p = stats::chi2_sf(lr, 1.0);
                if (!weakest || p > weakest->lr_p)
                    weakest = Removal{which, i, p, std::move(*fit)};
            }
        };
        consider(0, &ModelSpec::ar_lags);
        consider(1, &ModelSpec::sar_lags);
        consider(2, &ModelSpec::ma_lags);
        consider(3, &ModelSpec::sma_lags);
        if (!weakest || weakest->lr_p <= sel.significance) return cand;
        cand = std::move(weakest->fit);
    }
}

inline bool lm_screen(const ModelSpec& spec, const std::vector<double>& y, int first_weekday,
                      const SelectionOptions& sel) {
    try {
        ArmaFit f = fit_linear_arma(spec, y, first_weekday, sel.fit);
        const DiagnosticResult lm = lm_serial_corr(f.residuals(), sel.lm_order);
        return lm.p_value >= sel.significance;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace selection_detail

/// Chooses the lag structure on the first estimation window only: greedy
/// SIC-forward over the candidate lags, backward stepwise at the 5% level,
/// then the serial-correlation LM screen. When no candidate passes the
/// screen, the SIC-best specification is returned flagged.
inline SelectionResult select_specification(ModelFamily family, const ArrivalSeries& series,
                                            std::size_t first_window_end,
                                            const SelectionOptions& sel = {}) {
    using selection_detail::Candidate;
    SelectionResult out;
    out.spec = default_spec(family);
    const bool searchable =
        family == ModelFamily::armax || family == ModelFamily::armax_garch ||
        family == ModelFamily::sarmax || family == ModelFamily::sarmax_garch ||
        family == ModelFamily::tvd_ar || family == ModelFamily::spline_sarx;
    if (!searchable) {
        out.lm_clean = true;  // fixed specification, no search performed
        return out;
    }
    if (first_window_end > series.size() || first_window_end < 60)
        throw std::invalid_argument("select_specification: first window too short");

    std::vector<double> y(first_window_end);
    for (std::size_t i = 0; i < first_window_end; ++i)
        y[i] = std::log(static_cast<double>(series.count(i)));
    const int first_weekday = static_cast<int>(series.weekday(0));

    // The search runs on the mean equation; a GARCH layer and the TVD
    // transition are added after the lag structure is settled.
    ModelSpec base;
    base.family = (family == ModelFamily::sarmax || family == ModelFamily::sarmax_garch)
                      ? ModelFamily::sarmax
                      : family == ModelFamily::spline_sarx ? ModelFamily::spline_sarx
                                                           : ModelFamily::armax;
    base.garch = false;
    base.include_dummies = true;

    const bool seasonal_terms =
        base.family == ModelFamily::sarmax || base.family == ModelFamily::spline_sarx;
    // TVD-AR and the spline model carry no MA terms in this catalog.
    const bool ma_terms =
        base.family != ModelFamily::spline_sarx && family != ModelFamily::tvd_ar;

    // Ratio dependent for the spline family.
    std::vector<double> dep = y;
    if (base.family == ModelFamily::spline_sarx) {
        const SplineFit spl = spline_fit(series, y, 0, first_window_end);
        for (std::size_t t = 0; t < y.size(); ++t) dep[t] = y[t] / spl.fitted_values[t];
        base.family = ModelFamily::armax;  // plain ARMA machinery on the ratio
    }

    std::vector<Candidate> trace;
    auto base_fit = selection_detail::try_fit(base, dep, first_weekday, sel.fit);
    if (!base_fit) throw std::runtime_error("select_specification: dummy-only fit failed");
    trace.push_back(*base_fit);

    Candidate current = *base_fit;
    for (int round = 0; round < sel.max_terms; ++round) {
        std::optional<Candidate> best_add;
        auto consider = [&](const std::vector<int>& candidates,
                            std::vector<int> ModelSpec::*member, int cap) {
            const std::vector<int>& present = current.spec.*member;
            if (static_cast<int>(present.size()) >= cap) return;
            for (int lag : candidates) {
                if (std::find(present.begin(), present.end(), lag) != present.end()) continue;
                ModelSpec grown = current.spec;
                (grown.*member).push_back(lag);
                std::sort((grown.*member).begin(), (grown.*member).end());
                auto fit = selection_detail::try_fit(grown, dep, first_weekday, sel.fit);
                if (fit && (!best_add || fit->sic < best_add->sic)) best_add = std::move(*fit);
            }
        };
        consider(sel.ar_candidates, &ModelSpec::ar_lags, 4);
        if (ma_terms) consider(sel.ma_candidates, &ModelSpec::ma_lags, 2);
        if (seasonal_terms) {
            consider(sel.seasonal_candidates, &ModelSpec::sar_lags, 1);
            consider(sel.seasonal_candidates, &ModelSpec::sma_lags, 1);
        }
        if (!best_add || best_add->sic >= current.sic) break;
        current = std::move(*best_add);
        trace.push_back(current);
    }

    std::sort(trace.begin(), trace.end(),
              [](const Candidate& a, const Candidate& b) { return a.sic < b.sic; });

    std::optional<Candidate> accepted;
    std::optional<Candidate> sic_best;
    const std::size_t tries = std::min<std::size_t>(trace.size(), 5);
    for (std::size_t i = 0; i < tries; ++i) {
        Candidate pruned = selection_detail::stepwise_prune(trace[i], dep, first_weekday, sel);
        if (!sic_best || pruned.sic < sic_best->sic) sic_best = pruned;
        if (selection_detail::lm_screen(pruned.spec, dep, first_weekday, sel)) {
            accepted = std::move(pruned);
            break;
        }
    }

    Candidate chosen = accepted ? *accepted : *sic_best;
    out.sic = chosen.sic;
    out.lm_clean = accepted.has_value();
    if (!accepted) {
        out.flagged = true;
        out.note = "no specification passed the serial-correlation screen; SIC-best kept";
    }

    // Map the searched lag structure back onto the requested family.
    out.spec = default_spec(family);
    out.spec.ar_lags = chosen.spec.ar_lags;
    out.spec.ma_lags = chosen.spec.ma_lags;
    out.spec.sar_lags = chosen.spec.sar_lags;
    out.spec.sma_lags = chosen.spec.sma_lags;
    return out;
}

}  // namespace arriva
