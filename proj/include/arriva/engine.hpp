#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "arriva/combine.hpp"
#include "arriva/models/model.hpp"
#include "arriva/selection.hpp"
#include "arriva/series.hpp"
#include "arriva/store.hpp"

namespace arriva {

/// A producer is a model ("M0".."M13") or a combination "<method>.<group>"
/// such as "avg.G3" or "aic.G4".
struct ProducerId {
    bool is_model = true;
    ModelFamily family = ModelFamily::srw;
    CombineMethod method = CombineMethod::average;
    std::string group;

    static ProducerId parse(const std::string& id) {
        ProducerId p;
        const auto dot = id.find('.');
        if (dot == std::string::npos) {
            p.is_model = true;
            p.family = family_from_model_id(id);
            return p;
        }
        p.is_model = false;
        const std::string method = id.substr(0, dot);
        p.group = id.substr(dot + 1);
        bool found = false;
        for (CombineMethod m :
             {CombineMethod::average, CombineMethod::trimmed, CombineMethod::median,
              CombineMethod::min, CombineMethod::max, CombineMethod::abma_sic,
              CombineMethod::abma_aic}) {
            if (method == combine_tag(m)) {
                p.method = m;
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("unknown combining method '" + method + "'");
        bool group_ok = false;
        for (const auto& g : standard_groups()) group_ok = group_ok || g.id == p.group;
        if (!group_ok) throw std::invalid_argument("unknown model group '" + p.group + "'");
        if ((p.method == CombineMethod::abma_sic || p.method == CombineMethod::abma_aic) &&
            !abma_applicable(p.group))
            throw std::invalid_argument("ABMA is not defined over " + p.group);
        return p;
    }
};

struct RunConfig {
    enum class Scheme { recursive, rolling };
    Scheme scheme = Scheme::recursive;
    std::size_t window = 371;  // R
    int horizons = kMaxHorizon;
    std::vector<std::string> producers;  // empty = all models + all combinations
    std::uint64_t seed = 0;
    int refit_every = 1;       // refit cadence in origins; parameters held in between
    bool auto_select = false;  // run the specification search on the first window
    int fit_starts = 5;        // multi-starts on the first full fit
    int warm_starts = 1;       // starts on subsequent refits (warm-started)
    int jobs = 1;

    void validate(std::size_t series_length) const {
        if (window < 14) throw std::invalid_argument("RunConfig: window must be >= 14");
        if (window >= series_length)
            throw std::invalid_argument("RunConfig: window must be smaller than the series");
        if (horizons < 1 || horizons > kMaxHorizon)
            throw std::invalid_argument("RunConfig: horizons in 1..28");
        if (refit_every < 1) throw std::invalid_argument("RunConfig: refit cadence >= 1");
        if (jobs < 1) throw std::invalid_argument("RunConfig: jobs >= 1");
    }

    std::vector<std::string> effective_producers() const {
        if (!producers.empty()) return producers;
        std::vector<std::string> all;
        for (int m = 0; m <= 13; ++m) all.push_back("M" + std::to_string(m));
        for (const auto& g : standard_groups())
            for (CombineMethod method :
                 {CombineMethod::average, CombineMethod::trimmed, CombineMethod::median,
                  CombineMethod::min, CombineMethod::max, CombineMethod::abma_sic,
                  CombineMethod::abma_aic}) {
                if ((method == CombineMethod::abma_sic || method == CombineMethod::abma_aic) &&
                    !abma_applicable(g.id))
                    continue;
                all.push_back(std::string(combine_tag(method)) + "." + g.id);
            }
        return all;
    }
};

struct RunDiagnostics {
    std::map<std::string, int> fit_failures;
    std::map<std::string, int> flagged_fits;
    std::vector<std::string> messages;
};

namespace engine_detail {

struct ModelTrack {
    std::string id;
    ModelSpec spec;
    std::vector<double> sic;  // per origin
    std::vector<double> aic;
    std::vector<char> present;
    std::vector<std::pair<std::string, double>> last_named_params;
};

/// Runs one model across all origins (sequential: refit holds and failure
/// fallbacks chain on the previous origin's parameters).
inline void run_model(const ArrivalSeries& series, const RunConfig& cfg, const ModelSpec& spec,
                      const std::string& id, ForecastStore& store, ModelTrack& track,
                      RunDiagnostics& diag, std::mutex& diag_mutex) {
    const std::size_t t_len = series.size();
    const std::size_t first_origin = cfg.window - 1;
    const std::size_t n_origins = store.n_origins();
    track.sic.assign(n_origins, std::numeric_limits<double>::quiet_NaN());
    track.aic.assign(n_origins, std::numeric_limits<double>::quiet_NaN());
    track.present.assign(n_origins, 0);

    std::vector<double> prev_params;
    bool have_prev = false;
    for (std::size_t oi = 0; oi < n_origins; ++oi) {
        const std::size_t origin = first_origin + oi;
        const std::size_t begin = cfg.scheme == RunConfig::Scheme::recursive
                                      ? 0
                                      : origin + 1 - cfg.window;
        const bool refit_due = oi % static_cast<std::size_t>(cfg.refit_every) == 0;

        FitOptions opts;
        opts.seed = derive_seed(cfg.seed, id, static_cast<std::int64_t>(origin));
        opts.starts = oi == 0 ? cfg.fit_starts : cfg.warm_starts;
        opts.warm_start = (have_prev && !prev_params.empty()) ? &prev_params : nullptr;

        std::optional<FittedModel> fitted;
        try {
            if (refit_due || !have_prev) {
                fitted = fit_model(spec, series, begin, origin + 1, opts);
            } else {
                fitted = fit_model(spec, series, begin, origin + 1, opts, prev_params);
            }
        } catch (const std::exception& e) {
            if (have_prev && !prev_params.empty() && refit_due) {
                // A failed refit falls back to the held parameters.
                try {
                    fitted = fit_model(spec, series, begin, origin + 1, opts, prev_params);
                } catch (const std::exception&) {
                    fitted.reset();
                }
            }
            std::lock_guard<std::mutex> lock(diag_mutex);
            ++diag.fit_failures[id];
            if (diag.messages.size() < 200)
                diag.messages.push_back(id + "@" + series.date(origin).to_string() + ": " +
                                        e.what());
        }
        if (!fitted) continue;
        if (fitted->flagged) {
            std::lock_guard<std::mutex> lock(diag_mutex);
            ++diag.flagged_fits[id];
        }

        prev_params = fitted->packed_params();
        have_prev = true;
        track.last_named_params = fitted->named_params();
        track.sic[oi] = fitted->sic;
        track.aic[oi] = fitted->aic;
        track.present[oi] = 1;

        const std::size_t h_avail =
            std::min<std::size_t>(static_cast<std::size_t>(cfg.horizons), t_len - 1 - origin);
        if (h_avail == 0) continue;
        const auto path = fitted->forecast_path(h_avail);
        for (std::size_t h = 1; h <= h_avail; ++h) {
            StoredForecast cell;
            const ModelForecast& f = path[h - 1];
            if (series.is_closing(series.date(origin + h))) {
                cell.point = 0.0;  // forecasts for known closing days are zeroed
            } else {
                cell.point = f.point;
                cell.log_point = f.log_point;
                cell.variance = f.variance;
            }
            store.insert(id, oi, static_cast<int>(h), std::move(cell));
        }
        if (spec.family == ModelFamily::negbin)
            store.set_dispersion(id, oi, std::get<CountFit>(fitted->inner).alpha);
    }
}

}  // namespace engine_detail

struct RunResult {
    ForecastStore store;
    std::map<std::string, ModelSpec> specs;  // the specifications actually run
    std::map<std::string, std::vector<std::pair<std::string, double>>> final_params;
    RunDiagnostics diagnostics;
};

/// The recursive/rolling estimation-forecast loop. Models run independently
/// (optionally in parallel); combinations are formed afterwards from the
/// stored member forecasts and the per-origin information criteria, so the
/// result does not depend on execution order.
inline RunResult run(const ArrivalSeries& series, const RunConfig& cfg) {
    cfg.validate(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series.count(i) <= 0)
            throw std::invalid_argument(
                "run: series contains zero counts; apply validate_and_impute first");
    const std::vector<std::string> wanted = cfg.effective_producers();

    // Split into models and combinations; collect the models the groups need.
    std::vector<std::string> model_ids;
    std::vector<std::pair<std::string, ProducerId>> combos;
    auto want_model = [&](const std::string& id) {
        if (std::find(model_ids.begin(), model_ids.end(), id) == model_ids.end())
            model_ids.push_back(id);
    };
    for (const auto& id : wanted) {
        const ProducerId p = ProducerId::parse(id);
        if (p.is_model) {
            want_model(id);
        } else {
            combos.emplace_back(id, p);
            for (const auto& g : standard_groups())
                if (g.id == p.group)
                    for (const auto& m : g.members) want_model(m);
        }
    }
    std::sort(model_ids.begin(), model_ids.end());  // fixed fitting order

    RunResult result;
    const std::size_t first_origin = cfg.window - 1;
    // Origins run from the first full window's end to the penultimate date,
    // so every origin has at least its one-step target inside the sample.
    const std::size_t n_origins = series.size() - cfg.window;
    result.store = ForecastStore(series.date(first_origin), n_origins, cfg.horizons,
                                 cfg.scheme == RunConfig::Scheme::recursive ? "recursive"
                                                                            : "rolling",
                                 cfg.window);
    // Group members are materialized even when only the combination was
    // requested; their forecasts exist anyway and evaluation covers them.
    for (const auto& id : model_ids)
        result.store.add_producer(id);
    for (const auto& id : wanted)
        if (!result.store.has_producer(id)) result.store.add_producer(id);

    // Specifications: catalog defaults, optionally refined on the first window.
    for (const auto& id : model_ids) {
        const ModelFamily family = family_from_model_id(id);
        ModelSpec spec = default_spec(family);
        if (cfg.auto_select) {
            SelectionOptions sel;
            sel.fit.seed = derive_seed(cfg.seed, "select:" + id);
            const SelectionResult sr = select_specification(family, series, cfg.window, sel);
            spec = sr.spec;
            if (sr.flagged)
                result.diagnostics.messages.push_back("selection " + id + ": " + sr.note);
        }
        result.specs[id] = spec;
    }

    // Fit every model over every origin, models in parallel when asked.
    std::map<std::string, engine_detail::ModelTrack> tracks;
    for (const auto& id : model_ids) tracks[id].id = id;
    std::mutex diag_mutex;
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(model_ids.size())));
    if (jobs == 1) {
        for (const auto& id : model_ids)
            engine_detail::run_model(series, cfg, result.specs[id], id, result.store, tracks[id],
                                     result.diagnostics, diag_mutex);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex next_mutex;
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t mine;
                    {
                        std::lock_guard<std::mutex> lock(next_mutex);
                        if (next >= model_ids.size()) return;
                        mine = next++;
                    }
                    const std::string& id = model_ids[mine];
                    engine_detail::run_model(series, cfg, result.specs[id], id, result.store,
                                             tracks[id], result.diagnostics, diag_mutex);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    for (const auto& id : model_ids)
        result.final_params[id] = tracks[id].last_named_params;

    // Combinations per origin and horizon from the members' stored points.
    const auto groups = standard_groups();
    for (const auto& [combo_id, p] : combos) {
        const ModelGroup* group = nullptr;
        for (const auto& g : groups)
            if (g.id == p.group) group = &g;
        for (std::size_t oi = 0; oi < n_origins; ++oi) {
            // ABMA weights from this origin's information criteria.
            std::vector<double> weights;
            if (p.method == CombineMethod::abma_sic || p.method == CombineMethod::abma_aic) {
                std::vector<double> ics;
                bool all_present = true;
                for (const auto& m : group->members) {
                    const auto& tr = tracks[m];
                    if (!tr.present[oi]) {
                        all_present = false;
                        break;
                    }
                    ics.push_back(p.method == CombineMethod::abma_sic ? tr.sic[oi] : tr.aic[oi]);
                }
                if (!all_present) continue;
                weights = abma_weights(ics);
            }
            for (int h = 1; h <= cfg.horizons; ++h) {
                std::vector<double> members;
                bool all_present = true;
                for (const auto& m : group->members) {
                    const StoredForecast& cell = result.store.at(m, oi, h);
                    if (!cell.present) {
                        all_present = false;
                        break;
                    }
                    members.push_back(cell.point);
                }
                if (!all_present) continue;
                StoredForecast cell;
                if (weights.empty())
                    cell.point = combine_simple(members, p.method).value;
                else
                    cell.point = combine_abma(members, weights).value;
                result.store.insert(combo_id, oi, h, std::move(cell));
            }
        }
    }
    return result;
}

}  // namespace arriva
