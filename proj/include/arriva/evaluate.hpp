#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/density.hpp"
#include "arriva/econ.hpp"
#include "arriva/engine.hpp"
#include "arriva/inference.hpp"
#include "arriva/loss.hpp"
#include "arriva/store.hpp"

namespace arriva {

struct EvalConfig {
    std::vector<LossConfig> loss_grid;  // empty = the standard grid below
    BootstrapConfig bootstrap;
    SlaConfig sla;
    PayoffScheme scheme;
    std::vector<double> lambdas{2e-4, 3e-4, 5e-4};
    std::size_t density_draws = 1000;
    std::vector<std::string> density_producers;  // empty = default scope
    std::string benchmark = "M0";
    std::uint64_t seed = 0;
    bool run_tests = true;  // SPA + DM + MCS
    bool run_econ = true;
    bool run_density = true;

    /// phi in {0.42, 0.50, 0.58} at h = 1, 7, 28 and over the joint horizon
    /// span (when the run produced it).
    static std::vector<LossConfig> standard_grid(int horizons) {
        std::vector<LossConfig> grid;
        for (double phi : {0.42, 0.50, 0.58}) {
            for (int h : {1, 7, 28}) {
                if (h > horizons) continue;
                LossConfig cfg;
                cfg.phi = phi;
                cfg.horizons = {h};
                grid.push_back(cfg);
            }
            if (horizons > 1) {
                LossConfig joint;
                joint.phi = phi;
                joint.horizons.resize(static_cast<std::size_t>(horizons));
                for (int h = 1; h <= horizons; ++h)
                    joint.horizons[static_cast<std::size_t>(h - 1)] = h;
                grid.push_back(joint);
            }
        }
        return grid;
    }
};

struct StatTestRow {
    std::string benchmark;
    std::string test;  // e.g. "spa[h1_phi0.50]" or "dm_vs_M0[h1_phi0.50]"
    double statistic = 0.0;
    double p_value = 1.0;
};

struct McsReport {
    std::string tag;
    ConfidenceSet set;
};

struct DensityRow {
    std::string producer;
    double avg_rps = 0.0;
    double ecp05 = 0.0, ecp25 = 0.0, ecp75 = 0.0, ecp95 = 0.0;
    std::size_t dates = 0;
};

struct OptNaiveRow {
    std::string producer;
    double rmsfe_ratio = 0.0;  // optimal / naive
};

struct EvalReport {
    std::vector<LossTable> rankings;
    std::vector<StatTestRow> tests;
    std::vector<McsReport> mcs;
    std::vector<EconRow> econ;
    std::vector<DensityRow> density;
    std::vector<OptNaiveRow> optimal_naive;
    std::vector<std::string> notes;
};

namespace eval_detail {

struct Alignment {
    std::vector<std::size_t> origins;          // evaluable origin indices
    std::size_t first_origin_series_idx = 0;   // store origin 0 in series index space
};

/// The evaluation actual: zero on closing days (the stored series is the
/// imputed one, but forecasts for closing days are zeroed, so the raw zero
/// is the comparable outcome).
inline double actual_at(const ArrivalSeries& series, std::size_t idx) {
    return series.is_closing(idx) ? 0.0 : static_cast<double>(series.count(idx));
}

inline Alignment align(const ArrivalSeries& series, const ForecastStore& store,
                       const std::vector<std::string>& ids, const std::vector<int>& horizons) {
    Alignment a;
    const std::int32_t off = store.first_origin() - series.start_date();
    if (off < 0) throw std::invalid_argument("evaluate: store predates the series");
    a.first_origin_series_idx = static_cast<std::size_t>(off);
    const std::size_t n_targets = series.size() - 1 - a.first_origin_series_idx;
    a.origins = store.evaluable_origins(ids, horizons, n_targets);
    if (a.origins.empty()) throw std::invalid_argument("evaluate: empty evaluation intersection");
    return a;
}

/// Per-producer per-date flexible losses at one configuration (univariate or
/// multivariate by the cfg's horizon set).
inline std::vector<std::vector<double>> loss_series(const ArrivalSeries& series,
                                                    const ForecastStore& store,
                                                    const std::vector<std::string>& ids,
                                                    const LossConfig& cfg, const Alignment& a) {
    std::vector<std::vector<double>> out(ids.size(), std::vector<double>(a.origins.size()));
    std::vector<double> u(cfg.horizons.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
        for (std::size_t p = 0; p < a.origins.size(); ++p) {
            const std::size_t oi = a.origins[p];
            for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
                const int h = cfg.horizons[hi];
                const std::size_t target =
                    a.first_origin_series_idx + oi + static_cast<std::size_t>(h);
                u[hi] = actual_at(series, target) - store.at(ids[k], oi, h).point;
            }
            out[k][p] = cfg.horizons.size() == 1 ? univariate_loss(u[0], cfg)
                                                 : multivariate_loss(u, cfg);
        }
    }
    return out;
}

inline Matrix error_block(const ArrivalSeries& series, const ForecastStore& store,
                          const std::string& id, const LossConfig& cfg, const Alignment& a) {
    Matrix block(a.origins.size(), cfg.horizons.size());
    for (std::size_t p = 0; p < a.origins.size(); ++p) {
        const std::size_t oi = a.origins[p];
        for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
            const int h = cfg.horizons[hi];
            const std::size_t target =
                a.first_origin_series_idx + oi + static_cast<std::size_t>(h);
            block(p, hi) = actual_at(series, target) - store.at(id, oi, h).point;
        }
    }
    return block;
}

/// Batched SPA over every benchmark at one configuration, sharing the index
/// streams and producing the same p-values as spa_test would one by one.
inline void spa_all_benchmarks(const std::vector<std::string>& ids,
                               const std::vector<std::vector<double>>& losses,
                               const BootstrapConfig& bcfg, const std::string& tag,
                               std::vector<StatTestRow>& out) {
    const std::size_t k = ids.size();
    const std::size_t p = losses.front().size();
    const auto reps = bootstrap_replications(p, bcfg, "spa");
    std::vector<double> loss_mean(k);
    for (std::size_t j = 0; j < k; ++j) loss_mean[j] = mean(losses[j]);
    const auto boot = inference_detail::bootstrap_means(losses, reps);
    const double sqrt_p = std::sqrt(static_cast<double>(p));
    const double threshold = -std::sqrt(2.0 * std::log(std::log(static_cast<double>(p))));

    for (std::size_t b0 = 0; b0 < k; ++b0) {
        std::vector<double> dbar(k), omega(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) dbar[j] = loss_mean[b0] - loss_mean[j];
        for (std::size_t b = 0; b < boot.size(); ++b)
            for (std::size_t j = 0; j < k; ++j) {
                if (j == b0) continue;
                const double dev = (boot[b][b0] - boot[b][j]) - dbar[j];
                omega[j] += dev * dev;
            }
        for (std::size_t j = 0; j < k; ++j)
            omega[j] = std::sqrt(static_cast<double>(p) * omega[j] /
                                 static_cast<double>(boot.size()));
        double t_spa = 0.0;
        std::vector<double> recenter(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            if (j == b0 || omega[j] <= 1e-300) continue;
            const double stud = sqrt_p * dbar[j] / omega[j];
            t_spa = std::max(t_spa, stud);
            recenter[j] = stud <= threshold ? dbar[j] : 0.0;
        }
        std::size_t exceed = 0;
        for (std::size_t b = 0; b < boot.size(); ++b) {
            double t_b = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                if (j == b0 || omega[j] <= 1e-300) continue;
                const double z = (boot[b][b0] - boot[b][j]) - dbar[j] + recenter[j];
                t_b = std::max(t_b, sqrt_p * z / omega[j]);
            }
            if (t_b >= t_spa) ++exceed;
        }
        out.push_back({ids[b0], "spa[" + tag + "]", t_spa,
                       static_cast<double>(exceed) / static_cast<double>(boot.size())});
    }
}

}  // namespace eval_detail

/// Runs the full statistical and economic evaluation against the actuals.
inline EvalReport evaluate(const ArrivalSeries& series, const ForecastStore& store,
                           const EvalConfig& cfg) {
    EvalReport report;
    const std::vector<std::string>& ids = store.producers();
    if (ids.empty()) throw std::invalid_argument("evaluate: empty store");
    std::vector<LossConfig> grid =
        cfg.loss_grid.empty() ? EvalConfig::standard_grid(store.horizons()) : cfg.loss_grid;

    for (const LossConfig& lc : grid) {
        lc.validate();
        const eval_detail::Alignment a = eval_detail::align(series, store, ids, lc.horizons);
        std::vector<std::pair<std::string, Matrix>> blocks;
        for (const auto& id : ids)
            blocks.emplace_back(id, eval_detail::error_block(series, store, id, lc, a));
        report.rankings.push_back(rank_producers(blocks, lc));

        if (cfg.run_tests && ids.size() >= 2) {
            const auto losses = eval_detail::loss_series(series, store, ids, lc, a);
            BootstrapConfig bcfg = cfg.bootstrap;
            bcfg.seed = derive_seed(cfg.seed, "tests:" + lc.tag());
            eval_detail::spa_all_benchmarks(ids, losses, bcfg, lc.tag(), report.tests);

            // Diebold-Mariano of every producer against the benchmark.
            const auto bench_it = std::find(ids.begin(), ids.end(), cfg.benchmark);
            if (bench_it != ids.end()) {
                const std::size_t b0 = static_cast<std::size_t>(bench_it - ids.begin());
                const int trunc_h = lc.horizons.back();
                for (std::size_t j = 0; j < ids.size(); ++j) {
                    if (j == b0) continue;
                    std::vector<double> d(losses[b0].size());
                    for (std::size_t t = 0; t < d.size(); ++t) d[t] = losses[b0][t] - losses[j][t];
                    try {
                        const TestResult r = dm_test(d, trunc_h);
                        report.tests.push_back({ids[j],
                                                "dm_vs_" + cfg.benchmark + "[" + lc.tag() + "]",
                                                r.statistic, r.p_value});
                    } catch (const std::exception&) {
                        // degenerate differential (identical producers): skip
                    }
                }
            }

            std::vector<std::pair<std::string, std::vector<double>>> named;
            for (std::size_t j = 0; j < ids.size(); ++j) named.emplace_back(ids[j], losses[j]);
            report.mcs.push_back({lc.tag(), model_confidence_set(named, 0.90, bcfg)});
        }
    }

    // Economic evaluation of the one-day-ahead forecasts.
    if (cfg.run_econ && store.horizons() >= 1) {
        const eval_detail::Alignment a = eval_detail::align(series, store, ids, {1});
        std::vector<long long> n_star(a.origins.size());
        for (std::size_t p = 0; p < a.origins.size(); ++p) {
            const std::size_t target = a.first_origin_series_idx + a.origins[p] + 1;
            // Closing days have no true staffing need; they are skipped in the
            // bucket frequencies downstream (n* = 0).
            n_star[p] = required_agents(eval_detail::actual_at(series, target), cfg.sla);
        }
        std::map<std::string, std::vector<EconRow>> rows;
        for (const auto& id : ids) {
            std::vector<long long> decided(a.origins.size());
            for (std::size_t p = 0; p < a.origins.size(); ++p)
                decided[p] =
                    required_agents(store.at(id, a.origins[p], 1).point, cfg.sla);
            for (double lambda : cfg.lambdas)
                rows[id].push_back(
                    economic_evaluation(id, decided, n_star, cfg.scheme, lambda));
        }
        const bool have_benchmark = rows.count(cfg.benchmark) > 0;
        for (const auto& id : ids) {
            for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
                EconRow row = rows[id][li];
                if (have_benchmark) {
                    row.delta_value = row.value - rows[cfg.benchmark][li].value;
                    row.delta_ce = row.ce - rows[cfg.benchmark][li].ce;
                }
                report.econ.push_back(std::move(row));
            }
        }
        if (!have_benchmark)
            report.notes.push_back("benchmark " + cfg.benchmark +
                                   " not in the run; incremental columns left at zero");
    }

    // Density forecasting on the published model scope.
    if (cfg.run_density) {
        std::vector<std::string> dens_ids = cfg.density_producers;
        if (dens_ids.empty()) {
            for (const auto& id : {"M0", "M1", "M2", "M4", "M5", "M8", "M9"})
                if (store.has_producer(id)) dens_ids.push_back(id);
        }
        for (const auto& id : dens_ids) {
            if (!store.has_producer(id)) continue;
            const ProducerId p = ProducerId::parse(id);
            if (!p.is_model || !density_supported(p.family)) continue;  // models only
            const eval_detail::Alignment a = eval_detail::align(series, store, {id}, {1});
            std::vector<DensityForecast> densities;
            std::vector<long long> actuals;
            for (std::size_t t = 0; t < a.origins.size(); ++t) {
                const std::size_t oi = a.origins[t];
                const std::size_t target = a.first_origin_series_idx + oi + 1;
                if (series.is_closing(target)) continue;  // no arrivals to score
                const StoredForecast& cell = store.at(id, oi, 1);
                const std::uint64_t seed = derive_seed(cfg.seed, "density:" + id,
                                                       static_cast<std::int64_t>(oi));
                if (p.family == ModelFamily::poisson) {
                    densities.push_back(draw_poisson_counts(cell.point, seed, cfg.density_draws));
                } else if (p.family == ModelFamily::negbin) {
                    const auto alpha = store.dispersion(id, oi);
                    if (!alpha) continue;
                    densities.push_back(
                        draw_negbin_counts(cell.point, *alpha, seed, cfg.density_draws));
                } else {
                    if (!cell.log_point || !cell.variance) continue;
                    densities.push_back(draw_lognormal_counts(
                        *cell.log_point, std::max(0.0, *cell.variance), seed,
                        cfg.density_draws));
                }
                actuals.push_back(series.count(target));
            }
            if (densities.empty()) continue;
            DensityRow row;
            row.producer = id;
            row.dates = densities.size();
            row.avg_rps = average_rps(densities, actuals);
            row.ecp05 = empirical_coverage(densities, actuals, 0.05);
            row.ecp25 = empirical_coverage(densities, actuals, 0.25);
            row.ecp75 = empirical_coverage(densities, actuals, 0.75);
            row.ecp95 = empirical_coverage(densities, actuals, 0.95);
            report.density.push_back(std::move(row));
        }

        // Naive vs bias-corrected retransformation for the log-scale pairs.
        for (const auto& id : {"M1", "M2", "M4", "M5"}) {
            if (!store.has_producer(id)) continue;
            const eval_detail::Alignment a = eval_detail::align(series, store, {id}, {1});
            std::vector<double> log_points, sigma2;
            std::vector<long long> actuals;
            for (std::size_t t = 0; t < a.origins.size(); ++t) {
                const std::size_t oi = a.origins[t];
                const std::size_t target = a.first_origin_series_idx + oi + 1;
                if (series.is_closing(target)) continue;
                const StoredForecast& cell = store.at(id, oi, 1);
                if (!cell.log_point || !cell.variance) continue;
                log_points.push_back(*cell.log_point);
                sigma2.push_back(std::max(0.0, *cell.variance));
                actuals.push_back(series.count(target));
            }
            if (log_points.empty()) continue;
            report.optimal_naive.push_back(
                {id, optimal_naive_rmsfe_ratio(log_points, sigma2, actuals)});
        }
    }
    return report;
}

}  // namespace arriva
