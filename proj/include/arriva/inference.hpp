#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/bootstrap.hpp"
#include "arriva/linalg.hpp"
#include "arriva/stats.hpp"

namespace arriva {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::string method;
};

/// The published p-value bands: "-" below 5%, one star in [5%, 10%), two
/// stars at or above 10%.
inline const char* p_value_bucket(double p) {
    if (p < 0.05) return "-";
    if (p < 0.10) return "*";
    return "**";
}

/// Diebold-Mariano test on a loss-differential series: t = mean(d) over the
/// HAC standard error with rectangular kernel truncated at h-1, two-sided
/// normal p-value.
inline TestResult dm_test(std::span<const double> loss_diff, int horizon) {
    const std::size_t p = loss_diff.size();
    if (p < 10) throw std::invalid_argument("dm_test: differential series too short");
    if (variance(loss_diff) <= 0.0)
        throw std::invalid_argument("dm_test: degenerate (constant) loss differential");
    const double dbar = mean(loss_diff);
    double omega = 0.0;
    const int trunc = std::max(0, horizon - 1);
    for (int j = 0; j <= trunc; ++j) {
        double gamma = 0.0;
        for (std::size_t t = static_cast<std::size_t>(j); t < p; ++t)
            gamma += (loss_diff[t] - dbar) * (loss_diff[t - static_cast<std::size_t>(j)] - dbar);
        gamma /= static_cast<double>(p);
        omega += j == 0 ? gamma : 2.0 * gamma;
    }
    if (omega <= 0.0) omega = variance(loss_diff);  // rectangular kernel can go negative
    const double t_stat = dbar / std::sqrt(omega / static_cast<double>(p));
    return {t_stat, stats::normal_two_sided_p(t_stat), "dm"};
}

namespace inference_detail {

/// Per-replication bootstrap means of each column of `series` (columns =
/// producers, shared index streams).
inline std::vector<std::vector<double>> bootstrap_means(
    const std::vector<std::vector<double>>& series,
    const std::vector<std::vector<std::uint32_t>>& reps) {
    const std::size_t k = series.size();
    std::vector<std::vector<double>> means(reps.size(), std::vector<double>(k, 0.0));
    for (std::size_t b = 0; b < reps.size(); ++b) {
        const auto& idx = reps[b];
        for (std::size_t j = 0; j < k; ++j) {
            const auto& s = series[j];
            double acc = 0.0;
            for (const std::uint32_t i : idx) acc += s[i];
            means[b][j] = acc / static_cast<double>(idx.size());
        }
    }
    return means;
}

}  // namespace inference_detail

/// Superior-predictive-ability (Reality Check, Hansen's studentized variant
/// with the consistent recentering). H0: the benchmark is not outperformed
/// by the best alternative. Loss series must share evaluation dates.
inline TestResult spa_test(std::span<const double> benchmark_losses,
                           const std::vector<std::vector<double>>& alternative_losses,
                           const BootstrapConfig& cfg) {
    const std::size_t p = benchmark_losses.size();
    const std::size_t k = alternative_losses.size();
    if (k < 1) throw std::invalid_argument("spa_test: needs at least one alternative");
    for (const auto& a : alternative_losses)
        if (a.size() != p) throw std::invalid_argument("spa_test: loss series length mismatch");

    // Differentials d_k,t = L0_t - Lk_t; positive mean = alternative better.
    std::vector<std::vector<double>> d(k, std::vector<double>(p));
    std::vector<double> dbar(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t t = 0; t < p; ++t) d[j][t] = benchmark_losses[t] - alternative_losses[j][t];
        dbar[j] = mean(d[j]);
    }

    const auto reps = bootstrap_replications(p, cfg, "spa");
    const auto boot_means = inference_detail::bootstrap_means(d, reps);

    // Hansen's omega: bootstrap variance of sqrt(P) dbar*.
    std::vector<double> omega(k, 0.0);
    for (std::size_t b = 0; b < reps.size(); ++b)
        for (std::size_t j = 0; j < k; ++j) {
            const double dev = boot_means[b][j] - dbar[j];
            omega[j] += dev * dev;
        }
    const double sqrt_p = std::sqrt(static_cast<double>(p));
    for (double& w : omega)
        w = std::sqrt(static_cast<double>(p) * w / static_cast<double>(reps.size()));

    double t_spa = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        if (omega[j] > 1e-300) t_spa = std::max(t_spa, sqrt_p * dbar[j] / omega[j]);

    // Consistent recentering: deeply inferior alternatives keep their mean.
    const double threshold = -std::sqrt(2.0 * std::log(std::log(static_cast<double>(p))));
    std::vector<double> recenter(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        if (omega[j] <= 1e-300) continue;
        const double stud = sqrt_p * dbar[j] / omega[j];
        recenter[j] = stud <= threshold ? dbar[j] : 0.0;
    }

    std::size_t exceed = 0;
    for (std::size_t b = 0; b < reps.size(); ++b) {
        double t_b = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (omega[j] <= 1e-300) continue;
            const double z = boot_means[b][j] - dbar[j] + recenter[j];
            t_b = std::max(t_b, sqrt_p * z / omega[j]);
        }
        if (t_b >= t_spa) ++exceed;
    }
    return {t_spa, static_cast<double>(exceed) / static_cast<double>(reps.size()), "spa"};
}

/// Model confidence set via the range statistic over studentized pairwise
/// mean loss differentials, eliminating the worst producer until equivalence
/// is no longer rejected; per-producer MCS p-values are the running maxima
/// of the elimination p-values.
struct ConfidenceSet {
    double level = 0.90;
    std::vector<std::string> survivors;
    std::vector<std::pair<std::string, double>> elimination_order;  // eliminated id, p at step
    std::map<std::string, double> mcs_p_value;

    bool contains(const std::string& id) const {
        return std::find(survivors.begin(), survivors.end(), id) != survivors.end();
    }
};

inline ConfidenceSet model_confidence_set(
    const std::vector<std::pair<std::string, std::vector<double>>>& producer_losses,
    double level, const BootstrapConfig& cfg) {
    const std::size_t k = producer_losses.size();
    if (k < 2) throw std::invalid_argument("model_confidence_set: needs at least two producers");
    const std::size_t p = producer_losses.front().second.size();
    for (const auto& [id, series] : producer_losses)
        if (series.size() != p)
            throw std::invalid_argument("model_confidence_set: loss series length mismatch");

    std::vector<std::vector<double>> series(k);
    std::vector<double> sample_mean(k);
    for (std::size_t j = 0; j < k; ++j) {
        series[j] = producer_losses[j].second;
        sample_mean[j] = mean(series[j]);
    }
    const auto reps = bootstrap_replications(p, cfg, "mcs");
    const auto boot_means = inference_detail::bootstrap_means(series, reps);
    const std::size_t b_count = reps.size();

    // Pairwise studentization from the bootstrap distribution of dbar_ij.
    Matrix se(k, k), dbar(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double dij = sample_mean[i] - sample_mean[j];
            double var = 0.0;
            for (std::size_t b = 0; b < b_count; ++b) {
                const double dev = (boot_means[b][i] - boot_means[b][j]) - dij;
                var += dev * dev;
            }
            var /= static_cast<double>(b_count);
            dbar(i, j) = dij;
            dbar(j, i) = -dij;
            const double s = std::sqrt(var);
            se(i, j) = s;
            se(j, i) = s;
        }

    ConfidenceSet out;
    out.level = level;
    std::vector<std::size_t> active(k);
    for (std::size_t j = 0; j < k; ++j) active[j] = j;

    double running_p = 0.0;
    while (active.size() > 1) {
        // Range statistic over the active set.
        double t_range = 0.0;
        std::size_t worst = active[0];
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b2 = a + 1; b2 < active.size(); ++b2) {
                const std::size_t i = active[a], j = active[b2];
                if (se(i, j) <= 1e-300) continue;
                const double t = std::abs(dbar(i, j)) / se(i, j);
                if (t > t_range) {
                    t_range = t;
                    worst = dbar(i, j) > 0.0 ? i : j;  // the higher-loss side
                }
            }
        std::size_t exceed = 0;
        for (std::size_t b = 0; b < b_count; ++b) {
            double t_b = 0.0;
            for (std::size_t a = 0; a < active.size(); ++a)
                for (std::size_t b2 = a + 1; b2 < active.size(); ++b2) {
                    const std::size_t i = active[a], j = active[b2];
                    if (se(i, j) <= 1e-300) continue;
                    const double dev =
                        std::abs((boot_means[b][i] - boot_means[b][j]) - dbar(i, j)) / se(i, j);
                    t_b = std::max(t_b, dev);
                }
            if (t_b >= t_range) ++exceed;
        }
        const double step_p = static_cast<double>(exceed) / static_cast<double>(b_count);
        running_p = std::max(running_p, step_p);
        out.mcs_p_value[producer_losses[worst].first] = running_p;
        out.elimination_order.emplace_back(producer_losses[worst].first, running_p);
        active.erase(std::remove(active.begin(), active.end(), worst), active.end());
    }
    out.mcs_p_value[producer_losses[active[0]].first] = 1.0;

    const double alpha = 1.0 - level;
    for (const auto& [id, series_unused] : producer_losses) {
        (void)series_unused;
        if (out.mcs_p_value.at(id) >= alpha) out.survivors.push_back(id);
    }
    if (out.survivors.empty()) out.survivors.push_back(producer_losses[active[0]].first);
    return out;
}

}  // namespace arriva
