#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/linalg.hpp"

namespace arriva {

/// Largest |tau| admitted for an H-horizon multivariate loss. The operating
/// bound is the two-decimal floor of 1/sqrt(H), which reproduces the
/// published limits 1, 0.7 and 0.18 for H = 1, 2, 28.
inline double tau_bound(std::size_t horizons) {
    return std::floor(100.0 / std::sqrt(static_cast<double>(horizons))) / 100.0;
}

/// Flexible-loss parametrization: curvature rho, asymmetry phi (tau = 2phi-1),
/// and the horizon set it evaluates (one horizon = univariate loss).
struct LossConfig {
    double rho = 2.0;
    double phi = 0.5;
    std::vector<int> horizons{1};

    double tau() const { return 2.0 * phi - 1.0; }

    void validate() const {
        if (!(rho > 0.0)) throw std::invalid_argument("LossConfig: rho must be positive");
        if (!(phi > 0.0 && phi < 1.0))
            throw std::invalid_argument("LossConfig: phi must lie in (0,1)");
        if (horizons.empty()) throw std::invalid_argument("LossConfig: empty horizon set");
        for (int h : horizons)
            if (h < 1 || h > 28)
                throw std::invalid_argument("LossConfig: horizons must lie in 1..28");
        const double bound = tau_bound(horizons.size());
        if (std::abs(tau()) >= bound - 1e-12)  // tolerance absorbs phi -> tau rounding
            throw std::invalid_argument(
                "LossConfig: |tau| = " + std::to_string(std::abs(tau())) +
                " violates the nonnegativity bound " + std::to_string(bound) + " for H = " +
                std::to_string(horizons.size()));
    }

    std::string tag() const {
        char buf[64];
        if (horizons.size() == 1)
            std::snprintf(buf, sizeof(buf), "h%d_phi%.2f", horizons[0], phi);
        else
            std::snprintf(buf, sizeof(buf), "h1-%d_phi%.2f", horizons.back(), phi);
        return buf;
    }
};

/// Univariate flexible loss 2[phi + (1-2phi) I(u<0)] |u|^rho.
inline double univariate_loss(double u, const LossConfig& cfg) {
    const double indicator = u < 0.0 ? 1.0 : 0.0;
    return 2.0 * (cfg.phi + (1.0 - 2.0 * cfg.phi) * indicator) * std::pow(std::abs(u), cfg.rho);
}

/// Multivariate flexible loss (||u||_rho + tau' u) ||u||_rho^(rho-1) with a
/// common asymmetry across horizons.
inline double multivariate_loss(std::span<const double> u, const LossConfig& cfg) {
    if (u.size() != cfg.horizons.size())
        throw std::invalid_argument("multivariate_loss: error vector does not match horizon set");
    double norm_rho = 0.0, tau_sum = 0.0;
    for (double v : u) {
        norm_rho += std::pow(std::abs(v), cfg.rho);
        tau_sum += v;
    }
    const double norm = std::pow(norm_rho, 1.0 / cfg.rho);
    return (norm + cfg.tau() * tau_sum) * std::pow(norm, cfg.rho - 1.0);
}

/// Root mean loss sqrt(P^-1 sum_p L_p) over a P x H error block.
inline double loss_statistic(const Matrix& errors, const LossConfig& cfg) {
    if (errors.rows() == 0) throw std::invalid_argument("loss_statistic: empty error block");
    if (errors.cols() != cfg.horizons.size())
        throw std::invalid_argument("loss_statistic: block width does not match horizon set");
    double total = 0.0;
    for (std::size_t p = 0; p < errors.rows(); ++p) {
        total += cfg.horizons.size() == 1 ? univariate_loss(errors(p, 0), cfg)
                                          : multivariate_loss(errors.row(p), cfg);
    }
    return std::sqrt(total / static_cast<double>(errors.rows()));
}

struct LossTable {
    struct Row {
        std::string producer;
        double statistic = 0.0;
        int rank = 0;
    };
    LossConfig config;
    std::vector<Row> rows;  // sorted ascending by statistic (rank 1 first)

    const Row& by_producer(const std::string& id) const {
        for (const auto& r : rows)
            if (r.producer == id) return r;
        throw std::out_of_range("LossTable: unknown producer " + id);
    }
};

/// Ranks producers by the loss statistic over pre-aligned error blocks
/// (one P x H block per producer, common dates). Ties break on the
/// producer identifier.
inline LossTable rank_producers(const std::vector<std::pair<std::string, Matrix>>& error_blocks,
                                const LossConfig& cfg) {
    cfg.validate();
    if (error_blocks.empty()) throw std::invalid_argument("rank_producers: no producers");
    const std::size_t rows = error_blocks.front().second.rows();
    LossTable table;
    table.config = cfg;
    for (const auto& [id, block] : error_blocks) {
        if (block.rows() != rows)
            throw std::invalid_argument("rank_producers: misaligned evaluation windows");
        table.rows.push_back({id, loss_statistic(block, cfg), 0});
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        if (a.statistic != b.statistic) return a.statistic < b.statistic;
        return a.producer < b.producer;
    });
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        table.rows[i].rank = static_cast<int>(i) + 1;
    return table;
}

}  // namespace arriva
