#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace arriva {

struct FitOptions {
    std::uint64_t seed = 1;
    int starts = 5;  // multi-start count for the likelihood optimizers
    int max_iterations = 400;
    const std::vector<double>* warm_start = nullptr;  // previous parameter vector, packed
};

/// Information criteria, smaller is better: SIC = -2 logL + k log n,
/// AIC = -2 logL + 2k, with k counting every estimated parameter
/// (innovation variance included).
struct InformationCriteria {
    double sic = 0.0;
    double aic = 0.0;
};

inline InformationCriteria information_criteria(double loglik, std::size_t n_params,
                                                std::size_t n_obs) {
    const double k = static_cast<double>(n_params);
    const double n = static_cast<double>(n_obs);
    return {-2.0 * loglik + k * std::log(n), -2.0 * loglik + 2.0 * k};
}

}  // namespace arriva
