#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/erlang.hpp"

namespace arriva {

struct PayoffBucket {
    double lower = 0.0;  // staffing ratio n / n*, inclusive
    double upper = 0.0;  // exclusive
    double euros = 0.0;
};

/// The multinomial compensation scheme: a fixed daily wage plus a staffing
/// bonus/penalty keyed on the ratio of decided to optimal agents.
struct PayoffScheme {
    std::vector<PayoffBucket> buckets{
        {0.00, 0.80, -10.0}, {0.80, 0.90, -5.0},  {0.90, 0.95, -2.5}, {0.95, 1.05, 10.0},
        {1.05, 1.10, -1.25}, {1.10, 1.20, -2.5},  {1.20, std::numeric_limits<double>::infinity(), -10.0}};
    double fixed_daily = 43.0;

    void validate() const {
        if (buckets.empty()) throw std::invalid_argument("PayoffScheme: no buckets");
        if (buckets.front().lower != 0.0)
            throw std::invalid_argument("PayoffScheme: buckets must start at ratio 0");
        if (!std::isinf(buckets.back().upper))
            throw std::invalid_argument("PayoffScheme: buckets must cover all ratios");
        int positive = 0;
        for (std::size_t k = 0; k < buckets.size(); ++k) {
            if (!(buckets[k].lower < buckets[k].upper))
                throw std::invalid_argument("PayoffScheme: empty bucket");
            if (k + 1 < buckets.size() && buckets[k].upper != buckets[k + 1].lower)
                throw std::invalid_argument("PayoffScheme: buckets must partition [0, inf)");
            if (buckets[k].euros > 0.0) ++positive;
        }
        if (positive != 1)
            throw std::invalid_argument("PayoffScheme: exactly one bonus bucket expected");
    }

    std::size_t bonus_index() const {
        for (std::size_t k = 0; k < buckets.size(); ++k)
            if (buckets[k].euros > 0.0) return k;
        throw std::logic_error("PayoffScheme: no bonus bucket");
    }
};

/// Bucket membership for one day: half-open [LB, UB) on the staffing ratio.
struct PayoffOutcome {
    double euros = 0.0;
    std::size_t bucket = 0;
};

inline PayoffOutcome payoff_bucket(long long n_decided, long long n_star,
                                   const PayoffScheme& scheme) {
    if (n_star < 1)
        throw std::invalid_argument("payoff_bucket: undefined for closed days (n* = 0)");
    const double ratio = static_cast<double>(n_decided) / static_cast<double>(n_star);
    for (std::size_t k = 0; k < scheme.buckets.size(); ++k)
        if (ratio >= scheme.buckets[k].lower && ratio < scheme.buckets[k].upper)
            return {scheme.buckets[k].euros, k};
    throw std::logic_error("payoff_bucket: ratio escaped the partition");
}

/// Expected end-of-period utility under the exponential utility
/// U(pi) = 1 - exp(-lambda pi) and the multinomial MGF of the payoff:
/// EU = 1 - exp(-lambda P F) (sum_k p_k exp(-lambda v_k))^P.
inline double expected_utility(std::span<const double> bucket_probs, const PayoffScheme& scheme,
                               std::size_t days, double lambda) {
    if (bucket_probs.size() != scheme.buckets.size())
        throw std::invalid_argument("expected_utility: probability/bucket mismatch");
    if (!(lambda > 0.0)) throw std::invalid_argument("expected_utility: lambda must be positive");
    double psum = 0.0, mgf = 0.0;
    for (std::size_t k = 0; k < bucket_probs.size(); ++k) {
        if (bucket_probs[k] < -1e-12)
            throw std::invalid_argument("expected_utility: negative probability");
        psum += bucket_probs[k];
        mgf += bucket_probs[k] * std::exp(-lambda * scheme.buckets[k].euros);
    }
    if (std::abs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("expected_utility: probabilities must sum to one");
    const double p = static_cast<double>(days);
    return 1.0 - std::exp(-lambda * p * scheme.fixed_daily) * std::pow(mgf, p);
}

inline double utility_of_sure_payoff(double payoff, double lambda) {
    return 1.0 - std::exp(-lambda * payoff);
}

/// Value of information V_i = pi* EU_i / EU(pi*).
inline double value_of_information(double eu_i, double pi_star, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("value_of_information: lambda > 0");
    const double eu_star = utility_of_sure_payoff(pi_star, lambda);
    if (!(eu_star > 0.0))
        throw std::invalid_argument("value_of_information: degenerate perfect payoff");
    return pi_star * eu_i / eu_star;
}

/// Certainty equivalent CE = -(1/lambda) log(1 - EU).
inline double certainty_equivalent(double eu_i, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("certainty_equivalent: lambda > 0");
    if (eu_i >= 1.0) throw std::invalid_argument("certainty_equivalent: EU must lie below 1");
    return -std::log1p(-eu_i) / lambda;
}

/// One producer's economic evaluation at one risk-aversion level.
struct EconRow {
    std::string producer;
    double lambda = 0.0;
    double payoff = 0.0;            // realized pi = P F + sum v_t
    std::vector<double> bucket_probs;
    double eu = 0.0;
    double value = 0.0;             // V_i
    double delta_value = 0.0;       // vs the benchmark
    double ce = 0.0;
    double delta_ce = 0.0;          // willingness to pay vs the benchmark
    std::size_t days = 0;
};

/// Evaluates one producer's staffing decisions against the optimal staffing
/// path. Closed days (n* = 0) are skipped.
inline EconRow economic_evaluation(const std::string& producer,
                                   std::span<const long long> n_decided,
                                   std::span<const long long> n_star,
                                   const PayoffScheme& scheme, double lambda) {
    if (n_decided.size() != n_star.size())
        throw std::invalid_argument("economic_evaluation: staffing paths misaligned");
    scheme.validate();
    EconRow row;
    row.producer = producer;
    row.lambda = lambda;
    row.bucket_probs.assign(scheme.buckets.size(), 0.0);
    double variable = 0.0;
    for (std::size_t t = 0; t < n_star.size(); ++t) {
        if (n_star[t] < 1) continue;  // closing day
        const PayoffOutcome o = payoff_bucket(n_decided[t], n_star[t], scheme);
        variable += o.euros;
        row.bucket_probs[o.bucket] += 1.0;
        ++row.days;
    }
    if (row.days == 0) throw std::invalid_argument("economic_evaluation: no open days");
    for (double& p : row.bucket_probs) p /= static_cast<double>(row.days);
    row.payoff = static_cast<double>(row.days) * scheme.fixed_daily + variable;
    row.eu = expected_utility(row.bucket_probs, scheme, row.days, lambda);
    const double pi_star =
        static_cast<double>(row.days) *
        (scheme.fixed_daily + scheme.buckets[scheme.bonus_index()].euros);
    row.value = value_of_information(row.eu, pi_star, lambda);
    row.ce = certainty_equivalent(row.eu, lambda);
    return row;
}

}  // namespace arriva
