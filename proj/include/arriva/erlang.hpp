#pragma once

#include <cmath>
#include <stdexcept>

namespace arriva {

/// Erlang-B blocking probability via the numerically stable recursion
/// B(k, a) = a B(k-1, a) / (k + a B(k-1, a)), B(0, a) = 1.
inline double erlang_b(long long agents, double offered_load) {
    double b = 1.0;
    for (long long k = 1; k <= agents; ++k)
        b = offered_load * b / (static_cast<double>(k) + offered_load * b);
    return b;
}

/// Erlang-C delay probability C(n, a) = n B / (n - a (1 - B)); only defined
/// for stable systems (n > a).
inline double erlang_c(long long agents, double offered_load) {
    const double b = erlang_b(agents, offered_load);
    const double n = static_cast<double>(agents);
    return n * b / (n - offered_load * (1.0 - b));
}

/// P(wait <= t) in an M/M/n queue: 1 - C(n, a) exp(-(n mu - lambda) t).
/// Unstable systems (n <= a) return 0 by convention.
inline double erlang_c_wait(long long agents, double arrival_rate, double service_rate,
                            double t) {
    if (agents <= 0) throw std::invalid_argument("erlang_c_wait: need at least one agent");
    if (service_rate <= 0.0) throw std::invalid_argument("erlang_c_wait: service rate > 0");
    if (arrival_rate < 0.0) throw std::invalid_argument("erlang_c_wait: negative arrival rate");
    if (arrival_rate == 0.0) return 1.0;
    const double a = arrival_rate / service_rate;
    if (static_cast<double>(agents) <= a) return 0.0;
    const double c = erlang_c(agents, a);
    return 1.0 - c * std::exp(-(static_cast<double>(agents) * service_rate - arrival_rate) * t);
}

/// Service-level agreement plus the operating assumptions feeding Erlang-C.
struct SlaConfig {
    double answer_fraction = 0.80;
    double answer_seconds = 20.0;
    double mean_call_seconds = 180.0;
    double hours_open = 14.0;

    void validate() const {
        if (!(answer_fraction > 0.0 && answer_fraction < 1.0))
            throw std::invalid_argument("SlaConfig: answer fraction in (0,1)");
        if (!(answer_seconds > 0.0 && mean_call_seconds > 0.0 && hours_open > 0.0))
            throw std::invalid_argument("SlaConfig: durations must be positive");
    }
};

/// Smallest agent count meeting the SLA for a day's call volume, with the
/// arrival rate uniform over the operating hours. Zero calls need no agents.
/// Loads beyond any real call center (offered load > 1e7) fall back to
/// square-root safety staffing so a wild forecast still prices into the
/// worst payoff bucket instead of overflowing.
inline long long required_agents(double daily_calls, const SlaConfig& sla) {
    sla.validate();
    if (!std::isfinite(daily_calls) || daily_calls < 0.0)
        throw std::invalid_argument("required_agents: call volume must be finite and >= 0");
    if (daily_calls == 0.0) return 0;
    const double arrival_rate = daily_calls / (sla.hours_open * 3600.0);  // per second
    const double service_rate = 1.0 / sla.mean_call_seconds;
    const double offered = arrival_rate / service_rate;
    if (offered > 1e7) {
        const double approx = offered + std::sqrt(offered);
        return approx > 4e18 ? static_cast<long long>(4e18)
                             : static_cast<long long>(std::ceil(approx));
    }
    long long n = static_cast<long long>(std::floor(offered)) + 1;
    while (erlang_c_wait(n, arrival_rate, service_rate, sla.answer_seconds) <
           sla.answer_fraction)
        ++n;
    return n;
}

}  // namespace arriva
