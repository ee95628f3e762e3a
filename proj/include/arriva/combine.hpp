#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace arriva {

/// Combining schemes c1..c7. Min is the smallest member forecast and Max the
/// largest (the source table prints the two swapped; the semantic reading
/// matches its own under-staffing narrative and is used here).
enum class CombineMethod { average, trimmed, median, min, max, abma_sic, abma_aic };

inline const char* combine_tag(CombineMethod m) {
    switch (m) {
        case CombineMethod::average: return "avg";
        case CombineMethod::trimmed: return "trim";
        case CombineMethod::median: return "med";
        case CombineMethod::min: return "min";
        case CombineMethod::max: return "max";
        case CombineMethod::abma_sic: return "sic";
        case CombineMethod::abma_aic: return "aic";
    }
    return "?";
}

struct ModelGroup {
    std::string id;                    // G1..G5
    std::vector<std::string> members;  // model ids, fixed order
};

/// The five standard groups; the benchmark M0 and Holt-Winters M13 are never
/// group members, and ABMA skips G1 (mixed dependent-variable scales).
inline std::vector<ModelGroup> standard_groups() {
    std::vector<ModelGroup> g(5);
    g[0].id = "G1";
    for (int m = 1; m <= 12; ++m) g[0].members.push_back("M" + std::to_string(m));
    g[1] = {"G2", {"M1", "M2", "M3"}};
    g[2] = {"G3", {"M1", "M2", "M3", "M4", "M5", "M6"}};
    g[3] = {"G4", {"M1", "M2", "M3", "M4", "M5"}};
    g[4] = {"G5", {"M8", "M9", "M10"}};
    return g;
}

inline bool abma_applicable(const std::string& group_id) { return group_id != "G1"; }

struct CombinedForecast {
    double value = 0.0;
    std::vector<double> weights;  // present for weighted methods
};

inline CombinedForecast combine_simple(std::span<const double> forecasts, CombineMethod method) {
    if (forecasts.empty()) throw std::invalid_argument("combine_simple: no member forecasts");
    CombinedForecast out;
    switch (method) {
        case CombineMethod::average: {
            double s = 0.0;
            for (double f : forecasts) s += f;
            out.value = s / static_cast<double>(forecasts.size());
            break;
        }
        case CombineMethod::trimmed: {
            if (forecasts.size() < 3)
                throw std::invalid_argument("combine_simple: trimmed average needs >= 3 members");
            double s = 0.0, lo = forecasts[0], hi = forecasts[0];
            for (double f : forecasts) {
                s += f;
                lo = std::min(lo, f);
                hi = std::max(hi, f);
            }
            out.value = (s - lo - hi) / static_cast<double>(forecasts.size() - 2);
            break;
        }
        case CombineMethod::median: {
            std::vector<double> v(forecasts.begin(), forecasts.end());
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            out.value = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
            break;
        }
        case CombineMethod::min:
            out.value = *std::min_element(forecasts.begin(), forecasts.end());
            break;
        case CombineMethod::max:
            out.value = *std::max_element(forecasts.begin(), forecasts.end());
            break;
        default:
            throw std::invalid_argument("combine_simple: ABMA needs weights");
    }
    return out;
}

/// ABMA weights from information criteria (smaller is better here, so the
/// softmax runs on the negated criterion and better models weigh more). The
/// printed-orientation variant zeta = IC - max(IC) is kept behind a switch
/// for comparison runs.
inline std::vector<double> abma_weights(std::span<const double> ics,
                                        bool printed_orientation = false) {
    if (ics.empty()) throw std::invalid_argument("abma_weights: empty criterion vector");
    std::vector<double> zeta(ics.size());
    for (std::size_t i = 0; i < ics.size(); ++i) {
        if (!std::isfinite(ics[i]))
            throw std::invalid_argument("abma_weights: non-finite information criterion");
        zeta[i] = printed_orientation ? ics[i] : -ics[i];
    }
    const double zmax = *std::max_element(zeta.begin(), zeta.end());
    double denom = 0.0;
    for (double& z : zeta) {
        z = std::exp(z - zmax);
        denom += z;
    }
    for (double& z : zeta) z /= denom;
    return zeta;
}

inline CombinedForecast combine_abma(std::span<const double> forecasts,
                                     std::span<const double> weights) {
    if (forecasts.size() != weights.size())
        throw std::invalid_argument("combine_abma: member/weight length mismatch");
    CombinedForecast out;
    out.weights.assign(weights.begin(), weights.end());
    for (std::size_t i = 0; i < forecasts.size(); ++i) out.value += weights[i] * forecasts[i];
    return out;
}

}  // namespace arriva
