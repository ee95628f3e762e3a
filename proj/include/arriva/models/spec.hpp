#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace arriva {

enum class ModelFamily {
    srw,           // M0: seasonal random walk benchmark
    armax,         // M1
    armax_garch,   // M2
    tvd_ar,        // M3: logistic time-varying dummy coefficients
    sarmax,        // M4
    sarmax_garch,  // M5
    par,           // M6: periodic AR(2)
    airline,       // M7
    poisson,       // M8
    negbin,        // M9
    exponential,   // M10
    mem,           // M11
    spline_sarx,   // M12
    holt_winters   // M13
};

constexpr int kMaxArmaLag = 28;
constexpr int kMaxHorizon = 28;

/// Declarative model description: family plus the lag structure. Seasonal
/// lags enter multiplicatively against the regular AR/MA factors.
struct ModelSpec {
    ModelFamily family = ModelFamily::srw;
    std::vector<int> ar_lags;
    std::vector<int> ma_lags;
    std::vector<int> sar_lags;
    std::vector<int> sma_lags;
    bool include_dummies = true;
    bool garch = false;
    bool diff = false;           // (1 - L)
    bool seasonal_diff = false;  // (1 - L^7)
    int par_order = 2;

    void validate() const {
        // The airline model's seasonal MA lag is 8 as printed in the source
        // table, so the multiple-of-7 rule is waived for that family.
        const bool weekly_seasonal = family != ModelFamily::airline;
        auto check = [&](const std::vector<int>& lags, bool seasonal, const char* what) {
            for (int l : lags) {
                if (l <= 0 || l > kMaxArmaLag)
                    throw std::invalid_argument(std::string("ModelSpec: ") + what +
                                                " lag out of 1..28");
                if (seasonal && weekly_seasonal && l % 7 != 0)
                    throw std::invalid_argument(std::string("ModelSpec: seasonal ") + what +
                                                " lag must be in {7,14,21,28}");
            }
        };
        check(ar_lags, false, "AR");
        check(ma_lags, false, "MA");
        check(sar_lags, true, "SAR");
        check(sma_lags, true, "SMA");
    }
};

inline const char* family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::srw: return "srw";
        case ModelFamily::armax: return "armax";
        case ModelFamily::armax_garch: return "armax_garch";
        case ModelFamily::tvd_ar: return "tvd_ar";
        case ModelFamily::sarmax: return "sarmax";
        case ModelFamily::sarmax_garch: return "sarmax_garch";
        case ModelFamily::par: return "par";
        case ModelFamily::airline: return "airline";
        case ModelFamily::poisson: return "poisson";
        case ModelFamily::negbin: return "negbin";
        case ModelFamily::exponential: return "exponential";
        case ModelFamily::mem: return "mem";
        case ModelFamily::spline_sarx: return "spline_sarx";
        case ModelFamily::holt_winters: return "holt_winters";
    }
    return "?";
}

/// Model ids M0..M13 in the catalog order above.
inline std::string model_id(ModelFamily f) { return "M" + std::to_string(static_cast<int>(f)); }

inline ModelFamily family_from_model_id(const std::string& id) {
    if (id.size() >= 2 && id[0] == 'M') {
        const int n = std::stoi(id.substr(1));
        if (n >= 0 && n <= 13) return static_cast<ModelFamily>(n);
    }
    throw std::invalid_argument("unknown model id '" + id + "'");
}

/// The catalog's stock specifications (lag structures of the model summary
/// table); specification search can override the searchable families.
inline ModelSpec default_spec(ModelFamily f) {
    ModelSpec s;
    s.family = f;
    switch (f) {
        case ModelFamily::srw:
            s.include_dummies = false;
            break;
        case ModelFamily::armax:
        case ModelFamily::armax_garch:
            s.ar_lags = {1, 7, 8};
            s.ma_lags = {1};
            s.garch = (f == ModelFamily::armax_garch);
            break;
        case ModelFamily::tvd_ar:
            s.ar_lags = {1, 7};
            break;
        case ModelFamily::sarmax:
        case ModelFamily::sarmax_garch:
            s.ar_lags = {1};
            s.sar_lags = {7};
            s.ma_lags = {1};
            s.sma_lags = {28};
            s.garch = (f == ModelFamily::sarmax_garch);
            break;
        case ModelFamily::par:
            s.par_order = 2;
            break;
        case ModelFamily::airline:
            s.ma_lags = {1};
            s.sma_lags = {8};  // printed as SMA(8), not SMA(7); kept literal
            s.include_dummies = false;
            s.diff = true;
            s.seasonal_diff = true;
            break;
        case ModelFamily::poisson:
        case ModelFamily::negbin:
        case ModelFamily::exponential:
            break;
        case ModelFamily::mem:
            break;
        case ModelFamily::spline_sarx:
            s.ar_lags = {1};
            s.sar_lags = {7};
            break;
        case ModelFamily::holt_winters:
            break;
    }
    return s;
}

}  // namespace arriva
