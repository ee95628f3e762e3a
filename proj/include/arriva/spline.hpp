#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "arriva/calendar.hpp"
#include "arriva/linalg.hpp"
#include "arriva/series.hpp"

namespace arriva {

/// Natural cubic regression spline through the log series, one knot per
/// calendar month in the sample (placed at the first day of each month,
/// clamped to the sample start). Zero penalty: this is least squares on the
/// natural-spline basis, linear beyond the boundary knots.
struct SplineFit {
    std::vector<double> knot_positions;  // time indices within the fitted window
    std::vector<double> coefficients;    // natural-spline basis weights
    std::vector<double> fitted_values;

    /// Evaluates the fitted curve at an arbitrary time index (natural
    /// extrapolation: linear outside the boundary knots).
    double value_at(double t) const {
        const std::size_t nk = knot_positions.size();
        double v = coefficients[0] + coefficients[1] * t;
        for (std::size_t j = 0; j + 2 < nk; ++j) v += coefficients[j + 2] * basis(j, t);
        return v;
    }

    double basis(std::size_t j, double t) const {
        const std::size_t nk = knot_positions.size();
        auto cube_plus = [](double x) { return x > 0.0 ? x * x * x : 0.0; };
        auto d = [&](std::size_t i, double x) {
            return (cube_plus(x - knot_positions[i]) - cube_plus(x - knot_positions[nk - 1])) /
                   (knot_positions[nk - 1] - knot_positions[i]);
        };
        return d(j, t) - d(nk - 2, t);
    }
};

/// Knot time-indices for the window [begin, end): first day of each calendar
/// month present, clamped into the window.
inline std::vector<double> monthly_knot_indices(const ArrivalSeries& s, std::size_t begin,
                                                std::size_t end) {
    std::vector<double> knots;
    int last_month = -1;
    for (std::size_t i = begin; i < end; ++i) {
        const int m = s.date(i).month_index();
        if (m != last_month) {
            knots.push_back(static_cast<double>(i - begin));
            last_month = m;
        }
    }
    return knots;
}

inline SplineFit spline_fit(std::span<const double> y, std::vector<double> knots) {
    const std::size_t nk = knots.size();
    if (nk < 2) throw std::invalid_argument("spline_fit: sample must span at least two months");
    SplineFit fit;
    fit.knot_positions = std::move(knots);
    const std::size_t n = y.size();
    const std::size_t dim = nk;  // natural-spline space has one dof per knot
    Matrix x(n, dim);
    for (std::size_t t = 0; t < n; ++t) {
        x(t, 0) = 1.0;
        x(t, 1) = static_cast<double>(t);
        for (std::size_t j = 0; j + 2 < nk; ++j)
            x(t, j + 2) = fit.basis(j, static_cast<double>(t));
    }
    OlsFit ls = ols(x, y);
    fit.coefficients = std::move(ls.coef);
    fit.fitted_values = std::move(ls.fitted);
    return fit;
}

/// Long-run level of the log series over a window of the arrival calendar.
inline SplineFit spline_fit(const ArrivalSeries& s, std::span<const double> y_window,
                            std::size_t begin, std::size_t end) {
    return spline_fit(y_window, monthly_knot_indices(s, begin, end));
}

}  // namespace arriva
