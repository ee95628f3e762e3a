#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace arriva {

/// Dense row-major matrix. Dimensions in this library are tiny (regressor
/// counts under ~25), so plain normal-equation algebra is adequate.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

namespace linalg {

/// Solves A x = b for symmetric positive definite A by Cholesky, in place on
/// copies. Throws std::runtime_error when A is not (numerically) SPD.
inline std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_spd: shape mismatch");
    // Lower-triangular factor overwrites a.
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::runtime_error("solve_spd: matrix not positive definite (singular regressors?)");
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
        b[i] = s / a(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a(k, ii) * b[k];
        b[ii] = s / a(ii, ii);
    }
    return b;
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
inline Matrix inverse_spd(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        std::vector<double> col = solve_spd(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

inline Matrix gram(const Matrix& x) {
    const std::size_t n = x.rows(), k = x.cols();
    Matrix g(k, k);
    for (std::size_t t = 0; t < n; ++t) {
        auto r = x.row(t);
        for (std::size_t i = 0; i < k; ++i) {
            const double xi = r[i];
            if (xi == 0.0) continue;
            for (std::size_t j = i; j < k; ++j) g(i, j) += xi * r[j];
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

inline std::vector<double> xty(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows(), k = x.cols();
    std::vector<double> v(k, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        auto r = x.row(t);
        for (std::size_t i = 0; i < k; ++i) v[i] += r[i] * y[t];
    }
    return v;
}

}  // namespace linalg

/// Ordinary least squares fit and the summaries the toolkit needs from it.
struct OlsFit {
    std::vector<double> coef;
    std::vector<double> fitted;
    std::vector<double> residuals;
    std::vector<double> std_errors;  // classical, sigma^2 (X'X)^-1
    double rss = 0.0;
    double tss_centered = 0.0;
    double sigma2 = 0.0;  // rss / (n - k)
    std::size_t n = 0;
    std::size_t k = 0;

    double r_squared() const { return tss_centered > 0.0 ? 1.0 - rss / tss_centered : 0.0; }
};

inline OlsFit ols(const Matrix& x, std::span<const double> y, bool want_std_errors = false) {
    const std::size_t n = x.rows(), k = x.cols();
    if (y.size() != n) throw std::invalid_argument("ols: length mismatch");
    if (n < k) throw std::invalid_argument("ols: fewer observations than regressors");
    OlsFit fit;
    fit.n = n;
    fit.k = k;
    const Matrix g = linalg::gram(x);
    fit.coef = linalg::solve_spd(g, linalg::xty(x, y));
    fit.fitted.resize(n);
    fit.residuals.resize(n);
    double ybar = 0.0;
    for (std::size_t t = 0; t < n; ++t) ybar += y[t];
    ybar /= static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) {
        auto r = x.row(t);
        double f = 0.0;
        for (std::size_t i = 0; i < k; ++i) f += r[i] * fit.coef[i];
        fit.fitted[t] = f;
        fit.residuals[t] = y[t] - f;
        fit.rss += fit.residuals[t] * fit.residuals[t];
        fit.tss_centered += (y[t] - ybar) * (y[t] - ybar);
    }
    fit.sigma2 = n > k ? fit.rss / static_cast<double>(n - k) : 0.0;
    if (want_std_errors) {
        const Matrix ginv = linalg::inverse_spd(g);
        fit.std_errors.resize(k);
        for (std::size_t i = 0; i < k; ++i) fit.std_errors[i] = std::sqrt(fit.sigma2 * ginv(i, i));
    }
    return fit;
}

inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

/// Sample (n-1) variance.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace arriva
