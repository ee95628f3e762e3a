#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/calendar.hpp"
#include "arriva/linalg.hpp"

namespace arriva {

struct DatedCount {
    Date date;
    long long count = 0;
};

/// Daily call-arrival series: contiguous dates, nonnegative counts, and the
/// set of closing days (dates with no service, known in advance — the set may
/// extend past the sample so forecast targets can be zeroed).
class ArrivalSeries {
  public:
    ArrivalSeries() = default;
    ArrivalSeries(Date start, std::vector<long long> counts, std::vector<Date> closing_days)
        : start_(start), counts_(std::move(counts)), closing_days_(std::move(closing_days)) {
        std::sort(closing_days_.begin(), closing_days_.end());
        closing_days_.erase(std::unique(closing_days_.begin(), closing_days_.end()),
                            closing_days_.end());
        for (long long c : counts_)
            if (c < 0) throw std::invalid_argument("ArrivalSeries: negative count");
    }

    std::size_t size() const { return counts_.size(); }
    Date start_date() const { return start_; }
    Date date(std::size_t i) const { return start_ + static_cast<std::int32_t>(i); }
    long long count(std::size_t i) const { return counts_[i]; }
    std::span<const long long> counts() const { return counts_; }
    Weekday weekday(std::size_t i) const { return date(i).weekday(); }

    bool is_closing(Date d) const {
        return std::binary_search(closing_days_.begin(), closing_days_.end(), d);
    }
    bool is_closing(std::size_t i) const { return is_closing(date(i)); }
    const std::vector<Date>& closing_days() const { return closing_days_; }

    /// Natural log of the counts; requires strictly positive counts (run
    /// validate_and_impute first when the raw data contains closing-day zeros).
    std::vector<double> log_counts() const {
        std::vector<double> y(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            if (counts_[i] <= 0)
                throw std::domain_error("log_counts: nonpositive count at " + date(i).to_string());
            y[i] = std::log(static_cast<double>(counts_[i]));
        }
        return y;
    }

  private:
    Date start_;
    std::vector<long long> counts_;
    std::vector<Date> closing_days_;  // sorted
};

/// Checks calendar contiguity, rejects zeros outside declared closing days,
/// and replaces every closing-day zero with the count recorded one week
/// earlier (resolving recursively through back-to-back holiday weeks).
inline ArrivalSeries validate_and_impute(const std::vector<DatedCount>& raw,
                                         std::vector<Date> closing_days) {
    if (raw.empty()) throw std::invalid_argument("validate_and_impute: empty series");
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i].date - raw[i - 1].date != 1)
            throw std::invalid_argument("validate_and_impute: gap in dates after " +
                                        raw[i - 1].date.to_string());

    std::sort(closing_days.begin(), closing_days.end());
    auto closing = [&](Date d) {
        return std::binary_search(closing_days.begin(), closing_days.end(), d);
    };

    std::vector<long long> counts(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        long long c = raw[i].count;
        if (c < 0)
            throw std::invalid_argument("validate_and_impute: negative count at " +
                                        raw[i].date.to_string());
        if (c == 0) {
            if (!closing(raw[i].date))
                throw std::invalid_argument("validate_and_impute: zero count on non-closing day " +
                                            raw[i].date.to_string());
            if (i < 7)
                throw std::invalid_argument(
                    "validate_and_impute: closing day within the first week has no previous-week "
                    "value to impute from");
            c = counts[i - 7];  // already imputed when i-7 was itself a closing day
        }
        counts[i] = c;
    }
    return ArrivalSeries(raw[0].date, std::move(counts), std::move(closing_days));
}

inline std::vector<double> log_transform(const ArrivalSeries& s) { return s.log_counts(); }

/// One indicator column per weekday, Monday first; every row sums to 1.
inline Matrix day_dummies(const ArrivalSeries& s, std::size_t begin, std::size_t end) {
    Matrix d(end - begin, 7);
    for (std::size_t i = begin; i < end; ++i)
        d(i - begin, static_cast<std::size_t>(s.weekday(i))) = 1.0;
    return d;
}

inline Matrix day_dummies(const ArrivalSeries& s) { return day_dummies(s, 0, s.size()); }

struct DummyFit {
    std::array<double, 7> weekday_means{};  // Mon..Sun
    std::vector<double> fitted;
    std::vector<double> residuals;

    double fitted_for(Weekday w) const { return weekday_means[static_cast<std::size_t>(w)]; }
};

/// Projection of y onto the weekday indicators; the fitted value for each
/// date is its weekday mean. Requires every weekday to appear in the sample.
inline DummyFit dummy_fit(std::span<const double> y, const Matrix& dummies) {
    if (dummies.rows() != y.size() || dummies.cols() != 7)
        throw std::invalid_argument("dummy_fit: shape mismatch");
    std::array<double, 7> sums{};
    std::array<std::size_t, 7> counts{};
    for (std::size_t t = 0; t < y.size(); ++t) {
        for (std::size_t j = 0; j < 7; ++j) {
            if (dummies(t, j) == 1.0) {
                sums[j] += y[t];
                ++counts[j];
                break;
            }
        }
    }
    DummyFit fit;
    for (std::size_t j = 0; j < 7; ++j) {
        if (counts[j] == 0)
            throw std::invalid_argument("dummy_fit: weekday " + std::to_string(j) +
                                        " absent from sample");
        fit.weekday_means[j] = sums[j] / static_cast<double>(counts[j]);
    }
    fit.fitted.resize(y.size());
    fit.residuals.resize(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        for (std::size_t j = 0; j < 7; ++j) {
            if (dummies(t, j) == 1.0) {
                fit.fitted[t] = fit.weekday_means[j];
                break;
            }
        }
        fit.residuals[t] = y[t] - fit.fitted[t];
    }
    return fit;
}

/// Sample standard deviation (n-1 convention) over sample mean.
inline double coefficient_of_variation(std::span<const double> x) {
    const double m = mean(x);
    if (m == 0.0) throw std::domain_error("coefficient_of_variation: zero mean");
    return std::sqrt(variance(x)) / m;
}

}  // namespace arriva
