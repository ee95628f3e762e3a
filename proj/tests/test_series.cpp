#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "arriva/series.hpp"
#include "arriva/simulate.hpp"
#include "arriva/spline.hpp"

using namespace arriva;

namespace {

std::vector<DatedCount> make_raw(Date start, const std::vector<long long>& counts) {
    std::vector<DatedCount> raw;
    for (std::size_t i = 0; i < counts.size(); ++i)
        raw.push_back({start + static_cast<std::int32_t>(i), counts[i]});
    return raw;
}

const Date kMonday = Date::from_ymd(2018, 1, 1);  // a Monday

}  // namespace

TEST_CASE("imputation replaces a closing-day zero with the previous week") {
    std::vector<long long> counts(21, 400);
    counts[10] = 500;  // t-7 of the holiday
    counts[17] = 0;    // declared holiday
    const Date holiday = kMonday + 17;
    const ArrivalSeries s = validate_and_impute(make_raw(kMonday, counts), {holiday});
    CHECK(s.count(17) == 500);
    CHECK(s.is_closing(holiday));
}

TEST_CASE("series without zeros passes through unchanged") {
    std::vector<long long> counts(14, 7);
    const ArrivalSeries s = validate_and_impute(make_raw(kMonday, counts), {});
    for (std::size_t i = 0; i < 14; ++i) CHECK(s.count(i) == 7);
}

TEST_CASE("back-to-back holiday weeks resolve recursively") {
    std::vector<long long> counts(28, 100);
    counts[7] = 300;
    counts[14] = 0;
    counts[21] = 0;
    const ArrivalSeries s = validate_and_impute(make_raw(kMonday, counts),
                                                {kMonday + 14, kMonday + 21});
    CHECK(s.count(14) == 300);
    CHECK(s.count(21) == 300);
}

TEST_CASE("validation errors: zero off-holiday, date gap, negative count") {
    std::vector<long long> counts(14, 9);
    counts[5] = 0;
    CHECK_THROWS_AS(validate_and_impute(make_raw(kMonday, counts), {}), std::invalid_argument);

    auto raw = make_raw(kMonday, std::vector<long long>(14, 9));
    raw[8].date = raw[8].date + 1;  // introduce a gap
    CHECK_THROWS_AS(validate_and_impute(raw, {}), std::invalid_argument);

    std::vector<long long> neg(14, 9);
    neg[3] = -1;
    CHECK_THROWS_AS(validate_and_impute(make_raw(kMonday, neg), {}), std::invalid_argument);
}

TEST_CASE("imputation is idempotent") {
    std::vector<long long> counts(28, 100);
    counts[14] = 0;
    const std::vector<Date> closing{kMonday + 14};
    const ArrivalSeries once = validate_and_impute(make_raw(kMonday, counts), closing);
    std::vector<DatedCount> again;
    for (std::size_t i = 0; i < once.size(); ++i) again.push_back({once.date(i), once.count(i)});
    const ArrivalSeries twice = validate_and_impute(again, closing);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(once.count(i) == twice.count(i));
}

TEST_CASE("log transform: exact values and the positivity requirement") {
    const ArrivalSeries ones(kMonday, {1, 1, 1}, {});
    const auto y = log_transform(ones);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.0);
    CHECK(y[2] == 0.0);

    const auto e2 = static_cast<long long>(std::llround(std::exp(2.0)));  // counts are integers
    const ArrivalSeries se2(kMonday, {e2}, {});
    CHECK(log_transform(se2)[0] == doctest::Approx(std::log(static_cast<double>(e2))));

    const ArrivalSeries s(kMonday, {100, 200}, {});
    const auto ly = log_transform(s);
    CHECK(ly[0] == doctest::Approx(4.6051701860).epsilon(1e-10));
    CHECK(ly[1] == doctest::Approx(5.2983173665).epsilon(1e-10));

    const ArrivalSeries zero(kMonday, {5, 0}, {kMonday + 1});
    CHECK_THROWS_AS(log_transform(zero), std::domain_error);
}

TEST_CASE("log and exp invert each other over the count range") {
    for (double v : {1.0, 17.0, 1234.5, 99999.0, 1e6}) {
        CHECK(std::exp(std::log(v)) == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("day dummies: Monday-first convention, rows sum to one") {
    const ArrivalSeries s(kMonday, std::vector<long long>(14, 10), {});
    const Matrix d = day_dummies(s);
    CHECK(d(0, 0) == 1.0);  // first row is a Monday
    for (std::size_t j = 1; j < 7; ++j) CHECK(d(0, j) == 0.0);
    for (std::size_t i = 0; i < d.rows(); ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < 7; ++j) row_sum += d(i, j);
        CHECK(row_sum == 1.0);
    }
    for (std::size_t j = 0; j < 7; ++j) {
        double col_sum = 0.0;
        for (std::size_t i = 0; i < d.rows(); ++i) col_sum += d(i, j);
        CHECK(col_sum == 2.0);  // 14 consecutive days hit each weekday twice
    }
}

TEST_CASE("dummy fit equals weekday means") {
    const ArrivalSeries s(kMonday, std::vector<long long>(14, 10), {});
    const Matrix d = day_dummies(s);

    std::vector<double> constant(14, 3.25);
    const DummyFit cf = dummy_fit(constant, d);
    for (double m : cf.weekday_means) CHECK(m == doctest::Approx(3.25).epsilon(1e-14));

    // Mon 2,2 and Tue 4,6 over the two weeks.
    std::vector<double> y(14, 1.0);
    y[0] = 2.0;
    y[7] = 2.0;
    y[1] = 4.0;
    y[8] = 6.0;
    const DummyFit f = dummy_fit(y, d);
    CHECK(f.weekday_means[0] == doctest::Approx(2.0));
    CHECK(f.weekday_means[1] == doctest::Approx(5.0));

    // Residuals orthogonal to every dummy column.
    for (std::size_t j = 0; j < 7; ++j) {
        double dot = 0.0;
        for (std::size_t t = 0; t < 14; ++t) dot += f.residuals[t] * d(t, j);
        CHECK(std::abs(dot) < 1e-10);
    }
}

TEST_CASE("dummy fit is affine equivariant") {
    const ArrivalSeries s(kMonday, std::vector<long long>(21, 10), {});
    const Matrix d = day_dummies(s);
    std::vector<double> y(21);
    for (std::size_t t = 0; t < 21; ++t) y[t] = std::sin(0.7 * static_cast<double>(t));
    std::vector<double> shifted = y;
    for (double& v : shifted) v += 11.5;
    const DummyFit a = dummy_fit(y, d), b = dummy_fit(shifted, d);
    for (std::size_t t = 0; t < 21; ++t)
        CHECK(b.fitted[t] - a.fitted[t] == doctest::Approx(11.5).epsilon(1e-12));
}

TEST_CASE("dummy fit requires all weekdays present") {
    const ArrivalSeries s(kMonday, std::vector<long long>(5, 10), {});
    std::vector<double> y(5, 1.0);
    CHECK_THROWS_AS(dummy_fit(y, day_dummies(s)), std::invalid_argument);
}

TEST_CASE("natural spline reproduces a line and counts monthly knots") {
    // Jan 1 through Dec 31 of a non-leap year: 12 knots.
    const Date start = Date::from_ymd(2015, 1, 1);
    const std::size_t n = 365;
    std::vector<long long> counts(n, 10);
    const ArrivalSeries s(start, counts, {});
    const auto knots = monthly_knot_indices(s, 0, n);
    CHECK(knots.size() == 12);

    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) y[t] = 2.0 + 0.01 * static_cast<double>(t);
    const SplineFit fit = spline_fit(s, y, 0, n);
    for (std::size_t t = 0; t < n; t += 17)
        CHECK(fit.fitted_values[t] == doctest::Approx(y[t]).epsilon(1e-8));
}

TEST_CASE("natural spline recovers a curve built from its own basis") {
    const Date start = Date::from_ymd(2015, 1, 1);
    const std::size_t n = 181;  // Jan..Jun
    const ArrivalSeries s(start, std::vector<long long>(n, 10), {});
    const auto knots = monthly_knot_indices(s, 0, n);
    SplineFit truth;
    truth.knot_positions = knots;
    truth.coefficients.assign(knots.size(), 0.0);
    truth.coefficients[0] = 1.0;
    truth.coefficients[1] = 0.02;
    truth.coefficients[2] = 3e-5;
    truth.coefficients[3] = -2e-5;
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) y[t] = truth.value_at(static_cast<double>(t));
    const SplineFit fit = spline_fit(s, y, 0, n);
    for (double k : knots)
        CHECK(fit.value_at(k) == doctest::Approx(truth.value_at(k)).epsilon(1e-6));
}

TEST_CASE("spline rejects samples inside a single month") {
    const Date start = Date::from_ymd(2015, 3, 2);
    const ArrivalSeries s(start, std::vector<long long>(20, 10), {});
    std::vector<double> y(20, 1.0);
    CHECK_THROWS_AS(spline_fit(s, y, 0, 20), std::invalid_argument);
}

TEST_CASE("spline residuals depend only on month-boundary layout") {
    const std::size_t n = 90;
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t)
        y[t] = std::cos(0.05 * static_cast<double>(t)) + 0.001 * static_cast<double>(t);
    const ArrivalSeries a(Date::from_ymd(2015, 1, 1), std::vector<long long>(n, 10), {});
    const ArrivalSeries b(Date::from_ymd(2017, 1, 1), std::vector<long long>(n, 10), {});
    const SplineFit fa = spline_fit(a, y, 0, n), fb = spline_fit(b, y, 0, n);
    for (std::size_t t = 0; t < n; t += 7)
        CHECK(fa.fitted_values[t] == doctest::Approx(fb.fitted_values[t]).epsilon(1e-12));
}

TEST_CASE("coefficient of variation uses the sample standard deviation") {
    const std::vector<double> constant(10, 4.0);
    CHECK(coefficient_of_variation(constant) == 0.0);
    const std::vector<double> two{1.0, 3.0};
    CHECK(coefficient_of_variation(two) == doctest::Approx(0.70710678).epsilon(1e-7));
    const std::vector<double> zero_mean{-1.0, 1.0};
    CHECK_THROWS_AS(coefficient_of_variation(zero_mean), std::domain_error);
}

TEST_CASE("dgp is reproducible and degenerates to an exact weekly pattern") {
    DgpSpec spec;
    spec.length = 100;
    spec.ar = {{1, 0.4}};
    spec.sigma = 0.05;
    const ArrivalSeries a = simulate_dgp(spec, 99), b = simulate_dgp(spec, 99),
                        c = simulate_dgp(spec, 100);
    bool identical = true, differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        identical = identical && a.count(i) == b.count(i);
        differs = differs || a.count(i) != c.count(i);
    }
    CHECK(identical);
    CHECK(differs);

    DgpSpec pure;
    pure.length = 70;
    pure.sigma = 0.0;
    const ArrivalSeries p = simulate_dgp(pure, 1);
    for (std::size_t i = 7; i < p.size(); ++i) CHECK(p.count(i) == p.count(i - 7));
}

TEST_CASE("dgp rejects explosive parameters") {
    DgpSpec ar_bad;
    ar_bad.ar = {{1, 1.01}};
    CHECK_THROWS_AS(simulate_dgp(ar_bad, 1), std::invalid_argument);
    DgpSpec garch_bad;
    garch_bad.garch_omega = 0.1;
    garch_bad.garch_alpha = 0.5;
    garch_bad.garch_beta = 0.6;
    CHECK_THROWS_AS(simulate_dgp(garch_bad, 1), std::invalid_argument);
}
