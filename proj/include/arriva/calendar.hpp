#pragma once

#include <cstdint>
#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace arriva {

/// Day of week, Monday-first. Numeric values index dummy columns.
enum class Weekday : int {
    monday = 0,
    tuesday = 1,
    wednesday = 2,
    thursday = 3,
    friday = 4,
    saturday = 5,
    sunday = 6
};

/// A calendar day, stored as a count of days since 1970-01-01.
/// Conversions use the proleptic Gregorian calendar (Howard Hinnant's
/// civil-date algorithms), exact over the whole int32 range.
class Date {
  public:
    Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static constexpr Date from_ymd(int y, unsigned m, unsigned d) {
        y -= m <= 2;
        const std::int32_t era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return Date(era * 146097 + static_cast<std::int32_t>(doe) - 719468);
    }

    struct Ymd {
        int year;
        unsigned month;
        unsigned day;
    };

    constexpr Ymd ymd() const {
        std::int32_t z = days_ + 719468;
        const std::int32_t era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int32_t y = static_cast<std::int32_t>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return {y + (m <= 2), m, d};
    }

    constexpr std::int32_t days_since_epoch() const { return days_; }

    /// 1970-01-01 was a Thursday.
    constexpr Weekday weekday() const {
        const std::int32_t wd = (days_ % 7 + 7 + 3) % 7;
        return static_cast<Weekday>(wd);
    }

    /// Months elapsed since year 0, used for spline knot placement.
    constexpr int month_index() const {
        const Ymd x = ymd();
        return x.year * 12 + static_cast<int>(x.month) - 1;
    }

    constexpr bool is_first_of_month() const { return ymd().day == 1; }

    std::string to_string() const {
        const Ymd x = ymd();
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", x.year, x.month, x.day);
        return buf;
    }

    /// Parses strict ISO-8601 YYYY-MM-DD.
    static Date parse(const std::string& s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-')
            throw std::invalid_argument("bad date '" + s + "': expected YYYY-MM-DD");
        auto digits = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (s[i] < '0' || s[i] > '9')
                    throw std::invalid_argument("bad date '" + s + "': expected YYYY-MM-DD");
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        const int y = digits(0, 4);
        const unsigned m = static_cast<unsigned>(digits(5, 2));
        const unsigned d = static_cast<unsigned>(digits(8, 2));
        if (m < 1 || m > 12 || d < 1 || d > 31)
            throw std::invalid_argument("bad date '" + s + "': month/day out of range");
        Date parsed = from_ymd(y, m, d);
        const Ymd back = parsed.ymd();
        if (back.year != y || back.month != m || back.day != d)
            throw std::invalid_argument("bad date '" + s + "': no such day");
        return parsed;
    }

    friend constexpr Date operator+(Date a, std::int32_t n) { return Date(a.days_ + n); }
    friend constexpr Date operator-(Date a, std::int32_t n) { return Date(a.days_ - n); }
    friend constexpr std::int32_t operator-(Date a, Date b) { return a.days_ - b.days_; }
    constexpr auto operator<=>(const Date&) const = default;

  private:
    std::int32_t days_ = 0;
};

}  // namespace arriva
