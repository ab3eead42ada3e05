#pragma once

#include <chrono>
#include <charconv>
#include <cstdio>
#include <set>
#include <string>
#include <string_view>

#include "lpgarch/error.hpp"

namespace lpg {

using Date = std::chrono::year_month_day;

inline Date make_date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

/// Parses a strict ISO-8601 calendar date, `YYYY-MM-DD`.
inline Date parse_date(std::string_view text) {
    auto field = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        const char* first = text.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, value);
        if (ec != std::errc{} || ptr != first + len) throw InputError("invalid date '" + std::string(text) + "'");
        return value;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw InputError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    const Date d = make_date(field(0, 4), static_cast<unsigned>(field(5, 2)), static_cast<unsigned>(field(8, 2)));
    if (!d.ok()) throw InputError("invalid date '" + std::string(text) + "'");
    return d;
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

inline Date add_days(const Date& d, int days) {
    return Date{std::chrono::sys_days{d} + std::chrono::days{days}};
}

inline bool is_weekend(const Date& d) {
    const std::chrono::weekday wd{std::chrono::sys_days{d}};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

namespace detail {

inline Date nth_weekday(int y, unsigned m, std::chrono::weekday wd, unsigned n) {
    using namespace std::chrono;
    return Date{sys_days{year{y} / month{m} / wd[n]}};
}

inline Date last_weekday(int y, unsigned m, std::chrono::weekday wd) {
    using namespace std::chrono;
    return Date{sys_days{year{y} / month{m} / wd[last]}};
}

// Anonymous Gregorian computus.
inline Date easter_sunday(int y) {
    const int a = y % 19, b = y / 100, c = y % 100, d = b / 4, e = b % 4;
    const int f = (b + 8) / 25, g = (b - f + 1) / 3, h = (19 * a + b - d - g + 15) % 30;
    const int i = c / 4, k = c % 4, l = (32 + 2 * e + 2 * i - h - k) % 7;
    const int m = (a + 11 * h + 22 * l) / 451;
    const int month = (h + l - 7 * m + 114) / 31, day = (h + l - 7 * m + 114) % 31 + 1;
    return make_date(y, static_cast<unsigned>(month), static_cast<unsigned>(day));
}

// Saturday holidays move to Friday, Sunday holidays to Monday.
inline Date observed(const Date& d) {
    const std::chrono::weekday wd{std::chrono::sys_days{d}};
    if (wd == std::chrono::Saturday) return add_days(d, -1);
    if (wd == std::chrono::Sunday) return add_days(d, 1);
    return d;
}

}  // namespace detail

/// Regular NYSE full-day closures for one year, plus a short list of
/// unscheduled closures. Covers 1970 onwards.
inline std::set<Date> nyse_holidays(int y) {
    using namespace std::chrono;
    std::set<Date> out;
    // New Year's Day on a Saturday is not observed on the preceding Friday.
    const Date new_year = make_date(y, 1, 1);
    if (weekday{sys_days{new_year}} != Saturday) out.insert(detail::observed(new_year));
    if (y >= 1998) out.insert(detail::nth_weekday(y, 1, Monday, 3));
    out.insert(detail::nth_weekday(y, 2, Monday, 3));
    out.insert(add_days(detail::easter_sunday(y), -2));
    out.insert(detail::last_weekday(y, 5, Monday));
    if (y >= 2022) out.insert(detail::observed(make_date(y, 6, 19)));
    out.insert(detail::observed(make_date(y, 7, 4)));
    out.insert(detail::nth_weekday(y, 9, Monday, 1));
    out.insert(detail::nth_weekday(y, 11, Thursday, 4));
    out.insert(detail::observed(make_date(y, 12, 25)));
    // Presidential election days were closures until 1980.
    if (y <= 1980 && y % 4 == 0) out.insert(add_days(detail::nth_weekday(y, 11, Monday, 1), 1));

    static const Date special[] = {
        make_date(1977, 7, 14), make_date(1985, 9, 27), make_date(1994, 4, 27), make_date(2001, 9, 11),
        make_date(2001, 9, 12), make_date(2001, 9, 13), make_date(2001, 9, 14), make_date(2004, 6, 11),
        make_date(2007, 1, 2),  make_date(2012, 10, 29), make_date(2012, 10, 30), make_date(2018, 12, 5),
        make_date(2025, 1, 9),
    };
    for (const Date& d : special)
        if (static_cast<int>(d.year()) == y) out.insert(d);
    return out;
}

/// Business-day calendar: weekends are always closed; an optional holiday
/// rule adds exchange closures.
class BusinessCalendar {
public:
    enum class Kind { WeekendsOnly, Nyse };

    static BusinessCalendar weekends_only() { return BusinessCalendar{Kind::WeekendsOnly}; }
    static BusinessCalendar nyse() { return BusinessCalendar{Kind::Nyse}; }

    static BusinessCalendar from_name(std::string_view name) {
        if (name == "weekends") return weekends_only();
        if (name == "nyse") return nyse();
        throw InputError("unknown calendar '" + std::string(name) + "' (expected weekends or nyse)");
    }

    Kind kind() const { return kind_; }
    std::string name() const { return kind_ == Kind::Nyse ? "nyse" : "weekends"; }

    bool is_business_day(const Date& d) const {
        if (is_weekend(d)) return false;
        if (kind_ == Kind::Nyse) return !nyse_holidays(static_cast<int>(d.year())).contains(d);
        return true;
    }

    /// Steps forward `count` business days; count == 0 returns `from` unchanged.
    Date advance(const Date& from, long count) const {
        Date d = from;
        int cached_year = 0;
        std::set<Date> holidays;
        while (count > 0) {
            d = add_days(d, 1);
            if (is_weekend(d)) continue;
            if (kind_ == Kind::Nyse) {
                const int y = static_cast<int>(d.year());
                if (y != cached_year) {
                    holidays = nyse_holidays(y);
                    cached_year = y;
                }
                if (holidays.contains(d)) continue;
            }
            --count;
        }
        return d;
    }

    /// Number of business days d with from < d <= to.
    long count_between(const Date& from, const Date& to) const {
        long n = 0;
        for (Date d = add_days(from, 1); std::chrono::sys_days{d} <= std::chrono::sys_days{to}; d = add_days(d, 1))
            if (is_business_day(d)) ++n;
        return n;
    }

private:
    explicit BusinessCalendar(Kind k) : kind_(k) {}
    Kind kind_;
};

}  // namespace lpg
