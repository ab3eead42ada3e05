#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "lpgarch/calendar.hpp"
#include "lpgarch/error.hpp"

namespace lpg {

/// Trading days per year; one observation advances time by 1/252 year.
inline constexpr double kTradingDaysPerYear = 252.0;

/// Year-unit time of the observation with the given index.
constexpr double to_year_units(std::size_t index) { return static_cast<double>(index) / kTradingDaysPerYear; }

/**
 * Daily price observations on a trading-year time axis.
 *
 * Time is index based: t[k] = k / 252 regardless of calendar gaps, so
 * holidays in the data never leave holes in t. The origin is the date of the
 * first observation.
 */
class PriceSeries {
public:
    PriceSeries() = default;

    PriceSeries(std::vector<Date> dates, std::vector<double> prices) : dates_(std::move(dates)), prices_(std::move(prices)) {
        if (dates_.size() != prices_.size()) throw InputError("dates and prices differ in length");
        if (dates_.empty()) throw InputError("no observations");
        for (std::size_t i = 0; i < prices_.size(); ++i) {
            if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i]))
                throw InputError(fmt::format("non-positive price at observation {}", i));
            if (i > 0 && std::chrono::sys_days{dates_[i]} <= std::chrono::sys_days{dates_[i - 1]})
                throw InputError("dates must be strictly increasing (at " + format_date(dates_[i]) + ")");
        }
        times_.resize(prices_.size());
        for (std::size_t i = 0; i < times_.size(); ++i) times_[i] = to_year_units(i);
    }

    std::size_t size() const { return prices_.size(); }
    bool empty() const { return prices_.empty(); }

    std::span<const Date> dates() const { return dates_; }
    std::span<const double> prices() const { return prices_; }
    std::span<const double> times() const { return times_; }

    const Date& origin() const { return dates_.front(); }
    double last_time() const { return times_.back(); }

    double max_price() const { return *std::max_element(prices_.begin(), prices_.end()); }

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::vector<Date> dates_;
    std::vector<double> prices_;
    std::vector<double> times_;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t\r");
        const auto e = f.find_last_not_of(" \t\r");
        f = (b == std::string::npos) ? std::string{} : f.substr(b, e - b + 1);
    }
    return out;
}

inline double parse_price(const std::string& text, std::size_t row) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw InputError(fmt::format("row {}: cannot parse price '{}'", row, text));
    if (!(value > 0.0) || !std::isfinite(value)) throw InputError(fmt::format("row {}: non-positive price {}", row, text));
    return value;
}

}  // namespace detail

/// Parses comma-separated text with a header row. Rows are numbered from 1
/// for the first data row. The result is sorted by date.
inline PriceSeries parse_csv(std::istream& in, std::string_view date_column = "date",
                             std::string_view price_column = "close") {
    std::string line;
    if (!std::getline(in, line)) throw InputError("no observations");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    const auto header = detail::split_csv_line(line);
    auto column = [&](std::string_view name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw InputError("missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_idx = column(date_column);
    const std::size_t price_idx = column(price_column);

    std::vector<std::pair<Date, double>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++row;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() <= std::max(date_idx, price_idx))
            throw InputError(fmt::format("row {}: expected at least {} fields", row, std::max(date_idx, price_idx) + 1));
        Date d;
        try {
            d = parse_date(fields[date_idx]);
        } catch (const InputError& e) {
            throw InputError(fmt::format("row {}: {}", row, e.what()));
        }
        rows.emplace_back(d, detail::parse_price(fields[price_idx], row));
    }
    if (rows.empty()) throw InputError("no observations");

    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::chrono::sys_days{a.first} < std::chrono::sys_days{b.first};
    });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].first == rows[i - 1].first) throw InputError("duplicate date " + format_date(rows[i].first));

    std::vector<Date> dates;
    std::vector<double> prices;
    dates.reserve(rows.size());
    prices.reserve(rows.size());
    for (auto& [d, p] : rows) {
        dates.push_back(d);
        prices.push_back(p);
    }
    return PriceSeries{std::move(dates), std::move(prices)};
}

inline PriceSeries load_csv(const std::string& path, std::string_view date_column = "date",
                            std::string_view price_column = "close") {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return parse_csv(in, date_column, price_column);
}

/// Writes `date,close` rows; prices use the shortest round-trip representation.
inline void write_csv(std::ostream& out, const PriceSeries& series, std::string_view date_column = "date",
                      std::string_view price_column = "close") {
    out << date_column << ',' << price_column << '\n';
    for (std::size_t i = 0; i < series.size(); ++i)
        out << format_date(series.dates()[i]) << ',' << fmt::format("{}", series.prices()[i]) << '\n';
}

inline std::string to_csv_string(const PriceSeries& series) {
    std::ostringstream out;
    write_csv(out, series);
    return out.str();
}

/// Date reached by advancing round(t * 252) business days from `origin`.
inline Date year_to_date(double t, const Date& origin, const BusinessCalendar& calendar = BusinessCalendar::weekends_only()) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError(fmt::format("year time must be non-negative, got {}", t));
    return calendar.advance(origin, std::lround(t * kTradingDaysPerYear));
}

/// Observations with start <= date <= end, re-based so t restarts at zero.
inline PriceSeries slice_window(const PriceSeries& series, const Date& start, const Date& end) {
    using std::chrono::sys_days;
    if (sys_days{end} < sys_days{start}) throw InputError("window start is after window end");
    std::vector<Date> dates;
    std::vector<double> prices;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const Date& d = series.dates()[i];
        if (sys_days{d} >= sys_days{start} && sys_days{d} <= sys_days{end}) {
            dates.push_back(d);
            prices.push_back(series.prices()[i]);
        }
    }
    if (dates.empty())
        throw InputError("window " + format_date(start) + ".." + format_date(end) + " does not intersect the series");
    return PriceSeries{std::move(dates), std::move(prices)};
}

/// FNV-1a digest over dates and price bit patterns; used to match fit files to data.
inline std::uint64_t fingerprint(const PriceSeries& series) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (std::size_t i = 0; i < series.size(); ++i) {
        mix(static_cast<std::uint64_t>(std::chrono::sys_days{series.dates()[i]}.time_since_epoch().count()));
        mix(std::bit_cast<std::uint64_t>(series.prices()[i]));
    }
    return h;
}

/// Synthetic business-day dates starting at `origin`.
inline std::vector<Date> business_dates(const Date& origin, std::size_t n,
                                        const BusinessCalendar& calendar = BusinessCalendar::weekends_only()) {
    std::vector<Date> out;
    out.reserve(n);
    Date d = calendar.is_business_day(origin) ? origin : calendar.advance(origin, 1);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(d);
        d = calendar.advance(d, 1);
    }
    return out;
}

}  // namespace lpg
