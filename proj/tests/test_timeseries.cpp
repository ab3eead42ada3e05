#include <sstream>

#include <gtest/gtest.h>

#include "lpgarch/timeseries.hpp"

using namespace lpg;

namespace {

PriceSeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

}  // namespace

TEST(YearUnits, IndexConversion) {
    EXPECT_EQ(to_year_units(0), 0.0);
    EXPECT_NEAR(to_year_units(1), 0.003968, 5e-7);
    EXPECT_EQ(to_year_units(252), 1.0);
}

TEST(Csv, ThreeRowsGiveIndexTimes) {
    const auto s = parse("date,close\n2020-01-02,10\n2020-01-03,11\n2020-01-06,12\n");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.times()[0], 0.0);
    EXPECT_EQ(s.times()[1], 1.0 / 252.0);
    EXPECT_EQ(s.times()[2], 2.0 / 252.0);
    EXPECT_EQ(s.origin(), make_date(2020, 1, 2));
}

TEST(Csv, SortsByDateAndHonoursColumnNames) {
    std::istringstream in("Close,Date,Volume\n12,2020-01-06,1\n10,2020-01-02,1\n");
    const auto s = parse_csv(in, "Date", "Close");
    EXPECT_EQ(s.dates().front(), make_date(2020, 1, 2));
    EXPECT_EQ(s.prices().back(), 12.0);
}

TEST(Csv, NegativePriceNamesRow) {
    try {
        parse("date,close\n2020-01-02,10\n2020-01-03,-5.0\n");
        FAIL() << "expected an error";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("non-positive"), std::string::npos) << e.what();
    }
}

TEST(Csv, EmptyInputHasNoObservations) {
    try {
        parse("date,close\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("no observations"), std::string::npos);
    }
    EXPECT_THROW(parse(""), InputError);
}

TEST(Csv, Errors) {
    EXPECT_THROW(parse("day,close\n2020-01-02,1\n"), InputError);              // missing column
    EXPECT_THROW(parse("date,close\n2020-13-02,1\n"), InputError);             // bad date
    EXPECT_THROW(parse("date,close\n2020-01-02,abc\n"), InputError);           // bad price
    EXPECT_THROW(parse("date,close\n2020-01-02,1\n2020-01-02,2\n"), InputError);  // duplicate
    EXPECT_THROW(load_csv("/nonexistent/prices.csv"), InputError);
}

TEST(Csv, RoundTripKeepsFullPrecision) {
    const auto s = parse("date,close\n2020-01-02,0.1\n2020-01-03,1234.5678901234567\n2020-01-06,3.141592653589793\n");
    const auto back = parse(to_csv_string(s));
    EXPECT_EQ(back, s);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(back.prices()[i], s.prices()[i]);
}

TEST(YearToDate, IdentityAtOrigin) {
    EXPECT_EQ(year_to_date(0.0, make_date(1985, 7, 1)), make_date(1985, 7, 1));
    EXPECT_THROW(year_to_date(-0.01, make_date(1985, 7, 1)), InputError);
}

TEST(YearToDate, MatchesBusinessDayCount) {
    const auto origin = make_date(1999, 12, 30);
    const auto cal = BusinessCalendar::weekends_only();
    Date expected = origin;
    for (std::size_t k = 0; k < 600; ++k) {
        EXPECT_EQ(year_to_date(to_year_units(k), origin), expected) << k;
        expected = cal.advance(expected, 1);
    }
}

TEST(YearToDate, WeekendsSkipped) {
    // Friday plus one business day is Monday.
    EXPECT_EQ(year_to_date(1.0 / 252.0, make_date(2024, 3, 8)), make_date(2024, 3, 11));
}

TEST(Calendar, NyseHolidays) {
    const auto nyse = BusinessCalendar::nyse();
    EXPECT_FALSE(nyse.is_business_day(make_date(1987, 9, 7)));   // Labor Day
    EXPECT_FALSE(nyse.is_business_day(make_date(2000, 4, 21)));  // Good Friday
    EXPECT_FALSE(nyse.is_business_day(make_date(2001, 9, 11)));
    EXPECT_TRUE(nyse.is_business_day(make_date(1987, 9, 8)));
    EXPECT_EQ(nyse.count_between(make_date(1985, 7, 1), make_date(1987, 8, 25)), 543);
    EXPECT_THROW(BusinessCalendar::from_name("lunar"), InputError);
}

TEST(SliceWindow, FullRangeIsIdentity) {
    const auto s = parse("date,close\n2020-01-02,10\n2020-01-03,11\n2020-01-06,12\n");
    EXPECT_EQ(slice_window(s, make_date(2019, 1, 1), make_date(2021, 1, 1)), s);
}

TEST(SliceWindow, RebasesTimeAndIsIdempotent) {
    const auto s = parse("date,close\n2020-01-02,10\n2020-01-03,11\n2020-01-06,12\n2020-01-07,13\n");
    const auto w = slice_window(s, make_date(2020, 1, 3), make_date(2020, 1, 6));
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w.times()[0], 0.0);
    EXPECT_EQ(w.origin(), make_date(2020, 1, 3));
    EXPECT_EQ(slice_window(w, make_date(2020, 1, 3), make_date(2020, 1, 6)), w);
}

TEST(SliceWindow, Errors) {
    const auto s = parse("date,close\n2020-01-02,10\n");
    EXPECT_THROW(slice_window(s, make_date(2021, 1, 1), make_date(2021, 2, 1)), InputError);
    EXPECT_THROW(slice_window(s, make_date(2021, 1, 1), make_date(2020, 2, 1)), InputError);
}

TEST(Fingerprint, SensitiveToPricesAndDates) {
    const auto a = parse("date,close\n2020-01-02,10\n2020-01-03,11\n");
    const auto b = parse("date,close\n2020-01-02,10\n2020-01-03,11.000000001\n");
    const auto c = parse("date,close\n2020-01-02,10\n2020-01-06,11\n");
    EXPECT_NE(fingerprint(a), fingerprint(b));
    EXPECT_NE(fingerprint(a), fingerprint(c));
    EXPECT_EQ(fingerprint(a), fingerprint(parse(to_csv_string(a))));
}
