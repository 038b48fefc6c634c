#include <vector>

#include "doctest.h"
#include "dsc/dates.hpp"
#include "dsc/error.hpp"
#include "dsc/panel.hpp"

using namespace dsc;

TEST_CASE("parse_date accepts strict ISO dates") {
    auto d = parse_date("2022-06-30");
    REQUIRE(d.has_value());
    CHECK(format_date(*d) == "2022-06-30");
    CHECK(parse_date("2020-02-29").has_value());  // leap day
}

TEST_CASE("parse_date rejects malformed input") {
    CHECK_FALSE(parse_date("2022-6-30").has_value());
    CHECK_FALSE(parse_date("2022-13-01").has_value());
    CHECK_FALSE(parse_date("2021-02-29").has_value());
    CHECK_FALSE(parse_date("20220630").has_value());
    CHECK_FALSE(parse_date("").has_value());
    CHECK_FALSE(parse_date("2022-06-30x").has_value());
}

TEST_CASE("parse_date_or_throw names the context") {
    CHECK_THROWS_WITH_AS(parse_date_or_throw("nope", "start_date on line 3"),
                         doctest::Contains("start_date on line 3"), Error);
}

TEST_CASE("day arithmetic") {
    const Date a(2022, 1, 1);
    const Date b(2022, 6, 30);
    CHECK(b.day_diff(a) == 180);
    CHECK(a.day_diff(b) == -180);
    CHECK(a.add_days(180) == b);
    CHECK(b.add_days(-180) == a);
    CHECK(Date(2020, 2, 28).add_days(1) == Date(2020, 2, 29));
    CHECK(a < b);
}

TEST_CASE("quarters_from_boundaries builds inclusive windows") {
    const std::vector<Date> boundaries = {Date(2022, 1, 1), Date(2022, 4, 1), Date(2022, 7, 1)};
    const auto quarters = quarters_from_boundaries(boundaries);
    REQUIRE(quarters.size() == 2);
    CHECK(quarters[0].start == Date(2022, 1, 1));
    CHECK(quarters[0].end == Date(2022, 3, 31));
    CHECK(quarters[1].start == Date(2022, 4, 1));
    CHECK(quarters[1].end == Date(2022, 6, 30));
}

TEST_CASE("quarters_from_boundaries rejects bad boundary lists") {
    CHECK_THROWS_AS(quarters_from_boundaries({Date(2022, 1, 1)}), Error);
    CHECK_THROWS_AS(quarters_from_boundaries({Date(2022, 4, 1), Date(2022, 1, 1)}), Error);
    CHECK_THROWS_AS(quarters_from_boundaries({Date(2022, 1, 1), Date(2022, 1, 1)}), Error);
}
