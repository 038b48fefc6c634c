#ifndef DSC_DATES_HPP
#define DSC_DATES_HPP

#include <chrono>
#include <compare>
#include <optional>
#include <string>

#include "dsc/error.hpp"

namespace dsc {

// Calendar date with day-resolution arithmetic. Spell dates in resume data
// are typically coded as the first of the month; we accept them as-is and do
// all arithmetic in actual calendar days.
struct Date {
    std::chrono::sys_days days{};

    Date() = default;
    explicit Date(std::chrono::sys_days d) : days(d) {}
    Date(int y, unsigned m, unsigned d)
        : days(std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} /
                                     std::chrono::day{d}}) {}

    auto operator<=>(const Date&) const = default;

    // Whole days from other to this (this - other).
    long day_diff(const Date& other) const { return (days - other.days).count(); }

    Date add_days(long n) const { return Date(days + std::chrono::days{n}); }
};

// Parses strict ISO-8601 YYYY-MM-DD. Returns nullopt on malformed input.
std::optional<Date> parse_date(const std::string& text);

// Parse or throw a data error mentioning `context`.
Date parse_date_or_throw(const std::string& text, const std::string& context);

std::string format_date(const Date& d);

// Quarter window [start, end], both endpoints inclusive calendar days. `end`
// plays the role of the quarter-end index t in tenure arithmetic.
struct DateRange {
    Date start;
    Date end;
};

}  // namespace dsc

#endif
