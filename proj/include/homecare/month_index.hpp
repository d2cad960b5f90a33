#pragma once

#include <compare>
#include <string>

namespace homecare {

/// Linear calendar-month coordinate: value = year*12 + (month-1).
/// Total order matches calendar order, and differences count months.
struct MonthIndex {
    int value = 0;

    static MonthIndex from_ym(int year, int month) { return MonthIndex{year * 12 + (month - 1)}; }

    int year() const { return value / 12; }
    int month() const { return value % 12 + 1; }  // 1..12

    MonthIndex next() const { return MonthIndex{value + 1}; }
    MonthIndex plus(int months) const { return MonthIndex{value + months}; }

    auto operator<=>(const MonthIndex&) const = default;
};

/// Parses "YYYY-MM". Throws ParseError on malformed input.
MonthIndex parse_month(const std::string& text);

/// Formats as "YYYY-MM".
std::string format_month(MonthIndex m);

}  // namespace homecare
