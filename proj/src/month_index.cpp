#include "homecare/month_index.hpp"

#include <charconv>
#include <cstdio>

#include "homecare/errors.hpp"

namespace homecare {

MonthIndex parse_month(const std::string& text) {
    int year = 0;
    int month = 0;
    if (text.size() == 7 && text[4] == '-') {
        auto y = std::from_chars(text.data(), text.data() + 4, year);
        auto m = std::from_chars(text.data() + 5, text.data() + 7, month);
        if (y.ec == std::errc{} && y.ptr == text.data() + 4 && m.ec == std::errc{} &&
            m.ptr == text.data() + 7 && month >= 1 && month <= 12) {
            return MonthIndex::from_ym(year, month);
        }
    }
    throw ParseError("invalid month '" + text + "': expected YYYY-MM");
}

std::string format_month(MonthIndex m) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year(), m.month());
    return buf;
}

}  // namespace homecare
