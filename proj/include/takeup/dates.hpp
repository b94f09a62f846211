#pragma once

#include <cstdio>
#include <string>

#include "takeup/common.hpp"

namespace takeup {

// Proleptic Gregorian day arithmetic (days_from_civil / civil_from_days).
// Day numbers count from 1970-01-01 = 0; spells use inclusive end dates.

inline long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
    return era * 146097 + static_cast<long>(doe) - 719468;
}

struct Date {
    int year = 1970;
    unsigned month = 1;  // 1..12
    unsigned day = 1;    // 1..31

    long serial() const { return days_from_civil(year, month, day); }

    static Date from_serial(long z) {
        z += 719468;
        const long era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const long y = static_cast<long>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return Date{static_cast<int>(y + (m <= 2)), m, d};
    }

    friend auto operator<=>(const Date&, const Date&) = default;

    std::string iso() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
        return buf;
    }
};

inline bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline unsigned days_in_month(int y, unsigned m) {
    static const unsigned n[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : n[m - 1];
}

inline Date parse_iso_date(const std::string& s) {
    int y;
    unsigned m, d;
    char c1, c2;
    if (std::sscanf(s.c_str(), "%d%c%u%c%u", &y, &c1, &m, &c2, &d) != 5 || c1 != '-' ||
        c2 != '-' || m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
        throw SchemaError("malformed ISO date: " + s);
    }
    return Date{y, m, d};
}

// Calendar quarter index: year*4 + quarter-of-year (0-based). Total order,
// adjacent quarters differ by 1.
struct Quarter {
    int index = 0;

    Quarter() = default;
    explicit Quarter(int idx) : index(idx) {}
    Quarter(int year, int quarter_of_year)  // quarter_of_year in 1..4
        : index(year * 4 + quarter_of_year - 1) {}

    int year() const { return index >= 0 ? index / 4 : (index - 3) / 4; }
    int quarter_of_year() const { return index - year() * 4 + 1; }

    Date first_day() const {
        return Date{year(), static_cast<unsigned>(3 * (quarter_of_year() - 1) + 1), 1};
    }
    Date last_day() const {
        const unsigned m = static_cast<unsigned>(3 * quarter_of_year());
        return Date{year(), m, days_in_month(year(), m)};
    }
    long num_days() const { return last_day().serial() - first_day().serial() + 1; }

    Quarter prev(int n = 1) const { return Quarter(index - n); }
    friend auto operator<=>(const Quarter&, const Quarter&) = default;
};

// Inclusive-interval overlap in days; 0 when disjoint.
inline long overlap_days(long a_start, long a_end, long b_start, long b_end) {
    const long lo = a_start > b_start ? a_start : b_start;
    const long hi = a_end < b_end ? a_end : b_end;
    return hi >= lo ? hi - lo + 1 : 0;
}

}  // namespace takeup
