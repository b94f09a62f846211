#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "takeup/common.hpp"

namespace takeup {

// Currency in exact cents. All benefit arithmetic happens on this type;
// fractions (caps, disregard rates) round to the nearest cent, half away
// from zero.
struct Money {
    std::int64_t cents = 0;

    constexpr Money() = default;
    constexpr explicit Money(std::int64_t c) : cents(c) {}

    static Money from_euros(double e) { return Money(llround_checked(e * 100.0)); }
    double euros() const { return static_cast<double>(cents) / 100.0; }

    friend constexpr Money operator+(Money a, Money b) { return Money(a.cents + b.cents); }
    friend constexpr Money operator-(Money a, Money b) { return Money(a.cents - b.cents); }
    Money& operator+=(Money b) { cents += b.cents; return *this; }
    Money& operator-=(Money b) { cents -= b.cents; return *this; }
    friend constexpr auto operator<=>(Money a, Money b) = default;

    // Scale by a real factor, rounding to cents.
    friend Money operator*(Money a, double f) {
        return Money(llround_checked(static_cast<double>(a.cents) * f));
    }
    friend Money operator*(double f, Money a) { return a * f; }
    friend Money operator*(Money a, int n) { return Money(a.cents * n); }

    static constexpr Money zero() { return Money(0); }

    std::string str() const {
        const bool neg = cents < 0;
        std::int64_t a = neg ? -cents : cents;
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", neg ? "-" : "",
                      static_cast<long long>(a / 100), static_cast<long long>(a % 100));
        return buf;
    }

  private:
    static std::int64_t llround_checked(double v) {
        if (!std::isfinite(v)) throw DomainError("Money: non-finite amount");
        return std::llround(v);
    }
};

inline Money max(Money a, Money b) { return a.cents >= b.cents ? a : b; }
inline Money min(Money a, Money b) { return a.cents <= b.cents ? a : b; }

// Strict decimal parser: optional sign, digits, optionally '.' and at most
// two fraction digits. Rejects anything else.
inline Money parse_money(const std::string& s) {
    if (s.empty()) throw SchemaError("empty money field");
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '-' || s[i] == '+') { neg = s[i] == '-'; ++i; }
    if (i == s.size()) throw SchemaError("malformed money value: " + s);
    std::int64_t whole = 0;
    bool any = false;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
        whole = whole * 10 + (s[i] - '0');
        any = true;
    }
    std::int64_t frac = 0;
    if (i < s.size()) {
        if (s[i] != '.' || !any) throw SchemaError("malformed money value: " + s);
        ++i;
        int digits = 0;
        for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
            if (++digits > 2) throw SchemaError("money has sub-cent precision: " + s);
            frac = frac * 10 + (s[i] - '0');
        }
        if (digits == 0) throw SchemaError("malformed money value: " + s);
        if (digits == 1) frac *= 10;
    }
    if (i != s.size()) throw SchemaError("malformed money value: " + s);
    std::int64_t c = whole * 100 + frac;
    return Money(neg ? -c : c);
}

}  // namespace takeup
