#pragma once

#include <map>
#include <string>
#include <vector>

#include "takeup/config.hpp"
#include "takeup/money.hpp"

namespace takeup {

// All statutory magnitudes for one calendar year. Values are configurable;
// the shipped defaults mirror the simulation settings described alongside
// the benefit rules (15 EUR/sqm recognised-rent cap, 19 percent heating
// share, 80 percent coverage rule) without claiming statutory fidelity.

struct ChildRateBracket {
    int age_min = 0;
    int age_max = 0;  // inclusive
    Money rate;
};

// Earned-income disregard: flat base amount, then a retained fraction of
// gross within each bracket.
struct DisregardBracket {
    Money lower;
    Money upper;  // exclusive; upper == Money max for the open bracket
    double retained_fraction = 0.0;
};

struct EarningsDisregard {
    Money base;
    std::vector<DisregardBracket> brackets;  // strictly increasing, disjoint

    Money at(Money gross) const {
        Money d = min(base, gross);
        for (const auto& b : brackets) {
            if (gross <= b.lower) break;
            const Money span = min(gross, b.upper) - b.lower;
            d += span * b.retained_fraction;
        }
        return d;
    }
};

// Piecewise-linear gross -> net mapping. Segments cover [0, inf); slopes
// must be non-negative so the mapping is monotone.
struct NetSegment {
    Money lower;         // segment start (gross)
    Money net_at_lower;  // net at the segment start
    double slope = 1.0;
};

struct NetIncomeFunction {
    std::vector<NetSegment> segments;  // sorted by lower, first lower == 0

    Money at(Money gross) const {
        const NetSegment* seg = &segments.front();
        for (const auto& s : segments) {
            if (gross < s.lower) break;
            seg = &s;
        }
        return seg->net_at_lower + (gross - seg->lower) * seg->slope;
    }
};

struct PolicyYearParameters {
    int year = 0;
    Money standard_rate_single;
    Money standard_rate_partner;  // per partner in a couple
    std::vector<ChildRateBracket> standard_rate_child_by_age;
    double single_parent_supplement_share = 0.0;  // of standard_rate_single
    Money rent_cap_per_sqm;
    double heating_share = 0.19;
    EarningsDisregard earnings_disregard;
    NetIncomeFunction net_income_function;
    Money wealth_threshold_base;       // per adult
    Money wealth_threshold_per_child;
    double hb_coverage_factor = 0.8;
    // HB: fraction of recognised rent, tapered linearly in countable income.
    double hb_rent_share = 0.6;
    double hb_income_taper = 0.3;
    // SCB: flat per-child amount, phased out linearly above an income floor.
    Money scb_per_child;
    Money scb_income_floor;
    double scb_taper = 0.5;
    double cpi_index = 1.0;  // deflator relative to 2020

    Money child_rate(int age) const {
        for (const auto& b : standard_rate_child_by_age)
            if (age >= b.age_min && age <= b.age_max) return b.rate;
        throw DomainError("no child standard rate bracket for age " + std::to_string(age) +
                          " (policy year " + std::to_string(year) + ")");
    }

    void validate() const {
        auto nonneg = [this](Money m, const char* what) {
            if (m < Money::zero())
                throw ConfigError(std::string(what) + " negative in policy year " +
                                  std::to_string(year));
        };
        nonneg(standard_rate_single, "standard_rate_single");
        nonneg(standard_rate_partner, "standard_rate_partner");
        nonneg(rent_cap_per_sqm, "rent_cap_per_sqm");
        nonneg(wealth_threshold_base, "wealth_threshold_base");
        nonneg(wealth_threshold_per_child, "wealth_threshold_per_child");
        nonneg(scb_per_child, "scb_per_child");
        nonneg(earnings_disregard.base, "earnings_disregard base");
        if (!(heating_share > 0.0 && heating_share < 1.0))
            throw ConfigError("heating_share must lie in (0,1)");
        if (!(hb_coverage_factor > 0.0 && hb_coverage_factor <= 1.0))
            throw ConfigError("hb_coverage_factor must lie in (0,1]");
        if (cpi_index <= 0.0) throw ConfigError("cpi_index must be positive");
        Money prev = Money(-1);
        for (const auto& b : standard_rate_child_by_age) {
            if (b.age_min > b.age_max) throw ConfigError("child rate bracket ages reversed");
            nonneg(b.rate, "child standard rate");
        }
        for (const auto& b : earnings_disregard.brackets) {
            if (!(b.lower < b.upper)) throw ConfigError("disregard bracket bounds not increasing");
            if (b.lower < prev) throw ConfigError("disregard brackets overlap");
            if (b.retained_fraction < 0.0 || b.retained_fraction > 1.0)
                throw ConfigError("disregard retained fraction outside [0,1]");
            prev = b.upper;
        }
        if (net_income_function.segments.empty() ||
            net_income_function.segments.front().lower != Money::zero())
            throw ConfigError("net income function must start at gross 0");
        Money last_lower = Money(-1);
        Money last_net = Money::zero();
        for (const auto& s : net_income_function.segments) {
            if (s.slope < 0.0) throw ConfigError("net income function slope negative");
            if (s.lower <= last_lower) throw ConfigError("net income segments not increasing");
            if (s.net_at_lower < last_net)
                throw ConfigError("net income function not monotone at segment joins");
            last_lower = s.lower;
            last_net = s.net_at_lower;
        }
    }
};

inline PolicyYearParameters default_policy(int year) {
    PolicyYearParameters p;
    p.year = year;
    p.standard_rate_single = parse_money("563");
    p.standard_rate_partner = parse_money("506");
    p.standard_rate_child_by_age = {
        {0, 5, parse_money("357")},
        {6, 13, parse_money("390")},
        {14, 17, parse_money("471")},
        {18, 24, parse_money("451")},
    };
    p.single_parent_supplement_share = 0.12;
    p.rent_cap_per_sqm = parse_money("15");
    p.heating_share = 0.19;
    p.earnings_disregard.base = parse_money("100");
    p.earnings_disregard.brackets = {
        {parse_money("100"), parse_money("1000"), 0.20},
        {parse_money("1000"), parse_money("1200"), 0.10},
    };
    p.net_income_function.segments = {
        {parse_money("0"), parse_money("0"), 1.0},
        {parse_money("450"), parse_money("450"), 0.78},
        {parse_money("1300"), parse_money("1113"), 0.65},
    };
    p.wealth_threshold_base = parse_money("10000");
    p.wealth_threshold_per_child = parse_money("3100");
    p.hb_coverage_factor = 0.8;
    p.hb_rent_share = 0.6;
    p.hb_income_taper = 0.3;
    p.scb_per_child = parse_money("185");
    p.scb_income_floor = parse_money("600");
    p.scb_taper = 0.5;
    p.cpi_index = 1.0;
    return p;
}

namespace detail {

// "0-5:250 6-13:308" -> brackets; "100-1000:0.2" for disregard ranges.
inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace detail

inline PolicyYearParameters parse_policy_section(const Config::Section& sec) {
    const std::string year_str = sec.name.substr(sec.name.find(' ') + 1);
    PolicyYearParameters p = default_policy(static_cast<int>(parse_long(year_str)));

    auto money_if = [&](const char* key, Money& dst) {
        if (sec.has(key)) dst = parse_money(sec.get(key));
    };
    money_if("standard_rate_single", p.standard_rate_single);
    money_if("standard_rate_partner", p.standard_rate_partner);
    money_if("rent_cap_per_sqm", p.rent_cap_per_sqm);
    money_if("wealth_threshold_base", p.wealth_threshold_base);
    money_if("wealth_threshold_per_child", p.wealth_threshold_per_child);
    money_if("scb_per_child", p.scb_per_child);
    money_if("scb_income_floor", p.scb_income_floor);
    p.heating_share = sec.get_double_or("heating_share", p.heating_share);
    p.single_parent_supplement_share =
        sec.get_double_or("single_parent_supplement_share", p.single_parent_supplement_share);
    p.hb_coverage_factor = sec.get_double_or("hb_coverage_factor", p.hb_coverage_factor);
    p.hb_rent_share = sec.get_double_or("hb_rent_share", p.hb_rent_share);
    p.hb_income_taper = sec.get_double_or("hb_income_taper", p.hb_income_taper);
    p.scb_taper = sec.get_double_or("scb_taper", p.scb_taper);
    p.cpi_index = sec.get_double_or("cpi_index", p.cpi_index);

    if (sec.has("standard_rate_child")) {
        p.standard_rate_child_by_age.clear();
        for (const auto& tok : detail::split_ws(sec.get("standard_rate_child"))) {
            auto colon = tok.find(':');
            auto dash = tok.find('-');
            if (colon == std::string::npos || dash == std::string::npos || dash > colon)
                throw ConfigError("malformed child rate bracket: " + tok);
            ChildRateBracket b;
            b.age_min = static_cast<int>(parse_long(tok.substr(0, dash)));
            b.age_max = static_cast<int>(parse_long(tok.substr(dash + 1, colon - dash - 1)));
            b.rate = parse_money(tok.substr(colon + 1));
            p.standard_rate_child_by_age.push_back(b);
        }
    }
    if (sec.has("earnings_disregard")) {
        // "base:100 100-1000:0.2 1000-1200:0.1"
        p.earnings_disregard.brackets.clear();
        for (const auto& tok : detail::split_ws(sec.get("earnings_disregard"))) {
            auto colon = tok.find(':');
            if (colon == std::string::npos) throw ConfigError("malformed disregard token: " + tok);
            if (tok.rfind("base:", 0) == 0) {
                p.earnings_disregard.base = parse_money(tok.substr(5));
                continue;
            }
            auto dash = tok.find('-');
            if (dash == std::string::npos || dash > colon)
                throw ConfigError("malformed disregard bracket: " + tok);
            DisregardBracket b;
            b.lower = parse_money(tok.substr(0, dash));
            b.upper = parse_money(tok.substr(dash + 1, colon - dash - 1));
            b.retained_fraction = parse_double(tok.substr(colon + 1));
            p.earnings_disregard.brackets.push_back(b);
        }
    }
    if (sec.has("net_income")) {
        // "lower:net_at_lower:slope ..." e.g. "0:0:1.0 450:450:0.78"
        p.net_income_function.segments.clear();
        for (const auto& tok : detail::split_ws(sec.get("net_income"))) {
            auto c1 = tok.find(':');
            auto c2 = tok.find(':', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw ConfigError("malformed net income segment: " + tok);
            NetSegment s;
            s.lower = parse_money(tok.substr(0, c1));
            s.net_at_lower = parse_money(tok.substr(c1 + 1, c2 - c1 - 1));
            s.slope = parse_double(tok.substr(c2 + 1));
            p.net_income_function.segments.push_back(s);
        }
    }
    p.validate();
    return p;
}

// year -> parameters, parsed from every [policy YYYY] section.
class PolicySet {
  public:
    PolicySet() = default;

    static PolicySet from_config(const Config& cfg) {
        PolicySet ps;
        for (const Config::Section* sec : cfg.sections_named("policy")) {
            PolicyYearParameters p = parse_policy_section(*sec);
            ps.by_year_[p.year] = p;
        }
        if (ps.by_year_.empty()) throw ConfigError("config contains no [policy YYYY] section");
        return ps;
    }

    static PolicySet defaults(int first_year, int last_year) {
        PolicySet ps;
        for (int y = first_year; y <= last_year; ++y) ps.by_year_[y] = default_policy(y);
        return ps;
    }

    const PolicyYearParameters& for_year(int year) const {
        auto it = by_year_.find(year);
        if (it == by_year_.end())
            throw ConfigError("no policy parameters configured for year " + std::to_string(year));
        return it->second;
    }

    void add(const PolicyYearParameters& p) { by_year_[p.year] = p; }

    bool has_year(int year) const { return by_year_.count(year) != 0; }

    double cpi(int year) const { return for_year(year).cpi_index; }

    const std::map<int, PolicyYearParameters>& all() const { return by_year_; }

  private:
    std::map<int, PolicyYearParameters> by_year_;
};

}  // namespace takeup
