#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "takeup/csv.hpp"
#include "takeup/dates.hpp"
#include "takeup/money.hpp"
#include "takeup/policy.hpp"

namespace takeup {

// Daily administrative spells (UB II receipt and dependent employment) and
// their aggregation into interview-quarter-aligned long-term covariates.
// End dates are inclusive; day counts respect actual calendar days.

struct SpellRecord {
    long person_id = 0;
    long household_id = 0;
    enum class Kind { UbiiReceipt, Employment } kind = Kind::UbiiReceipt;
    Date start;
    Date end;
    Money monthly_gross_wage;  // employment spells only

    void validate() const {
        if (end < start) throw DomainError("spell end before start");
        if (monthly_gross_wage < Money::zero()) throw DomainError("negative spell wage");
        if (kind == Kind::UbiiReceipt && monthly_gross_wage != Money::zero())
            throw DomainError("receipt spell carries a wage");
    }
};

// Lag-year window: the 4 calendar quarters [t-4*lag, t-4*(lag-1)-1] relative
// to interview quarter t. lag=1..3 tile the 12 preceding quarters exactly.
struct QuarterWindow {
    Quarter first;
    Quarter last;  // inclusive
    long first_day() const { return first.first_day().serial(); }
    long last_day() const { return last.last_day().serial(); }
    long num_days() const { return last_day() - first_day() + 1; }
};

inline QuarterWindow lag_year_window(Quarter interview, int lag_year) {
    if (lag_year < 1 || lag_year > 3) throw DomainError("lag_year must be 1, 2 or 3");
    return {interview.prev(4 * lag_year), interview.prev(4 * (lag_year - 1) + 1)};
}

// Spells of one household, split by kind.
struct HouseholdSpells {
    std::vector<SpellRecord> receipt;
    std::vector<SpellRecord> employment;
};

using SpellIndex = std::map<long, HouseholdSpells>;

inline SpellIndex index_spells(const std::vector<SpellRecord>& spells) {
    SpellIndex idx;
    for (const auto& s : spells) {
        s.validate();
        auto& hh = idx[s.household_id];
        (s.kind == SpellRecord::Kind::UbiiReceipt ? hh.receipt : hh.employment).push_back(s);
    }
    return idx;
}

// Days within [win_first, win_last] covered by at least one interval; a day
// counts once per household regardless of how many members cover it.
inline long union_days(const std::vector<SpellRecord>& spells, long win_first, long win_last) {
    std::vector<std::pair<long, long>> clipped;
    for (const auto& s : spells) {
        const long a = std::max(s.start.serial(), win_first);
        const long b = std::min(s.end.serial(), win_last);
        if (a <= b) clipped.emplace_back(a, b);
    }
    std::sort(clipped.begin(), clipped.end());
    long days = 0;
    long cur_start = 0, cur_end = -1;
    bool open = false;
    for (const auto& [a, b] : clipped) {
        if (!open || a > cur_end + 1) {
            if (open) days += cur_end - cur_start + 1;
            cur_start = a;
            cur_end = b;
            open = true;
        } else {
            cur_end = std::max(cur_end, b);
        }
    }
    if (open) days += cur_end - cur_start + 1;
    return days;
}

// Share of days with UB II receipt in the given lag year.
inline double receipt_share(const HouseholdSpells& hh, Quarter interview, int lag_year) {
    const QuarterWindow w = lag_year_window(interview, lag_year);
    const long covered = union_days(hh.receipt, w.first_day(), w.last_day());
    return static_cast<double>(covered) / static_cast<double>(w.num_days());
}

// Monthly-rate earned income of the household in one quarter, deflated to
// 2020 prices and divided by the equivalence weight. Overlapping employment
// spells of one person add up (multiple jobs).
inline double quarterly_income(const HouseholdSpells& hh, Quarter q, double cpi,
                               double oecd_weight) {
    if (!(cpi > 0.0)) throw ConfigError("missing or non-positive deflator for year " +
                                        std::to_string(q.year()));
    if (!(oecd_weight > 0.0)) throw DomainError("non-positive equivalence weight");
    const long qa = q.first_day().serial();
    const long qb = q.last_day().serial();
    const double qdays = static_cast<double>(q.num_days());
    double nominal = 0.0;
    for (const auto& s : hh.employment) {
        const long ov = overlap_days(s.start.serial(), s.end.serial(), qa, qb);
        if (ov > 0)
            nominal += s.monthly_gross_wage.euros() * static_cast<double>(ov) / qdays;
    }
    return nominal / cpi / oecd_weight;
}

// The 12 quarterly incomes preceding the interview quarter, oldest first
// (index 0 = t-12, index 11 = t-1). Quarters without data contribute zero.
inline std::vector<double> quarterly_income_series(const HouseholdSpells& hh, Quarter interview,
                                                   const PolicySet& policy, double oecd_weight) {
    std::vector<double> series(12, 0.0);
    for (int k = 12; k >= 1; --k) {
        const Quarter q = interview.prev(k);
        series[12 - k] = quarterly_income(hh, q, policy.cpi(q.year()), oecd_weight);
    }
    return series;
}

// Year-over-year change of earned income over the 4 quarters preceding the
// interview, standardised by the current UB II need. Quarterly values are
// monthly rates, so a year total is 3x the sum of its four quarters.
inline double income_shock(const std::vector<double>& series, Money current_need) {
    if (!(current_need > Money::zero()))
        throw DomainError("income shock undefined for non-positive need");
    if (series.size() != 12) throw DomainError("income series must span 12 quarters");
    double annual1 = 0.0, annual2 = 0.0;  // t-1..t-4 and t-5..t-8
    for (int i = 8; i < 12; ++i) annual1 += 3.0 * series[i];
    for (int i = 4; i < 8; ++i) annual2 += 3.0 * series[i];
    return (annual1 - annual2) / (12.0 * current_need.euros());
}

// Population standard deviation over the 12 preceding quarterly values.
inline double income_volatility(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    const double n = static_cast<double>(series.size());
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : series) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

enum class CorrectionKind { None, Underreport, Overreport };

struct CorrectedReceipt {
    bool corrected = false;
    CorrectionKind kind = CorrectionKind::None;
};

// Self-reported receipt replaced by the administrative indicator.
inline CorrectedReceipt correct_receipt(bool reported, bool admin) {
    CorrectedReceipt r;
    r.corrected = admin;
    if (!reported && admin) r.kind = CorrectionKind::Underreport;
    else if (reported && !admin) r.kind = CorrectionKind::Overreport;
    return r;
}

inline std::string correction_kind_str(CorrectionKind k) {
    switch (k) {
        case CorrectionKind::Underreport: return "underreport";
        case CorrectionKind::Overreport: return "overreport";
        default: return "none";
    }
}

// Administrative receipt status at the interview: a UB II spell of any
// member covers the first day of the interview quarter.
inline bool admin_receipt_at_interview(const HouseholdSpells& hh, Quarter interview) {
    const long day = interview.first_day().serial();
    for (const auto& s : hh.receipt)
        if (s.start.serial() <= day && day <= s.end.serial()) return true;
    return false;
}

struct LongTermCovariates {
    double receipt_share_lag1 = 0.0;
    double receipt_share_lag2 = 0.0;
    double receipt_share_lag3 = 0.0;
    double income_lag1 = 0.0;  // EUR/month, 2020 prices, equivalised
    double income_lag2 = 0.0;
    double income_lag3 = 0.0;
    double income_shock = 0.0;
    double income_volatility = 0.0;

    void validate() const {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in01(receipt_share_lag1) || !in01(receipt_share_lag2) || !in01(receipt_share_lag3))
            throw DomainError("receipt share outside [0,1]");
        if (income_volatility < 0.0) throw DomainError("negative volatility");
        for (double v : {income_lag1, income_lag2, income_lag3, income_shock, income_volatility})
            if (!std::isfinite(v)) throw DomainError("non-finite long-term covariate");
    }
};

inline LongTermCovariates build_covariates(const HouseholdSpells& hh, Quarter interview,
                                           const PolicySet& policy, double oecd_weight,
                                           Money current_need) {
    LongTermCovariates c;
    c.receipt_share_lag1 = receipt_share(hh, interview, 1);
    c.receipt_share_lag2 = receipt_share(hh, interview, 2);
    c.receipt_share_lag3 = receipt_share(hh, interview, 3);
    const std::vector<double> series = quarterly_income_series(hh, interview, policy, oecd_weight);
    auto window_mean = [&series](int lag) {
        double s = 0.0;
        for (int i = 12 - 4 * lag; i < 12 - 4 * (lag - 1); ++i) s += series[i];
        return s / 4.0;
    };
    c.income_lag1 = window_mean(1);
    c.income_lag2 = window_mean(2);
    c.income_lag3 = window_mean(3);
    c.income_shock = income_shock(series, current_need);
    c.income_volatility = income_volatility(series);
    c.validate();
    return c;
}

// --- delimited-text schema -------------------------------------------------

inline const std::vector<std::string>& spell_columns() {
    static const std::vector<std::string> cols = {"person_id", "household_id", "kind",
                                                  "start",     "end",          "monthly_gross_wage"};
    return cols;
}

inline std::vector<std::string> to_row(const SpellRecord& s) {
    return {std::to_string(s.person_id),
            std::to_string(s.household_id),
            s.kind == SpellRecord::Kind::UbiiReceipt ? "ubii_receipt" : "employment",
            s.start.iso(),
            s.end.iso(),
            s.kind == SpellRecord::Kind::UbiiReceipt ? "NA" : s.monthly_gross_wage.str()};
}

inline SpellRecord spell_from_row(const Table& t, std::size_t i) {
    SpellRecord s;
    s.person_id = parse_long(t.at(i, "person_id"));
    s.household_id = parse_long(t.at(i, "household_id"));
    const std::string& kind = t.at(i, "kind");
    if (kind == "ubii_receipt") s.kind = SpellRecord::Kind::UbiiReceipt;
    else if (kind == "employment") s.kind = SpellRecord::Kind::Employment;
    else throw SchemaError("unknown spell kind: " + kind);
    s.start = parse_iso_date(t.at(i, "start"));
    s.end = parse_iso_date(t.at(i, "end"));
    const std::string& wage = t.at(i, "monthly_gross_wage");
    if (!is_na(wage)) s.monthly_gross_wage = parse_money(wage);
    s.validate();
    return s;
}

inline std::vector<SpellRecord> read_spells(const std::string& path) {
    Table t = Table::read_file(path);
    t.require_columns(spell_columns(), "spell file " + path);
    std::vector<SpellRecord> out;
    out.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(spell_from_row(t, i));
    return out;
}

inline void write_spells(const std::vector<SpellRecord>& spells, const std::string& path) {
    Table t(spell_columns());
    for (const auto& s : spells) t.add_row(to_row(s));
    t.write_file(path);
}

}  // namespace takeup
