#pragma once

#include <map>
#include <vector>

#include "takeup/household.hpp"
#include "takeup/policy.hpp"

namespace takeup {

// Simulated means test for one household snapshot: needs, countable income,
// entitlement b = max(need - income, 0), the upstream benefits (HB, SCB) and
// the precedence outcome. Pure functions over immutable inputs.

struct EntitlementResult {
    long household_id = 0;
    int wave_year = 0;
    Money need_total;        // standard rates + supplements + recognised housing
    Money countable_income;
    Money entitlement;       // max(need - income, 0)
    double relative_income_gap = 0.0;  // entitlement / need, in [0,1]
    Money hb_amount;
    Money scb_amount;
    bool eligible_ubii = false;
    bool precedence_blocked = false;
    bool wealth_pass = false;
};

// Recognised housing cost: reported cost capped at rent_cap_per_sqm * sqm.
// Home owners report their housing cost in the same field and face the same
// cap.
inline Money recognized_housing(const HouseholdSnapshot& hh, const PolicyYearParameters& p) {
    const Money cap = p.rent_cap_per_sqm * hh.dwelling_sqm;
    return min(hh.rent_incl_heating, cap);
}

inline Money compute_need(const HouseholdSnapshot& hh, const PolicyYearParameters& p) {
    hh.validate();
    const bool couple = hh.partner() != nullptr;
    Money need;
    for (const auto& m : hh.members) {
        switch (m.role) {
            case Role::Head:
            case Role::Partner:
                need += couple ? p.standard_rate_partner : p.standard_rate_single;
                break;
            case Role::Child:
                need += p.child_rate(m.age);
                break;
        }
    }
    if (!couple && hh.n_children() >= 1)
        need += p.standard_rate_single * p.single_parent_supplement_share;
    need += recognized_housing(hh, p);
    return need;
}

// y = sum over members of max(net(gross) - disregard(gross) + other, 0).
inline Money countable_income(const HouseholdSnapshot& hh, const PolicyYearParameters& p) {
    Money y;
    for (const auto& m : hh.members) {
        if (m.gross_earnings < Money::zero() || m.other_income < Money::zero())
            throw DomainError("negative input income");
        const Money earned =
            p.net_income_function.at(m.gross_earnings) - p.earnings_disregard.at(m.gross_earnings);
        y += max(earned + m.other_income, Money::zero());
    }
    return y;
}

// Notional HB from the parameterised schedule. HB is assessed on the rent
// exclusive of heating (a fixed share of the gross rent counts as heating),
// and granted only when countable income plus the notional amount covers at
// least hb_coverage_factor of the UB II need (inclusive at the boundary).
inline Money compute_housing_benefit(const HouseholdSnapshot& hh, const PolicyYearParameters& p) {
    const Money rent_cold = recognized_housing(hh, p) * (1.0 - p.heating_share);
    const Money income = countable_income(hh, p);
    const Money need = compute_need(hh, p);
    const Money notional =
        max(rent_cold * p.hb_rent_share - income * p.hb_income_taper, Money::zero());
    if (notional == Money::zero()) return Money::zero();
    if (income + notional >= need * p.hb_coverage_factor) return notional;
    return Money::zero();
}

inline Money compute_scb(const HouseholdSnapshot& hh, const PolicyYearParameters& p) {
    const int kids = hh.n_children();
    if (kids == 0) return Money::zero();
    const Money income = countable_income(hh, p);
    const Money excess = max(income - p.scb_income_floor, Money::zero());
    return max(p.scb_per_child * kids - excess * p.scb_taper, Money::zero());
}

// Households become ineligible to UB II once HB and/or SCB *exceed* the
// UB II entitlement; a tie keeps UB II.
inline bool precedence_blocked(Money ubii_entitlement, Money hb, Money scb) {
    if (hb < Money::zero() || scb < Money::zero() || ubii_entitlement < Money::zero())
        throw DomainError("precedence amounts must be non-negative");
    return hb + scb > ubii_entitlement;
}

inline bool wealth_pass(const HouseholdSnapshot& hh, const PolicyYearParameters& p) {
    const Money threshold = p.wealth_threshold_base * hh.n_adults() +
                            p.wealth_threshold_per_child * hh.n_children();
    return hh.wealth_class_midpoint <= threshold;
}

inline EntitlementResult compute_entitlement(const HouseholdSnapshot& hh,
                                             const PolicyYearParameters& p) {
    EntitlementResult r;
    r.household_id = hh.household_id;
    r.wave_year = hh.wave_year;
    r.need_total = compute_need(hh, p);
    r.countable_income = countable_income(hh, p);
    r.entitlement = max(r.need_total - r.countable_income, Money::zero());
    r.relative_income_gap = r.need_total > Money::zero()
                                ? static_cast<double>(r.entitlement.cents) /
                                      static_cast<double>(r.need_total.cents)
                                : 0.0;
    r.hb_amount = compute_housing_benefit(hh, p);
    r.scb_amount = compute_scb(hh, p);
    r.wealth_pass = wealth_pass(hh, p);
    r.precedence_blocked = precedence_blocked(r.entitlement, r.hb_amount, r.scb_amount);
    r.eligible_ubii =
        r.wealth_pass && !r.precedence_blocked && r.entitlement > Money::zero();
    return r;
}

inline std::vector<EntitlementResult> simulate_population(
    const std::vector<HouseholdSnapshot>& panel, const PolicySet& params) {
    for (const auto& hh : panel) {
        if (!params.has_year(hh.wave_year))
            throw ConfigError("missing policy parameters for year " +
                              std::to_string(hh.wave_year));
    }
    std::vector<EntitlementResult> out;
    out.reserve(panel.size());
    for (const auto& hh : panel) out.push_back(compute_entitlement(hh, params.for_year(hh.wave_year)));
    return out;
}

// --- delimited-text schema -------------------------------------------------

inline const std::vector<std::string>& entitlement_columns() {
    static const std::vector<std::string> cols = {
        "household_id", "wave_year",      "need_total", "countable_income",
        "entitlement",  "relative_income_gap", "hb_amount",  "scb_amount",
        "eligible_ubii", "precedence_blocked", "wealth_pass"};
    return cols;
}

inline std::vector<std::string> to_row(const EntitlementResult& r) {
    return {std::to_string(r.household_id),
            std::to_string(r.wave_year),
            r.need_total.str(),
            r.countable_income.str(),
            r.entitlement.str(),
            fmt_double(r.relative_income_gap),
            r.hb_amount.str(),
            r.scb_amount.str(),
            fmt_flag(r.eligible_ubii),
            fmt_flag(r.precedence_blocked),
            fmt_flag(r.wealth_pass)};
}

inline EntitlementResult entitlement_from_row(const Table& t, std::size_t i) {
    EntitlementResult r;
    r.household_id = parse_long(t.at(i, "household_id"));
    r.wave_year = static_cast<int>(parse_long(t.at(i, "wave_year")));
    r.need_total = parse_money(t.at(i, "need_total"));
    r.countable_income = parse_money(t.at(i, "countable_income"));
    r.entitlement = parse_money(t.at(i, "entitlement"));
    r.relative_income_gap = parse_double(t.at(i, "relative_income_gap"));
    r.hb_amount = parse_money(t.at(i, "hb_amount"));
    r.scb_amount = parse_money(t.at(i, "scb_amount"));
    r.eligible_ubii = parse_flag(t.at(i, "eligible_ubii"));
    r.precedence_blocked = parse_flag(t.at(i, "precedence_blocked"));
    r.wealth_pass = parse_flag(t.at(i, "wealth_pass"));
    return r;
}

inline void write_entitlements(const std::vector<EntitlementResult>& rs, const std::string& path) {
    Table t(entitlement_columns());
    for (const auto& r : rs) t.add_row(to_row(r));
    t.write_file(path);
}

inline std::vector<EntitlementResult> read_entitlements(const std::string& path) {
    Table t = Table::read_file(path);
    t.require_columns(entitlement_columns(), "entitlement file " + path);
    std::vector<EntitlementResult> out;
    out.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(entitlement_from_row(t, i));
    return out;
}

}  // namespace takeup
