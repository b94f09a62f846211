#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "takeup/household.hpp"
#include "takeup/rules.hpp"

namespace takeup {

// Ordered exclusion cascade. Every filter is a pure predicate on a
// household-wave row (given its entitlement and household history), applied
// in the documented order; the ledger records survivors per year after each
// step. Permuting filters changes the per-step counts but never the final
// surviving set.

struct CascadeRow {
    const HouseholdSnapshot* hh = nullptr;
    const EntitlementResult* ent = nullptr;
    bool head_changes = false;  // head person id differs across observed waves
};

using FilterPredicate = std::function<bool(const CascadeRow&)>;  // true = keep

struct Filter {
    std::string name;
    FilterPredicate keep;
};

inline std::vector<Filter> default_filters() {
    auto any_member = [](const HouseholdSnapshot& hh, auto pred) {
        return std::any_of(hh.members.begin(), hh.members.end(), pred);
    };
    return {
        {"missing_interview", [](const CascadeRow& r) { return r.hh->interview_complete; }},
        {"multiple_communities", [](const CascadeRow& r) { return r.hh->n_communities <= 1; }},
        {"non_core_family", [](const CascadeRow& r) { return r.hh->core_family; }},
        {"inconsistent_wage",
         [any_member](const CascadeRow& r) {
             return !any_member(*r.hh, [](const Member& m) {
                 return m.employed && m.gross_earnings == Money::zero();
             });
         }},
        {"inconsistent_partner",
         [](const CascadeRow& r) { return !(r.hh->head_partnered && r.hh->partner() == nullptr); }},
        {"pensioner_present",
         [any_member](const CascadeRow& r) {
             return !any_member(*r.hh, [](const Member& m) { return m.pensioner; });
         }},
        {"student_head_or_partner",
         [](const CascadeRow& r) {
             if (r.hh->head().student_or_trainee) return false;
             const Member* p = r.hh->partner();
             return !(p && p->student_or_trainee);
         }},
        {"refugee_sample",
         [](const CascadeRow& r) { return r.hh->sample_origin != SampleOrigin::Refugee; }},
        {"simulated_ineligible", [](const CascadeRow& r) { return r.ent->eligible_ubii; }},
        {"changing_head", [](const CascadeRow& r) { return !r.head_changes; }},
        {"missing_regressors", [](const CascadeRow& r) { return r.hh->education_head.has_value(); }},
        {"no_admin_link", [](const CascadeRow& r) { return r.hh->admin_linked; }},
    };
}

struct SelectionLedger {
    std::vector<int> years;
    // One row per step: "initial" followed by each applied filter; counts are
    // survivors per year plus the total.
    struct Row {
        std::string name;
        std::map<int, long> per_year;
        long total = 0;
    };
    std::vector<Row> rows;
    // Take-up split among survivors of the eligibility filter (corrected
    // receipt), mirroring the "thereof" rows of the selection table.
    std::map<int, long> takeup_yes;
    std::map<int, long> takeup_no;
    bool has_takeup_split = false;
};

struct CascadeResult {
    SelectionLedger ledger;
    // Survivors of all filters up to but excluding the eligibility filter:
    // the sample on which the non-take-up and beta-error rates are computed.
    std::vector<std::size_t> rates_sample;
    // Survivors of the full cascade: the estimation sample.
    std::vector<std::size_t> estimation_sample;
};

struct SelectionConfig {
    std::set<std::string> disabled;

    void validate() const {
        std::set<std::string> known;
        for (const auto& f : default_filters()) known.insert(f.name);
        for (const auto& d : disabled)
            if (!known.count(d)) throw ConfigError("unknown selection filter: " + d);
    }
};

inline std::set<long> households_with_changing_head(const std::vector<HouseholdSnapshot>& panel) {
    std::map<long, long> first_head;
    std::set<long> changing;
    for (const auto& hh : panel) {
        const long head_id = hh.head().person_id;
        auto [it, inserted] = first_head.emplace(hh.household_id, head_id);
        if (!inserted && it->second != head_id) changing.insert(hh.household_id);
    }
    return changing;
}

// `corrected_receipt(i)` supplies the corrected take-up flag for panel row i
// (used only for the ledger's take-up split); pass nullptr when the admin
// correction has not been joined yet.
inline CascadeResult apply_cascade(const std::vector<HouseholdSnapshot>& panel,
                                   const std::vector<EntitlementResult>& entitlements,
                                   const SelectionConfig& config,
                                   const std::function<bool(std::size_t)>* corrected_receipt =
                                       nullptr) {
    if (panel.size() != entitlements.size())
        throw DomainError("panel and entitlement row counts differ");
    config.validate();

    const std::set<long> changing = households_with_changing_head(panel);
    std::vector<CascadeRow> rows(panel.size());
    std::set<int> year_set;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        rows[i] = {&panel[i], &entitlements[i], changing.count(panel[i].household_id) != 0};
        year_set.insert(panel[i].wave_year);
    }

    CascadeResult res;
    res.ledger.years.assign(year_set.begin(), year_set.end());

    std::vector<std::size_t> alive(panel.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;

    auto count_row = [&](const std::string& name, const std::vector<std::size_t>& ids) {
        SelectionLedger::Row row;
        row.name = name;
        for (int y : res.ledger.years) row.per_year[y] = 0;
        for (std::size_t i : ids) ++row.per_year[panel[i].wave_year];
        row.total = static_cast<long>(ids.size());
        res.ledger.rows.push_back(std::move(row));
    };

    count_row("initial", alive);
    for (const auto& f : default_filters()) {
        if (config.disabled.count(f.name)) continue;
        if (f.name == "simulated_ineligible") res.rates_sample = alive;
        std::vector<std::size_t> next;
        next.reserve(alive.size());
        for (std::size_t i : alive)
            if (f.keep(rows[i])) next.push_back(i);
        alive = std::move(next);
        count_row(f.name, alive);
        if (f.name == "simulated_ineligible" && corrected_receipt) {
            res.ledger.has_takeup_split = true;
            for (int y : res.ledger.years) {
                res.ledger.takeup_yes[y] = 0;
                res.ledger.takeup_no[y] = 0;
            }
            for (std::size_t i : alive) {
                auto& slot = (*corrected_receipt)(i) ? res.ledger.takeup_yes : res.ledger.takeup_no;
                ++slot[panel[i].wave_year];
            }
        }
    }
    if (res.rates_sample.empty() && config.disabled.count("simulated_ineligible"))
        res.rates_sample = alive;
    res.estimation_sample = std::move(alive);
    return res;
}

struct TakeupCounts {
    std::map<int, long> takeup;
    std::map<int, long> non_takeup;
    long total_takeup = 0;
    long total_non_takeup = 0;

    // Unweighted non-take-up rate: non-take-up / eligible.
    double unweighted_ntr() const {
        const long n = total_takeup + total_non_takeup;
        if (n == 0) throw DomainError("non-take-up rate undefined on empty sample");
        return static_cast<double>(total_non_takeup) / static_cast<double>(n);
    }
};

inline TakeupCounts takeup_counts(const std::vector<HouseholdSnapshot>& panel,
                                  const std::vector<std::size_t>& sample,
                                  const std::function<bool(std::size_t)>& corrected_receipt) {
    TakeupCounts c;
    for (std::size_t i : sample) {
        const int y = panel[i].wave_year;
        if (corrected_receipt(i)) {
            ++c.takeup[y];
            ++c.total_takeup;
        } else {
            ++c.non_takeup[y];
            ++c.total_non_takeup;
        }
    }
    return c;
}

// Ledger as delimited text: rows = steps, columns = years + total.
inline void write_ledger(const SelectionLedger& ledger, const std::string& path) {
    std::vector<std::string> header = {"step"};
    for (int y : ledger.years) header.push_back(std::to_string(y));
    header.push_back("total");
    Table t(header);
    for (const auto& row : ledger.rows) {
        std::vector<std::string> cells = {row.name};
        for (int y : ledger.years) cells.push_back(std::to_string(row.per_year.at(y)));
        cells.push_back(std::to_string(row.total));
        t.add_row(cells);
    }
    if (ledger.has_takeup_split) {
        for (auto [name, counts] :
             {std::pair{"thereof_non_takeup", &ledger.takeup_no},
              std::pair{"thereof_takeup", &ledger.takeup_yes}}) {
            std::vector<std::string> cells = {name};
            long total = 0;
            for (int y : ledger.years) {
                const long c = counts->at(y);
                cells.push_back(std::to_string(c));
                total += c;
            }
            cells.push_back(std::to_string(total));
            t.add_row(cells);
        }
    }
    t.write_file(path);
}

}  // namespace takeup
