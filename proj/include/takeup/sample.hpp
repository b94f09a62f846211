#pragma once

#include <string>
#include <vector>

#include "takeup/household.hpp"
#include "takeup/rules.hpp"
#include "takeup/spells.hpp"

namespace takeup {

// One joined household-wave row: snapshot, simulated entitlement, long-term
// covariates and the misreporting-corrected receipt status. This is the
// record the selection output files carry and the estimator consumes.
struct SampleRow {
    HouseholdSnapshot hh;
    EntitlementResult ent;
    LongTermCovariates cov;
    bool admin_at_interview = false;
    bool corrected_takeup = false;
    CorrectionKind correction = CorrectionKind::None;
};

inline std::vector<std::string> sample_columns() {
    std::vector<std::string> cols = panel_columns();
    for (const auto& c : entitlement_columns())
        if (c != "household_id" && c != "wave_year") cols.push_back(c);
    for (const char* c : {"receipt_share_lag1", "receipt_share_lag2", "receipt_share_lag3",
                          "income_lag1", "income_lag2", "income_lag3", "income_shock",
                          "income_volatility", "admin_ubii_at_interview", "corrected_takeup",
                          "correction_kind"})
        cols.push_back(c);
    return cols;
}

inline std::vector<std::string> to_row(const SampleRow& r) {
    std::vector<std::string> cells = to_row(r.hh);
    std::vector<std::string> ent = to_row(r.ent);
    for (std::size_t i = 2; i < ent.size(); ++i) cells.push_back(ent[i]);  // skip id, year
    cells.push_back(fmt_double(r.cov.receipt_share_lag1));
    cells.push_back(fmt_double(r.cov.receipt_share_lag2));
    cells.push_back(fmt_double(r.cov.receipt_share_lag3));
    cells.push_back(fmt_double(r.cov.income_lag1));
    cells.push_back(fmt_double(r.cov.income_lag2));
    cells.push_back(fmt_double(r.cov.income_lag3));
    cells.push_back(fmt_double(r.cov.income_shock));
    cells.push_back(fmt_double(r.cov.income_volatility));
    cells.push_back(fmt_flag(r.admin_at_interview));
    cells.push_back(fmt_flag(r.corrected_takeup));
    cells.push_back(correction_kind_str(r.correction));
    return cells;
}

inline SampleRow sample_from_row(const Table& t, std::size_t i) {
    SampleRow r;
    r.hh = from_row(t, i);
    r.ent.household_id = r.hh.household_id;
    r.ent.wave_year = r.hh.wave_year;
    r.ent.need_total = parse_money(t.at(i, "need_total"));
    r.ent.countable_income = parse_money(t.at(i, "countable_income"));
    r.ent.entitlement = parse_money(t.at(i, "entitlement"));
    r.ent.relative_income_gap = parse_double(t.at(i, "relative_income_gap"));
    r.ent.hb_amount = parse_money(t.at(i, "hb_amount"));
    r.ent.scb_amount = parse_money(t.at(i, "scb_amount"));
    r.ent.eligible_ubii = parse_flag(t.at(i, "eligible_ubii"));
    r.ent.precedence_blocked = parse_flag(t.at(i, "precedence_blocked"));
    r.ent.wealth_pass = parse_flag(t.at(i, "wealth_pass"));
    r.cov.receipt_share_lag1 = parse_double(t.at(i, "receipt_share_lag1"));
    r.cov.receipt_share_lag2 = parse_double(t.at(i, "receipt_share_lag2"));
    r.cov.receipt_share_lag3 = parse_double(t.at(i, "receipt_share_lag3"));
    r.cov.income_lag1 = parse_double(t.at(i, "income_lag1"));
    r.cov.income_lag2 = parse_double(t.at(i, "income_lag2"));
    r.cov.income_lag3 = parse_double(t.at(i, "income_lag3"));
    r.cov.income_shock = parse_double(t.at(i, "income_shock"));
    r.cov.income_volatility = parse_double(t.at(i, "income_volatility"));
    r.admin_at_interview = parse_flag(t.at(i, "admin_ubii_at_interview"));
    r.corrected_takeup = parse_flag(t.at(i, "corrected_takeup"));
    const std::string& kind = t.at(i, "correction_kind");
    if (kind == "none") r.correction = CorrectionKind::None;
    else if (kind == "underreport") r.correction = CorrectionKind::Underreport;
    else if (kind == "overreport") r.correction = CorrectionKind::Overreport;
    else throw SchemaError("unknown correction kind: " + kind);
    return r;
}

inline void write_sample(const std::vector<SampleRow>& rows, const std::string& path) {
    Table t(sample_columns());
    for (const auto& r : rows) t.add_row(to_row(r));
    t.write_file(path);
}

inline std::vector<SampleRow> read_sample(const std::string& path) {
    Table t = Table::read_file(path);
    t.require_columns(sample_columns(), "sample file " + path);
    std::vector<SampleRow> out;
    out.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(sample_from_row(t, i));
    return out;
}

}  // namespace takeup
