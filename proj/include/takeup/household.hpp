#pragma once

#include <optional>
#include <string>
#include <vector>

#include "takeup/csv.hpp"
#include "takeup/dates.hpp"
#include "takeup/money.hpp"

namespace takeup {

enum class Role { Head, Partner, Child };
enum class Region { West, East };
enum class SampleOrigin { Admin, GenPop, Refugee };
enum class Migration { None, FirstGen, SecondGen };
enum class Sex { Male, Female };

struct Member {
    long person_id = 0;
    Role role = Role::Head;
    int age = 0;
    Money gross_earnings;
    Money other_income;
    bool student_or_trainee = false;
    bool pensioner = false;
    bool early_retirement_self_assessed = false;
    bool disabled = false;
    bool employable = true;
    bool employed = false;  // current primary status: gainful employment
};

// One household at one interview wave. Besides the fields the benefit rules
// consume, the row carries the integrity flags the selection cascade tests
// and the reported benefit indicators the misreporting correction compares
// against the administrative records.
struct HouseholdSnapshot {
    long household_id = 0;
    int wave_year = 0;
    Quarter interview_quarter;
    std::vector<Member> members;
    Money rent_incl_heating;
    double dwelling_sqm = 0.0;
    bool home_owner = false;
    Money wealth_class_midpoint;
    Region region = Region::West;
    int municipality_size_class = 0;  // 0: <50k, 1: >=50k periph, 2: 50k-500k core, 3: >=500k core
    Migration migration_background_head = Migration::None;
    std::optional<int> education_head;  // 0..3, nullopt = missing regressor
    Sex sex_head = Sex::Male;
    SampleOrigin sample_origin = SampleOrigin::Admin;
    bool reported_ubii = false;
    bool reported_hb = false;
    bool reported_scb = false;
    bool admin_linked = true;
    bool interview_complete = true;
    int n_communities = 1;
    bool core_family = true;
    bool head_partnered = false;  // roster references a partner
    Money reported_disposable_income;
    double survey_weight = 1.0;

    const Member& head() const {
        for (const auto& m : members)
            if (m.role == Role::Head) return m;
        throw DomainError("household " + std::to_string(household_id) + " has no head");
    }

    const Member* partner() const {
        for (const auto& m : members)
            if (m.role == Role::Partner) return &m;
        return nullptr;
    }

    int n_adults() const { return 1 + (partner() != nullptr ? 1 : 0); }

    int n_children() const {
        int n = 0;
        for (const auto& m : members) n += m.role == Role::Child;
        return n;
    }

    bool has_child_under(int age_limit) const {
        for (const auto& m : members)
            if (m.role == Role::Child && m.age <= age_limit) return true;
        return false;
    }

    // Modified OECD scale: 1.0 for the head, 0.5 per further member aged 14
    // or older, 0.3 per child under 14.
    double oecd_weight() const {
        double w = 0.0;
        bool head_seen = false;
        for (const auto& m : members) {
            if (m.role == Role::Head && !head_seen) {
                w += 1.0;
                head_seen = true;
            } else {
                w += m.age >= 14 ? 0.5 : 0.3;
            }
        }
        return w;
    }

    void validate() const {
        int heads = 0, partners = 0;
        for (const auto& m : members) {
            heads += m.role == Role::Head;
            partners += m.role == Role::Partner;
            if (m.role == Role::Child && m.age >= 25)
                throw DomainError("household " + std::to_string(household_id) +
                                  ": child aged " + std::to_string(m.age) +
                                  " outside the community of needs");
            if (m.gross_earnings < Money::zero() || m.other_income < Money::zero())
                throw DomainError("household " + std::to_string(household_id) +
                                  ": negative member income");
            if (m.age < 0) throw DomainError("negative age");
        }
        if (heads != 1)
            throw DomainError("household " + std::to_string(household_id) +
                              ": expected exactly one head, found " + std::to_string(heads));
        if (partners > 1)
            throw DomainError("household " + std::to_string(household_id) + ": multiple partners");
        if (rent_incl_heating < Money::zero() || wealth_class_midpoint < Money::zero())
            throw DomainError("household " + std::to_string(household_id) + ": negative amount");
        if (rent_incl_heating > Money::zero() && !(dwelling_sqm > 0.0))
            throw DomainError("household " + std::to_string(household_id) +
                              ": positive rent with non-positive dwelling size");
        if (!(survey_weight >= 0.0))
            throw DomainError("household " + std::to_string(household_id) + ": negative weight");
    }
};

// --- delimited-text schema -------------------------------------------------

inline const std::vector<std::string>& panel_columns() {
    static const std::vector<std::string> cols = {
        "household_id", "wave_year", "interview_quarter", "members", "rent_incl_heating",
        "dwelling_sqm", "home_owner", "wealth_class_midpoint", "region",
        "municipality_size_class", "migration_background_head", "education_head", "sex_head",
        "sample_origin", "reported_ubii", "reported_hb", "reported_scb", "admin_linked",
        "interview_complete", "n_communities", "core_family", "head_partnered",
        "reported_disposable_income", "survey_weight"};
    return cols;
}

namespace detail {

inline std::string encode_member(const Member& m) {
    std::string role = m.role == Role::Head ? "h" : (m.role == Role::Partner ? "p" : "c");
    std::string flags;
    for (bool f : {m.student_or_trainee, m.pensioner, m.early_retirement_self_assessed,
                   m.disabled, m.employable, m.employed})
        flags += f ? '1' : '0';
    return role + ":" + std::to_string(m.person_id) + ":" + std::to_string(m.age) + ":" +
           m.gross_earnings.str() + ":" + m.other_income.str() + ":" + flags;
}

inline Member decode_member(const std::string& tok) {
    auto parts = split(tok, ':');
    if (parts.size() != 6) throw SchemaError("malformed member token: " + tok);
    Member m;
    if (parts[0] == "h") m.role = Role::Head;
    else if (parts[0] == "p") m.role = Role::Partner;
    else if (parts[0] == "c") m.role = Role::Child;
    else throw SchemaError("unknown member role: " + parts[0]);
    m.person_id = parse_long(parts[1]);
    m.age = static_cast<int>(parse_long(parts[2]));
    m.gross_earnings = parse_money(parts[3]);
    m.other_income = parse_money(parts[4]);
    const std::string& f = parts[5];
    if (f.size() != 6) throw SchemaError("member flags must be 6 digits: " + tok);
    m.student_or_trainee = f[0] == '1';
    m.pensioner = f[1] == '1';
    m.early_retirement_self_assessed = f[2] == '1';
    m.disabled = f[3] == '1';
    m.employable = f[4] == '1';
    m.employed = f[5] == '1';
    return m;
}

}  // namespace detail

inline std::string quarter_str(Quarter q) {
    return std::to_string(q.year()) + "Q" + std::to_string(q.quarter_of_year());
}

inline Quarter parse_quarter(const std::string& s) {
    auto pos = s.find('Q');
    if (pos == std::string::npos) throw SchemaError("malformed quarter: " + s);
    const int year = static_cast<int>(parse_long(s.substr(0, pos)));
    const int qoy = static_cast<int>(parse_long(s.substr(pos + 1)));
    if (qoy < 1 || qoy > 4) throw SchemaError("quarter of year outside 1..4: " + s);
    return Quarter(year, qoy);
}

inline std::vector<std::string> to_row(const HouseholdSnapshot& h) {
    std::string members;
    for (std::size_t i = 0; i < h.members.size(); ++i) {
        if (i) members += '|';
        members += detail::encode_member(h.members[i]);
    }
    std::string mig = h.migration_background_head == Migration::None     ? "none"
                      : h.migration_background_head == Migration::FirstGen ? "first_gen"
                                                                           : "second_gen";
    std::string origin = h.sample_origin == SampleOrigin::Admin    ? "admin"
                         : h.sample_origin == SampleOrigin::GenPop ? "genpop"
                                                                   : "refugee";
    return {std::to_string(h.household_id),
            std::to_string(h.wave_year),
            quarter_str(h.interview_quarter),
            members,
            h.rent_incl_heating.str(),
            fmt_double(h.dwelling_sqm),
            fmt_flag(h.home_owner),
            h.wealth_class_midpoint.str(),
            h.region == Region::East ? "east" : "west",
            std::to_string(h.municipality_size_class),
            mig,
            h.education_head ? std::to_string(*h.education_head) : "NA",
            h.sex_head == Sex::Female ? "female" : "male",
            origin,
            fmt_flag(h.reported_ubii),
            fmt_flag(h.reported_hb),
            fmt_flag(h.reported_scb),
            fmt_flag(h.admin_linked),
            fmt_flag(h.interview_complete),
            std::to_string(h.n_communities),
            fmt_flag(h.core_family),
            fmt_flag(h.head_partnered),
            h.reported_disposable_income.str(),
            fmt_double(h.survey_weight)};
}

inline HouseholdSnapshot from_row(const Table& t, std::size_t i) {
    HouseholdSnapshot h;
    h.household_id = parse_long(t.at(i, "household_id"));
    h.wave_year = static_cast<int>(parse_long(t.at(i, "wave_year")));
    h.interview_quarter = parse_quarter(t.at(i, "interview_quarter"));
    for (const auto& tok : split(t.at(i, "members"), '|'))
        if (!tok.empty()) h.members.push_back(detail::decode_member(tok));
    h.rent_incl_heating = parse_money(t.at(i, "rent_incl_heating"));
    h.dwelling_sqm = parse_double(t.at(i, "dwelling_sqm"));
    h.home_owner = parse_flag(t.at(i, "home_owner"));
    h.wealth_class_midpoint = parse_money(t.at(i, "wealth_class_midpoint"));
    const std::string& reg = t.at(i, "region");
    if (reg == "east") h.region = Region::East;
    else if (reg == "west") h.region = Region::West;
    else throw SchemaError("unknown region: " + reg);
    h.municipality_size_class = static_cast<int>(parse_long(t.at(i, "municipality_size_class")));
    if (h.municipality_size_class < 0 || h.municipality_size_class > 3)
        throw SchemaError("municipality_size_class outside 0..3");
    const std::string& mig = t.at(i, "migration_background_head");
    if (mig == "none") h.migration_background_head = Migration::None;
    else if (mig == "first_gen") h.migration_background_head = Migration::FirstGen;
    else if (mig == "second_gen") h.migration_background_head = Migration::SecondGen;
    else throw SchemaError("unknown migration background: " + mig);
    const std::string& edu = t.at(i, "education_head");
    if (!is_na(edu)) {
        const int e = static_cast<int>(parse_long(edu));
        if (e < 0 || e > 3) throw SchemaError("education_head outside 0..3");
        h.education_head = e;
    }
    const std::string& sx = t.at(i, "sex_head");
    if (sx == "female") h.sex_head = Sex::Female;
    else if (sx == "male") h.sex_head = Sex::Male;
    else throw SchemaError("unknown sex: " + sx);
    const std::string& origin = t.at(i, "sample_origin");
    if (origin == "admin") h.sample_origin = SampleOrigin::Admin;
    else if (origin == "genpop") h.sample_origin = SampleOrigin::GenPop;
    else if (origin == "refugee") h.sample_origin = SampleOrigin::Refugee;
    else throw SchemaError("unknown sample origin: " + origin);
    h.reported_ubii = parse_flag(t.at(i, "reported_ubii"));
    h.reported_hb = parse_flag(t.at(i, "reported_hb"));
    h.reported_scb = parse_flag(t.at(i, "reported_scb"));
    h.admin_linked = parse_flag(t.at(i, "admin_linked"));
    h.interview_complete = parse_flag(t.at(i, "interview_complete"));
    h.n_communities = static_cast<int>(parse_long(t.at(i, "n_communities")));
    h.core_family = parse_flag(t.at(i, "core_family"));
    h.head_partnered = parse_flag(t.at(i, "head_partnered"));
    h.reported_disposable_income = parse_money(t.at(i, "reported_disposable_income"));
    h.survey_weight = parse_double(t.at(i, "survey_weight"));
    h.validate();
    return h;
}

inline std::vector<HouseholdSnapshot> read_panel(const std::string& path) {
    Table t = Table::read_file(path);
    t.require_columns(panel_columns(), "panel file " + path);
    std::vector<HouseholdSnapshot> out;
    out.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(from_row(t, i));
    return out;
}

inline void write_panel(const std::vector<HouseholdSnapshot>& panel, const std::string& path) {
    Table t(panel_columns());
    for (const auto& h : panel) t.add_row(to_row(h));
    t.write_file(path);
}

}  // namespace takeup
