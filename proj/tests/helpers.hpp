#pragma once

// Shared builders for synthetic households and spells used across the test
// suites.

#include "takeup/household.hpp"
#include "takeup/policy.hpp"
#include "takeup/rng.hpp"
#include "takeup/spells.hpp"

namespace test_helpers {

using namespace takeup;

inline Member adult(long pid, Role role, int age, const std::string& gross = "0",
                    const std::string& other = "0") {
    Member m;
    m.person_id = pid;
    m.role = role;
    m.age = age;
    m.gross_earnings = parse_money(gross);
    m.other_income = parse_money(other);
    m.employed = m.gross_earnings > Money::zero();
    return m;
}

inline Member child(long pid, int age) {
    Member m;
    m.person_id = pid;
    m.role = Role::Child;
    m.age = age;
    m.employable = false;
    return m;
}

inline HouseholdSnapshot single_household(long id, int year, const std::string& gross,
                                          const std::string& rent, double sqm,
                                          const std::string& other = "0") {
    HouseholdSnapshot hh;
    hh.household_id = id;
    hh.wave_year = year;
    hh.interview_quarter = Quarter(year, 2);
    hh.members = {adult(id * 10 + 1, Role::Head, 35, gross, other)};
    hh.rent_incl_heating = parse_money(rent);
    hh.dwelling_sqm = sqm;
    hh.education_head = 1;
    hh.reported_disposable_income = parse_money("900");
    return hh;
}

inline HouseholdSnapshot random_household(Rng& rng, long id, int year) {
    HouseholdSnapshot hh;
    hh.household_id = id;
    hh.wave_year = year;
    hh.interview_quarter = Quarter(year, rng.uniform_int(1, 4));
    const bool couple = rng.bernoulli(0.4);
    const int kids = rng.uniform_int(0, 3);
    hh.members.push_back(adult(id * 10 + 1, Role::Head, rng.uniform_int(20, 60),
                               std::to_string(rng.uniform_int(0, 2500)),
                               std::to_string(rng.uniform_int(0, 300))));
    if (couple)
        hh.members.push_back(adult(id * 10 + 2, Role::Partner, rng.uniform_int(20, 60),
                                   std::to_string(rng.uniform_int(0, 2000))));
    for (int c = 0; c < kids; ++c) hh.members.push_back(child(id * 10 + 3 + c, rng.uniform_int(0, 17)));
    hh.head_partnered = couple;
    hh.rent_incl_heating = parse_money(std::to_string(rng.uniform_int(150, 1400)));
    hh.dwelling_sqm = rng.uniform_int(25, 120);
    hh.home_owner = rng.bernoulli(0.15);
    hh.wealth_class_midpoint = parse_money(std::to_string(rng.uniform_int(0, 20000)));
    hh.region = rng.bernoulli(0.3) ? Region::East : Region::West;
    hh.municipality_size_class = rng.uniform_int(0, 3);
    hh.education_head = rng.uniform_int(0, 3);
    hh.sex_head = rng.bernoulli(0.5) ? Sex::Female : Sex::Male;
    hh.sample_origin = rng.bernoulli(0.5) ? SampleOrigin::Admin : SampleOrigin::GenPop;
    hh.survey_weight = 0.2 + 5.0 * rng.uniform();
    hh.reported_ubii = rng.bernoulli(0.5);
    hh.reported_disposable_income = parse_money(std::to_string(rng.uniform_int(300, 3000)));
    return hh;
}

inline SpellRecord spell(long pid, long hid, SpellRecord::Kind kind, const std::string& start,
                         const std::string& end, const std::string& wage = "0") {
    SpellRecord s;
    s.person_id = pid;
    s.household_id = hid;
    s.kind = kind;
    s.start = parse_iso_date(start);
    s.end = parse_iso_date(end);
    if (kind == SpellRecord::Kind::Employment) s.monthly_gross_wage = parse_money(wage);
    return s;
}

// Day-level brute force for receipt shares: enumerate every day of the
// window and test membership in any receipt spell. Independent of the
// interval implementation.
inline double brute_force_share(const std::vector<SpellRecord>& receipt, Quarter interview,
                                int lag) {
    const QuarterWindow w = lag_year_window(interview, lag);
    long covered = 0;
    for (long day = w.first_day(); day <= w.last_day(); ++day) {
        for (const auto& s : receipt) {
            if (s.start.serial() <= day && day <= s.end.serial()) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered) / static_cast<double>(w.num_days());
}

// Day-level brute force for quarterly income: every day contributes
// wage/days_in_quarter for every spell covering it.
inline double brute_force_income(const std::vector<SpellRecord>& employment, Quarter q,
                                 double cpi, double oecd) {
    const long qa = q.first_day().serial();
    const long qb = q.last_day().serial();
    double total = 0.0;
    for (long day = qa; day <= qb; ++day) {
        for (const auto& s : employment) {
            if (s.start.serial() <= day && day <= s.end.serial())
                total += s.monthly_gross_wage.euros() / static_cast<double>(q.num_days());
        }
    }
    return total / cpi / oecd;
}

}  // namespace test_helpers
