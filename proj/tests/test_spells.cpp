#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "takeup/spells.hpp"

using namespace takeup;
using namespace test_helpers;

using Kind = SpellRecord::Kind;

TEST_CASE("lag windows tile the 12 preceding quarters") {
    const Quarter t(2019, 3);
    const QuarterWindow w1 = lag_year_window(t, 1);
    const QuarterWindow w2 = lag_year_window(t, 2);
    const QuarterWindow w3 = lag_year_window(t, 3);
    CHECK(w1.last.index == t.index - 1);
    CHECK(w1.first.index == t.index - 4);
    CHECK(w2.last.index == w1.first.index - 1);
    CHECK(w3.last.index == w2.first.index - 1);
    CHECK(w3.first.index == t.index - 12);
    // contiguous in days as well
    CHECK(w2.last_day() + 1 == w1.first_day());
    CHECK(w3.last_day() + 1 == w2.first_day());
    CHECK_THROWS_AS(lag_year_window(t, 4), DomainError);
}

TEST_CASE("receipt share: full coverage, none, and a 73-day spell") {
    HouseholdSpells hh;
    const Quarter t(2019, 1);
    SECTION("no spells") { CHECK(receipt_share(hh, t, 1) == 0.0); }
    SECTION("full lag-1 coverage") {
        hh.receipt.push_back(spell(1, 1, Kind::UbiiReceipt, "2018-01-01", "2018-12-31"));
        CHECK(receipt_share(hh, t, 1) == 1.0);
    }
    SECTION("73 of 365 days") {
        // 2018 has 365 days; a spell of 73 days inside the window
        hh.receipt.push_back(spell(1, 1, Kind::UbiiReceipt, "2018-03-01", "2018-05-12"));
        CHECK(parse_iso_date("2018-05-12").serial() - parse_iso_date("2018-03-01").serial() + 1 ==
              73);
        CHECK_THAT(receipt_share(hh, t, 1), Catch::Matchers::WithinAbs(0.2, 1e-15));
    }
}

TEST_CASE("receipt days count once per household across members") {
    HouseholdSpells hh;
    hh.receipt.push_back(spell(1, 1, Kind::UbiiReceipt, "2018-01-01", "2018-06-30"));
    hh.receipt.push_back(spell(2, 1, Kind::UbiiReceipt, "2018-04-01", "2018-12-31"));
    CHECK(receipt_share(hh, Quarter(2019, 1), 1) == 1.0);
}

TEST_CASE("quarterly income: overlap weighting, deflation, equivalence") {
    HouseholdSpells hh;
    const Quarter q(2019, 2);
    SECTION("no employment") { CHECK(quarterly_income(hh, q, 1.0, 1.0) == 0.0); }
    SECTION("full quarter at 1000, weight 1") {
        hh.employment.push_back(spell(1, 1, Kind::Employment, "2019-04-01", "2019-06-30", "1000"));
        CHECK_THAT(quarterly_income(hh, q, 1.0, 1.0), Catch::Matchers::WithinRel(1000.0, 1e-12));
    }
    SECTION("couple with a 10-year-old child: OECD weight 1.8") {
        hh.employment.push_back(spell(1, 1, Kind::Employment, "2019-01-01", "2019-12-31", "1800"));
        CHECK_THAT(quarterly_income(hh, q, 1.0, 1.8), Catch::Matchers::WithinRel(1000.0, 1e-12));
    }
    SECTION("deflation divides by the index") {
        hh.employment.push_back(spell(1, 1, Kind::Employment, "2019-04-01", "2019-06-30", "1000"));
        CHECK_THAT(quarterly_income(hh, q, 1.25, 1.0), Catch::Matchers::WithinRel(800.0, 1e-12));
    }
    SECTION("missing deflator is a configuration error") {
        CHECK_THROWS_AS(quarterly_income(hh, q, 0.0, 1.0), ConfigError);
    }
}

TEST_CASE("oecd equivalence weights") {
    HouseholdSnapshot hh = single_household(1, 2019, "0", "400", 50.0);
    CHECK(hh.oecd_weight() == 1.0);
    hh.members.push_back(adult(12, Role::Partner, 30));
    hh.members.push_back(child(13, 10));
    CHECK_THAT(hh.oecd_weight(), Catch::Matchers::WithinAbs(1.8, 1e-15));
    hh.members.push_back(child(14, 14));
    CHECK_THAT(hh.oecd_weight(), Catch::Matchers::WithinAbs(2.3, 1e-15));
}

TEST_CASE("income shock examples") {
    std::vector<double> series(12, 0.0);
    const Money need = parse_money("963");
    SECTION("identical years -> 0") {
        for (int i = 4; i < 12; ++i) series[i] = 700.0;
        CHECK(income_shock(series, need) == 0.0);
    }
    SECTION("all zero -> 0") { CHECK(income_shock(series, need) == 0.0); }
    SECTION("drop from 12x need to zero -> -1") {
        // lag-2 year: monthly rate = need in each of its 4 quarters
        for (int i = 4; i < 8; ++i) series[i] = need.euros();
        CHECK_THAT(income_shock(series, need), Catch::Matchers::WithinAbs(-1.0, 1e-12));
    }
    SECTION("non-positive need is a domain error") {
        CHECK_THROWS_AS(income_shock(series, Money::zero()), DomainError);
    }
}

TEST_CASE("income volatility: population standard deviation") {
    std::vector<double> series(12, 500.0);
    CHECK(income_volatility(series) == 0.0);
    series.assign(12, 0.0);
    CHECK(income_volatility(series) == 0.0);
    for (int i = 0; i < 6; ++i) series[i] = 2000.0;  // six 0s, six 2000s
    CHECK_THAT(income_volatility(series), Catch::Matchers::WithinRel(1000.0, 1e-12));
}

TEST_CASE("receipt correction: replace reported with administrative") {
    CHECK(correct_receipt(true, true).corrected == true);
    CHECK(correct_receipt(true, true).kind == CorrectionKind::None);
    CHECK(correct_receipt(false, true).corrected == true);
    CHECK(correct_receipt(false, true).kind == CorrectionKind::Underreport);
    CHECK(correct_receipt(true, false).corrected == false);
    CHECK(correct_receipt(true, false).kind == CorrectionKind::Overreport);
    CHECK(correct_receipt(false, false).kind == CorrectionKind::None);
}

TEST_CASE("property: interval aggregation equals day-level brute force") {
    Rng rng(31);
    const Quarter t(2019, 3);
    for (int rep = 0; rep < 200; ++rep) {
        HouseholdSpells hh;
        const int n = rng.uniform_int(0, 8);
        for (int s = 0; s < n; ++s) {
            const long anchor = Quarter(2016, 1).first_day().serial() + rng.uniform_int(0, 1300);
            const long len = rng.uniform_int(1, 500);
            SpellRecord rec;
            rec.person_id = rng.uniform_int(1, 3);
            rec.household_id = 1;
            rec.kind = Kind::UbiiReceipt;
            rec.start = Date::from_serial(anchor);
            rec.end = Date::from_serial(anchor + len - 1);
            hh.receipt.push_back(rec);
        }
        for (int lag = 1; lag <= 3; ++lag) {
            CHECK(receipt_share(hh, t, lag) == brute_force_share(hh.receipt, t, lag));
        }
    }
}

TEST_CASE("property: quarterly incomes equal day-level brute force") {
    Rng rng(32);
    for (int rep = 0; rep < 100; ++rep) {
        HouseholdSpells hh;
        const int n = rng.uniform_int(0, 6);
        for (int s = 0; s < n; ++s) {
            const long anchor = Quarter(2016, 1).first_day().serial() + rng.uniform_int(0, 1300);
            const long len = rng.uniform_int(1, 400);
            SpellRecord rec;
            rec.person_id = rng.uniform_int(1, 3);
            rec.household_id = 1;
            rec.kind = Kind::Employment;
            rec.start = Date::from_serial(anchor);
            rec.end = Date::from_serial(anchor + len - 1);
            rec.monthly_gross_wage = parse_money(std::to_string(rng.uniform_int(500, 4000)));
            hh.employment.push_back(rec);
        }
        for (int k = 1; k <= 12; ++k) {
            const Quarter q = Quarter(2019, 3).prev(k);
            const double fast = quarterly_income(hh, q, 1.0, 1.3);
            const double slow = brute_force_income(hh.employment, q, 1.0, 1.3);
            CHECK_THAT(fast, Catch::Matchers::WithinAbs(slow, 1e-9));
        }
    }
}

TEST_CASE("property: splitting a spell leaves aggregates unchanged") {
    Rng rng(33);
    const Quarter t(2019, 2);
    const PolicySet policy = PolicySet::defaults(2015, 2019);
    for (int rep = 0; rep < 100; ++rep) {
        const long anchor = Quarter(2016, 2).first_day().serial() + rng.uniform_int(0, 900);
        const long len = rng.uniform_int(10, 600);
        SpellRecord whole;
        whole.person_id = 1;
        whole.household_id = 1;
        whole.kind = rng.bernoulli(0.5) ? Kind::UbiiReceipt : Kind::Employment;
        whole.start = Date::from_serial(anchor);
        whole.end = Date::from_serial(anchor + len - 1);
        if (whole.kind == Kind::Employment)
            whole.monthly_gross_wage = parse_money(std::to_string(rng.uniform_int(500, 3000)));

        const long cut = rng.uniform_int(1, static_cast<int>(len) - 1);
        SpellRecord left = whole, right = whole;
        left.end = Date::from_serial(anchor + cut - 1);
        right.start = Date::from_serial(anchor + cut);

        HouseholdSpells one, two;
        (whole.kind == Kind::UbiiReceipt ? one.receipt : one.employment).push_back(whole);
        auto& dst = whole.kind == Kind::UbiiReceipt ? two.receipt : two.employment;
        dst.push_back(left);
        dst.push_back(right);

        const LongTermCovariates a = build_covariates(one, t, policy, 1.5, parse_money("900"));
        const LongTermCovariates b = build_covariates(two, t, policy, 1.5, parse_money("900"));
        CHECK(a.receipt_share_lag1 == b.receipt_share_lag1);
        CHECK(a.receipt_share_lag2 == b.receipt_share_lag2);
        CHECK(a.receipt_share_lag3 == b.receipt_share_lag3);
        CHECK_THAT(a.income_lag1, Catch::Matchers::WithinAbs(b.income_lag1, 1e-9));
        CHECK_THAT(a.income_volatility, Catch::Matchers::WithinAbs(b.income_volatility, 1e-9));
        CHECK_THAT(a.income_shock, Catch::Matchers::WithinAbs(b.income_shock, 1e-12));
    }
}

TEST_CASE("property: scaling wages and deflator together leaves real income unchanged") {
    Rng rng(34);
    for (int rep = 0; rep < 50; ++rep) {
        HouseholdSpells base, scaled;
        const double factor = 1.0 + 3.0 * rng.uniform();
        const int n = rng.uniform_int(1, 5);
        for (int s = 0; s < n; ++s) {
            const long anchor = Quarter(2018, 1).first_day().serial() + rng.uniform_int(0, 300);
            SpellRecord rec;
            rec.person_id = 1;
            rec.household_id = 1;
            rec.kind = Kind::Employment;
            rec.start = Date::from_serial(anchor);
            rec.end = Date::from_serial(anchor + rng.uniform_int(5, 200));
            const double wage = rng.uniform_int(500, 3000);
            rec.monthly_gross_wage = Money::from_euros(wage);
            base.employment.push_back(rec);
            rec.monthly_gross_wage = Money::from_euros(wage * factor);
            scaled.employment.push_back(rec);
        }
        const Quarter q(2018, 3);
        const double a = quarterly_income(base, q, 1.0, 1.0);
        const double b = quarterly_income(scaled, q, factor, 1.0);
        // exact up to the cent quantisation of the scaled wages
        CHECK_THAT(b, Catch::Matchers::WithinAbs(a, 0.005 * n));
    }
}

TEST_CASE("admin receipt at interview: first day of the quarter") {
    HouseholdSpells hh;
    hh.receipt.push_back(spell(1, 1, Kind::UbiiReceipt, "2019-04-01", "2019-04-01"));
    CHECK(admin_receipt_at_interview(hh, Quarter(2019, 2)));
    CHECK_FALSE(admin_receipt_at_interview(hh, Quarter(2019, 3)));
}

TEST_CASE("spell records validate and round trip through text") {
    std::vector<SpellRecord> spells = {
        spell(1, 1, Kind::UbiiReceipt, "2018-01-05", "2018-03-31"),
        spell(2, 1, Kind::Employment, "2018-02-01", "2018-07-15", "1450.50"),
    };
    const std::string path = "/tmp/takeup_test_spells.csv";
    write_spells(spells, path);
    const auto back = read_spells(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].kind == Kind::UbiiReceipt);
    CHECK(back[1].monthly_gross_wage.cents == 145050);
    CHECK(back[1].start.iso() == "2018-02-01");

    SpellRecord bad = spells[0];
    bad.end = parse_iso_date("2017-01-01");
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = spells[0];
    bad.monthly_gross_wage = parse_money("10");
    CHECK_THROWS_AS(bad.validate(), DomainError);  // receipt spells carry no wage
}

TEST_CASE("covariates validate their ranges") {
    LongTermCovariates c;
    c.receipt_share_lag1 = 1.5;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = LongTermCovariates{};
    c.income_volatility = -1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}
