#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "takeup/selection.hpp"

using namespace takeup;
using namespace test_helpers;

namespace {

struct PanelFixture {
    std::vector<HouseholdSnapshot> panel;
    std::vector<EntitlementResult> ents;

    void add(HouseholdSnapshot hh, bool eligible = true) {
        EntitlementResult e;
        e.household_id = hh.household_id;
        e.wave_year = hh.wave_year;
        e.need_total = parse_money("900");
        e.entitlement = eligible ? parse_money("400") : Money::zero();
        e.relative_income_gap = eligible ? 0.44 : 0.0;
        e.eligible_ubii = eligible;
        e.wealth_pass = true;
        panel.push_back(std::move(hh));
        ents.push_back(e);
    }
};

HouseholdSnapshot clean_row(long id, int year) {
    HouseholdSnapshot hh = single_household(id, year, "0", "400", 50.0);
    hh.admin_linked = true;
    return hh;
}

}  // namespace

TEST_CASE("empty panel yields a ledger of zeros") {
    const CascadeResult res = apply_cascade({}, {}, SelectionConfig{});
    CHECK(res.estimation_sample.empty());
    for (const auto& row : res.ledger.rows) CHECK(row.total == 0);
    CHECK(res.ledger.rows.size() == default_filters().size() + 1);
}

TEST_CASE("a clean eligible linked row survives every filter") {
    PanelFixture f;
    f.add(clean_row(1, 2019));
    const CascadeResult res = apply_cascade(f.panel, f.ents, SelectionConfig{});
    REQUIRE(res.estimation_sample.size() == 1);
    REQUIRE(res.rates_sample.size() == 1);
    for (const auto& row : res.ledger.rows) CHECK(row.total == 1);
}

TEST_CASE("one violation per filter: ledger matches the hand enumeration") {
    PanelFixture f;
    // 13 rows: one clean, one violating each of the 12 filters.
    f.add(clean_row(1, 2019));

    HouseholdSnapshot hh = clean_row(2, 2019);
    hh.interview_complete = false;
    f.add(hh);

    hh = clean_row(3, 2019);
    hh.n_communities = 2;
    f.add(hh);

    hh = clean_row(4, 2019);
    hh.core_family = false;
    f.add(hh);

    hh = clean_row(5, 2019);
    hh.members[0].employed = true;
    hh.members[0].gross_earnings = Money::zero();
    f.add(hh);

    hh = clean_row(6, 2019);
    hh.head_partnered = true;  // partner referenced but absent
    f.add(hh);

    hh = clean_row(7, 2019);
    hh.members[0].pensioner = true;
    f.add(hh);

    hh = clean_row(8, 2019);
    hh.members[0].student_or_trainee = true;
    f.add(hh);

    hh = clean_row(9, 2019);
    hh.sample_origin = SampleOrigin::Refugee;
    f.add(hh);

    f.add(clean_row(10, 2019), /*eligible=*/false);

    // changing head across waves: two rows of household 11
    hh = clean_row(11, 2018);
    f.add(hh);
    hh = clean_row(11, 2019);
    hh.members[0].person_id = 999;
    f.add(hh);

    hh = clean_row(12, 2019);
    hh.education_head.reset();
    f.add(hh);

    hh = clean_row(13, 2019);
    hh.admin_linked = false;
    f.add(hh);

    const CascadeResult res = apply_cascade(f.panel, f.ents, SelectionConfig{});

    // survivors after each step, 2018 and 2019 by hand:
    // initial 14; missing_interview -1; multiple_communities -1; non_core -1;
    // wage -1; partner -1; pensioner -1; student -1; refugee -1;
    // ineligible -1; changing head -2; missing regressors -1; no link -1.
    const std::vector<long> expected_totals = {14, 13, 12, 11, 10, 9, 8, 7, 6, 5, 3, 2, 1};
    REQUIRE(res.ledger.rows.size() == expected_totals.size());
    for (std::size_t i = 0; i < expected_totals.size(); ++i) {
        CHECK(res.ledger.rows[i].total == expected_totals[i]);
    }
    CHECK(res.estimation_sample == std::vector<std::size_t>{0});
    // rates sample: survivors before the eligibility filter
    CHECK(res.rates_sample.size() == 6);
}

TEST_CASE("cascade is idempotent") {
    Rng rng(5);
    PanelFixture f;
    for (int i = 0; i < 60; ++i) {
        HouseholdSnapshot hh = random_household(rng, 100 + i, 2018 + i % 3);
        hh.interview_complete = !rng.bernoulli(0.1);
        hh.admin_linked = !rng.bernoulli(0.1);
        if (rng.bernoulli(0.1)) hh.members[0].pensioner = true;
        f.add(hh, rng.bernoulli(0.7));
    }
    const CascadeResult once = apply_cascade(f.panel, f.ents, SelectionConfig{});
    std::vector<HouseholdSnapshot> panel2;
    std::vector<EntitlementResult> ents2;
    for (std::size_t i : once.estimation_sample) {
        panel2.push_back(f.panel[i]);
        ents2.push_back(f.ents[i]);
    }
    const CascadeResult twice = apply_cascade(panel2, ents2, SelectionConfig{});
    CHECK(twice.estimation_sample.size() == once.estimation_sample.size());
}

TEST_CASE("property: filter order changes counts but never the final set") {
    Rng rng(6);
    PanelFixture f;
    for (int i = 0; i < 80; ++i) {
        HouseholdSnapshot hh = random_household(rng, 200 + i, 2018 + i % 2);
        hh.interview_complete = !rng.bernoulli(0.15);
        hh.core_family = !rng.bernoulli(0.1);
        hh.admin_linked = !rng.bernoulli(0.15);
        if (rng.bernoulli(0.08)) hh.members[0].student_or_trainee = true;
        if (rng.bernoulli(0.08)) hh.education_head.reset();
        f.add(hh, rng.bernoulli(0.6));
    }
    const std::set<long> changing = households_with_changing_head(f.panel);
    std::vector<CascadeRow> rows(f.panel.size());
    for (std::size_t i = 0; i < f.panel.size(); ++i)
        rows[i] = {&f.panel[i], &f.ents[i], changing.count(f.panel[i].household_id) != 0};

    auto survivors_with_order = [&rows](std::vector<Filter> filters) {
        std::vector<std::size_t> alive;
        for (std::size_t i = 0; i < rows.size(); ++i) alive.push_back(i);
        for (const auto& flt : filters) {
            std::vector<std::size_t> next;
            for (std::size_t i : alive)
                if (flt.keep(rows[i])) next.push_back(i);
            alive = std::move(next);
        }
        return alive;
    };

    std::vector<Filter> filters = default_filters();
    const auto reference = survivors_with_order(filters);
    std::mt19937 shuffler(17);
    for (int rep = 0; rep < 10; ++rep) {
        std::shuffle(filters.begin(), filters.end(), shuffler);
        CHECK(survivors_with_order(filters) == reference);
    }
}

TEST_CASE("takeup counts and unweighted NTR") {
    PanelFixture f;
    std::vector<std::size_t> sample;
    for (int i = 0; i < 10; ++i) {
        f.add(clean_row(300 + i, 2019));
        sample.push_back(i);
    }
    auto corrected = [](std::size_t i) { return i >= 4; };  // 4 non-take-up of 10
    const TakeupCounts c = takeup_counts(f.panel, sample, corrected);
    CHECK(c.total_takeup == 6);
    CHECK(c.total_non_takeup == 4);
    CHECK_THAT(c.unweighted_ntr(), Catch::Matchers::WithinAbs(0.4, 1e-15));

    // paper-shaped check: 28,998 eligible with 5,055 non-take-up -> 17.4 %
    TakeupCounts paper;
    paper.total_takeup = 23943;
    paper.total_non_takeup = 5055;
    CHECK_THAT(paper.unweighted_ntr(), Catch::Matchers::WithinAbs(0.174, 5e-4));

    const TakeupCounts none = takeup_counts(f.panel, {}, corrected);
    CHECK_THROWS_AS(none.unweighted_ntr(), DomainError);
}

TEST_CASE("unknown filter name in config is a configuration error") {
    SelectionConfig cfg;
    cfg.disabled.insert("no_such_filter");
    CHECK_THROWS_AS(apply_cascade({}, {}, cfg), ConfigError);
}

TEST_CASE("disabling the eligibility filter keeps ineligible rows") {
    PanelFixture f;
    f.add(clean_row(1, 2019), true);
    f.add(clean_row(2, 2019), false);
    SelectionConfig cfg;
    cfg.disabled.insert("simulated_ineligible");
    const CascadeResult res = apply_cascade(f.panel, f.ents, cfg);
    CHECK(res.estimation_sample.size() == 2);
}

TEST_CASE("ledger writes the documented table shape") {
    PanelFixture f;
    f.add(clean_row(1, 2018));
    f.add(clean_row(2, 2019));
    std::function<bool(std::size_t)> corrected = [](std::size_t i) { return i == 0; };
    const CascadeResult res = apply_cascade(f.panel, f.ents, SelectionConfig{}, &corrected);
    const std::string path = "/tmp/takeup_test_ledger.csv";
    write_ledger(res.ledger, path);
    Table t = Table::read_file(path);
    t.require_columns({"step", "2018", "2019", "total"}, "ledger");
    CHECK(t.at(0, "step") == "initial");
    CHECK(t.at(0, "total") == "2");
    // thereof rows: one take-up (2018), one non-take-up (2019)
    bool saw_yes = false, saw_no = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.at(i, "step") == "thereof_takeup") {
            saw_yes = true;
            CHECK(t.at(i, "2018") == "1");
        }
        if (t.at(i, "step") == "thereof_non_takeup") {
            saw_no = true;
            CHECK(t.at(i, "2019") == "1");
        }
    }
    CHECK(saw_yes);
    CHECK(saw_no);
}
