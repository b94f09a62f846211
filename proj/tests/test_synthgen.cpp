#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "takeup/pipeline.hpp"
#include "takeup/synthgen.hpp"

using namespace takeup;

namespace {

SyntheticDGP small_dgp(std::uint64_t seed = 7) {
    SyntheticDGP d;
    d.seed = seed;
    d.households = 250;
    d.waves = 4;
    d.first_year = 2016;
    d.beta = {{"intercept", 0.3}, {"relative_income_gap", 1.2}, {"genpop_sample", -0.6}};
    return d;
}

PolicySet policy_for(const SyntheticDGP& d) {
    return PolicySet::defaults(d.first_year - 4, d.first_year + d.waves - 1);
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("dgp validation rejects infeasible configurations") {
    SyntheticDGP d = small_dgp();
    d.waves = 0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = small_dgp();
    d.sigma_nu = -0.1;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = small_dgp();
    d.underreport_rate = 1.5;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = small_dgp();
    d.wage_persistence = 1.0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("dgp config parsing") {
    const std::string text = R"([dgp]
seed = 99
households = 123
waves = 3
first_year = 2015
sigma_nu = 0.8
beta = intercept:0.4 relative_income_gap:1.5 receipt_share_lag1:0.7
)";
    const SyntheticDGP d = parse_dgp(Config::parse(text));
    CHECK(d.seed == 99);
    CHECK(d.households == 123);
    CHECK(d.beta.at("receipt_share_lag1") == 0.7);
    CHECK_THROWS_AS(parse_dgp(Config::parse("[other]\nx = 1")), ConfigError);
}

TEST_CASE("identical seeds give byte-identical artifacts") {
    const SyntheticDGP d = small_dgp();
    const PolicySet policy = policy_for(d);
    const SyntheticData a = generate(d, policy);
    const SyntheticData b = generate(d, policy);
    write_panel(a.panel, "/tmp/takeup_synth_a.csv");
    write_panel(b.panel, "/tmp/takeup_synth_b.csv");
    CHECK(file_bytes("/tmp/takeup_synth_a.csv") == file_bytes("/tmp/takeup_synth_b.csv"));
    write_spells(a.spells, "/tmp/takeup_spells_a.csv");
    write_spells(b.spells, "/tmp/takeup_spells_b.csv");
    CHECK(file_bytes("/tmp/takeup_spells_a.csv") == file_bytes("/tmp/takeup_spells_b.csv"));

    SyntheticDGP other = small_dgp(8);
    const SyntheticData c = generate(other, policy);
    write_panel(c.panel, "/tmp/takeup_synth_c.csv");
    CHECK(file_bytes("/tmp/takeup_synth_a.csv") != file_bytes("/tmp/takeup_synth_c.csv"));
}

TEST_CASE("zero misreporting means reported equals administrative receipt") {
    SyntheticDGP d = small_dgp();
    d.underreport_rate = 0.0;
    d.overreport_rate = 0.0;
    const SyntheticData data = generate(d, policy_for(d));
    REQUIRE(data.panel.size() == data.truth.size());
    for (std::size_t i = 0; i < data.panel.size(); ++i) {
        CHECK(data.panel[i].reported_ubii == data.truth[i].true_takeup);
    }
}

TEST_CASE("latent-index consistency: stored draws reproduce stored outcomes") {
    const SyntheticDGP d = small_dgp();
    const SyntheticData data = generate(d, policy_for(d));
    for (std::size_t i = 0; i < data.truth.size(); ++i) {
        const TruthWave& t = data.truth[i];
        const double nu = data.nu.at(t.household_id);
        const bool regenerated = t.eligible && (t.latent_index + nu + t.upsilon > 0.0);
        CHECK(regenerated == t.true_takeup);
    }
}

TEST_CASE("synthetic entitlements satisfy the rules invariants") {
    const SyntheticDGP d = small_dgp();
    const SyntheticData data = generate(d, policy_for(d));
    REQUIRE(data.entitlements.size() == data.panel.size());
    for (const auto& e : data.entitlements) {
        CHECK(e.entitlement == max(e.need_total - e.countable_income, Money::zero()));
        CHECK(e.relative_income_gap >= 0.0);
        CHECK(e.relative_income_gap <= 1.0);
        if (e.eligible_ubii) {
            CHECK(e.wealth_pass);
            CHECK_FALSE(e.precedence_blocked);
            CHECK(e.entitlement > Money::zero());
        }
    }
    // the population straddles the eligibility boundary
    long eligible = 0;
    for (const auto& e : data.entitlements) eligible += e.eligible_ubii;
    CHECK(eligible > 50);
    CHECK(eligible < static_cast<long>(data.entitlements.size()));
}

TEST_CASE("intercept-only DGP take-up rate matches the binomial oracle") {
    SyntheticDGP d = small_dgp(11);
    d.households = 2500;
    d.waves = 2;
    d.sigma_nu = 0.0;
    d.selection_noise = false;
    d.beta = {{"intercept", 0.3}};
    const SyntheticData data = generate(d, policy_for(d));
    long eligible = 0, takers = 0;
    for (const auto& t : data.truth) {
        if (!t.eligible) continue;
        ++eligible;
        takers += t.true_takeup;
    }
    REQUIRE(eligible > 500);
    const double p = normal_cdf(0.3);
    const double rate = static_cast<double>(takers) / static_cast<double>(eligible);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(eligible));
    CHECK_THAT(rate, Catch::Matchers::WithinAbs(p, 3.0 * se));
}

TEST_CASE("attrition shortens panels monotonically") {
    SyntheticDGP d = small_dgp(13);
    d.attrition = 0.25;
    const SyntheticData data = generate(d, policy_for(d));
    std::map<long, std::vector<int>> waves_seen;
    for (const auto& hh : data.panel) waves_seen[hh.household_id].push_back(hh.wave_year);
    bool some_short = false;
    for (const auto& [id, years] : waves_seen) {
        // exits are permanent: years are a prefix of the wave range
        for (std::size_t k = 0; k < years.size(); ++k)
            CHECK(years[k] == d.first_year + static_cast<int>(k));
        some_short |= years.size() < static_cast<std::size_t>(d.waves);
    }
    CHECK(some_short);
}

TEST_CASE("clean DGP rows survive the cascade almost entirely") {
    SyntheticDGP d = small_dgp(17);
    d.selection_noise = false;
    const SyntheticData data = generate(d, policy_for(d));
    const std::vector<SampleRow> rows =
        build_sample_rows(data.panel, data.entitlements, data.spells, policy_for(d));
    std::vector<HouseholdSnapshot> panel;
    std::vector<EntitlementResult> ents;
    for (const auto& r : rows) {
        panel.push_back(r.hh);
        ents.push_back(r.ent);
    }
    const CascadeResult res = apply_cascade(panel, ents, SelectionConfig{});
    long eligible = 0;
    for (const auto& e : ents) eligible += e.eligible_ubii;
    CHECK(res.estimation_sample.size() == static_cast<std::size_t>(eligible));
}

TEST_CASE("admin receipt flags line up with generated spells") {
    const SyntheticDGP d = small_dgp(19);
    const SyntheticData data = generate(d, policy_for(d));
    const std::vector<SampleRow> rows =
        build_sample_rows(data.panel, data.entitlements, data.spells, policy_for(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].hh.admin_linked) continue;
        CHECK(rows[i].admin_at_interview == data.truth[i].true_takeup);
        CHECK(rows[i].corrected_takeup == data.truth[i].true_takeup);
    }
}
