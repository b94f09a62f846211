#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "takeup/estimator.hpp"

using namespace takeup;
using namespace test_helpers;

namespace {

// Estimation rows from a known latent-index process. Covariates are drawn
// freely; the latent index reuses the estimator's own column definitions so
// the generated truth matches the fitted design by construction.
std::vector<SampleRow> make_rows(Rng& rng, int households, int waves,
                                 const std::map<std::string, double>& beta, double sigma,
                                 double constant_weight = 0.0) {
    std::vector<SampleRow> rows;
    for (int h = 0; h < households; ++h) {
        const double nu = rng.normal(0.0, sigma);
        HouseholdSnapshot base = random_household(rng, 1000 + h, 2016);
        base.survey_weight = constant_weight > 0.0 ? constant_weight : 0.25 + 3.0 * rng.uniform();
        for (int t = 0; t < waves; ++t) {
            SampleRow r;
            r.hh = base;
            r.hh.wave_year = 2016 + t;
            r.hh.interview_quarter = Quarter(2016 + t, 2);
            r.ent.household_id = base.household_id;
            r.ent.wave_year = r.hh.wave_year;
            r.ent.need_total = parse_money("1000");
            const double gap = 0.05 + 0.95 * rng.uniform();
            r.ent.entitlement = Money::from_euros(1000.0 * gap);
            r.ent.relative_income_gap = gap;
            r.ent.eligible_ubii = true;
            r.ent.wealth_pass = true;
            r.cov.receipt_share_lag1 = rng.uniform();
            r.cov.receipt_share_lag2 = rng.uniform();
            r.cov.receipt_share_lag3 = rng.uniform();
            r.cov.income_lag1 = 1500.0 * rng.uniform();
            r.cov.income_lag2 = 1500.0 * rng.uniform();
            r.cov.income_lag3 = 1500.0 * rng.uniform();
            r.cov.income_shock = rng.normal(0.0, 0.5);
            r.cov.income_volatility = 600.0 * rng.uniform();
            double z = 0.0;
            for (const auto& [name, coef] : beta)
                z += coef * design_detail::column_value(name, r);
            r.corrected_takeup = z + nu + rng.normal(0.0, 1.0) > 0.0;
            r.admin_at_interview = r.corrected_takeup;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

EstimatorOptions fast_options() {
    EstimatorOptions o;
    o.wave_effects = false;
    o.quad.nodes = 20;
    return o;
}

}  // namespace

TEST_CASE("rho mapping is exact at the closed-form points") {
    CHECK(rho_of_sigma(0.0) == 0.0);
    CHECK(rho_of_sigma(1.0) == 0.5);
    CHECK_THAT(rho_of_sigma(std::sqrt(3.0)), Catch::Matchers::WithinAbs(0.75, 1e-15));
}

TEST_CASE("design builder: blocks, dropped columns, rank errors") {
    Rng rng(21);
    std::vector<SampleRow> rows = make_rows(rng, 60, 2, {{"intercept", 0.3}}, 0.5);

    SECTION("standard M1 design has the documented blocks") {
        EstimatorOptions opts = fast_options();
        Design d = build_design(rows, ModelTag::M1, opts);
        CHECK(d.data.names.front() == "intercept");
        bool has_lag = false;
        for (const auto& n : d.data.names) has_lag |= n == "receipt_share_lag1";
        CHECK(has_lag);
        CHECK(d.data.n_groups() == 60);
        // groups are contiguous and cover all rows
        std::size_t covered = 0;
        for (const auto& [start, len] : d.data.groups) covered += len;
        CHECK(covered == d.data.n_obs());
    }

    SECTION("absent categories are dropped with a note") {
        for (auto& r : rows) r.hh.sample_origin = SampleOrigin::Admin;
        EstimatorOptions opts = fast_options();
        Design d = build_design(rows, ModelTag::M0, opts);
        bool dropped = false;
        for (const auto& n : d.dropped) dropped |= n == "genpop_sample";
        CHECK(dropped);
    }

    SECTION("duplicated column raises a singular-design error naming it") {
        EstimatorOptions opts = fast_options();
        opts.covariate_override = {"income_shock", "income_shock"};
        try {
            build_design(rows, ModelTag::M0, opts);
            FAIL("expected singular design error");
        } catch (const DomainError& e) {
            CHECK(std::string(e.what()).find("income_shock") != std::string::npos);
        }
    }

    SECTION("empty sample is rejected") {
        CHECK_THROWS_AS(build_design({}, ModelTag::M0, fast_options()), DomainError);
        CHECK_THROWS_AS(model_suite({}, fast_options()), DomainError);
    }
}

TEST_CASE("pooled fit recovers a simple DGP") {
    Rng rng(22);
    const std::map<std::string, double> beta = {{"intercept", -0.4},
                                                {"relative_income_gap", 1.2}};
    std::vector<SampleRow> rows = make_rows(rng, 1500, 2, beta, 0.0);
    EstimatorOptions opts = fast_options();
    opts.pooled = true;
    opts.covariate_override = {"relative_income_gap"};
    EstimationResult res = fit(rows, ModelTag::M0, opts);
    REQUIRE(res.converged);
    CHECK(res.grad_norm < 1e-8);
    CHECK_THAT(res.beta(res.col("intercept")), Catch::Matchers::WithinAbs(-0.4, 0.15));
    CHECK_THAT(res.beta(res.col("relative_income_gap")), Catch::Matchers::WithinAbs(1.2, 0.3));
    CHECK(res.hessian_pd);
}

TEST_CASE("random-effects fit recovers sigma_nu") {
    Rng rng(23);
    const std::map<std::string, double> beta = {{"intercept", 0.2},
                                                {"relative_income_gap", 1.0}};
    std::vector<SampleRow> rows = make_rows(rng, 500, 5, beta, 1.0);
    EstimatorOptions opts = fast_options();
    opts.covariate_override = {"relative_income_gap"};
    EstimationResult res = fit(rows, ModelTag::M0, opts);
    REQUIRE(res.converged);
    CHECK_THAT(res.sigma_nu, Catch::Matchers::WithinAbs(1.0, 0.25));
    CHECK_THAT(res.rho, Catch::Matchers::WithinAbs(0.5, 0.12));
    CHECK(res.rho_se > 0.0);
    CHECK(res.loglik < 0.0);
}

TEST_CASE("constant weights reproduce unweighted point estimates") {
    Rng rng(24);
    const std::map<std::string, double> beta = {{"intercept", 0.1},
                                                {"relative_income_gap", 0.8}};
    std::vector<SampleRow> rows = make_rows(rng, 250, 3, beta, 0.8, /*constant_weight=*/2.5);
    EstimatorOptions opts = fast_options();
    opts.covariate_override = {"relative_income_gap"};

    EstimationResult unweighted = fit(rows, ModelTag::M0, opts);
    opts.weighted = true;
    EstimationResult weighted = fit(rows, ModelTag::M0, opts);
    REQUIRE(unweighted.converged);
    REQUIRE(weighted.converged);
    for (long j = 0; j < unweighted.beta.size(); ++j)
        CHECK_THAT(weighted.beta(j), Catch::Matchers::WithinAbs(unweighted.beta(j), 1e-8));
    CHECK_THAT(weighted.sigma_nu, Catch::Matchers::WithinAbs(unweighted.sigma_nu, 1e-8));
    // objective scales by the constant
    CHECK_THAT(weighted.loglik, Catch::Matchers::WithinRel(2.5 * unweighted.loglik, 1e-9));
}

TEST_CASE("reparameterisation invariance: shifting a covariate moves only the intercept") {
    Rng rng(25);
    const std::map<std::string, double> beta = {{"intercept", -0.2}, {"income_shock", 0.9}};
    std::vector<SampleRow> rows = make_rows(rng, 400, 2, beta, 0.0);
    EstimatorOptions opts = fast_options();
    opts.pooled = true;
    opts.covariate_override = {"income_shock"};
    EstimationResult base = fit(rows, ModelTag::M0, opts);

    std::vector<SampleRow> shifted = rows;
    for (auto& r : shifted) r.cov.income_shock += 0.7;
    EstimationResult moved = fit(shifted, ModelTag::M0, opts);
    REQUIRE(base.converged);
    REQUIRE(moved.converged);
    CHECK_THAT(moved.loglik, Catch::Matchers::WithinAbs(base.loglik, 1e-8));
    CHECK_THAT(moved.beta(moved.col("income_shock")),
               Catch::Matchers::WithinAbs(base.beta(base.col("income_shock")), 1e-6));
}

TEST_CASE("perfect separation yields a diagnostic, not a crash") {
    std::vector<SampleRow> rows;
    Rng rng(26);
    rows = make_rows(rng, 40, 1, {{"intercept", 0.0}}, 0.0);
    for (auto& r : rows) {
        r.cov.income_shock = r.corrected_takeup ? 0.1 : -0.1;
    }
    EstimatorOptions opts = fast_options();
    opts.pooled = true;
    opts.covariate_override = {"income_shock"};
    opts.optim.max_iterations = 150;
    const EstimationResult res = fit(rows, ModelTag::M0, opts);
    CHECK_FALSE(res.converged);
    CHECK(res.message.find("diverged") != std::string::npos);
    CHECK(res.trajectory.size() > 1);
}

TEST_CASE("marginal effects closed forms") {
    // Hand-built design: intercept and one continuous covariate fixed at 0.
    auto design = std::make_shared<Design>();
    design->data.X.resize(50, 2);
    design->data.X.col(0).setOnes();
    design->data.X.col(1).setZero();
    design->data.sign.assign(50, 1.0);
    design->data.weight.assign(50, 1.0);
    design->data.names = {"intercept", "x"};
    for (std::size_t i = 0; i < 50; ++i) {
        design->data.groups.emplace_back(i, 1);
        design->data.group_ids.push_back(static_cast<long>(i));
        design->data.group_weight.push_back(1.0);
    }
    EffectBlock blk;
    blk.label = "x";
    blk.columns = {1};
    blk.kind = EffectBlock::Kind::Continuous;
    design->blocks = {blk};

    EstimationResult res;
    res.model = "m0";
    res.pooled = true;
    res.names = design->data.names;
    res.beta.resize(2);
    res.beta << 0.0, 1.0;
    res.se = Eigen::VectorXd::Zero(2);
    res.cov = Eigen::MatrixXd::Zero(2, 2);
    res.design = design;

    MarginalEffects me = marginal_effects(res);
    REQUIRE(me.labels.size() == 1);
    CHECK_THAT(me.effect(0), Catch::Matchers::WithinAbs(0.3989422804014327, 1e-12));

    res.beta << 0.0, 0.0;  // all-zero coefficients -> zero effects
    me = marginal_effects(res);
    CHECK(me.effect(0) == 0.0);
}

TEST_CASE("marginal effects: intervals nest and discrete blocks use the reference") {
    Rng rng(27);
    const std::map<std::string, double> beta = {{"intercept", -0.3},
                                                {"relative_income_gap", 1.5},
                                                {"relative_income_gap_sq", -0.6},
                                                {"east", 0.4}};
    std::vector<SampleRow> rows = make_rows(rng, 400, 3, beta, 0.7);
    EstimatorOptions opts = fast_options();
    opts.covariate_override = {"relative_income_gap", "relative_income_gap_sq", "east"};
    EstimationResult res = fit(rows, ModelTag::M0, opts);
    REQUIRE(res.converged);
    MarginalEffects me = marginal_effects(res);

    // one combined gap effect, no separate entry for the square
    CHECK_NOTHROW(me.index_of("relative_income_gap"));
    CHECK_THROWS_AS(me.index_of("relative_income_gap_sq"), DomainError);
    CHECK_NOTHROW(me.index_of("east"));
    CHECK_THROWS_AS(me.index_of("unknown"), DomainError);

    for (long i = 0; i < me.effect.size(); ++i) {
        const double e = me.effect(i);
        const double s = me.se(i);
        CHECK(s >= 0.0);
        CHECK(e - kZ99 * s <= e - kZ95 * s);
        CHECK(e - kZ95 * s <= e - kZ90 * s);
        CHECK(e + kZ90 * s <= e + kZ95 * s);
        CHECK(e + kZ95 * s <= e + kZ99 * s);
    }

    const std::string path = "/tmp/takeup_test_effects.csv";
    write_effects(me, path);
    Table t = Table::read_file(path);
    t.require_columns({"name", "effect", "ci90_lo", "ci99_hi"}, "effects");
    CHECK(t.size() == me.labels.size());
}

TEST_CASE("long-run effect sums the group's marginal effects") {
    CHECK_THAT(long_run_effect({0.36, -0.09, 0.01}), Catch::Matchers::WithinAbs(0.28, 1e-15));
    CHECK_THAT(long_run_effect({-0.080, -0.012, -0.004}),
               Catch::Matchers::WithinAbs(-0.096, 1e-15));
    CHECK(long_run_effect({0.0, 0.0, 0.0}) == 0.0);

    Rng rng(28);
    const std::map<std::string, double> beta = {{"intercept", 0.1},
                                                {"receipt_share_lag1", 0.8},
                                                {"receipt_share_lag2", -0.2},
                                                {"receipt_share_lag3", 0.05}};
    std::vector<SampleRow> rows = make_rows(rng, 300, 3, beta, 0.5);
    EstimatorOptions opts = fast_options();
    opts.covariate_override = {"receipt_share_lag1", "receipt_share_lag2", "receipt_share_lag3"};
    EstimationResult res = fit(rows, ModelTag::M0, opts);
    REQUIRE(res.converged);
    MarginalEffects me = marginal_effects(res);
    const LongRunEffect lr = long_run_effect(
        me, {"receipt_share_lag1", "receipt_share_lag2", "receipt_share_lag3"});
    const double direct = me.effect(me.index_of("receipt_share_lag1")) +
                          me.effect(me.index_of("receipt_share_lag2")) +
                          me.effect(me.index_of("receipt_share_lag3"));
    CHECK_THAT(lr.effect, Catch::Matchers::WithinAbs(direct, 1e-12));
    CHECK(lr.se > 0.0);
    CHECK_THROWS_AS(long_run_effect(me, {"no_such_effect"}), DomainError);
}

TEST_CASE("delta-method CI widths agree with a parametric bootstrap") {
    Rng rng(29);
    const std::map<std::string, double> beta_true = {{"intercept", -0.2},
                                                     {"relative_income_gap", 1.0}};
    std::vector<SampleRow> rows = make_rows(rng, 500, 1, beta_true, 0.0);
    EstimatorOptions opts = fast_options();
    opts.pooled = true;
    opts.covariate_override = {"relative_income_gap"};
    EstimationResult res = fit(rows, ModelTag::M0, opts);
    REQUIRE(res.converged);
    MarginalEffects me = marginal_effects(res);
    const std::size_t gap_idx = me.index_of("relative_income_gap");

    // Parametric bootstrap: redraw outcomes from the fitted model, refit,
    // recompute the effect; its dispersion is the oracle for the delta SE.
    const long icol = static_cast<long>(res.col("intercept"));
    const long gcol = static_cast<long>(res.col("relative_income_gap"));
    std::vector<double> boot;
    for (int b = 0; b < 200; ++b) {
        std::vector<SampleRow> redrawn = rows;
        for (auto& r : redrawn) {
            const double z = res.beta(icol) + res.beta(gcol) * r.ent.relative_income_gap;
            r.corrected_takeup = z + rng.normal(0.0, 1.0) > 0.0;
        }
        EstimationResult rb = fit(redrawn, ModelTag::M0, opts);
        if (!rb.converged) continue;
        MarginalEffects mb = marginal_effects(rb);
        boot.push_back(mb.effect(static_cast<long>(mb.index_of("relative_income_gap"))));
    }
    REQUIRE(boot.size() > 150);
    double mean = 0.0;
    for (double v : boot) mean += v;
    mean /= static_cast<double>(boot.size());
    double ss = 0.0;
    for (double v : boot) ss += (v - mean) * (v - mean);
    const double boot_se = std::sqrt(ss / (static_cast<double>(boot.size()) - 1.0));
    CHECK_THAT(me.se(static_cast<long>(gap_idx)), Catch::Matchers::WithinRel(boot_se, 0.15));
}

TEST_CASE("model suite runs the nested specifications") {
    Rng rng(30);
    const std::map<std::string, double> beta = {{"intercept", 0.2},
                                                {"relative_income_gap", 1.0},
                                                {"receipt_share_lag1", 0.6}};
    std::vector<SampleRow> rows = make_rows(rng, 200, 3, beta, 0.6);
    EstimatorOptions opts = fast_options();
    opts.quad.nodes = 12;
    const SuiteResult suite = model_suite(rows, opts);
    CHECK(suite.models.count("m0") == 1);
    CHECK(suite.models.count("m3") == 1);
    CHECK(suite.errors.empty());
    // nested specifications grow
    CHECK(suite.models.at("m1").names.size() > suite.models.at("m0").names.size());
    CHECK(suite.models.at("m3").names.size() > suite.models.at("m2").names.size());
}

TEST_CASE("coefficient table writes stars at the documented thresholds") {
    CHECK(significance_stars(0.005) == "***");
    CHECK(significance_stars(0.03) == "**");
    CHECK(significance_stars(0.07) == "*");
    CHECK(significance_stars(0.2) == "");
}
