#pragma once

#include <filesystem>

#include "takeup/manifest.hpp"
#include "takeup/metrics.hpp"
#include "takeup/selection.hpp"
#include "takeup/synthgen.hpp"

namespace takeup {

// File-based stage handoff: each subcommand reads the declared inputs of the
// previous stage and writes its artifacts plus a manifest into its own
// output directory.

namespace fs = std::filesystem;

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DomainError("cannot create output directory " + dir + ": " + ec.message());
}

inline void require_file(const std::string& path, const std::string& what) {
    if (!fs::exists(path))
        throw MissingInputError("missing upstream artifact: " + what + " (" + path + ")");
}

// Joins panel, entitlements and spells into estimation-ready rows: long-term
// covariates, administrative receipt at the interview, and the misreporting
// correction. Households without administrative linkage keep their reported
// status (there is nothing to correct against).
inline std::vector<SampleRow> build_sample_rows(const std::vector<HouseholdSnapshot>& panel,
                                                const std::vector<EntitlementResult>& ents,
                                                const std::vector<SpellRecord>& spells,
                                                const PolicySet& policy) {
    if (panel.size() != ents.size())
        throw DomainError("panel and entitlement row counts differ");
    const SpellIndex index = index_spells(spells);
    const HouseholdSpells empty;
    std::vector<SampleRow> rows(panel.size());
    parallel_for(panel.size(), [&](std::size_t i) {
        SampleRow r;
        r.hh = panel[i];
        r.ent = ents[i];
        if (r.hh.household_id != r.ent.household_id || r.hh.wave_year != r.ent.wave_year)
            throw DomainError("panel/entitlement rows misaligned at index " + std::to_string(i));
        auto it = index.find(r.hh.household_id);
        const HouseholdSpells& hs =
            (it != index.end() && r.hh.admin_linked) ? it->second : empty;
        const Money need = max(r.ent.need_total, Money(1));
        r.cov = build_covariates(hs, r.hh.interview_quarter, policy, r.hh.oecd_weight(), need);
        r.admin_at_interview = admin_receipt_at_interview(hs, r.hh.interview_quarter);
        if (r.hh.admin_linked) {
            const CorrectedReceipt c = correct_receipt(r.hh.reported_ubii, r.admin_at_interview);
            r.corrected_takeup = c.corrected;
            r.correction = c.kind;
        } else {
            r.corrected_takeup = r.hh.reported_ubii;
            r.correction = CorrectionKind::None;
        }
        rows[i] = r;
    });
    return rows;
}

// --- stages ------------------------------------------------------------------

struct StagePaths {
    static std::string panel(const std::string& dir) { return dir + "/panel.csv"; }
    static std::string spells(const std::string& dir) { return dir + "/spells.csv"; }
    static std::string entitlements(const std::string& dir) { return dir + "/entitlements.csv"; }
    static std::string truth_households(const std::string& dir) {
        return dir + "/truth_households.csv";
    }
    static std::string truth_waves(const std::string& dir) { return dir + "/truth_waves.csv"; }
    static std::string sample(const std::string& dir) { return dir + "/sample.csv"; }
    static std::string ledger(const std::string& dir) { return dir + "/selection_ledger.csv"; }
    static std::string rates_sample(const std::string& dir) { return dir + "/rates_sample.csv"; }
    static std::string estimation_sample(const std::string& dir) {
        return dir + "/estimation_sample.csv";
    }
};

// simulate: synthetic panel + spells + entitlements + truth tables.
inline void simulate_stage(const std::string& config_path, const std::string& out_dir,
                           std::uint64_t seed_override, bool has_seed_override) {
    const Config cfg = Config::parse_file(config_path);
    SyntheticDGP dgp = parse_dgp(cfg);
    if (has_seed_override) dgp.seed = seed_override;
    const PolicySet policy = cfg.sections_named("policy").empty()
                                 ? PolicySet::defaults(dgp.first_year - 4,
                                                       dgp.first_year + dgp.waves - 1)
                                 : PolicySet::from_config(cfg);
    const SyntheticData data = generate(dgp, policy);

    ensure_dir(out_dir);
    write_panel(data.panel, StagePaths::panel(out_dir));
    write_spells(data.spells, StagePaths::spells(out_dir));
    write_entitlements(data.entitlements, StagePaths::entitlements(out_dir));

    Table th({"household_id", "nu"});
    for (const auto& [id, nu] : data.nu) th.add_row({std::to_string(id), fmt_double(nu)});
    th.write_file(StagePaths::truth_households(out_dir));

    Table tw({"household_id", "wave_year", "upsilon", "latent_index", "eligible", "true_takeup"});
    for (const auto& t : data.truth)
        tw.add_row({std::to_string(t.household_id), std::to_string(t.wave_year),
                    fmt_double(t.upsilon), fmt_double(t.latent_index), fmt_flag(t.eligible),
                    fmt_flag(t.true_takeup)});
    tw.write_file(StagePaths::truth_waves(out_dir));

    RunManifest m;
    m.subcommand = "simulate";
    m.config_path = config_path;
    m.outputs = {StagePaths::panel(out_dir), StagePaths::spells(out_dir),
                 StagePaths::entitlements(out_dir), StagePaths::truth_households(out_dir),
                 StagePaths::truth_waves(out_dir)};
    m.seed = dgp.seed;
    m.options["households"] = std::to_string(dgp.households);
    m.options["waves"] = std::to_string(dgp.waves);
    m.write(out_dir);
}

// covariates: join spells + entitlements onto the panel.
inline void covariates_stage(const std::string& in_dir, const std::string& config_path,
                             const std::string& out_dir) {
    require_file(StagePaths::panel(in_dir), "panel");
    require_file(StagePaths::spells(in_dir), "spells");
    require_file(StagePaths::entitlements(in_dir), "entitlements");
    const Config cfg = Config::parse_file(config_path);
    const std::vector<HouseholdSnapshot> panel = read_panel(StagePaths::panel(in_dir));
    const std::vector<SpellRecord> spells = read_spells(StagePaths::spells(in_dir));
    const std::vector<EntitlementResult> ents =
        read_entitlements(StagePaths::entitlements(in_dir));

    int min_year = 9999, max_year = 0;
    for (const auto& h : panel) {
        min_year = std::min(min_year, h.wave_year);
        max_year = std::max(max_year, h.wave_year);
    }
    PolicySet policy = cfg.sections_named("policy").empty()
                           ? PolicySet::defaults(std::max(1900, min_year - 4), max_year)
                           : PolicySet::from_config(cfg);
    for (int y = std::max(1900, min_year - 4); y <= max_year && !panel.empty(); ++y)
        if (!policy.has_year(y)) policy.add(default_policy(y));

    const std::vector<SampleRow> rows = build_sample_rows(panel, ents, spells, policy);
    ensure_dir(out_dir);
    write_sample(rows, StagePaths::sample(out_dir));

    RunManifest m;
    m.subcommand = "covariates";
    m.config_path = config_path;
    m.inputs = {StagePaths::panel(in_dir), StagePaths::spells(in_dir),
                StagePaths::entitlements(in_dir)};
    m.outputs = {StagePaths::sample(out_dir)};
    m.write(out_dir);
}

// select: ordered exclusion cascade; emits the ledger and both samples.
inline void select_stage(const std::string& in_dir, const std::string& config_path,
                         const std::string& out_dir) {
    require_file(StagePaths::sample(in_dir), "joined sample");
    const std::vector<SampleRow> rows = read_sample(StagePaths::sample(in_dir));
    const Config cfg = Config::parse_file(config_path);

    SelectionConfig sel;
    if (const Config::Section* sec = cfg.find("selection")) {
        for (const auto& name : detail::split_ws(sec->get_or("disable", "")))
            sel.disabled.insert(name);
    }

    std::vector<HouseholdSnapshot> panel;
    std::vector<EntitlementResult> ents;
    panel.reserve(rows.size());
    for (const auto& r : rows) {
        panel.push_back(r.hh);
        ents.push_back(r.ent);
    }
    std::function<bool(std::size_t)> corrected = [&rows](std::size_t i) {
        return rows[i].corrected_takeup;
    };
    const CascadeResult res = apply_cascade(panel, ents, sel, &corrected);

    ensure_dir(out_dir);
    write_ledger(res.ledger, StagePaths::ledger(out_dir));
    std::vector<SampleRow> rates, est;
    for (std::size_t i : res.rates_sample) rates.push_back(rows[i]);
    for (std::size_t i : res.estimation_sample) est.push_back(rows[i]);
    write_sample(rates, StagePaths::rates_sample(out_dir));
    write_sample(est, StagePaths::estimation_sample(out_dir));

    RunManifest m;
    m.subcommand = "select";
    m.config_path = config_path;
    m.inputs = {StagePaths::sample(in_dir)};
    m.outputs = {StagePaths::ledger(out_dir), StagePaths::rates_sample(out_dir),
                 StagePaths::estimation_sample(out_dir)};
    m.write(out_dir);
}

struct EstimateStageOptions {
    std::string model = "all";  // m0|m1|m2|m3|all
    EstimatorOptions est;
};

inline void write_model_summary(const EstimationResult& r, const std::string& path) {
    nlohmann::json j;
    j["model"] = r.model;
    j["pooled"] = r.pooled;
    j["weighted"] = r.weighted;
    j["loglik"] = r.loglik;
    j["sigma_nu"] = r.sigma_nu;
    j["sigma_nu_se"] = r.sigma_nu_se;
    j["rho"] = r.rho;
    j["rho_se"] = r.rho_se;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["gradient_norm"] = r.grad_norm;
    j["hessian_pd"] = r.hessian_pd;
    j["message"] = r.message;
    j["n_obs"] = r.n_obs;
    j["n_households"] = r.n_households;
    j["quadrature_nodes"] = r.quad.nodes;
    j["quadrature"] =
        r.quad.mode == QuadOptions::Mode::Composite ? "composite" : "hermite";
    j["dropped_columns"] = r.dropped_columns;
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline void estimate_stage(const std::string& in_dir, const std::string& config_path,
                           const std::string& out_dir, const EstimateStageOptions& opts) {
    require_file(StagePaths::estimation_sample(in_dir), "estimation sample");
    const std::vector<SampleRow> rows = read_sample(StagePaths::estimation_sample(in_dir));
    ensure_dir(out_dir);

    std::vector<ModelTag> tags;
    if (opts.model == "all")
        tags = {ModelTag::M0, ModelTag::M1, ModelTag::M2, ModelTag::M3};
    else
        tags = {parse_model_tag(opts.model)};

    RunManifest m;
    m.subcommand = "estimate";
    m.config_path = config_path;
    m.inputs = {StagePaths::estimation_sample(in_dir)};
    m.options["model"] = opts.model;
    m.options["weights"] = opts.est.weighted ? "on" : "off";
    m.options["nodes"] = std::to_string(opts.est.quad.nodes);

    for (ModelTag tag : tags) {
        const std::string name = model_tag_str(tag);
        try {
            EstimationResult res = fit(rows, tag, opts.est);
            MarginalEffects me = marginal_effects(res);
            write_coefficients(res, out_dir + "/" + name + "_coefficients.csv");
            write_effects(me, out_dir + "/" + name + "_effects.csv");
            write_model_summary(res, out_dir + "/" + name + "_model.json");
            m.outputs.push_back(out_dir + "/" + name + "_coefficients.csv");
            m.outputs.push_back(out_dir + "/" + name + "_effects.csv");
            m.outputs.push_back(out_dir + "/" + name + "_model.json");
        } catch (const std::exception& e) {
            // Per-model failures must not abort the suite.
            std::ofstream err(out_dir + "/" + name + "_error.txt");
            err << e.what() << '\n';
            m.outputs.push_back(out_dir + "/" + name + "_error.txt");
        }
    }
    m.write(out_dir);
}

inline void metrics_stage(const std::string& in_dir, const std::string& config_path,
                          const std::string& out_dir, bool weighted) {
    require_file(StagePaths::rates_sample(in_dir), "rates sample");
    const std::vector<SampleRow> rows = read_sample(StagePaths::rates_sample(in_dir));
    const Config cfg = Config::parse_file(config_path);
    int min_year = 9999, max_year = 0;
    for (const auto& r : rows) {
        min_year = std::min(min_year, r.hh.wave_year);
        max_year = std::max(max_year, r.hh.wave_year);
    }
    PolicySet policy = cfg.sections_named("policy").empty()
                           ? PolicySet::defaults(min_year, max_year)
                           : PolicySet::from_config(cfg);
    for (int y = min_year; y <= max_year && !rows.empty(); ++y)
        if (!policy.has_year(y)) policy.add(default_policy(y));

    ensure_dir(out_dir);
    write_rate_table(rate_table_by_year(rows, weighted), out_dir + "/rates_by_year.csv");
    write_rate_table(rate_table_by_subgroup(rows, weighted), out_dir + "/rates_by_subgroup.csv");
    write_rate_table(rate_table_by_subsample(rows, weighted), out_dir + "/rates_by_subsample.csv");
    write_rate_table(rate_table_by_year_subsample(rows, weighted),
                     out_dir + "/rates_by_year_subsample.csv");
    write_takeup_types(takeup_types(rows), out_dir + "/takeup_types.csv");
    write_gap_curve(gap_curve(rows, weighted), out_dir + "/gap_curve.csv");
    write_covariate_means(covariate_means(rows), out_dir + "/covariate_means.csv");
    write_sim_quality(sim_quality(rows, policy, weighted), out_dir + "/sim_quality.csv");

    // Density exports for the simulation-quality figures.
    std::vector<DensitySeries> income_density, entitlement_density;
    for (const std::string group : {"all", "eligible", "ineligible"}) {
        std::vector<std::pair<double, double>> rep, sim;
        for (const auto& r : rows) {
            if (group == "eligible" && !r.ent.eligible_ubii) continue;
            if (group == "ineligible" && r.ent.eligible_ubii) continue;
            const double deflator = policy.cpi(r.hh.wave_year);
            const double eq = r.hh.oecd_weight();
            const double w = weighted ? r.hh.survey_weight : 1.0;
            rep.emplace_back(r.hh.reported_disposable_income.euros() / deflator / eq, w);
            sim.emplace_back(simulated_disposable_income(r) / deflator / eq, w);
        }
        income_density.push_back(kernel_density("reported_" + group, rep));
        income_density.push_back(kernel_density("simulated_" + group, sim));
    }
    for (const std::string group : {"takeup", "non_takeup"}) {
        std::vector<std::pair<double, double>> vals;
        for (const auto& r : rows) {
            if (!r.ent.eligible_ubii) continue;
            if (r.corrected_takeup != (group == "takeup")) continue;
            const double deflator = policy.cpi(r.hh.wave_year);
            const double eq = r.hh.oecd_weight();
            vals.emplace_back(r.ent.entitlement.euros() / deflator / eq,
                              weighted ? r.hh.survey_weight : 1.0);
        }
        entitlement_density.push_back(kernel_density("entitlement_" + group, vals));
    }
    write_densities(income_density, out_dir + "/density_disposable_income.csv");
    write_densities(entitlement_density, out_dir + "/density_entitlements.csv");

    RunManifest m;
    m.subcommand = "metrics";
    m.config_path = config_path;
    m.inputs = {StagePaths::rates_sample(in_dir)};
    m.outputs = {out_dir + "/rates_by_year.csv", out_dir + "/rates_by_subgroup.csv",
                 out_dir + "/rates_by_subsample.csv", out_dir + "/rates_by_year_subsample.csv",
                 out_dir + "/takeup_types.csv", out_dir + "/gap_curve.csv",
                 out_dir + "/covariate_means.csv", out_dir + "/sim_quality.csv",
                 out_dir + "/density_disposable_income.csv", out_dir + "/density_entitlements.csv"};
    m.options["weights"] = weighted ? "on" : "off";
    m.write(out_dir);
}

// --- Monte Carlo harness -------------------------------------------------------

struct MonteCarloOptions {
    int replications = 200;
    ModelTag model = ModelTag::M0;
    EstimatorOptions est;
};

inline MonteCarloOptions parse_mc_options(const Config& cfg) {
    MonteCarloOptions mc;
    if (const Config::Section* sec = cfg.find("montecarlo")) {
        mc.replications = static_cast<int>(sec->get_long_or("replications", 200));
        mc.model = parse_model_tag(sec->get_or("model", "m0"));
        mc.est.weighted = sec->get_long_or("weighted", 0) != 0;
        mc.est.pooled = sec->get_long_or("pooled", 0) != 0;
        mc.est.wave_effects = sec->get_long_or("wave_effects", 0) != 0;
        mc.est.quad.nodes = static_cast<int>(sec->get_long_or("nodes", 20));
        mc.est.quad.mode = parse_quad_mode(sec->get_or("quadrature", "composite"));
        if (sec->has("covariates"))
            for (const auto& tok : detail::split_ws(sec->get("covariates")))
                mc.est.covariate_override.push_back(tok);
    }
    if (mc.replications < 1) throw ConfigError("montecarlo: replications must be >= 1");
    return mc;
}

struct ReplicationRecord {
    int replication = 0;
    bool ok = false;
    std::string error;
    std::map<std::string, double> estimate;
    std::map<std::string, double> se;
};

struct MonteCarloSummary {
    std::vector<std::string> params;
    std::map<std::string, double> truth;
    std::vector<ReplicationRecord> reps;

    struct ParamSummary {
        double mean = 0.0, bias = 0.0, rmse = 0.0, coverage95 = 0.0;
        int n = 0;
    };
    std::map<std::string, ParamSummary> summary() const {
        std::map<std::string, ParamSummary> out;
        for (const auto& name : params) {
            ParamSummary s;
            const double tv = truth.count(name) ? truth.at(name) : 0.0;
            double sum = 0.0, ss = 0.0, cover = 0.0;
            for (const auto& r : reps) {
                if (!r.ok || !r.estimate.count(name)) continue;
                const double est = r.estimate.at(name);
                sum += est;
                ss += (est - tv) * (est - tv);
                if (std::fabs(est - tv) <= kZ95 * r.se.at(name)) cover += 1.0;
                ++s.n;
            }
            if (s.n > 0) {
                s.mean = sum / s.n;
                s.bias = s.mean - tv;
                s.rmse = std::sqrt(ss / s.n);
                s.coverage95 = cover / s.n;
            }
            out[name] = s;
        }
        return out;
    }
};

// One replication: generate -> covariates -> cascade -> fit.
inline ReplicationRecord run_replication(const SyntheticDGP& base, const PolicySet& policy,
                                         const MonteCarloOptions& mc, int r) {
    ReplicationRecord rec;
    rec.replication = r;
    try {
        SyntheticDGP dgp = base;
        dgp.seed = Rng::derive(base.seed, 0x6d63ULL, static_cast<std::uint64_t>(r)).bits();
        const SyntheticData data = generate(dgp, policy);
        const std::vector<SampleRow> rows =
            build_sample_rows(data.panel, data.entitlements, data.spells, policy);
        std::vector<HouseholdSnapshot> panel;
        std::vector<EntitlementResult> ents;
        for (const auto& row : rows) {
            panel.push_back(row.hh);
            ents.push_back(row.ent);
        }
        SelectionConfig sel;
        const CascadeResult cascade = apply_cascade(panel, ents, sel);
        std::vector<SampleRow> est_rows;
        for (std::size_t i : cascade.estimation_sample) est_rows.push_back(rows[i]);
        EstimationResult res = fit(est_rows, mc.model, mc.est);
        if (!res.converged) throw DomainError("fit did not converge: " + res.message);
        for (std::size_t i = 0; i < res.names.size(); ++i) {
            rec.estimate[res.names[i]] = res.beta(static_cast<long>(i));
            rec.se[res.names[i]] = res.se(static_cast<long>(i));
        }
        if (!res.pooled) {
            rec.estimate["sigma_nu"] = res.sigma_nu;
            rec.se["sigma_nu"] = res.sigma_nu_se;
            rec.estimate["rho"] = res.rho;
            rec.se["rho"] = res.rho_se;
        }
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

inline MonteCarloSummary replicate(const SyntheticDGP& dgp, const PolicySet& policy,
                                   const MonteCarloOptions& mc) {
    MonteCarloSummary out;
    out.truth = dgp.beta;
    out.truth["sigma_nu"] = dgp.sigma_nu;
    out.truth["rho"] = rho_of_sigma(dgp.sigma_nu);
    out.reps.resize(static_cast<std::size_t>(mc.replications));
    parallel_for(static_cast<std::size_t>(mc.replications), [&](std::size_t r) {
        out.reps[r] = run_replication(dgp, policy, mc, static_cast<int>(r));
    });
    std::set<std::string> names;
    for (const auto& rec : out.reps)
        for (const auto& [k, v] : rec.estimate) names.insert(k);
    out.params.assign(names.begin(), names.end());
    return out;
}

inline void montecarlo_stage(const std::string& config_path, const std::string& out_dir,
                             std::uint64_t seed_override, bool has_seed_override) {
    const Config cfg = Config::parse_file(config_path);
    SyntheticDGP dgp = parse_dgp(cfg);
    if (has_seed_override) dgp.seed = seed_override;
    const PolicySet policy = cfg.sections_named("policy").empty()
                                 ? PolicySet::defaults(dgp.first_year - 4,
                                                       dgp.first_year + dgp.waves - 1)
                                 : PolicySet::from_config(cfg);
    const MonteCarloOptions mc = parse_mc_options(cfg);
    const MonteCarloSummary sum = replicate(dgp, policy, mc);

    ensure_dir(out_dir);
    Table reps({"replication", "ok", "param", "estimate", "std_error", "error"});
    for (const auto& rec : sum.reps) {
        if (!rec.ok) {
            reps.add_row({std::to_string(rec.replication), "0", "NA", "NA", "NA", rec.error});
            continue;
        }
        for (const auto& [name, est] : rec.estimate)
            reps.add_row({std::to_string(rec.replication), "1", name, fmt_double(est),
                          fmt_double(rec.se.at(name)), ""});
    }
    reps.write_file(out_dir + "/mc_replications.csv");

    Table summary({"param", "truth", "mean", "bias", "rmse", "coverage95", "replications"});
    const auto stats = sum.summary();
    for (const auto& name : sum.params) {
        const auto& s = stats.at(name);
        const double tv = sum.truth.count(name) ? sum.truth.at(name) : 0.0;
        summary.add_row({name, fmt_double(tv), fmt_double(s.mean), fmt_double(s.bias),
                         fmt_double(s.rmse), fmt_double(s.coverage95), std::to_string(s.n)});
    }
    summary.write_file(out_dir + "/mc_summary.csv");

    RunManifest m;
    m.subcommand = "montecarlo";
    m.config_path = config_path;
    m.outputs = {out_dir + "/mc_replications.csv", out_dir + "/mc_summary.csv"};
    m.seed = dgp.seed;
    m.options["replications"] = std::to_string(mc.replications);
    m.options["model"] = model_tag_str(mc.model);
    m.write(out_dir);
}

// report: paper-shaped tables and figure data assembled from prior stages.
inline void report_stage(const std::string& metrics_dir, const std::string& select_dir,
                         const std::string& estimate_dir, const std::string& out_dir) {
    require_file(metrics_dir + "/rates_by_year.csv", "metrics output");
    require_file(select_dir + "/selection_ledger.csv", "selection ledger");
    require_file(estimate_dir + "/m0_coefficients.csv", "estimation output");

    ensure_dir(out_dir);
    auto copy_as = [&](const std::string& src, const std::string& dst) {
        Table t = Table::read_file(src);
        t.write_file(out_dir + "/" + dst);
    };
    copy_as(metrics_dir + "/rates_by_year.csv", "table1_rates_by_year.csv");
    copy_as(metrics_dir + "/takeup_types.csv", "table2_takeup_types.csv");
    copy_as(select_dir + "/selection_ledger.csv", "tableA1_selection.csv");
    copy_as(metrics_dir + "/rates_by_subgroup.csv", "tableB1_rates_by_subgroup.csv");
    copy_as(metrics_dir + "/sim_quality.csv", "tableC1_sim_quality.csv");
    copy_as(metrics_dir + "/covariate_means.csv", "tableD1_covariate_means.csv");
    copy_as(metrics_dir + "/rates_by_year.csv", "fig1_rates_by_year.csv");
    copy_as(metrics_dir + "/rates_by_year_subsample.csv", "fig2_rates_by_subsample.csv");
    copy_as(metrics_dir + "/gap_curve.csv", "fig4_gap_curve.csv");

    // Table E1 analogue: coefficient columns of every model that was fit.
    Table e1({"name", "m0", "m1", "m2", "m3"});
    std::map<std::string, std::map<std::string, std::string>> coef;
    std::vector<std::string> row_order;
    for (const std::string tag : {"m0", "m1", "m2", "m3"}) {
        const std::string path = estimate_dir + "/" + tag + "_coefficients.csv";
        if (!fs::exists(path)) continue;
        Table t = Table::read_file(path);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string& name = t.at(i, "name");
            if (!coef.count(name)) row_order.push_back(name);
            coef[name][tag] = t.at(i, "estimate") + significance_stars(
                                  parse_double(t.at(i, "p_value")));
        }
    }
    for (const auto& name : row_order) {
        std::vector<std::string> cells = {name};
        for (const std::string tag : {"m0", "m1", "m2", "m3"}) {
            auto it = coef[name].find(tag);
            cells.push_back(it == coef[name].end() ? "NA" : it->second);
        }
        e1.add_row(cells);
    }
    e1.write_file(out_dir + "/tableE1_estimates.csv");

    RunManifest m;
    m.subcommand = "report";
    m.inputs = {metrics_dir + "/rates_by_year.csv", select_dir + "/selection_ledger.csv",
                estimate_dir + "/m0_coefficients.csv"};
    m.outputs = {out_dir + "/table1_rates_by_year.csv", out_dir + "/table2_takeup_types.csv",
                 out_dir + "/tableA1_selection.csv", out_dir + "/tableB1_rates_by_subgroup.csv",
                 out_dir + "/tableC1_sim_quality.csv", out_dir + "/tableD1_covariate_means.csv",
                 out_dir + "/tableE1_estimates.csv", out_dir + "/fig1_rates_by_year.csv",
                 out_dir + "/fig2_rates_by_subsample.csv", out_dir + "/fig4_gap_curve.csv"};
    m.write(out_dir);
}

}  // namespace takeup
