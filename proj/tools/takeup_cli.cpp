// Command-line front end: simulate -> covariates -> select -> estimate ->
// metrics -> report, plus the Monte Carlo harness. Stages hand data over via
// delimited-text files documented in FORMATS.md; every output directory
// gets a manifest.json.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>

#include "takeup/pipeline.hpp"

namespace {

// Distinct exit codes per error class (sysexits-style).
constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;       // unknown flag / bad invocation
constexpr int kExitSchema = 65;      // schema mismatch in an input file
constexpr int kExitMissing = 66;     // missing upstream artifact
constexpr int kExitValidation = 70;  // domain/validation failure
constexpr int kExitConfig = 78;      // configuration error

void fail_line(const char* kind, const std::string& msg) {
    std::fprintf(stderr, "error: kind=%s msg=\"%s\"\n", kind, msg.c_str());
}

// --config resolution: literal path first, then $TAKEUP_CONFIG_DIR.
std::string resolve_config(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("TAKEUP_CONFIG_DIR")) {
        const std::string joined = std::string(dir) + "/" + path;
        if (fs::exists(joined)) return joined;
    }
    throw takeup::ConfigError("config file not found: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace takeup;

    CLI::App app{"takeup: benefit take-up simulation and estimation pipeline"};
    app.require_subcommand(1);

    std::string config = "takeup.conf";
    std::string out_dir = "out";
    std::vector<std::string> inputs;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string weights = "off";
    std::string model = "all";
    int nodes = 32;

    auto add_common = [&](CLI::App* cmd, bool needs_input) {
        cmd->add_option("--config", config, "configuration file");
        cmd->add_option("--out", out_dir, "output directory")->required();
        if (needs_input)
            cmd->add_option("--input", inputs, "input director(ies) of upstream stages")
                ->required()
                ->expected(-1);
    };

    CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic population");
    add_common(sim, false);
    sim->add_option("--seed", seed, "override the DGP seed")->each([&](const std::string&) {
        seed_set = true;
    });

    CLI::App* cov = app.add_subcommand("covariates", "build long-term covariates");
    add_common(cov, true);

    CLI::App* sel = app.add_subcommand("select", "apply the sample-selection cascade");
    add_common(sel, true);

    CLI::App* est = app.add_subcommand("estimate", "fit the take-up models");
    add_common(est, true);
    est->add_option("--model", model, "m0|m1|m2|m3|all");
    est->add_option("--weights", weights, "on|off survey weights");
    est->add_option("--nodes", nodes, "quadrature nodes");

    CLI::App* met = app.add_subcommand("metrics", "non-take-up and quality metrics");
    add_common(met, true);
    met->add_option("--weights", weights, "on|off survey weights");

    CLI::App* mc = app.add_subcommand("montecarlo", "replication study of the estimator");
    add_common(mc, false);
    mc->add_option("--seed", seed, "override the DGP seed")->each([&](const std::string&) {
        seed_set = true;
    });

    CLI::App* rep = app.add_subcommand("report", "assemble the report tables");
    add_common(rep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fail_line("usage", e.what());
        return kExitUsage;
    }

    try {
        if (weights != "on" && weights != "off")
            throw ConfigError("--weights must be 'on' or 'off'");

        if (sim->parsed()) {
            simulate_stage(resolve_config(config), out_dir, seed, seed_set);
        } else if (cov->parsed()) {
            covariates_stage(inputs.at(0), resolve_config(config), out_dir);
        } else if (sel->parsed()) {
            select_stage(inputs.at(0), resolve_config(config), out_dir);
        } else if (est->parsed()) {
            EstimateStageOptions opts;
            opts.model = model;
            opts.est.weighted = weights == "on";
            opts.est.quad.nodes = nodes;
            const std::string cfg_path = resolve_config(config);
            const Config cfg = Config::parse_file(cfg_path);
            if (const Config::Section* sec = cfg.find("estimator")) {
                opts.est.pooled = sec->get_long_or("pooled", 0) != 0;
                opts.est.cluster_robust = sec->get_long_or("cluster_robust", 0) != 0;
                opts.est.wave_effects = sec->get_long_or("wave_effects", 1) != 0;
                opts.est.quad.mode = parse_quad_mode(sec->get_or("quadrature", "composite"));
            }
            estimate_stage(inputs.at(0), cfg_path, out_dir, opts);
        } else if (met->parsed()) {
            metrics_stage(inputs.at(0), resolve_config(config), out_dir, weights == "on");
        } else if (mc->parsed()) {
            montecarlo_stage(resolve_config(config), out_dir, seed, seed_set);
        } else if (rep->parsed()) {
            if (inputs.size() != 3)
                throw ConfigError(
                    "report needs --input <metrics_dir> <select_dir> <estimate_dir>");
            report_stage(inputs[0], inputs[1], inputs[2], out_dir);
        }
    } catch (const ConfigError& e) {
        fail_line("config", e.what());
        return kExitConfig;
    } catch (const SchemaError& e) {
        fail_line("schema", e.what());
        return kExitSchema;
    } catch (const MissingInputError& e) {
        fail_line("missing_input", e.what());
        return kExitMissing;
    } catch (const DomainError& e) {
        fail_line("validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        fail_line("internal", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
