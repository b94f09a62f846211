#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include "takeup/optimize.hpp"
#include "takeup/probit.hpp"
#include "takeup/sample.hpp"

namespace takeup {

// Take-up model estimation: pooled probit and household random-effects
// probit by maximum likelihood, average marginal effects with delta-method
// confidence bands, and the nested M0..M3 model suite.

enum class ModelTag { M0, M1, M2, M3 };

inline std::string model_tag_str(ModelTag t) {
    switch (t) {
        case ModelTag::M0: return "m0";
        case ModelTag::M1: return "m1";
        case ModelTag::M2: return "m2";
        case ModelTag::M3: return "m3";
    }
    return "m0";
}

inline ModelTag parse_model_tag(const std::string& s) {
    if (s == "m0") return ModelTag::M0;
    if (s == "m1") return ModelTag::M1;
    if (s == "m2") return ModelTag::M2;
    if (s == "m3") return ModelTag::M3;
    throw ConfigError("unknown model tag: " + s);
}

struct EstimatorOptions {
    bool weighted = false;
    bool pooled = false;          // pooled probit instead of random effects
    bool wave_effects = true;
    bool cluster_robust = false;  // pooled model only
    QuadOptions quad;
    OptimOptions optim;
    std::vector<std::string> covariate_override;  // replaces the model's list
};

// Marginal-effect grouping: a continuous covariate, the gap polynomial, or a
// block of one-hot indicators measured against the omitted reference.
struct EffectBlock {
    std::string label;
    std::vector<std::size_t> columns;
    enum class Kind { Continuous, GapPolynomial, Discrete } kind = Kind::Continuous;
};

struct Design {
    PanelData data;
    std::vector<EffectBlock> blocks;
    std::vector<std::string> dropped;  // all-zero indicator columns
};

namespace design_detail {

struct ColumnDef {
    std::string name;
    bool indicator;
    std::string block;  // empty = stands alone
};

inline std::vector<ColumnDef> model_columns(ModelTag tag) {
    std::vector<ColumnDef> cols = {
        {"intercept", false, ""},
        {"relative_income_gap", false, "gap"},
        {"relative_income_gap_sq", false, "gap"},
        {"age_25_34", true, "age"},
        {"age_35_44", true, "age"},
        {"age_45_54", true, "age"},
        {"age_55_plus", true, "age"},
        {"edu_elementary_middle", true, "education"},
        {"edu_secondary", true, "education"},
        {"edu_university_entrance", true, "education"},
        {"hh_couple_no_children", true, "household_type"},
        {"hh_single_parent", true, "household_type"},
        {"hh_couple_children", true, "household_type"},
        {"child_under_4", true, ""},
        {"female_head", true, ""},
        {"migback_first_gen", true, "migration"},
        {"migback_second_gen", true, "migration"},
        {"disabled_head_or_partner", true, ""},
        {"early_retirement", true, ""},
        {"home_owner", true, ""},
        {"east", true, ""},
        {"msize_50k_plus_periph", true, "municipality"},
        {"msize_50k_500k_core", true, "municipality"},
        {"msize_500k_plus_core", true, "municipality"},
        {"genpop_sample", true, ""},
        {"other_benefit_reported", true, ""},
    };
    if (tag >= ModelTag::M1) {
        cols.push_back({"receipt_share_lag1", false, ""});
        cols.push_back({"receipt_share_lag2", false, ""});
        cols.push_back({"receipt_share_lag3", false, ""});
    }
    if (tag >= ModelTag::M2) {
        cols.push_back({"income_lag1", false, ""});
        cols.push_back({"income_lag2", false, ""});
        cols.push_back({"income_lag3", false, ""});
    }
    if (tag >= ModelTag::M3) {
        cols.push_back({"income_shock", false, ""});
        cols.push_back({"income_volatility", false, ""});
    }
    return cols;
}

inline double column_value(const std::string& name, const SampleRow& r) {
    const HouseholdSnapshot& hh = r.hh;
    const Member& head = hh.head();
    const Member* partner = hh.partner();
    const double gap = r.ent.relative_income_gap;
    if (name == "intercept") return 1.0;
    if (name == "relative_income_gap") return gap;
    if (name == "relative_income_gap_sq") return gap * gap;
    if (name == "age_25_34") return head.age >= 25 && head.age <= 34;
    if (name == "age_35_44") return head.age >= 35 && head.age <= 44;
    if (name == "age_45_54") return head.age >= 45 && head.age <= 54;
    if (name == "age_55_plus") return head.age >= 55;
    if (name.rfind("edu_", 0) == 0) {
        if (!hh.education_head) throw DomainError("missing education in estimation row");
        const int e = *hh.education_head;
        if (name == "edu_elementary_middle") return e == 1;
        if (name == "edu_secondary") return e == 2;
        if (name == "edu_university_entrance") return e == 3;
    }
    if (name == "hh_couple_no_children") return partner != nullptr && hh.n_children() == 0;
    if (name == "hh_single_parent") return partner == nullptr && hh.n_children() > 0;
    if (name == "hh_couple_children") return partner != nullptr && hh.n_children() > 0;
    if (name == "child_under_4") return hh.has_child_under(3);
    if (name == "female_head") return hh.sex_head == Sex::Female;
    if (name == "migback_first_gen") return hh.migration_background_head == Migration::FirstGen;
    if (name == "migback_second_gen") return hh.migration_background_head == Migration::SecondGen;
    if (name == "disabled_head_or_partner")
        return head.disabled || (partner && partner->disabled);
    if (name == "early_retirement")
        return head.early_retirement_self_assessed ||
               (partner && partner->early_retirement_self_assessed);
    if (name == "home_owner") return hh.home_owner;
    if (name == "east") return hh.region == Region::East;
    if (name == "msize_50k_plus_periph") return hh.municipality_size_class == 1;
    if (name == "msize_50k_500k_core") return hh.municipality_size_class == 2;
    if (name == "msize_500k_plus_core") return hh.municipality_size_class == 3;
    if (name == "genpop_sample") return hh.sample_origin == SampleOrigin::GenPop;
    if (name == "other_benefit_reported") return hh.reported_hb || hh.reported_scb;
    if (name == "receipt_share_lag1") return r.cov.receipt_share_lag1;
    if (name == "receipt_share_lag2") return r.cov.receipt_share_lag2;
    if (name == "receipt_share_lag3") return r.cov.receipt_share_lag3;
    // Incomes and volatility enter in 1,000 EUR/month.
    if (name == "income_lag1") return r.cov.income_lag1 / 1000.0;
    if (name == "income_lag2") return r.cov.income_lag2 / 1000.0;
    if (name == "income_lag3") return r.cov.income_lag3 / 1000.0;
    if (name == "income_shock") return r.cov.income_shock;
    if (name == "income_volatility") return r.cov.income_volatility / 1000.0;
    if (name.rfind("wave_", 0) == 0)
        return hh.wave_year == static_cast<int>(parse_long(name.substr(5)));
    throw ConfigError("unknown covariate name: " + name);
}

}  // namespace design_detail

// Builds the design matrix. Rows are ordered by (household, wave) so groups
// are contiguous. All-zero indicator columns (categories absent from the
// data) are dropped and noted; remaining rank deficiency is an error naming
// the collinear columns.
inline Design build_design(const std::vector<SampleRow>& rows, ModelTag tag,
                           const EstimatorOptions& opts) {
    if (rows.empty()) throw DomainError("estimation sample is empty");

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&rows](std::size_t a, std::size_t b) {
        if (rows[a].hh.household_id != rows[b].hh.household_id)
            return rows[a].hh.household_id < rows[b].hh.household_id;
        return rows[a].hh.wave_year < rows[b].hh.wave_year;
    });

    std::vector<design_detail::ColumnDef> defs;
    if (!opts.covariate_override.empty()) {
        defs.push_back({"intercept", false, ""});
        for (const auto& name : opts.covariate_override)
            if (name != "intercept") defs.push_back({name, false, name == "relative_income_gap" || name == "relative_income_gap_sq" ? "gap" : ""});
    } else {
        defs = design_detail::model_columns(tag);
        if (opts.wave_effects) {
            std::set<int> years;
            for (const auto& r : rows) years.insert(r.hh.wave_year);
            bool first = true;
            for (int y : years) {
                if (first) {  // reference year
                    first = false;
                    continue;
                }
                defs.push_back({"wave_" + std::to_string(y), true, "wave"});
            }
        }
    }

    const std::size_t n = rows.size();
    Eigen::MatrixXd X(n, defs.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < defs.size(); ++j)
            X(static_cast<long>(i), static_cast<long>(j)) =
                design_detail::column_value(defs[j].name, rows[order[i]]);

    Design d;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < defs.size(); ++j) {
        if (defs[j].indicator && X.col(static_cast<long>(j)).cwiseAbs().maxCoeff() == 0.0) {
            d.dropped.push_back(defs[j].name);
        } else {
            kept.push_back(j);
        }
    }
    d.data.X.resize(n, kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) {
        d.data.X.col(static_cast<long>(k)) = X.col(static_cast<long>(kept[k]));
        d.data.names.push_back(defs[kept[k]].name);
    }

    // Rank check on the reduced design.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.data.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<long>(kept.size())) {
        const auto perm = qr.colsPermutation().indices();
        std::string names;
        for (long k = qr.rank(); k < static_cast<long>(kept.size()); ++k) {
            if (!names.empty()) names += ", ";
            names += d.data.names[static_cast<std::size_t>(perm(k))];
        }
        throw DomainError("singular design: collinear columns: " + names);
    }

    d.data.sign.resize(n);
    d.data.weight.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SampleRow& r = rows[order[i]];
        const double gap = r.ent.relative_income_gap;
        if (!(gap >= 0.0 && gap <= 1.0)) throw DomainError("income gap outside [0,1]");
        d.data.sign[i] = r.corrected_takeup ? 1.0 : -1.0;
        d.data.weight[i] = opts.weighted ? r.hh.survey_weight : 1.0;
    }

    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || rows[order[i]].hh.household_id != rows[order[start]].hh.household_id) {
            d.data.groups.emplace_back(start, i - start);
            d.data.group_ids.push_back(rows[order[start]].hh.household_id);
            double wsum = 0.0;
            for (std::size_t k = start; k < i; ++k) wsum += d.data.weight[k];
            d.data.group_weight.push_back(wsum / static_cast<double>(i - start));
            start = i;
        }
    }

    // Effect blocks, in display order.
    std::map<std::string, EffectBlock> block_map;
    std::vector<std::string> block_order;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const auto& def = defs[kept[k]];
        if (def.name == "intercept" || def.block == "wave") continue;
        std::string key = def.block.empty() ? def.name : def.block;
        if (!block_map.count(key)) {
            EffectBlock b;
            b.label = key == "gap" ? "relative_income_gap" : key;
            b.kind = key == "gap" ? EffectBlock::Kind::GapPolynomial
                     : def.indicator ? EffectBlock::Kind::Discrete
                                     : EffectBlock::Kind::Continuous;
            block_map[key] = b;
            block_order.push_back(key);
        }
        block_map[key].columns.push_back(k);
    }
    for (const auto& key : block_order) d.blocks.push_back(block_map[key]);
    return d;
}

struct EstimationResult {
    std::string model;
    bool pooled = false;
    bool weighted = false;
    std::vector<std::string> names;
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    Eigen::MatrixXd cov;  // over (beta [, sigma_nu])
    double sigma_nu = 0.0;
    double sigma_nu_se = 0.0;
    double rho = 0.0;
    double rho_se = 0.0;
    double loglik = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
    bool hessian_pd = true;
    std::string message;
    std::size_t n_obs = 0;
    std::size_t n_households = 0;
    QuadOptions quad;
    std::vector<std::string> dropped_columns;
    std::vector<TrajectoryPoint> trajectory;
    std::shared_ptr<Design> design;  // retained for marginal effects

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw DomainError("covariate not in model: " + name);
    }
};

inline double rho_of_sigma(double sigma) { return sigma * sigma / (sigma * sigma + 1.0); }

inline EstimationResult fit(const std::vector<SampleRow>& rows, ModelTag tag,
                            const EstimatorOptions& opts = {}) {
    auto design = std::make_shared<Design>(build_design(rows, tag, opts));
    PanelData& data = design->data;
    const long p = static_cast<long>(data.n_params());

    EstimationResult res;
    res.model = model_tag_str(tag);
    res.pooled = opts.pooled;
    res.weighted = opts.weighted;
    res.names = data.names;
    res.n_obs = data.n_obs();
    res.n_households = data.n_groups();
    res.quad = opts.quad;
    res.dropped_columns = design->dropped;
    res.design = design;

    // Starting point: gradient-free intercept guess, zero slopes.
    double wsum = 0.0, wtake = 0.0;
    for (std::size_t i = 0; i < data.n_obs(); ++i) {
        wsum += data.weight[i];
        wtake += data.sign[i] > 0 ? data.weight[i] : 0.0;
    }
    const double share = std::min(0.999, std::max(0.001, wtake / wsum));
    Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(p);
    for (std::size_t j = 0; j < data.names.size(); ++j)
        if (data.names[j] == "intercept") beta0(static_cast<long>(j)) = normal_quantile(share);

    Objective pooled_obj = [&data](const Eigen::VectorXd& b, Eigen::VectorXd& g) {
        ValueGrad vg = loglik_pooled(data, b);
        g = vg.grad;
        return vg.value;
    };
    OptimResult pooled_fit = bfgs_maximize(pooled_obj, beta0, opts.optim);

    auto diverged = [](const Eigen::VectorXd& b) {
        return b.cwiseAbs().maxCoeff() > 30.0;
    };

    if (opts.pooled) {
        res.beta = pooled_fit.x;
        res.loglik = pooled_fit.value;
        res.iterations = pooled_fit.iterations;
        res.grad_norm = pooled_fit.grad_norm;
        res.converged = pooled_fit.converged && !diverged(pooled_fit.x);
        res.message = diverged(pooled_fit.x)
                          ? "coefficients diverged; data may be perfectly separated"
                          : pooled_fit.message;
        res.trajectory = pooled_fit.trajectory;
        Eigen::MatrixXd H = fd_hessian(pooled_obj, res.beta);
        Eigen::MatrixXd info = -H;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        res.hessian_pd = ldlt.info() == Eigen::Success && ldlt.isPositive();
        Eigen::MatrixXd covm;
        if (res.hessian_pd) {
            covm = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
            Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-10);
            covm = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose();
        }
        if (opts.cluster_robust) {
            // Household-level sandwich: A^{-1} B A^{-1}.
            const Eigen::VectorXd z = data.X * res.beta;
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
            for (std::size_t h = 0; h < data.n_groups(); ++h) {
                const auto [start, len] = data.groups[h];
                Eigen::VectorXd sh = Eigen::VectorXd::Zero(p);
                for (std::size_t t = start; t < start + len; ++t) {
                    const double a = data.sign[t] * z(static_cast<long>(t));
                    sh += (data.weight[t] * data.sign[t] * inverse_mills(a)) *
                          data.X.row(static_cast<long>(t)).transpose();
                }
                B += sh * sh.transpose();
            }
            covm = covm * B * covm;
        }
        res.cov = covm;
        res.se = covm.diagonal().cwiseMax(0.0).cwiseSqrt();
        return res;
    }

    // Random effects: theta = (beta, log sigma).
    Objective re_obj = [&data, &opts](const Eigen::VectorXd& th, Eigen::VectorXd& g) {
        const long pp = th.size() - 1;
        const double sigma = std::exp(th(pp));
        ValueGrad vg = loglik_re(data, th.head(pp), sigma, opts.quad);
        g.resize(th.size());
        g.head(pp) = vg.grad.head(pp);
        g(pp) = vg.grad(pp) * sigma;  // chain rule for log sigma
        return vg.value;
    };
    Eigen::VectorXd theta0(p + 1);
    theta0.head(p) = pooled_fit.converged ? pooled_fit.x : beta0;
    theta0(p) = std::log(0.7);
    OptimResult re_fit = bfgs_maximize(re_obj, theta0, opts.optim);

    res.beta = re_fit.x.head(p);
    res.sigma_nu = std::exp(re_fit.x(p));
    res.rho = rho_of_sigma(res.sigma_nu);
    res.loglik = re_fit.value;
    res.iterations = re_fit.iterations;
    res.grad_norm = re_fit.grad_norm;
    res.converged = re_fit.converged && !diverged(res.beta);
    res.message = diverged(res.beta)
                      ? "coefficients diverged; data may be perfectly separated"
                      : re_fit.message;
    res.trajectory = re_fit.trajectory;

    Eigen::MatrixXd H = fd_hessian(re_obj, re_fit.x);
    Eigen::MatrixXd info = -H;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    res.hessian_pd = ldlt.info() == Eigen::Success && ldlt.isPositive();
    Eigen::MatrixXd cov_theta;
    if (res.hessian_pd) {
        cov_theta = ldlt.solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-10);
        cov_theta =
            es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    }
    // Transform (beta, log sigma) -> (beta, sigma).
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(p + 1, p + 1);
    J(p, p) = res.sigma_nu;
    res.cov = J * cov_theta * J.transpose();
    res.se = res.cov.diagonal().head(p).cwiseMax(0.0).cwiseSqrt();
    res.sigma_nu_se = std::sqrt(std::max(0.0, res.cov(p, p)));
    const double s = res.sigma_nu;
    const double drho = 2.0 * s / ((s * s + 1.0) * (s * s + 1.0));
    res.rho_se = std::fabs(drho) * res.sigma_nu_se;
    return res;
}

// --- average marginal effects ------------------------------------------------

struct MarginalEffects {
    std::vector<std::string> labels;
    Eigen::VectorXd effect;
    Eigen::VectorXd se;
    Eigen::MatrixXd jacobian;   // d effect / d (beta [, sigma])
    Eigen::MatrixXd cov_theta;  // copied from the fit

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        throw DomainError("no marginal effect for covariate: " + label);
    }
};

namespace effects_detail {

// Effects at a given parameter point. For the RE model the household effect
// is integrated out: P(take-up | x) = Phi(x'beta / sqrt(1 + sigma^2)).
inline Eigen::VectorXd ame_at(const PanelData& data, const std::vector<EffectBlock>& blocks,
                              bool pooled, const Eigen::VectorXd& beta, double sigma) {
    const double scale = pooled ? 1.0 : std::sqrt(1.0 + sigma * sigma);
    const Eigen::VectorXd z = data.X * beta;
    const long n = static_cast<long>(data.n_obs());
    double wsum = 0.0;
    for (std::size_t i = 0; i < data.n_obs(); ++i) wsum += data.weight[i];

    Eigen::VectorXd out(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const EffectBlock& blk = blocks[b];
        double acc = 0.0;
        switch (blk.kind) {
            case EffectBlock::Kind::Continuous: {
                const long j = static_cast<long>(blk.columns[0]);
                for (long i = 0; i < n; ++i)
                    acc += data.weight[static_cast<std::size_t>(i)] *
                           normal_pdf(z(i) / scale) * beta(j) / scale;
                break;
            }
            case EffectBlock::Kind::GapPolynomial: {
                const long j1 = static_cast<long>(blk.columns[0]);
                const long j2 = static_cast<long>(blk.columns[1]);
                for (long i = 0; i < n; ++i) {
                    const double g = data.X(i, j1);
                    acc += data.weight[static_cast<std::size_t>(i)] *
                           normal_pdf(z(i) / scale) * (beta(j1) + 2.0 * beta(j2) * g) / scale;
                }
                break;
            }
            case EffectBlock::Kind::Discrete: {
                // Average discrete change from the reference category. For a
                // multi-category block, all of the block's indicators are
                // zeroed to form the reference.
                for (long i = 0; i < n; ++i) {
                    double zref = z(i);
                    for (std::size_t c : blk.columns)
                        zref -= data.X(i, static_cast<long>(c)) * beta(static_cast<long>(c));
                    const double zc = zref + beta(static_cast<long>(blk.columns[0]));
                    acc += data.weight[static_cast<std::size_t>(i)] *
                           (normal_cdf(zc / scale) - normal_cdf(zref / scale));
                }
                break;
            }
        }
        out(static_cast<long>(b)) = acc / wsum;
    }
    return out;
}

}  // namespace effects_detail

// A discrete block with k categories yields k effect rows (one per
// category); continuous covariates and the gap polynomial yield one each.
inline MarginalEffects marginal_effects(const EstimationResult& res) {
    if (!res.design) throw DomainError("estimation result carries no design");
    const Design& d = *res.design;

    // Expand multi-category blocks into per-category singletons for output.
    std::vector<EffectBlock> expanded;
    for (const auto& blk : d.blocks) {
        if (blk.kind == EffectBlock::Kind::Discrete && blk.columns.size() > 1) {
            for (std::size_t c : blk.columns) {
                EffectBlock e;
                e.label = d.data.names[c];
                e.kind = EffectBlock::Kind::Discrete;
                e.columns = blk.columns;
                // Rotate so the reported category comes first.
                std::swap(e.columns[0], *std::find(e.columns.begin(), e.columns.end(), c));
                expanded.push_back(e);
            }
        } else {
            EffectBlock e = blk;
            if (e.kind != EffectBlock::Kind::GapPolynomial) e.label = d.data.names[e.columns[0]];
            else e.label = "relative_income_gap";
            expanded.push_back(e);
        }
    }

    auto eval = [&d, &expanded, &res](const Eigen::VectorXd& beta, double sigma) {
        return effects_detail::ame_at(d.data, expanded, res.pooled, beta, sigma);
    };

    const long p = res.beta.size();
    const long ptheta = res.pooled ? p : p + 1;
    Eigen::VectorXd theta(ptheta);
    theta.head(p) = res.beta;
    if (!res.pooled) theta(p) = res.sigma_nu;

    MarginalEffects me;
    for (const auto& e : expanded) me.labels.push_back(e.label);
    me.effect = eval(res.beta, res.pooled ? 0.0 : res.sigma_nu);

    // Delta method with a numeric Jacobian of the effect vector.
    me.jacobian.resize(static_cast<long>(expanded.size()), ptheta);
    for (long k = 0; k < ptheta; ++k) {
        const double h = 1e-6 * std::max(1.0, std::fabs(theta(k)));
        Eigen::VectorXd tp = theta, tm = theta;
        tp(k) += h;
        tm(k) -= h;
        const Eigen::VectorXd ep =
            eval(tp.head(p), res.pooled ? 0.0 : std::max(0.0, tp(ptheta - 1)));
        const Eigen::VectorXd em =
            eval(tm.head(p), res.pooled ? 0.0 : std::max(0.0, tm(ptheta - 1)));
        me.jacobian.col(k) = (ep - em) / (2.0 * h);
    }
    me.cov_theta = res.cov;
    Eigen::MatrixXd v = me.jacobian * res.cov * me.jacobian.transpose();
    me.se = v.diagonal().cwiseMax(0.0).cwiseSqrt();
    return me;
}

struct LongRunEffect {
    double effect = 0.0;
    double se = 0.0;
};

// Sum of a group's marginal effects; the paper's long-run reading of the
// lagged receipt shares and lagged incomes.
inline double long_run_effect(const std::vector<double>& effects) {
    double s = 0.0;
    for (double e : effects) s += e;
    return s;
}

inline LongRunEffect long_run_effect(const MarginalEffects& me,
                                     const std::vector<std::string>& group) {
    LongRunEffect lr;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(me.jacobian.cols());
    for (const auto& label : group) {
        const std::size_t i = me.index_of(label);
        lr.effect += me.effect(static_cast<long>(i));
        grad += me.jacobian.row(static_cast<long>(i)).transpose();
    }
    lr.se = std::sqrt(std::max(0.0, grad.dot(me.cov_theta * grad)));
    return lr;
}

// --- model suite -------------------------------------------------------------

struct SuiteResult {
    std::map<std::string, EstimationResult> models;
    std::map<std::string, std::string> errors;
};

inline SuiteResult model_suite(const std::vector<SampleRow>& rows,
                               const EstimatorOptions& opts = {}) {
    if (rows.empty()) throw DomainError("estimation sample is empty");
    SuiteResult out;
    for (ModelTag tag : {ModelTag::M0, ModelTag::M1, ModelTag::M2, ModelTag::M3}) {
        const std::string name = model_tag_str(tag);
        try {
            out.models.emplace(name, fit(rows, tag, opts));
        } catch (const std::exception& e) {
            out.errors.emplace(name, e.what());
        }
    }
    return out;
}

// --- output ------------------------------------------------------------------

inline std::string significance_stars(double p_value) {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

inline double two_sided_p(double estimate, double se) {
    if (!(se > 0.0)) return 1.0;
    const double z = std::fabs(estimate / se);
    return 2.0 * normal_cdf(-z);
}

inline void write_coefficients(const EstimationResult& res, const std::string& path) {
    Table t({"name", "estimate", "std_error", "z_value", "p_value", "stars"});
    auto add = [&t](const std::string& name, double est, double se) {
        const double p = two_sided_p(est, se);
        const double z = se > 0.0 ? est / se : 0.0;
        t.add_row({name, fmt_double(est), fmt_double(se), fmt_double(z), fmt_double(p),
                   significance_stars(p)});
    };
    for (std::size_t i = 0; i < res.names.size(); ++i)
        add(res.names[i], res.beta(static_cast<long>(i)), res.se(static_cast<long>(i)));
    if (!res.pooled) {
        add("sigma_nu", res.sigma_nu, res.sigma_nu_se);
        add("rho", res.rho, res.rho_se);
    }
    t.write_file(path);
}

inline void write_effects(const MarginalEffects& me, const std::string& path) {
    Table t({"name", "effect", "std_error", "p_value", "stars", "ci90_lo", "ci90_hi", "ci95_lo",
             "ci95_hi", "ci99_lo", "ci99_hi"});
    for (std::size_t i = 0; i < me.labels.size(); ++i) {
        const double e = me.effect(static_cast<long>(i));
        const double s = me.se(static_cast<long>(i));
        const double p = two_sided_p(e, s);
        t.add_row({me.labels[i], fmt_double(e), fmt_double(s), fmt_double(p),
                   significance_stars(p), fmt_double(e - kZ90 * s), fmt_double(e + kZ90 * s),
                   fmt_double(e - kZ95 * s), fmt_double(e + kZ95 * s), fmt_double(e - kZ99 * s),
                   fmt_double(e + kZ99 * s)});
    }
    t.write_file(path);
}

}  // namespace takeup
