#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "takeup/estimator.hpp"
#include "takeup/sample.hpp"

namespace takeup {

// Non-take-up and beta-error rates, subgroup breakdowns, take-up typology,
// the income-gap/take-up curve, covariate means and simulation-quality
// summaries. All aggregations are pure; "weighted" uses the survey weight.

namespace metrics_detail {

inline double row_weight(const SampleRow& r, bool weighted) {
    return weighted ? r.hh.survey_weight : 1.0;
}

inline bool receipt_flag(const SampleRow& r, bool corrected) {
    return corrected ? r.corrected_takeup : r.hh.reported_ubii;
}

}  // namespace metrics_detail

// Share of eligible mass without benefit receipt.
inline double ntr(const std::vector<SampleRow>& rows, bool corrected, bool weighted) {
    double eligible = 0.0, non_takeup = 0.0;
    for (const auto& r : rows) {
        if (!r.ent.eligible_ubii) continue;
        const double w = metrics_detail::row_weight(r, weighted);
        eligible += w;
        if (!metrics_detail::receipt_flag(r, corrected)) non_takeup += w;
    }
    if (!(eligible > 0.0)) throw DomainError("non-take-up rate undefined: no eligible mass");
    return non_takeup / eligible;
}

// Share of receiving mass simulated as ineligible.
inline double ber(const std::vector<SampleRow>& rows, bool corrected, bool weighted) {
    double receiving = 0.0, ineligible = 0.0;
    for (const auto& r : rows) {
        if (!metrics_detail::receipt_flag(r, corrected)) continue;
        const double w = metrics_detail::row_weight(r, weighted);
        receiving += w;
        if (!r.ent.eligible_ubii) ineligible += w;
    }
    if (!(receiving > 0.0)) throw DomainError("beta-error rate undefined: no receipt mass");
    return ineligible / receiving;
}

struct RateCell {
    bool available = false;
    double value = 0.0;
};

struct RateRow {
    std::string label;
    RateCell ntr_uncorrected, ntr_corrected, difference_pp, ber_uncorrected, ber_corrected;
};

struct RateTable {
    bool weighted = true;
    std::vector<RateRow> rows;
};

namespace metrics_detail {

inline RateRow rate_row(const std::string& label, const std::vector<SampleRow>& subset,
                        bool weighted) {
    RateRow row;
    row.label = label;
    auto fill = [&](RateCell& cell, auto fn) {
        try {
            cell.value = fn();
            cell.available = true;
        } catch (const DomainError&) {
            cell.available = false;  // empty cell stays missing, not zero
        }
    };
    fill(row.ntr_uncorrected, [&] { return 100.0 * ntr(subset, false, weighted); });
    fill(row.ntr_corrected, [&] { return 100.0 * ntr(subset, true, weighted); });
    if (row.ntr_uncorrected.available && row.ntr_corrected.available) {
        row.difference_pp.available = true;
        row.difference_pp.value = row.ntr_corrected.value - row.ntr_uncorrected.value;
    }
    fill(row.ber_uncorrected, [&] { return 100.0 * ber(subset, false, weighted); });
    fill(row.ber_corrected, [&] { return 100.0 * ber(subset, true, weighted); });
    return row;
}

using Classifier = std::function<std::string(const SampleRow&)>;

inline RateTable table_by(const std::vector<SampleRow>& rows, bool weighted,
                          const std::vector<std::string>& labels, const Classifier& classify) {
    std::map<std::string, std::vector<SampleRow>> cells;
    for (const auto& r : rows) cells[classify(r)].push_back(r);
    RateTable t;
    t.weighted = weighted;
    for (const auto& label : labels) {
        auto it = cells.find(label);
        if (it == cells.end()) {
            RateRow empty;
            empty.label = label;
            t.rows.push_back(empty);
        } else {
            t.rows.push_back(rate_row(label, it->second, weighted));
        }
    }
    return t;
}

}  // namespace metrics_detail

inline RateTable rate_table_by_year(const std::vector<SampleRow>& rows, bool weighted) {
    std::set<int> years;
    for (const auto& r : rows) years.insert(r.hh.wave_year);
    std::vector<std::string> labels;
    for (int y : years) labels.push_back(std::to_string(y));
    RateTable t = metrics_detail::table_by(
        rows, weighted, labels,
        [](const SampleRow& r) { return std::to_string(r.hh.wave_year); });
    t.rows.push_back(metrics_detail::rate_row("total", rows, weighted));
    return t;
}

inline RateTable rate_table_by_subsample(const std::vector<SampleRow>& rows, bool weighted) {
    RateTable t = metrics_detail::table_by(
        rows, weighted, {"admin", "genpop"}, [](const SampleRow& r) {
            return r.hh.sample_origin == SampleOrigin::GenPop ? "genpop" : "admin";
        });
    t.rows.push_back(metrics_detail::rate_row("total", rows, weighted));
    return t;
}

// Year x subsample cells, the data behind the subsample NTR trajectory plot.
inline RateTable rate_table_by_year_subsample(const std::vector<SampleRow>& rows, bool weighted) {
    std::set<int> years;
    for (const auto& r : rows) years.insert(r.hh.wave_year);
    std::vector<std::string> labels;
    for (int y : years)
        for (const char* origin : {"admin", "genpop"})
            labels.push_back(std::to_string(y) + ":" + origin);
    return metrics_detail::table_by(rows, weighted, labels, [](const SampleRow& r) {
        return std::to_string(r.hh.wave_year) + ":" +
               (r.hh.sample_origin == SampleOrigin::GenPop ? "genpop" : "admin");
    });
}

// Subgroup table mirroring the grouping variables of the subgroup-NTR
// appendix; one row per category, grouped variable prefixed on the label.
inline RateTable rate_table_by_subgroup(const std::vector<SampleRow>& rows, bool weighted) {
    struct Grouping {
        std::string var;
        std::vector<std::string> categories;
        std::function<std::string(const SampleRow&)> classify;
    };
    const std::vector<Grouping> groupings = {
        {"sex_head", {"male", "female"},
         [](const SampleRow& r) { return r.hh.sex_head == Sex::Female ? "female" : "male"; }},
        {"region", {"west", "east"},
         [](const SampleRow& r) { return r.hh.region == Region::East ? "east" : "west"; }},
        {"home_owner", {"no", "yes"},
         [](const SampleRow& r) { return r.hh.home_owner ? "yes" : "no"; }},
        {"child_under_4", {"no", "yes"},
         [](const SampleRow& r) { return r.hh.has_child_under(3) ? "yes" : "no"; }},
        {"disabled", {"no", "yes"},
         [](const SampleRow& r) {
             const Member* p = r.hh.partner();
             return (r.hh.head().disabled || (p && p->disabled)) ? "yes" : "no";
         }},
        {"early_retirement", {"no", "yes"},
         [](const SampleRow& r) {
             const Member* p = r.hh.partner();
             return (r.hh.head().early_retirement_self_assessed ||
                     (p && p->early_retirement_self_assessed))
                        ? "yes"
                        : "no";
         }},
        {"other_benefit_reported", {"no", "yes"},
         [](const SampleRow& r) { return (r.hh.reported_hb || r.hh.reported_scb) ? "yes" : "no"; }},
        {"subsample", {"admin", "genpop"},
         [](const SampleRow& r) {
             return r.hh.sample_origin == SampleOrigin::GenPop ? "genpop" : "admin";
         }},
        {"migration_background", {"none", "first_gen", "second_gen"},
         [](const SampleRow& r) {
             switch (r.hh.migration_background_head) {
                 case Migration::FirstGen: return "first_gen";
                 case Migration::SecondGen: return "second_gen";
                 default: return "none";
             }
         }},
        {"age_head", {"15_24", "25_34", "35_44", "45_54", "55_plus"},
         [](const SampleRow& r) {
             const int a = r.hh.head().age;
             if (a <= 24) return "15_24";
             if (a <= 34) return "25_34";
             if (a <= 44) return "35_44";
             if (a <= 54) return "45_54";
             return "55_plus";
         }},
        {"education_head", {"none", "elementary_middle", "secondary", "university_entrance"},
         [](const SampleRow& r) {
             if (!r.hh.education_head) return "none";
             switch (*r.hh.education_head) {
                 case 1: return "elementary_middle";
                 case 2: return "secondary";
                 case 3: return "university_entrance";
                 default: return "none";
             }
         }},
        {"household_type", {"single", "couple_no_children", "single_parent", "couple_children"},
         [](const SampleRow& r) {
             const bool couple = r.hh.partner() != nullptr;
             const bool kids = r.hh.n_children() > 0;
             if (couple) return kids ? "couple_children" : "couple_no_children";
             return kids ? "single_parent" : "single";
         }},
        {"municipality_size", {"below_50k", "50k_plus_periph", "50k_500k_core", "500k_plus_core"},
         [](const SampleRow& r) {
             switch (r.hh.municipality_size_class) {
                 case 1: return "50k_plus_periph";
                 case 2: return "50k_500k_core";
                 case 3: return "500k_plus_core";
                 default: return "below_50k";
             }
         }},
    };
    RateTable t;
    t.weighted = weighted;
    for (const auto& g : groupings) {
        std::vector<std::string> labels;
        for (const auto& c : g.categories) labels.push_back(g.var + ":" + c);
        auto classify = [&g](const SampleRow& r) { return g.var + ":" + g.classify(r); };
        RateTable part = metrics_detail::table_by(rows, weighted, labels, classify);
        for (auto& row : part.rows) t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_rate_table(const RateTable& t, const std::string& path) {
    Table out({"group", "ntr_uncorrected_pct", "ntr_corrected_pct", "difference_pp",
               "ber_uncorrected_pct", "ber_corrected_pct"});
    auto cell = [](const RateCell& c) { return c.available ? fmt_double(c.value) : "NA"; };
    for (const auto& r : t.rows)
        out.add_row({r.label, cell(r.ntr_uncorrected), cell(r.ntr_corrected),
                     cell(r.difference_pp), cell(r.ber_uncorrected), cell(r.ber_corrected)});
    out.write_file(path);
}

// --- intertemporal take-up types ---------------------------------------------

struct TakeupTypes {
    long never = 0, sometimes = 0, always = 0;
    double never_share = 0.0, sometimes_share = 0.0, always_share = 0.0;
    double never_wshare = 0.0, sometimes_wshare = 0.0, always_wshare = 0.0;
    long total() const { return never + sometimes + always; }
};

// Households with at least one eligible wave, classified over their eligible
// waves by the corrected receipt flag. Household weight: mean of its
// eligible-wave weights.
inline TakeupTypes takeup_types(const std::vector<SampleRow>& rows) {
    struct HH {
        long waves = 0, claims = 0;
        double wsum = 0.0;
    };
    std::map<long, HH> by_hh;
    for (const auto& r : rows) {
        if (!r.ent.eligible_ubii) continue;
        auto& h = by_hh[r.hh.household_id];
        ++h.waves;
        h.claims += r.corrected_takeup ? 1 : 0;
        h.wsum += r.hh.survey_weight;
    }
    TakeupTypes t;
    double wn = 0.0, ws = 0.0, wa = 0.0;
    for (const auto& [id, h] : by_hh) {
        const double w = h.wsum / static_cast<double>(h.waves);
        if (h.claims == 0) {
            ++t.never;
            wn += w;
        } else if (h.claims == h.waves) {
            ++t.always;
            wa += w;
        } else {
            ++t.sometimes;
            ws += w;
        }
    }
    const double n = static_cast<double>(t.total());
    const double wtot = wn + ws + wa;
    if (n > 0) {
        t.never_share = t.never / n;
        t.sometimes_share = t.sometimes / n;
        t.always_share = t.always / n;
    }
    if (wtot > 0) {
        t.never_wshare = wn / wtot;
        t.sometimes_wshare = ws / wtot;
        t.always_wshare = wa / wtot;
    }
    return t;
}

inline void write_takeup_types(const TakeupTypes& t, const std::string& path) {
    Table out({"type", "households", "share", "weighted_share"});
    out.add_row({"never", std::to_string(t.never), fmt_double(t.never_share),
                 fmt_double(t.never_wshare)});
    out.add_row({"sometimes", std::to_string(t.sometimes), fmt_double(t.sometimes_share),
                 fmt_double(t.sometimes_wshare)});
    out.add_row({"always", std::to_string(t.always), fmt_double(t.always_share),
                 fmt_double(t.always_wshare)});
    out.add_row({"total", std::to_string(t.total()), fmt_double(t.total() > 0 ? 1.0 : 0.0),
                 fmt_double(t.total() > 0 ? 1.0 : 0.0)});
    out.write_file(path);
}

// --- income-gap curve ----------------------------------------------------------

struct GapCurve {
    // Eleven equal-width, right-closed categories over [0,1].
    struct Bin {
        double midpoint = 0.0;
        bool available = false;
        double takeup_rate = 0.0;
        double mass_share = 0.0;
        long count = 0;
    };
    std::vector<Bin> bins;             // size 11
    bool fit_available = false;
    double quad_a0 = 0.0, quad_a1 = 0.0, quad_a2 = 0.0;  // rate ~ a0 + a1 g + a2 g^2
};

inline int gap_bin_index(double gap) {
    if (!(gap >= 0.0 && gap <= 1.0)) throw DomainError("gap outside [0,1]");
    if (gap == 0.0) return 0;
    const int b = static_cast<int>(std::ceil(gap * 11.0)) - 1;
    return b > 10 ? 10 : b;
}

inline GapCurve gap_curve(const std::vector<SampleRow>& rows, bool weighted = true) {
    GapCurve c;
    c.bins.resize(11);
    std::vector<double> w(11, 0.0), wy(11, 0.0);
    double wtot = 0.0;
    for (const auto& r : rows) {
        if (!r.ent.eligible_ubii) continue;
        const int b = gap_bin_index(r.ent.relative_income_gap);
        const double wt = metrics_detail::row_weight(r, weighted);
        w[b] += wt;
        wy[b] += wt * (r.corrected_takeup ? 1.0 : 0.0);
        wtot += wt;
        ++c.bins[b].count;
    }
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    int used = 0;
    for (int b = 0; b < 11; ++b) {
        c.bins[b].midpoint = (b + 0.5) / 11.0;
        if (w[b] > 0.0) {
            c.bins[b].available = true;
            c.bins[b].takeup_rate = wy[b] / w[b];
            c.bins[b].mass_share = wtot > 0.0 ? w[b] / wtot : 0.0;
            const double g = c.bins[b].midpoint;
            Eigen::Vector3d x(1.0, g, g * g);
            A += w[b] * x * x.transpose();
            rhs += w[b] * c.bins[b].takeup_rate * x;
            ++used;
        }
    }
    if (used >= 3) {
        Eigen::Vector3d coef = A.ldlt().solve(rhs);
        c.fit_available = true;
        c.quad_a0 = coef(0);
        c.quad_a1 = coef(1);
        c.quad_a2 = coef(2);
    }
    return c;
}

inline void write_gap_curve(const GapCurve& c, const std::string& path) {
    Table out({"bin", "midpoint", "takeup_rate", "mass_share", "count"});
    for (std::size_t b = 0; b < c.bins.size(); ++b) {
        const auto& bin = c.bins[b];
        out.add_row({std::to_string(b + 1), fmt_double(bin.midpoint),
                     bin.available ? fmt_double(bin.takeup_rate) : "NA",
                     bin.available ? fmt_double(bin.mass_share) : "NA",
                     std::to_string(bin.count)});
    }
    out.add_row({"fit", "NA", c.fit_available ? fmt_double(c.quad_a0) : "NA",
                 c.fit_available ? fmt_double(c.quad_a1) : "NA",
                 c.fit_available ? fmt_double(c.quad_a2) : "NA"});
    out.write_file(path);
}

// --- covariate means by take-up status ----------------------------------------

struct CovariateMeanRow {
    std::string name;
    double mean_all = 0.0, mean_tu = 0.0, mean_ntu = 0.0;
    double difference = 0.0;
    bool test_available = false;
    double z = 0.0, p_value = 1.0;
    std::string stars;
};

inline std::vector<CovariateMeanRow> covariate_means(const std::vector<SampleRow>& rows) {
    // Eligible rows with complete regressors; rows with missing covariates
    // only leave the sample at a later cascade step.
    std::vector<SampleRow> eligible;
    for (const auto& r : rows)
        if (r.ent.eligible_ubii && r.hh.education_head.has_value()) eligible.push_back(r);
    std::vector<design_detail::ColumnDef> defs = design_detail::model_columns(ModelTag::M3);
    std::vector<CovariateMeanRow> out;
    for (const auto& def : defs) {
        if (def.name == "intercept") continue;
        struct Grp {
            double w = 0.0, wx = 0.0, wxx = 0.0;
            long n = 0;
        } all, tu, ntu;
        auto add = [](Grp& g, double w, double x) {
            g.w += w;
            g.wx += w * x;
            g.wxx += w * x * x;
            ++g.n;
        };
        for (const auto& r : eligible) {
            const double x = design_detail::column_value(def.name, r);
            const double w = r.hh.survey_weight;
            add(all, w, x);
            add(r.corrected_takeup ? tu : ntu, w, x);
        }
        CovariateMeanRow row;
        row.name = def.name;
        auto mean = [](const Grp& g) { return g.w > 0.0 ? g.wx / g.w : 0.0; };
        row.mean_all = mean(all);
        row.mean_tu = mean(tu);
        row.mean_ntu = mean(ntu);
        row.difference = row.mean_tu - row.mean_ntu;
        if (tu.n >= 2 && ntu.n >= 2) {
            auto var_of_mean = [](const Grp& g, double mu) {
                // Var of the weighted mean via the weighted residual sum.
                double s = g.wxx - 2.0 * mu * g.wx + mu * mu * g.w;
                return s > 0.0 ? s / (g.w * g.w) * (static_cast<double>(g.n) /
                                                    std::max(1.0, static_cast<double>(g.n - 1)))
                               : 0.0;
            };
            const double v = var_of_mean(tu, row.mean_tu) + var_of_mean(ntu, row.mean_ntu);
            if (v > 0.0) {
                row.test_available = true;
                row.z = row.difference / std::sqrt(v);
                row.p_value = 2.0 * normal_cdf(-std::fabs(row.z));
                row.stars = significance_stars(row.p_value);
            }
        }
        out.push_back(row);
    }
    return out;
}

inline void write_covariate_means(const std::vector<CovariateMeanRow>& rows,
                                  const std::string& path) {
    Table out({"covariate", "mean_all", "mean_takeup", "mean_non_takeup", "difference", "z_value",
               "p_value", "stars"});
    for (const auto& r : rows) {
        out.add_row({r.name, fmt_double(r.mean_all), fmt_double(r.mean_tu),
                     fmt_double(r.mean_ntu), fmt_double(r.difference),
                     r.test_available ? fmt_double(r.z) : "NA",
                     r.test_available ? fmt_double(r.p_value) : "NA", r.stars});
    }
    out.write_file(path);
}

// --- simulation quality --------------------------------------------------------

struct WeightedStats {
    bool available = false;
    double median = 0.0, mean = 0.0, sd = 0.0;
};

inline WeightedStats weighted_stats(std::vector<std::pair<double, double>> vw) {
    WeightedStats s;
    if (vw.empty()) return s;
    double wtot = 0.0, wx = 0.0;
    for (const auto& [v, w] : vw) {
        wtot += w;
        wx += w * v;
    }
    if (!(wtot > 0.0)) return s;
    s.available = true;
    s.mean = wx / wtot;
    double ss = 0.0;
    for (const auto& [v, w] : vw) ss += w * (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / wtot);
    std::sort(vw.begin(), vw.end());
    double cum = 0.0;
    for (const auto& [v, w] : vw) {
        cum += w;
        if (cum >= 0.5 * wtot) {
            s.median = v;
            break;
        }
    }
    return s;
}

// Disposable income simulated by the rules engine: countable income plus the
// simulated UB II entitlement for eligible households, plus the upstream
// benefits where precedence routes the household to HB/SCB.
inline double simulated_disposable_income(const SampleRow& r) {
    double v = r.ent.countable_income.euros();
    if (r.ent.eligible_ubii) v += r.ent.entitlement.euros();
    else if (r.ent.precedence_blocked)
        v += r.ent.hb_amount.euros() + r.ent.scb_amount.euros();
    return v;
}

struct SimQualityCell {
    std::string eligibility;  // "no" | "yes" | "total"
    std::string receipt;      // "no" | "yes" | "total"
    WeightedStats reported;
    WeightedStats simulated;
    long n = 0;
};

// Median/mean/SD of reported vs simulated disposable income, deflated and
// equivalised, cross-tabulated by simulated eligibility x corrected receipt.
inline std::vector<SimQualityCell> sim_quality(const std::vector<SampleRow>& rows,
                                               const PolicySet& policy, bool weighted = true) {
    std::vector<SimQualityCell> cells;
    for (const std::string elig : {"no", "yes", "total"}) {
        for (const std::string rec : {"no", "yes", "total"}) {
            SimQualityCell cell;
            cell.eligibility = elig;
            cell.receipt = rec;
            std::vector<std::pair<double, double>> rep, sim;
            for (const auto& r : rows) {
                if (elig != "total" && r.ent.eligible_ubii != (elig == "yes")) continue;
                if (rec != "total" && r.corrected_takeup != (rec == "yes")) continue;
                const double deflator = policy.cpi(r.hh.wave_year);
                const double eq = r.hh.oecd_weight();
                const double w = metrics_detail::row_weight(r, weighted);
                rep.emplace_back(r.hh.reported_disposable_income.euros() / deflator / eq, w);
                sim.emplace_back(simulated_disposable_income(r) / deflator / eq, w);
                ++cell.n;
            }
            cell.reported = weighted_stats(std::move(rep));
            cell.simulated = weighted_stats(std::move(sim));
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

inline void write_sim_quality(const std::vector<SimQualityCell>& cells, const std::string& path) {
    Table out({"eligibility", "receipt", "series", "median", "mean", "sd", "n"});
    for (const auto& c : cells) {
        auto add = [&](const char* series, const WeightedStats& s) {
            out.add_row({c.eligibility, c.receipt, series, s.available ? fmt_double(s.median) : "NA",
                         s.available ? fmt_double(s.mean) : "NA",
                         s.available ? fmt_double(s.sd) : "NA", std::to_string(c.n)});
        };
        add("reported", c.reported);
        add("simulated", c.simulated);
    }
    out.write_file(path);
}

// --- kernel densities ----------------------------------------------------------

struct DensitySeries {
    std::string label;
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

// Gaussian kernel, rule-of-thumb plug-in bandwidth
// h = 0.9 min(sd, iqr/1.34) n_eff^{-1/5}.
inline DensitySeries kernel_density(const std::string& label,
                                    const std::vector<std::pair<double, double>>& vw,
                                    int grid_points = 512) {
    DensitySeries d;
    d.label = label;
    if (vw.size() < 2) return d;
    double wtot = 0.0, wx = 0.0, w2 = 0.0;
    for (const auto& [v, w] : vw) {
        wtot += w;
        wx += w * v;
        w2 += w * w;
    }
    const double mean = wx / wtot;
    double ss = 0.0;
    for (const auto& [v, w] : vw) ss += w * (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / wtot);
    std::vector<std::pair<double, double>> sorted = vw;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        double cum = 0.0;
        for (const auto& [v, w] : sorted) {
            cum += w;
            if (cum >= q * wtot) return v;
        }
        return sorted.back().first;
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double n_eff = wtot * wtot / w2;
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
    d.bandwidth = 0.9 * spread * std::pow(n_eff, -0.2);
    if (!(d.bandwidth > 0.0)) d.bandwidth = 1.0;

    const double lo = sorted.front().first - 3.0 * d.bandwidth;
    const double hi = sorted.back().first + 3.0 * d.bandwidth;
    d.grid.resize(grid_points);
    d.density.resize(grid_points);
    const double step = (hi - lo) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) {
        const double x = lo + i * step;
        double acc = 0.0;
        for (const auto& [v, w] : vw) acc += w * normal_pdf((x - v) / d.bandwidth);
        d.grid[i] = x;
        d.density[i] = acc / (d.bandwidth * wtot);
    }
    return d;
}

inline void write_densities(const std::vector<DensitySeries>& series, const std::string& path) {
    Table out({"series", "x", "density"});
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.grid.size(); ++i)
            out.add_row({s.label, fmt_double(s.grid[i]), fmt_double(s.density[i])});
    out.write_file(path);
}

}  // namespace takeup
