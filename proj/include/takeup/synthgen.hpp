#pragma once

#include <map>
#include <string>
#include <vector>

#include "takeup/estimator.hpp"
#include "takeup/rng.hpp"
#include "takeup/rules.hpp"
#include "takeup/sample.hpp"
#include "takeup/selection.hpp"

namespace takeup {

// Fully specified data-generating process: synthetic households, wage and
// receipt histories, entitlements via the rules engine, and take-up outcomes
// drawn from the latent random-effects index
//   P_it = 1{ beta'x_it + nu_i + upsilon_it > 0 },
// nu_i ~ N(0, sigma_nu^2), upsilon_it ~ N(0,1). Every estimator and metric
// gets a ground truth to check against.

struct SyntheticDGP {
    std::uint64_t seed = 1;
    int households = 500;
    int waves = 5;
    int first_year = 2016;
    double attrition = 0.05;          // per-wave exit probability
    double sigma_nu = 1.0;
    double underreport_rate = 0.08;
    double overreport_rate = 0.02;
    double wage_persistence = 0.9;    // AR(1) in log wages
    double wage_innovation_sd = 0.25;
    double wage_level_log = 7.35;     // exp() ~ 1550 EUR/month
    double employment_entry = 0.15;   // quarterly transition rates
    double employment_exit = 0.05;
    bool selection_noise = true;      // inject cascade-relevant defects
    std::map<std::string, double> beta;  // latent-index coefficients by name

    void validate() const {
        if (households < 1) throw ConfigError("dgp: households must be positive");
        if (waves < 1) throw ConfigError("dgp: waves must be positive");
        if (sigma_nu < 0.0) throw ConfigError("dgp: sigma_nu must be non-negative");
        for (double r : {attrition, underreport_rate, overreport_rate})
            if (r < 0.0 || r > 1.0) throw ConfigError("dgp: rates must lie in [0,1]");
        if (wage_persistence <= -1.0 || wage_persistence >= 1.0)
            throw ConfigError("dgp: wage persistence must lie in (-1,1)");
        if (wage_innovation_sd < 0.0) throw ConfigError("dgp: wage innovation sd negative");
    }
};

inline SyntheticDGP parse_dgp(const Config& cfg) {
    const Config::Section& sec = cfg.require("dgp");
    SyntheticDGP d;
    d.seed = static_cast<std::uint64_t>(sec.get_long_or("seed", 1));
    d.households = static_cast<int>(sec.get_long_or("households", 500));
    d.waves = static_cast<int>(sec.get_long_or("waves", 5));
    d.first_year = static_cast<int>(sec.get_long_or("first_year", 2016));
    d.attrition = sec.get_double_or("attrition", 0.05);
    d.sigma_nu = sec.get_double_or("sigma_nu", 1.0);
    d.underreport_rate = sec.get_double_or("underreport_rate", 0.08);
    d.overreport_rate = sec.get_double_or("overreport_rate", 0.02);
    d.wage_persistence = sec.get_double_or("wage_persistence", 0.9);
    d.wage_innovation_sd = sec.get_double_or("wage_innovation_sd", 0.25);
    d.wage_level_log = sec.get_double_or("wage_level_log", 7.35);
    d.employment_entry = sec.get_double_or("employment_entry", 0.15);
    d.employment_exit = sec.get_double_or("employment_exit", 0.05);
    d.selection_noise = sec.get_long_or("selection_noise", 1) != 0;
    if (sec.has("beta")) {
        for (const auto& tok : detail::split_ws(sec.get("beta"))) {
            auto colon = tok.rfind(':');
            if (colon == std::string::npos) throw ConfigError("malformed beta token: " + tok);
            d.beta[tok.substr(0, colon)] = parse_double(tok.substr(colon + 1));
        }
    } else {
        d.beta = {{"intercept", 0.2},
                  {"relative_income_gap", 1.6},
                  {"relative_income_gap_sq", -0.5},
                  {"hh_couple_children", 0.3},
                  {"genpop_sample", -0.8},
                  {"receipt_share_lag1", 0.9}};
    }
    d.validate();
    return d;
}

struct TruthWave {
    long household_id = 0;
    int wave_year = 0;
    double upsilon = 0.0;
    double latent_index = 0.0;  // beta'x (excluding nu and upsilon)
    bool eligible = false;
    bool true_takeup = false;
};

struct SyntheticData {
    std::vector<HouseholdSnapshot> panel;       // sorted by (household, wave)
    std::vector<SpellRecord> spells;
    std::vector<EntitlementResult> entitlements;  // aligned with panel
    std::map<long, double> nu;                  // household random effects
    std::vector<TruthWave> truth;               // aligned with panel
};

// Disposable income implied by the simulation: countable income plus the
// UB II entitlement when received, or the upstream benefits where precedence
// routes the household to HB/SCB.
inline double simulated_disposable_income_raw(const EntitlementResult& ent, bool receipt) {
    double v = ent.countable_income.euros();
    if (ent.eligible_ubii && receipt) v += ent.entitlement.euros();
    else if (ent.precedence_blocked) v += ent.hb_amount.euros() + ent.scb_amount.euros();
    return v;
}

inline SyntheticData generate(const SyntheticDGP& dgp, const PolicySet& policy_in) {
    dgp.validate();
    const int last_year = dgp.first_year + dgp.waves - 1;

    // Deflators must exist for the covariate history window (12 quarters
    // before the first interview); years missing from the configured set
    // fall back to defaults.
    PolicySet policy = policy_in;
    for (int y = dgp.first_year - 4; y <= last_year; ++y)
        if (!policy.has_year(y)) policy.add(default_policy(y));

    SyntheticData out;

    for (int h = 0; h < dgp.households; ++h) {
        Rng rng = Rng::derive(dgp.seed, static_cast<std::uint64_t>(h) + 1);
        const long hid = 1000 + h;

        // Demographics, fixed over the panel.
        const bool couple = rng.bernoulli(0.45);
        const int n_children = static_cast<int>(rng.categorical(std::vector<double>{
            0.45, 0.25, 0.20, 0.10}));
        const int head_age0 = rng.uniform_int(22, 58);
        const SampleOrigin origin =
            dgp.selection_noise && rng.bernoulli(0.02)
                ? SampleOrigin::Refugee
                : (rng.bernoulli(0.45) ? SampleOrigin::GenPop : SampleOrigin::Admin);
        const Region region = rng.bernoulli(0.3) ? Region::East : Region::West;
        const int municipality = static_cast<int>(
            rng.categorical(std::vector<double>{0.35, 0.20, 0.25, 0.20}));
        const Migration migration = static_cast<Migration>(
            rng.categorical(std::vector<double>{0.70, 0.18, 0.12}));
        const int education = static_cast<int>(
            rng.categorical(std::vector<double>{0.10, 0.40, 0.30, 0.20}));
        const Sex sex = rng.bernoulli(0.45) ? Sex::Female : Sex::Male;
        const bool home_owner = rng.bernoulli(0.15);
        const bool head_disabled = rng.bernoulli(0.07);
        const bool early_ret = rng.bernoulli(0.04);
        const double weight_base = origin == SampleOrigin::GenPop ? 5.0 : 1.0;
        const double survey_weight = weight_base * std::exp(rng.normal(0.0, 0.4));
        const int interview_qoy = rng.uniform_int(1, 4);

        const int hh_size = 1 + (couple ? 1 : 0) + n_children;
        const double rent_base = 280.0 + 120.0 * hh_size + rng.normal(0.0, 90.0);
        const Money rent = Money::from_euros(std::max(150.0, rent_base));
        const double sqm = std::max(25.0, 32.0 + 14.0 * hh_size + rng.normal(0.0, 12.0));
        const Money wealth = Money::from_euros(std::vector<double>{
            1000.0, 5000.0, 12000.0, 30000.0, 80000.0}[rng.categorical(
            std::vector<double>{0.45, 0.30, 0.12, 0.08, 0.05})]);

        std::vector<int> child_ages;
        for (int c = 0; c < n_children; ++c) child_ages.push_back(rng.uniform_int(0, 15));

        const double nu = rng.normal(0.0, dgp.sigma_nu);
        out.nu[hid] = nu;

        // Quarterly employment/wage history for the adults, from 16 quarters
        // before the first interview through the last wave.
        const Quarter first_interview(dgp.first_year, interview_qoy);
        const Quarter history_start = first_interview.prev(16);
        const Quarter history_end(last_year, interview_qoy);
        const int n_quarters = history_end.index - history_start.index + 1;
        const int n_adults = couple ? 2 : 1;

        struct AdultPath {
            std::vector<bool> employed;
            std::vector<double> wage;
        };
        std::vector<AdultPath> adults(n_adults);
        for (int a = 0; a < n_adults; ++a) {
            AdultPath& path = adults[a];
            path.employed.resize(n_quarters);
            path.wage.resize(n_quarters);
            const double level =
                dgp.wage_level_log + 0.12 * (education - 1.5) + rng.normal(0.0, 0.2);
            double x = rng.normal(0.0, dgp.wage_innovation_sd /
                                           std::sqrt(1.0 - dgp.wage_persistence *
                                                               dgp.wage_persistence));
            bool emp = rng.bernoulli(0.6);
            for (int q = 0; q < n_quarters; ++q) {
                x = dgp.wage_persistence * x + rng.normal(0.0, dgp.wage_innovation_sd);
                emp = emp ? !rng.bernoulli(dgp.employment_exit)
                          : rng.bernoulli(dgp.employment_entry);
                path.employed[q] = emp;
                path.wage[q] = std::min(8000.0, std::max(450.0, std::exp(level + x)));
            }
        }

        // Pre-panel receipt episode seeds variation in the lagged shares.
        // It must end before the first interview quarter so the admin record
        // at the interview reflects the wave's take-up decision alone.
        std::vector<SpellRecord> hh_spells;
        if (rng.bernoulli(0.35)) {
            const int offset = rng.uniform_int(1, 10);  // quarters before first interview
            const int dur = rng.uniform_int(90, 720);
            const Quarter q0 = first_interview.prev(offset + 2);
            SpellRecord s;
            s.person_id = hid * 10 + 1;
            s.household_id = hid;
            s.kind = SpellRecord::Kind::UbiiReceipt;
            s.start = q0.first_day();
            s.end = Date::from_serial(std::min(q0.first_day().serial() + dur,
                                               first_interview.first_day().serial() - 1));
            hh_spells.push_back(s);
        }

        // Employment spells per adult, one per employed quarter.
        for (int a = 0; a < n_adults; ++a) {
            for (int q = 0; q < n_quarters; ++q) {
                if (!adults[a].employed[q]) continue;
                const Quarter quarter(history_start.index + q);
                SpellRecord s;
                s.person_id = hid * 10 + 1 + a;
                s.household_id = hid;
                s.kind = SpellRecord::Kind::Employment;
                s.start = quarter.first_day();
                s.end = quarter.last_day();
                s.monthly_gross_wage = Money::from_euros(adults[a].wage[q]);
                hh_spells.push_back(s);
            }
        }

        // Selection-noise defects, drawn once per household.
        const bool linked = !dgp.selection_noise || !rng.bernoulli(0.04);
        const int changing_head_wave =
            dgp.selection_noise && rng.bernoulli(0.012) ? rng.uniform_int(1, dgp.waves - 1) : -1;
        const bool missing_edu = dgp.selection_noise && rng.bernoulli(0.02);

        // Wave loop.
        bool attrited = false;
        for (int k = 0; k < dgp.waves; ++k) {
            const double upsilon = rng.normal(0.0, 1.0);          // draw always: stream stability
            const double attrition_draw = rng.uniform();
            const double defect_draw = rng.uniform();
            const double report_draw1 = rng.uniform();
            const double report_draw2 = rng.uniform();
            const double report_draw3 = rng.uniform();
            const double income_noise = rng.normal(0.0, 0.15);
            const double other_income_draw = rng.uniform();
            const int jitter = rng.uniform_int(0, 60);
            if (attrited) continue;
            if (k > 0 && attrition_draw < dgp.attrition) {
                attrited = true;
                continue;
            }

            const int year = dgp.first_year + k;
            const Quarter interview(year, interview_qoy);
            const int qidx = interview.index - history_start.index;

            HouseholdSnapshot hh;
            hh.household_id = hid;
            hh.wave_year = year;
            hh.interview_quarter = interview;
            hh.region = region;
            hh.municipality_size_class = municipality;
            hh.migration_background_head = migration;
            hh.education_head = missing_edu ? std::nullopt : std::optional<int>(education);
            hh.sex_head = sex;
            hh.sample_origin = origin;
            hh.home_owner = home_owner;
            hh.rent_incl_heating = rent;
            hh.dwelling_sqm = sqm;
            hh.wealth_class_midpoint = wealth;
            hh.survey_weight = survey_weight;
            hh.admin_linked = linked;
            hh.head_partnered = couple;

            const long head_pid =
                changing_head_wave >= 0 && k >= changing_head_wave ? hid * 10 + 7 : hid * 10 + 1;
            Member head;
            head.person_id = head_pid;
            head.role = Role::Head;
            head.age = head_age0 + k;
            head.disabled = head_disabled;
            head.early_retirement_self_assessed = early_ret;
            head.employed = adults[0].employed[static_cast<std::size_t>(qidx)];
            head.gross_earnings = head.employed
                                      ? Money::from_euros(adults[0].wage[static_cast<std::size_t>(qidx)])
                                      : Money::zero();
            if (other_income_draw < 0.10)
                head.other_income = Money::from_euros(50.0 + 250.0 * other_income_draw / 0.10);
            hh.members.push_back(head);
            if (couple) {
                Member p;
                p.person_id = hid * 10 + 2;
                p.role = Role::Partner;
                p.age = head_age0 + k - 2;
                p.employed = adults[1].employed[static_cast<std::size_t>(qidx)];
                p.gross_earnings =
                    p.employed ? Money::from_euros(adults[1].wage[static_cast<std::size_t>(qidx)])
                               : Money::zero();
                hh.members.push_back(p);
            }
            for (int c = 0; c < n_children; ++c) {
                Member ch;
                ch.person_id = hid * 10 + 3 + c;
                ch.role = Role::Child;
                ch.age = std::min(24, child_ages[static_cast<std::size_t>(c)] + k);
                ch.employable = false;
                hh.members.push_back(ch);
            }

            // Integrity defects on a small share of rows.
            if (dgp.selection_noise) {
                if (defect_draw < 0.035) hh.interview_complete = false;
                else if (defect_draw < 0.055) hh.n_communities = 2;
                else if (defect_draw < 0.075) hh.core_family = false;
                else if (defect_draw < 0.085) {
                    for (auto& m : hh.members)
                        if (m.employed) m.gross_earnings = Money::zero();
                } else if (defect_draw < 0.090 && !couple) {
                    hh.head_partnered = true;
                } else if (defect_draw < 0.110) {
                    hh.members.front().pensioner = true;
                } else if (defect_draw < 0.125) {
                    hh.members.front().student_or_trainee = true;
                }
            }

            const PolicyYearParameters& params = policy.for_year(year);
            EntitlementResult ent = compute_entitlement(hh, params);

            // Reported upstream benefits are covariates of the take-up
            // decision, so they are drawn before it.
            hh.reported_hb = (ent.hb_amount > Money::zero() && report_draw2 < 0.5) ||
                             report_draw2 > 0.97;
            hh.reported_scb = (ent.scb_amount > Money::zero() && report_draw3 < 0.5) ||
                              report_draw3 > 0.98;

            // Long-term covariates from the spell history accumulated so far.
            SampleRow row;
            row.hh = hh;
            row.ent = ent;
            const HouseholdSpells indexed = [&] {
                HouseholdSpells hs;
                for (const auto& s : hh_spells)
                    (s.kind == SpellRecord::Kind::UbiiReceipt ? hs.receipt : hs.employment)
                        .push_back(s);
                return hs;
            }();
            row.cov = build_covariates(indexed, interview, policy, hh.oecd_weight(),
                                       max(ent.need_total, parse_money("1")));

            // Latent index and take-up decision, conditional on eligibility.
            double z = 0.0;
            for (const auto& [name, coef] : dgp.beta)
                z += coef * design_detail::column_value(name, row);

            TruthWave tw;
            tw.household_id = hid;
            tw.wave_year = year;
            tw.upsilon = upsilon;
            tw.latent_index = z;
            tw.eligible = ent.eligible_ubii;
            tw.true_takeup = ent.eligible_ubii && (z + nu + upsilon > 0.0);

            if (tw.true_takeup) {
                SpellRecord s;
                s.person_id = head_pid;
                s.household_id = hid;
                s.kind = SpellRecord::Kind::UbiiReceipt;
                s.start = interview.first_day();
                s.end = Date::from_serial(interview.first_day().serial() + 364 - jitter);
                hh_spells.push_back(s);
            }

            // Reported UB II: misreporting on top of the administrative truth.
            const bool admin_now = tw.true_takeup;
            hh.reported_ubii = admin_now ? report_draw1 >= dgp.underreport_rate
                                         : report_draw1 < dgp.overreport_rate;

            const double base_income = simulated_disposable_income_raw(ent, admin_now);
            hh.reported_disposable_income =
                Money::from_euros(std::max(100.0, base_income * std::exp(income_noise)));

            out.panel.push_back(hh);
            out.entitlements.push_back(ent);
            out.truth.push_back(tw);
        }

        // Spells only exist for linked households.
        if (linked)
            for (auto& s : hh_spells) out.spells.push_back(s);
    }
    return out;
}

}  // namespace takeup
