#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "takeup/parallel.hpp"
#include "takeup/quadrature.hpp"

namespace takeup {

// Pooled and random-effects probit log-likelihoods with analytic gradients.
// Observations are grouped contiguously by household; sums over households
// use the fixed-block deterministic reduction so results are bit-identical
// at any thread count.

struct PanelData {
    Eigen::MatrixXd X;                 // n x p design
    std::vector<double> sign;          // 2y - 1
    std::vector<double> weight;        // observation weights
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // (start, length)
    std::vector<double> group_weight;  // mean of member observation weights
    std::vector<long> group_ids;
    std::vector<std::string> names;

    std::size_t n_obs() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t n_params() const { return static_cast<std::size_t>(X.cols()); }
    std::size_t n_groups() const { return groups.size(); }
};

struct ValueGrad {
    double value = 0.0;
    Eigen::VectorXd grad;
};

struct QuadOptions {
    enum class Mode { Composite, Hermite } mode = Mode::Composite;
    int nodes = 32;

    void validate() const {
        if (nodes < 2) throw ConfigError("quadrature node count must be at least 2");
    }
};

inline QuadOptions::Mode parse_quad_mode(const std::string& s) {
    if (s == "composite") return QuadOptions::Mode::Composite;
    if (s == "hermite") return QuadOptions::Mode::Hermite;
    throw ConfigError("unknown quadrature mode: " + s);
}

// Sum_i w_i log Phi(s_i * x_i' beta), gradient alongside.
inline ValueGrad loglik_pooled(const PanelData& data, const Eigen::VectorXd& beta) {
    const std::size_t p = data.n_params();
    if (static_cast<std::size_t>(beta.size()) != p)
        throw DomainError("coefficient vector length mismatch");
    const Eigen::VectorXd z = data.X * beta;

    struct Acc {
        double v = 0.0;
        Eigen::VectorXd g;
    };
    Acc zero;
    zero.g = Eigen::VectorXd::Zero(static_cast<long>(p));
    Acc total = blocked_reduce<Acc>(
        data.n_obs(), zero,
        [&](std::size_t i, Acc& acc) {
            const double a = data.sign[i] * z(static_cast<long>(i));
            const double w = data.weight[i];
            acc.v += w * log_normal_cdf(a);
            acc.g += (w * data.sign[i] * inverse_mills(a)) * data.X.row(static_cast<long>(i)).transpose();
        },
        [](Acc& t, const Acc& part) {
            t.v += part.v;
            t.g += part.g;
        });
    if (!std::isfinite(total.v)) throw DomainError("pooled log-likelihood is not finite");
    return {total.v, std::move(total.g)};
}

// Random-effects likelihood: for each household h,
//   L_h = log ∫ Π_t Φ(s_t(z_t + σ v)) φ(v) dv,
// value = Σ_h w_h L_h. Gradient is over (β, σ); quadrature nodes are held
// fixed when differentiating.
inline ValueGrad loglik_re(const PanelData& data, const Eigen::VectorXd& beta, double sigma,
                           const QuadOptions& quad = {}) {
    if (sigma < 0.0) throw DomainError("sigma_nu must be non-negative");
    quad.validate();
    const std::size_t p = data.n_params();
    if (static_cast<std::size_t>(beta.size()) != p)
        throw DomainError("coefficient vector length mismatch");
    const Eigen::VectorXd z = data.X * beta;

    // Shared pieces: the Hermite rule, or the Legendre base for the panels.
    QuadratureRule shared;
    std::vector<double> gl_nodes, gl_weights;
    if (quad.mode == QuadOptions::Mode::Hermite) {
        shared = hermite_rule(quad.nodes);
    } else {
        gauss_legendre(quad.nodes, gl_nodes, gl_weights);
    }

    struct Acc {
        double v = 0.0;
        Eigen::VectorXd g;  // p + 1 (last entry: d/dsigma)
        // scratch
        QuadratureRule rule;
        std::vector<double> tj;
        std::vector<double> lam;
        std::vector<double> zs, ss;
    };
    Acc zero;
    zero.g = Eigen::VectorXd::Zero(static_cast<long>(p) + 1);

    Acc total = blocked_reduce<Acc>(
        data.n_groups(), zero,
        [&](std::size_t h, Acc& acc) {
            const auto [start, len] = data.groups[h];
            if (len == 0) throw DomainError("empty household group");
            acc.zs.resize(len);
            acc.ss.resize(len);
            for (std::size_t t = 0; t < len; ++t) {
                acc.zs[t] = z(static_cast<long>(start + t));
                acc.ss[t] = data.sign[start + t];
            }
            const QuadratureRule* rule = &shared;
            if (quad.mode == QuadOptions::Mode::Composite) {
                const ModeScale ms = integrand_mode(acc.zs, acc.ss, sigma);
                composite_rule(ms, gl_nodes, gl_weights, acc.rule);
                rule = &acc.rule;
            }
            const std::size_t nn = rule->nodes.size();
            acc.tj.resize(nn);
            acc.lam.resize(nn * len);
            for (std::size_t j = 0; j < nn; ++j) {
                const double v = rule->nodes[j];
                double s = rule->log_weights[j];
                for (std::size_t t = 0; t < len; ++t) {
                    const double a = acc.ss[t] * (acc.zs[t] + sigma * v);
                    const double lphi = log_normal_cdf(a);
                    s += lphi;
                    acc.lam[j * len + t] = std::exp(log_normal_pdf(a) - lphi);
                }
                acc.tj[j] = s;
            }
            const double lh = quad_detail::logsumexp(acc.tj);
            const double wh = data.group_weight[h];
            acc.v += wh * lh;
            for (std::size_t j = 0; j < nn; ++j) {
                const double pj = std::exp(acc.tj[j] - lh);
                if (pj < 1e-300) continue;
                const double v = rule->nodes[j];
                for (std::size_t t = 0; t < len; ++t) {
                    const double c = wh * pj * acc.ss[t] * acc.lam[j * len + t];
                    acc.g.head(static_cast<long>(p)) +=
                        c * data.X.row(static_cast<long>(start + t)).transpose();
                    acc.g(static_cast<long>(p)) += c * v;
                }
            }
        },
        [](Acc& t, const Acc& part) {
            t.v += part.v;
            t.g += part.g;
        },
        64);
    if (!std::isfinite(total.v)) throw DomainError("RE log-likelihood is not finite");
    return {total.v, std::move(total.g)};
}

}  // namespace takeup
