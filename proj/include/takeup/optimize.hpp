#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "takeup/common.hpp"

namespace takeup {

// Quasi-Newton ascent for smooth log-likelihoods: BFGS inverse-Hessian
// updates with a backtracking line search, then Newton steps on a
// finite-difference Hessian of the analytic gradient to push the gradient
// norm below the convergence threshold.

using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct OptimOptions {
    int max_iterations = 400;
    double gradient_tol = 1e-8;   // max-norm
    double value_tol = 1e-12;     // relative log-likelihood change
    int newton_polish_steps = 20;
};

struct TrajectoryPoint {
    int iteration = 0;
    double value = 0.0;
    double grad_norm = 0.0;
};

struct OptimResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
    std::string message;
    std::vector<TrajectoryPoint> trajectory;
};

inline Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x,
                                  double step = 1e-5) {
    const long p = x.size();
    Eigen::MatrixXd H(p, p);
    Eigen::VectorXd gp(p), gm(p), xt = x;
    for (long k = 0; k < p; ++k) {
        const double h = step * std::max(1.0, std::fabs(x(k)));
        xt(k) = x(k) + h;
        f(xt, gp);
        xt(k) = x(k) - h;
        f(xt, gm);
        xt(k) = x(k);
        H.col(k) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

inline OptimResult bfgs_maximize(const Objective& f, const Eigen::VectorXd& x0,
                                 const OptimOptions& opts = {}) {
    const long p = x0.size();
    OptimResult res;
    res.x = x0;
    Eigen::VectorXd g(p);
    double fx = f(res.x, g);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(p, p);
    bool value_converged = false;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter + 1;
        res.grad_norm = g.lpNorm<Eigen::Infinity>();
        res.trajectory.push_back({iter, fx, res.grad_norm});
        if (res.grad_norm < opts.gradient_tol) {
            res.converged = true;
            res.message = "gradient below tolerance";
            break;
        }
        Eigen::VectorXd d = H * g;
        double gd = g.dot(d);
        if (!(gd > 0.0) || !d.allFinite()) {  // not an ascent direction: reset
            H.setIdentity();
            d = g;
            gd = g.squaredNorm();
        }
        // Backtracking Armijo search.
        double t = 1.0;
        double f_new = fx;
        Eigen::VectorXd x_new = res.x;
        bool accepted = false;
        Eigen::VectorXd g_new(p);
        for (int ls = 0; ls < 60; ++ls) {
            x_new = res.x + t * d;
            f_new = f(x_new, g_new);
            if (std::isfinite(f_new) && f_new >= fx + 1e-4 * t * gd) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            res.message = "line search failed";
            break;
        }
        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd ybar = g - g_new;  // = -(g_new - g); BFGS on -f
        const double sy = s.dot(ybar);
        const double df = std::fabs(f_new - fx);
        res.x = x_new;
        fx = f_new;
        g = g_new;
        if (sy > 1e-12 * s.norm() * ybar.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(p, p);
            H = (I - rho * s * ybar.transpose()) * H * (I - rho * ybar * s.transpose()) +
                rho * s * s.transpose();
        }
        if (df < opts.value_tol * (1.0 + std::fabs(fx))) {
            value_converged = true;
            res.message = "value change below tolerance";
            break;
        }
    }
    res.value = fx;
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (res.message.empty()) res.message = "iteration limit reached";

    // Newton polish: quadratic convergence once the BFGS iterate is close.
    for (int k = 0; k < opts.newton_polish_steps && res.grad_norm >= opts.gradient_tol; ++k) {
        const Eigen::MatrixXd H_obs = fd_hessian(f, res.x);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(-H_obs);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
        Eigen::VectorXd step = ldlt.solve(g);
        if (!step.allFinite()) break;
        double t = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            Eigen::VectorXd x_try = res.x + t * step;
            Eigen::VectorXd g_try(p);
            const double f_try = f(x_try, g_try);
            if (std::isfinite(f_try) &&
                (g_try.lpNorm<Eigen::Infinity>() < res.grad_norm || f_try > res.value)) {
                res.x = x_try;
                res.value = f_try;
                g = g_try;
                res.grad_norm = g.lpNorm<Eigen::Infinity>();
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if (!improved) break;
        ++res.iterations;
    }
    if (res.grad_norm < opts.gradient_tol) {
        res.converged = true;
        res.message = "gradient below tolerance";
    } else if (value_converged) {
        res.converged = true;
    }
    res.trajectory.push_back({res.iterations, res.value, res.grad_norm});
    return res;
}

}  // namespace takeup
