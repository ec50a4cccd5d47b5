// Copyright 2026 The dcgpulse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small dense Levenberg-Marquardt with a forward-difference Jacobian and
// gain-ratio damping updates (Nielsen's rule). Handles under-determined
// systems: the damped normal equations are always positive definite.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace dcg {

struct LmOptions {
    int max_iterations = 300;
    double fd_step = 1e-7;
    /// Stop once |r|_2 falls below this.
    double target_norm = 1e-13;
    /// Stop when the step is this small relative to |x|.
    double min_relative_step = 1e-15;
    double initial_damping = 1e-3;
};

struct LmResult {
    Eigen::VectorXd x;
    Eigen::VectorXd residuals;
    double norm = 0.0;
    int iterations = 0;
};

template <class Residuals>
Eigen::MatrixXd forward_difference_jacobian(Residuals& f, const Eigen::VectorXd& x, const Eigen::VectorXd& r,
                                            double step) {
    Eigen::MatrixXd jac(r.size(), x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = step * std::max(1.0, std::abs(x(j)));
        xp(j) = x(j) + h;
        jac.col(j) = (f(xp) - r) / h;
        xp(j) = x(j);
    }
    return jac;
}

/// Minimizes |f(x)|^2. `f` maps Eigen::VectorXd -> Eigen::VectorXd and must
/// be deterministic.
template <class Residuals>
LmResult levenberg_marquardt(Residuals&& f, Eigen::VectorXd x, const LmOptions& opts = {}) {
    Eigen::VectorXd r = f(x);
    double cost = 0.5 * r.squaredNorm();
    Eigen::MatrixXd jac = forward_difference_jacobian(f, x, r, opts.fd_step);
    Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::VectorXd grad = jac.transpose() * r;
    double mu = opts.initial_damping * std::max(1e-12, normal.diagonal().maxCoeff());
    double nu = 2.0;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (std::sqrt(2.0 * cost) <= opts.target_norm) {
            break;
        }
        Eigen::MatrixXd damped = normal;
        damped.diagonal().array() += mu;
        const Eigen::VectorXd step = damped.ldlt().solve(-grad);
        if (step.norm() <= opts.min_relative_step * (x.norm() + opts.min_relative_step)) {
            break;
        }
        const Eigen::VectorXd x_new = x + step;
        const Eigen::VectorXd r_new = f(x_new);
        const double cost_new = 0.5 * r_new.squaredNorm();
        const double predicted = 0.5 * step.dot(mu * step - grad);
        const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;
        if (rho > 0.0 && std::isfinite(cost_new)) {
            x = x_new;
            r = r_new;
            cost = cost_new;
            jac = forward_difference_jacobian(f, x, r, opts.fd_step);
            normal = jac.transpose() * jac;
            grad = jac.transpose() * r;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
            if (!std::isfinite(mu) || mu > 1e30) {
                break;
            }
        }
    }
    return {x, r, std::sqrt(2.0 * cost), it};
}

}  // namespace dcg
