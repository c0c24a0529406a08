#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "snaploc/optctrl.hpp"

namespace snaploc {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

/// Largest |y_t - nu y_xx - f - u| and |-p_t - nu p_xx - y + y_d| of the
/// manufactured problem on an n x n lattice of (0,1) x (0,1), using
/// derivatives written out independently of ManufacturedProblem.
double manufactured_state_residual(double eps, double alpha, double nu, int n);
double manufactured_adjoint_residual(double eps, double alpha, double nu, int n);

/// Largest relative gap |d_fd - <g, du>| / max(|d_fd|, |<g, du>|) over `trials`
/// random directions, with central differences of step h on the trapezoidal
/// cost and the discretize-then-optimize gradient.
double gradient_check(const LqSolver& solver, int trials, double h, unsigned seed);

/// Largest relative gap between the directly evaluated POD projection error and
/// the tail sum of eigenvalues over random snapshot sets and SPD weights.
double pod_identity_check(int trials, unsigned seed);

/// Manufactured residuals, POD identity and gradient checks on small problems.
std::vector<CheckResult> run_selfcheck();

}  // namespace snaploc
