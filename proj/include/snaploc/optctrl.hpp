#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "snaploc/fem1d.hpp"
#include "snaploc/parabolic.hpp"
#include "snaploc/pod.hpp"

namespace snaploc {

/// How the gradient is formed from the discrete adjoint.
enum class AdjointScheme {
    /// Implicit Euler on the continuous adjoint equation:
    /// S_j p_{j-1} = M p_j + dt_j (M y_{j-1} - d_{j-1}), g = alpha u + p.
    OptimizeThenDiscretize,
    /// Exact gradient of the trapezoidal cost:
    /// S_j q_j = M q_{j+1} + beta_j (M y_j - d_j), g_j = alpha u_j + (dt_j / beta_j) q_j, g_0 = alpha u_0.
    DiscretizeThenOptimize,
};

/// Linear-quadratic heat control problem in some coefficient space:
///   M y' + nu A y = F + M u,  J = 1/2 |y - y_d|^2 + alpha/2 |u|^2,
/// where the tracking term is expanded through d_j = <y_d(t_j), .> and
/// e_j = |y_d(t_j)|^2 so that reduced models measure the full-space mismatch.
struct LqModel {
    SparseMatrix mass;
    SparseMatrix stiffness;
    double nu = 1.0;
    double alpha = 1.0;
    TimeGrid grid;
    Eigen::VectorXd initial;
    Eigen::MatrixXd forcing_load;    ///< F_j, one column per time point
    Eigen::MatrixXd desired_load;    ///< d_j
    Eigen::VectorXd desired_energy;  ///< e_j

    Eigen::Index size() const { return mass.rows(); }
};

/// Full-order model on interior P1 nodes; forcing and desired are nodal trajectories.
LqModel full_order_model(const FemOperatorsP1& ops, double nu, double alpha,
                         const Eigen::VectorXd& y0, const Trajectory& forcing,
                         const Trajectory& desired);

/// Galerkin-reduced model in the coordinates of `reduced.basis`.
LqModel reduced_order_model(const ReducedOperators& reduced, const FemOperatorsP1& ops, double nu,
                            double alpha, const TimeGrid& grid, const Trajectory& desired);

/// State and adjoint solves for one model; caches factorizations per step size.
class LqSolver {
public:
    explicit LqSolver(LqModel model);

    const LqModel& model() const { return model_; }

    Eigen::MatrixXd state(const Eigen::MatrixXd& control) const;
    /// Linearized state: zero initial value and forcing.
    Eigen::MatrixXd state_sensitivity(const Eigen::MatrixXd& direction) const;
    Eigen::MatrixXd adjoint(const Eigen::MatrixXd& state, AdjointScheme scheme,
                            bool with_desired = true) const;
    Eigen::MatrixXd gradient(const Eigen::MatrixXd& control, const Eigen::MatrixXd& adjoint,
                             AdjointScheme scheme) const;

    /// 1/2 sum beta_j |y_j - y_d(t_j)|^2 + alpha/2 sum beta_j |u_j|^2.
    double cost(const Eigen::MatrixXd& state, const Eigen::MatrixXd& control) const;
    double cost(const Eigen::MatrixXd& control) const { return cost(state(control), control); }

    /// sum_j beta_j a_j^T M b_j.
    double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;
    double norm(const Eigen::MatrixXd& a) const;

    std::size_t solves() const { return solves_; }

private:
    LqModel model_;
    Eigen::VectorXd weights_;
    std::unique_ptr<ImplicitEuler> stepper_;
    mutable std::size_t solves_ = 0;
};

/// Total cost of a nodal trajectory pair, both trapezoidal in time.
double eval_cost(const Trajectory& state, const Trajectory& control, const Trajectory& desired,
                 double alpha, const SparseMatrix& mass);

struct GradientOptions {
    double tolerance = 1e-6;
    int max_iterations = 50;
    AdjointScheme scheme = AdjointScheme::OptimizeThenDiscretize;
};

struct IterationRecord {
    int iteration;
    double cost;
    double gradient_norm;
};

/// Result in model coordinates. `control` is the last iterate; `adjoint`
/// belongs to its state, so alpha u + p is the final gradient.
struct OcpSolution {
    Trajectory control;
    Trajectory state;
    Trajectory adjoint;
    double cost = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::size_t pde_solves = 0;
    std::vector<IterationRecord> history;
};

/// Steepest descent from u = 0 with the exact step <g,g> / <H g, g>; H g costs
/// one linearized state and adjoint solve. Stops when |g| <= tolerance;
/// non-convergence is reported through `converged`.
OcpSolution solve_ocp(const LqSolver& solver, const GradientOptions& options);

struct ReducedOcpSolution {
    OcpSolution reduced;
    Trajectory lifted_state;    ///< Psi w
    Trajectory lifted_control;  ///< Psi (-p / alpha)
};

ReducedOcpSolution solve_reduced_ocp(const LqSolver& solver, const Eigen::MatrixXd& basis,
                                     const GradientOptions& options);

void write_convergence_csv(std::ostream& out, const std::vector<IterationRecord>& history);

}  // namespace snaploc
