#include "snaploc/optctrl.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "snaploc/errors.hpp"
#include "snaploc/io.hpp"

namespace snaploc {

namespace {

void require_columns(const Eigen::MatrixXd& m, Eigen::Index rows, std::size_t cols, const char* what) {
    if (m.rows() != rows || m.cols() != static_cast<Eigen::Index>(cols)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

Eigen::VectorXd column_energies(const Trajectory& traj, const SparseMatrix& mass) {
    const Eigen::MatrixXd mv = mass * traj.values;
    return (traj.values.array() * mv.array()).colwise().sum().transpose();
}

}  // namespace

LqModel full_order_model(const FemOperatorsP1& ops, double nu, double alpha,
                         const Eigen::VectorXd& y0, const Trajectory& forcing,
                         const Trajectory& desired) {
    if (!(forcing.time_grid == desired.time_grid)) {
        throw std::invalid_argument("full_order_model: forcing and desired on different grids");
    }
    LqModel model{ops.mass,
                  ops.stiffness,
                  nu,
                  alpha,
                  desired.time_grid,
                  y0,
                  ops.mass * forcing.values,
                  ops.mass * desired.values,
                  column_energies(desired, ops.mass)};
    return model;
}

LqModel reduced_order_model(const ReducedOperators& reduced, const FemOperatorsP1& ops, double nu,
                            double alpha, const TimeGrid& grid, const Trajectory& desired) {
    if (!(desired.time_grid == grid) || reduced.desired.cols() != static_cast<Eigen::Index>(grid.dof())) {
        throw std::invalid_argument("reduced_order_model: time grid mismatch");
    }
    // Coefficients of the M-orthogonal projection of y0.
    const Eigen::VectorXd w0 = reduced.mass.ldlt().solve(reduced.initial);
    LqModel model{reduced.mass.sparseView(0.0, 0.0),
                  reduced.stiffness.sparseView(0.0, 0.0),
                  nu,
                  alpha,
                  grid,
                  w0,
                  reduced.forcing,
                  reduced.desired,
                  column_energies(desired, ops.mass)};
    return model;
}

LqSolver::LqSolver(LqModel model) : model_(std::move(model)) {
    if (!(model_.alpha > 0.0)) throw std::invalid_argument("LqSolver: alpha must be > 0");
    if (!(model_.nu > 0.0)) throw std::invalid_argument("LqSolver: nu must be > 0");
    const Eigen::Index n = model_.size();
    const std::size_t dof = model_.grid.dof();
    if (model_.initial.size() != n) throw std::invalid_argument("LqSolver: initial value size");
    require_columns(model_.forcing_load, n, dof, "LqSolver forcing");
    require_columns(model_.desired_load, n, dof, "LqSolver desired");
    if (model_.desired_energy.size() != static_cast<Eigen::Index>(dof)) {
        throw std::invalid_argument("LqSolver: desired energy size");
    }
    weights_ = trapezoidal_weights(model_.grid);
    stepper_ = std::make_unique<ImplicitEuler>(model_.mass, model_.stiffness, model_.nu);
}

Eigen::MatrixXd LqSolver::state(const Eigen::MatrixXd& control) const {
    require_columns(control, model_.size(), model_.grid.dof(), "LqSolver::state");
    ++solves_;
    return stepper_->forward(model_.grid, model_.initial,
                             model_.forcing_load + model_.mass * control);
}

Eigen::MatrixXd LqSolver::state_sensitivity(const Eigen::MatrixXd& direction) const {
    require_columns(direction, model_.size(), model_.grid.dof(), "LqSolver::state_sensitivity");
    ++solves_;
    return stepper_->forward(model_.grid, Eigen::VectorXd::Zero(model_.size()),
                             model_.mass * direction);
}

Eigen::MatrixXd LqSolver::adjoint(const Eigen::MatrixXd& state, AdjointScheme scheme,
                                  bool with_desired) const {
    require_columns(state, model_.size(), model_.grid.dof(), "LqSolver::adjoint");
    ++solves_;
    Eigen::MatrixXd mismatch = model_.mass * state;
    if (with_desired) mismatch -= model_.desired_load;
    if (scheme == AdjointScheme::OptimizeThenDiscretize) {
        return stepper_->backward(model_.grid, mismatch);
    }
    const auto dof = static_cast<Eigen::Index>(model_.grid.dof());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(model_.size(), dof);
    Eigen::VectorXd next = Eigen::VectorXd::Zero(model_.size());
    for (Eigen::Index j = dof - 1; j >= 1; --j) {
        const double dt = model_.grid.step(static_cast<std::size_t>(j - 1));
        const Eigen::VectorXd rhs = model_.mass * next + weights_[j] * mismatch.col(j);
        next = stepper_->solve(dt, rhs);
        q.col(j) = (dt / weights_[j]) * next;
    }
    return q;
}

Eigen::MatrixXd LqSolver::gradient(const Eigen::MatrixXd& control, const Eigen::MatrixXd& adjoint,
                                   AdjointScheme scheme) const {
    Eigen::MatrixXd g = model_.alpha * control + adjoint;
    // The initial control value never reaches the state in the discrete scheme.
    if (scheme == AdjointScheme::DiscretizeThenOptimize) g.col(0) = model_.alpha * control.col(0);
    return g;
}

double LqSolver::inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
    const Eigen::MatrixXd mb = model_.mass * b;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) sum += weights_[j] * a.col(j).dot(mb.col(j));
    return sum;
}

double LqSolver::norm(const Eigen::MatrixXd& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

double LqSolver::cost(const Eigen::MatrixXd& state, const Eigen::MatrixXd& control) const {
    const Eigen::MatrixXd my = model_.mass * state;
    double tracking = 0.0;
    for (Eigen::Index j = 0; j < state.cols(); ++j) {
        const double e = state.col(j).dot(my.col(j)) - 2.0 * state.col(j).dot(model_.desired_load.col(j)) +
                         model_.desired_energy[j];
        tracking += weights_[j] * e;
    }
    return 0.5 * tracking + 0.5 * model_.alpha * inner(control, control);
}

double eval_cost(const Trajectory& state, const Trajectory& control, const Trajectory& desired,
                 double alpha, const SparseMatrix& mass) {
    if (!(state.time_grid == control.time_grid) || !(state.time_grid == desired.time_grid)) {
        throw std::invalid_argument("eval_cost: trajectories on different time grids");
    }
    const double e = spacetime_l2_norm(Trajectory(state.time_grid, state.values - desired.values), mass);
    const double u = spacetime_l2_norm(control, mass);
    return 0.5 * e * e + 0.5 * alpha * u * u;
}

OcpSolution solve_ocp(const LqSolver& solver, const GradientOptions& options) {
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("solve_ocp: tolerance must be > 0");
    const LqModel& model = solver.model();
    const std::size_t solves_before = solver.solves();

    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(model.size(), static_cast<Eigen::Index>(model.grid.dof()));
    Eigen::MatrixXd y = solver.state(u);
    Eigen::MatrixXd p = solver.adjoint(y, options.scheme);
    Eigen::MatrixXd g = solver.gradient(u, p, options.scheme);

    OcpSolution out{Trajectory(model.grid, u), Trajectory(model.grid, y), Trajectory(model.grid, p), 0.0,
                    0.0, 0, false, 0, {}};
    out.cost = solver.cost(y, u);
    out.gradient_norm = solver.norm(g);
    out.history.push_back({0, out.cost, out.gradient_norm});

    int iteration = 0;
    while (out.gradient_norm > options.tolerance && iteration < options.max_iterations) {
        const Eigen::MatrixXd dy = solver.state_sensitivity(g);
        const Eigen::MatrixXd dp = solver.adjoint(dy, options.scheme, false);
        const Eigen::MatrixXd hg = solver.gradient(g, dp, options.scheme);
        const double curvature = solver.inner(hg, g);
        if (!(curvature > 0.0)) {
            throw NumericalBreakdown("solve_ocp: non-positive curvature along the gradient");
        }
        const double step = solver.inner(g, g) / curvature;
        u -= step * g;
        // The problem is affine in u, so the new state and adjoint follow by superposition.
        y -= step * dy;
        p -= step * dp;
        g = solver.gradient(u, p, options.scheme);
        ++iteration;
        out.cost = solver.cost(y, u);
        out.gradient_norm = solver.norm(g);
        out.history.push_back({iteration, out.cost, out.gradient_norm});
    }
    out.control = Trajectory(model.grid, std::move(u));
    out.state = Trajectory(model.grid, std::move(y));
    out.adjoint = Trajectory(model.grid, std::move(p));
    out.iterations = iteration;
    out.converged = out.gradient_norm <= options.tolerance;
    out.pde_solves = solver.solves() - solves_before;
    return out;
}

ReducedOcpSolution solve_reduced_ocp(const LqSolver& solver, const Eigen::MatrixXd& basis,
                                     const GradientOptions& options) {
    if (basis.cols() != solver.model().size()) {
        throw std::invalid_argument("solve_reduced_ocp: basis does not match the reduced model");
    }
    OcpSolution reduced = solve_ocp(solver, options);
    const TimeGrid& grid = solver.model().grid;
    Trajectory lifted_state(grid, basis * reduced.state.values);
    Trajectory lifted_control(grid, basis * (-reduced.adjoint.values / solver.model().alpha));
    return ReducedOcpSolution{std::move(reduced), std::move(lifted_state), std::move(lifted_control)};
}

void write_convergence_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
    out << "iteration,cost,gradient_norm\n";
    for (const auto& r : history) {
        out << r.iteration << ',' << format_number(r.cost) << ',' << format_number(r.gradient_norm) << '\n';
    }
}

}  // namespace snaploc
