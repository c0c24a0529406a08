#include "snaploc/parabolic.hpp"

#include <stdexcept>
#include <string>

#include "snaploc/errors.hpp"

namespace snaploc {

ImplicitEuler::ImplicitEuler(SparseMatrix mass, SparseMatrix stiffness, double nu)
    : mass_(std::move(mass)), stiffness_(std::move(stiffness)), nu_(nu) {
    if (mass_.rows() != mass_.cols() || stiffness_.rows() != mass_.rows() ||
        stiffness_.cols() != mass_.cols()) {
        throw std::invalid_argument("ImplicitEuler: mass and stiffness must be square and equal");
    }
    if (nu < 0.0) throw std::invalid_argument("ImplicitEuler: nu must be nonnegative");
}

const ImplicitEuler::Factor& ImplicitEuler::factor(double dt) const {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(dt);
    if (it == cache_.end()) {
        auto f = std::make_unique<Factor>();
        SparseMatrix system = mass_ + (dt * nu_) * stiffness_;
        f->compute(system);
        if (f->info() != Eigen::Success) {
            throw NumericalBreakdown("ImplicitEuler: factorization failed for dt = " +
                                     std::to_string(dt));
        }
        it = cache_.emplace(dt, std::move(f)).first;
    }
    return *it->second;
}

std::size_t ImplicitEuler::cached_factorizations() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

Eigen::VectorXd ImplicitEuler::solve(double dt, const Eigen::VectorXd& rhs) const {
    return factor(dt).solve(rhs);
}

Eigen::MatrixXd ImplicitEuler::forward(const TimeGrid& grid, const Eigen::VectorXd& initial,
                                       const Eigen::MatrixXd& loads) const {
    const auto dof = static_cast<Eigen::Index>(grid.dof());
    if (initial.size() != size() || loads.rows() != size() || loads.cols() != dof) {
        throw std::invalid_argument("ImplicitEuler::forward: dimension mismatch");
    }
    Eigen::MatrixXd y(size(), dof);
    y.col(0) = initial;
    for (Eigen::Index j = 1; j < dof; ++j) {
        const double dt = grid.step(static_cast<std::size_t>(j - 1));
        const Eigen::VectorXd rhs = mass_ * y.col(j - 1) + dt * loads.col(j);
        y.col(j) = factor(dt).solve(rhs);
    }
    return y;
}

Eigen::MatrixXd ImplicitEuler::backward(const TimeGrid& grid,
                                        const Eigen::MatrixXd& sources) const {
    const auto dof = static_cast<Eigen::Index>(grid.dof());
    if (sources.rows() != size() || sources.cols() != dof) {
        throw std::invalid_argument("ImplicitEuler::backward: dimension mismatch");
    }
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(size(), dof);
    for (Eigen::Index j = dof - 1; j >= 1; --j) {
        const double dt = grid.step(static_cast<std::size_t>(j - 1));
        const Eigen::VectorXd rhs = mass_ * p.col(j) + dt * sources.col(j - 1);
        p.col(j - 1) = factor(dt).solve(rhs);
    }
    return p;
}

namespace {

void require_on_grid(const Trajectory& traj, const TimeGrid& grid, Eigen::Index dim,
                     const char* what) {
    if (!(traj.time_grid == grid)) {
        throw std::invalid_argument(std::string(what) + ": trajectory on a different time grid");
    }
    if (traj.space_dim() != dim) {
        throw std::invalid_argument(std::string(what) + ": spatial dimension mismatch");
    }
}

}  // namespace

Trajectory solve_heat(const FemOperatorsP1& ops, const TimeGrid& grid, double nu,
                      const Trajectory& forcing, const Trajectory& control,
                      const Eigen::VectorXd& y0) {
    require_on_grid(forcing, grid, ops.size(), "solve_heat");
    require_on_grid(control, grid, ops.size(), "solve_heat");
    if (y0.size() != ops.size()) throw std::invalid_argument("solve_heat: y0 dimension mismatch");
    const ImplicitEuler stepper(ops.mass, ops.stiffness, nu);
    const Eigen::MatrixXd loads = ops.mass * (forcing.values + control.values);
    return Trajectory(grid, stepper.forward(grid, y0, loads));
}

Trajectory solve_adjoint(const FemOperatorsP1& ops, const TimeGrid& grid, double nu,
                         const Trajectory& state, const Trajectory& desired) {
    require_on_grid(state, grid, ops.size(), "solve_adjoint");
    require_on_grid(desired, grid, ops.size(), "solve_adjoint");
    const ImplicitEuler stepper(ops.mass, ops.stiffness, nu);
    const Eigen::MatrixXd sources = ops.mass * (state.values - desired.values);
    return Trajectory(grid, stepper.backward(grid, sources));
}

}  // namespace snaploc
