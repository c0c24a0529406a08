#pragma once

#include <functional>
#include <iosfwd>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "snaploc/grid.hpp"

namespace snaploc {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ScalarFunction = std::function<double(double)>;

/// Piecewise-linear operators on the interior nodes x_1..x_{n_cells-1}
/// (homogeneous Dirichlet dofs eliminated).
struct FemOperatorsP1 {
    SpatialGrid grid;
    SparseMatrix mass;       ///< <phi_j, phi_i>
    SparseMatrix stiffness;  ///< <phi_i', phi_j'>

    Eigen::Index size() const { return mass.rows(); }
};

FemOperatorsP1 assemble_p1(const SpatialGrid& grid);

/// C1 cubic Hermite operators with y(0) = y(1) = 0 eliminated.
///
/// Unknowns per node are (value, slope); the endpoint values are removed and
/// the endpoint slopes kept, giving 2*n_cells unknowns ordered
/// s_0, v_1, s_1, v_2, ..., v_{n-1}, s_{n-1}, s_n.
struct FemOperatorsHermite {
    SpatialGrid grid;
    SparseMatrix mass;       ///< <v, w>
    SparseMatrix stiffness;  ///< <v', w'>
    SparseMatrix bending;    ///< <v'', w''>

    Eigen::Index size() const { return mass.rows(); }

    /// Constrained index of global dof 2*node (+1 for the slope), or -1 if eliminated.
    Eigen::Index constrained_index(int node, bool slope) const;
};

FemOperatorsHermite assemble_hermite(const SpatialGrid& grid);

/// Element matrices on a cell of width h in local order (v0, s0, v1, s1).
Eigen::Matrix4d hermite_element_mass(double h);
Eigen::Matrix4d hermite_element_stiffness(double h);
Eigen::Matrix4d hermite_element_bending(double h);

/// Nodal values at interior nodes.
Eigen::VectorXd interpolate_p1(const ScalarFunction& f, const SpatialGrid& grid);
/// Values and slopes in the constrained Hermite layout; boundary values of f are dropped.
Eigen::VectorXd interpolate_hermite(const ScalarFunction& f, const ScalarFunction& df,
                                    const SpatialGrid& grid);

/// Evaluates a P1 coefficient vector (interior nodes, zero boundary) at x.
double evaluate_p1(const Eigen::VectorXd& coeffs, const SpatialGrid& grid, double x);
/// Evaluates a constrained Hermite coefficient vector or its derivatives at x.
double evaluate_hermite(const Eigen::VectorXd& coeffs, const SpatialGrid& grid, double x,
                        int derivative = 0);

/// Nodal interpolation of a coarse P1 function onto a nested finer grid.
Eigen::VectorXd prolongate(const Eigen::VectorXd& coarse_values, const SpatialGrid& coarse,
                           const SpatialGrid& fine);

/// One spatial coefficient vector per time point; column j holds the value at t_j.
struct Trajectory {
    TimeGrid time_grid;
    Eigen::MatrixXd values;

    Trajectory(TimeGrid grid, Eigen::MatrixXd v);
    static Trajectory zero(const TimeGrid& grid, Eigen::Index space_dim);

    Eigen::Index space_dim() const { return values.rows(); }
    auto at(std::size_t j) const { return values.col(static_cast<Eigen::Index>(j)); }
    auto at(std::size_t j) { return values.col(static_cast<Eigen::Index>(j)); }
};

/// sqrt(sum_j beta_j v_j^T M v_j): trapezoid in time, exact L2 in space.
double spacetime_l2_norm(const Trajectory& traj, const SparseMatrix& mass);
double spacetime_l2_norm(const Trajectory& traj, const Eigen::MatrixXd& mass);

/// Trajectory CSV: first row "x/t" then the time points, each following row the
/// node coordinate then nodal values. Boundary nodes are written with value 0.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const SpatialGrid& grid);

}  // namespace snaploc
