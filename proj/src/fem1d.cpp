#include "snaploc/fem1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "snaploc/io.hpp"

namespace snaploc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// 4-point Gauss-Legendre on [0,1]; exact to degree 7.
constexpr std::array<double, 4> kGaussX = {0.0694318442029737, 0.3300094782075719,
                                           0.6699905217924281, 0.9305681557970263};
constexpr std::array<double, 4> kGaussW = {0.1739274225687269, 0.3260725774312731,
                                           0.3260725774312731, 0.1739274225687269};

// Hermite shape functions on a cell of width h, local coordinate xi in [0,1],
// differentiated `d` times with respect to x.
std::array<double, 4> hermite_shape(double xi, double h, int d) {
    switch (d) {
        case 0:
            return {1 - 3 * xi * xi + 2 * xi * xi * xi, h * (xi - 2 * xi * xi + xi * xi * xi),
                    3 * xi * xi - 2 * xi * xi * xi, h * (-xi * xi + xi * xi * xi)};
        case 1:
            return {(-6 * xi + 6 * xi * xi) / h, 1 - 4 * xi + 3 * xi * xi,
                    (6 * xi - 6 * xi * xi) / h, -2 * xi + 3 * xi * xi};
        case 2:
            return {(-6 + 12 * xi) / (h * h), (-4 + 6 * xi) / h, (6 - 12 * xi) / (h * h),
                    (-2 + 6 * xi) / h};
        case 3:
            return {12 / (h * h * h), 6 / (h * h), -12 / (h * h * h), 6 / (h * h)};
        default:
            return {0, 0, 0, 0};
    }
}

Eigen::Matrix4d hermite_element(double h, int d) {
    Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
        const auto n = hermite_shape(kGaussX[q], h, d);
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) e(a, b) += kGaussW[q] * h * (n[a] * n[b]);
        }
    }
    return e;
}

int locate_cell(const SpatialGrid& grid, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("point outside (0,1)");
    return std::min(static_cast<int>(std::floor(x * grid.n_cells())), grid.n_cells() - 1);
}

}  // namespace

Eigen::Matrix4d hermite_element_mass(double h) { return hermite_element(h, 0); }
Eigen::Matrix4d hermite_element_stiffness(double h) { return hermite_element(h, 1); }
Eigen::Matrix4d hermite_element_bending(double h) { return hermite_element(h, 2); }

FemOperatorsP1 assemble_p1(const SpatialGrid& grid) {
    if (grid.n_cells() < 2) {
        throw std::invalid_argument("assemble_p1: need at least 2 cells for an interior node");
    }
    const double h = grid.h();
    const int n = grid.interior_nodes();
    Triplets m, a;
    for (int cell = 0; cell < grid.n_cells(); ++cell) {
        // interior indices of the two cell nodes, -1 for boundary nodes
        const std::array<int, 2> idx = {cell - 1, cell == grid.n_cells() - 1 ? -1 : cell};
        for (int p = 0; p < 2; ++p) {
            for (int q = 0; q < 2; ++q) {
                if (idx[p] < 0 || idx[q] < 0) continue;
                m.emplace_back(idx[p], idx[q], h / 6.0 * (p == q ? 2.0 : 1.0));
                a.emplace_back(idx[p], idx[q], (p == q ? 1.0 : -1.0) / h);
            }
        }
    }
    FemOperatorsP1 ops{grid, SparseMatrix(n, n), SparseMatrix(n, n)};
    ops.mass.setFromTriplets(m.begin(), m.end());
    ops.stiffness.setFromTriplets(a.begin(), a.end());
    return ops;
}

Eigen::Index FemOperatorsHermite::constrained_index(int node, bool slope) const {
    const int nc = grid.n_cells();
    const int global = 2 * node + (slope ? 1 : 0);
    if (global == 0 || global == 2 * nc) return -1;
    return global - 1 - (global > 2 * nc ? 1 : 0);
}

FemOperatorsHermite assemble_hermite(const SpatialGrid& grid) {
    const double h = grid.h();
    const Eigen::Index size = 2 * grid.n_cells();
    const Eigen::Matrix4d me = hermite_element_mass(h);
    const Eigen::Matrix4d ae = hermite_element_stiffness(h);
    const Eigen::Matrix4d be = hermite_element_bending(h);

    FemOperatorsHermite ops{grid, SparseMatrix(size, size), SparseMatrix(size, size),
                            SparseMatrix(size, size)};
    Triplets m, a, b;
    for (int cell = 0; cell < grid.n_cells(); ++cell) {
        const std::array<Eigen::Index, 4> idx = {
            ops.constrained_index(cell, false), ops.constrained_index(cell, true),
            ops.constrained_index(cell + 1, false), ops.constrained_index(cell + 1, true)};
        for (int p = 0; p < 4; ++p) {
            for (int q = 0; q < 4; ++q) {
                if (idx[p] < 0 || idx[q] < 0) continue;
                m.emplace_back(idx[p], idx[q], me(p, q));
                a.emplace_back(idx[p], idx[q], ae(p, q));
                b.emplace_back(idx[p], idx[q], be(p, q));
            }
        }
    }
    ops.mass.setFromTriplets(m.begin(), m.end());
    ops.stiffness.setFromTriplets(a.begin(), a.end());
    ops.bending.setFromTriplets(b.begin(), b.end());
    return ops;
}

Eigen::VectorXd interpolate_p1(const ScalarFunction& f, const SpatialGrid& grid) {
    Eigen::VectorXd v(grid.interior_nodes());
    for (int i = 1; i < grid.n_cells(); ++i) v[i - 1] = f(grid.node(i));
    return v;
}

Eigen::VectorXd interpolate_hermite(const ScalarFunction& f, const ScalarFunction& df,
                                    const SpatialGrid& grid) {
    Eigen::VectorXd v(2 * grid.n_cells());
    const int nc = grid.n_cells();
    for (int i = 0; i <= nc; ++i) {
        const double x = grid.node(i);
        if (i != 0 && i != nc) v[2 * i - 1] = f(x);
        v[i == nc ? 2 * nc - 1 : 2 * i] = df(x);
    }
    return v;
}

double evaluate_p1(const Eigen::VectorXd& coeffs, const SpatialGrid& grid, double x) {
    if (coeffs.size() != grid.interior_nodes()) {
        throw std::invalid_argument("evaluate_p1: dimension mismatch");
    }
    const int cell = locate_cell(grid, x);
    auto nodal = [&](int i) {
        return (i == 0 || i == grid.n_cells()) ? 0.0 : coeffs[i - 1];
    };
    const double xi = (x - grid.node(cell)) / grid.h();
    return (1 - xi) * nodal(cell) + xi * nodal(cell + 1);
}

double evaluate_hermite(const Eigen::VectorXd& coeffs, const SpatialGrid& grid, double x,
                        int derivative) {
    if (coeffs.size() != 2 * grid.n_cells()) {
        throw std::invalid_argument("evaluate_hermite: dimension mismatch");
    }
    const int nc = grid.n_cells();
    const int cell = locate_cell(grid, x);
    auto value = [&](int i) { return (i == 0 || i == nc) ? 0.0 : coeffs[2 * i - 1]; };
    auto slope = [&](int i) { return coeffs[i == nc ? 2 * nc - 1 : 2 * i]; };
    const double xi = (x - grid.node(cell)) / grid.h();
    const auto n = hermite_shape(xi, grid.h(), derivative);
    return n[0] * value(cell) + n[1] * slope(cell) + n[2] * value(cell + 1) +
           n[3] * slope(cell + 1);
}

Eigen::VectorXd prolongate(const Eigen::VectorXd& coarse_values, const SpatialGrid& coarse,
                           const SpatialGrid& fine) {
    if (fine.n_cells() % coarse.n_cells() != 0) {
        throw std::invalid_argument("prolongate: grids are not nested");
    }
    if (coarse_values.size() != coarse.interior_nodes()) {
        throw std::invalid_argument("prolongate: dimension mismatch");
    }
    const int ratio = fine.n_cells() / coarse.n_cells();
    Eigen::VectorXd out(fine.interior_nodes());
    for (int i = 1; i < fine.n_cells(); ++i) {
        const int cell = i / ratio;
        const int offset = i % ratio;
        const double left = cell == 0 ? 0.0 : coarse_values[cell - 1];
        const double right = cell + 1 >= coarse.n_cells() ? 0.0 : coarse_values[cell];
        const double w = static_cast<double>(offset) / ratio;
        out[i - 1] = offset == 0 ? left : (1 - w) * left + w * right;
    }
    return out;
}

Trajectory::Trajectory(TimeGrid grid, Eigen::MatrixXd v)
    : time_grid(std::move(grid)), values(std::move(v)) {
    if (static_cast<std::size_t>(values.cols()) != time_grid.dof()) {
        throw std::invalid_argument("Trajectory: one column per time point required");
    }
}

Trajectory Trajectory::zero(const TimeGrid& grid, Eigen::Index space_dim) {
    return Trajectory(grid, Eigen::MatrixXd::Zero(space_dim,
                                                  static_cast<Eigen::Index>(grid.dof())));
}

namespace {

template <typename Matrix>
double weighted_norm(const Trajectory& traj, const Matrix& mass) {
    if (traj.space_dim() != mass.rows()) {
        throw std::invalid_argument("spacetime_l2_norm: dimension mismatch");
    }
    const Eigen::VectorXd beta = trapezoidal_weights(traj.time_grid);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < traj.values.cols(); ++j) {
        const auto v = traj.values.col(j);
        sum += beta[j] * v.dot(mass * v);
    }
    return std::sqrt(std::max(sum, 0.0));
}

}  // namespace

double spacetime_l2_norm(const Trajectory& traj, const SparseMatrix& mass) {
    return weighted_norm(traj, mass);
}

double spacetime_l2_norm(const Trajectory& traj, const Eigen::MatrixXd& mass) {
    return weighted_norm(traj, mass);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const SpatialGrid& grid) {
    if (traj.space_dim() != grid.interior_nodes()) {
        throw std::invalid_argument("write_trajectory_csv: expects P1 values on the grid");
    }
    out << "x/t";
    for (double t : traj.time_grid.points()) out << ',' << format_number(t);
    out << '\n';
    for (int i = 0; i <= grid.n_cells(); ++i) {
        out << format_number(grid.node(i));
        const bool boundary = i == 0 || i == grid.n_cells();
        for (Eigen::Index j = 0; j < traj.values.cols(); ++j) {
            out << ',' << format_number(boundary ? 0.0 : traj.values(i - 1, j));
        }
        out << '\n';
    }
}

}  // namespace snaploc
