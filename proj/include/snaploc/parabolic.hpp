#pragma once

#include <map>
#include <memory>
#include <mutex>

#include <Eigen/SparseCholesky>

#include "snaploc/fem1d.hpp"

namespace snaploc {

/// Implicit Euler for M y' + nu A y = b on arbitrary time grids.
///
/// Holds one LDL^T factorization of S = M + dt nu A per distinct step size.
/// The cache is internally synchronised, so a single instance may be shared
/// between threads.
class ImplicitEuler {
public:
    ImplicitEuler(SparseMatrix mass, SparseMatrix stiffness, double nu);

    const SparseMatrix& mass() const { return mass_; }
    Eigen::Index size() const { return mass_.rows(); }

    /// y_0 = initial; S_j y_j = M y_{j-1} + dt_j loads.col(j), j = 1..n.
    /// Column 0 of `loads` is ignored.
    Eigen::MatrixXd forward(const TimeGrid& grid, const Eigen::VectorXd& initial,
                            const Eigen::MatrixXd& loads) const;

    /// p_n = 0; S_j p_{j-1} = M p_j + dt_j sources.col(j-1), j = n..1.
    /// Column n of `sources` is ignored.
    Eigen::MatrixXd backward(const TimeGrid& grid, const Eigen::MatrixXd& sources) const;

    /// Solves S(dt) x = rhs.
    Eigen::VectorXd solve(double dt, const Eigen::VectorXd& rhs) const;

    std::size_t cached_factorizations() const;

private:
    using Factor = Eigen::SimplicialLDLT<SparseMatrix>;
    const Factor& factor(double dt) const;

    SparseMatrix mass_;
    SparseMatrix stiffness_;
    double nu_;
    mutable std::mutex mutex_;
    mutable std::map<double, std::unique_ptr<Factor>> cache_;
};

/// State equation: y_0 = y0, (M + dt_j nu A) y_j = M y_{j-1} + dt_j M (f_j + u_j).
Trajectory solve_heat(const FemOperatorsP1& ops, const TimeGrid& grid, double nu,
                      const Trajectory& forcing, const Trajectory& control,
                      const Eigen::VectorXd& y0);

/// Adjoint equation: p_n = 0, (M + dt_j nu A) p_{j-1} = M p_j + dt_j M (y_{j-1} - yd_{j-1}).
Trajectory solve_adjoint(const FemOperatorsP1& ops, const TimeGrid& grid, double nu,
                         const Trajectory& state, const Trajectory& desired);

}  // namespace snaploc
