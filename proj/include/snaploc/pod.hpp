#pragma once

#include <iosfwd>

#include <Eigen/Core>

#include "snaploc/fem1d.hpp"

namespace snaploc {

/// W-orthonormal POD modes with the full snapshot spectrum.
struct PodBasis {
    Eigen::MatrixXd modes;        ///< one mode per column
    Eigen::VectorXd eigenvalues;  ///< all of them, descending, clamped at 0
    int requested_rank = 0;
    int numerical_rank = 0;
    bool capped = false;  ///< requested rank exceeded the numerical rank

    int rank() const { return static_cast<int>(modes.cols()); }
    double energy_ratio() const;
};

/// Method of snapshots on K = D Y^T W Y D with D = diag(sqrt(weights)).
/// Eigenvalues at or below max(1e-13 lambda_1, 1e-300) count as zero.
/// Throws std::invalid_argument for rank < 1 or all-zero snapshots.
PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const Eigen::VectorXd& weights,
                     const SparseMatrix& inner_product, int rank);

/// sum_j w_j |y_j - P y_j|_W^2 with P the W-orthogonal projector onto `modes`
/// (which may have zero columns).
double projection_error(const Eigen::MatrixXd& snapshots, const Eigen::VectorXd& weights,
                        const SparseMatrix& inner_product, const Eigen::MatrixXd& modes);

/// Galerkin-projected operators of the P1 heat equation.
struct ReducedOperators {
    Eigen::MatrixXd basis;      ///< Psi, N x l
    Eigen::MatrixXd mass;       ///< Psi^T M Psi
    Eigen::MatrixXd stiffness;  ///< Psi^T A Psi
    Eigen::VectorXd initial;    ///< Psi^T M y0
    Eigen::MatrixXd forcing;    ///< Psi^T M f_j per time point
    Eigen::MatrixXd desired;    ///< Psi^T M yd_j per time point
};

ReducedOperators reduce_operators(const FemOperatorsP1& ops, const Eigen::MatrixXd& basis,
                                  const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing,
                                  const Eigen::MatrixXd& desired);

/// CSV with columns index, eigenvalue, cumulative_energy (index from 1).
void write_spectrum_csv(std::ostream& out, const PodBasis& basis);

}  // namespace snaploc
