#include "snaploc/pod.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "snaploc/errors.hpp"
#include "snaploc/io.hpp"

namespace snaploc {

double PodBasis::energy_ratio() const {
    const double total = eigenvalues.sum();
    if (total <= 0.0) return 0.0;
    return eigenvalues.head(rank()).sum() / total;
}

PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const Eigen::VectorXd& weights,
                     const SparseMatrix& inner_product, int rank) {
    if (rank < 1) throw std::invalid_argument("compute_pod: rank must be >= 1");
    if (weights.size() != snapshots.cols() || inner_product.rows() != snapshots.rows() ||
        inner_product.cols() != snapshots.rows()) {
        throw std::invalid_argument("compute_pod: dimension mismatch");
    }
    if ((weights.array() < 0.0).any()) throw std::invalid_argument("compute_pod: negative weight");

    const Eigen::VectorXd sqrt_w = weights.cwiseSqrt();
    const Eigen::MatrixXd scaled = snapshots * sqrt_w.asDiagonal();
    Eigen::MatrixXd gram = scaled.transpose() * (inner_product * scaled);
    gram = 0.5 * (gram + gram.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericalBreakdown("compute_pod: eigensolver failed");

    // Eigen returns ascending order.
    const Eigen::Index d = gram.rows();
    Eigen::VectorXd lambda = eig.eigenvalues().reverse();
    Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
    for (Eigen::Index i = 0; i < d; ++i) {
        if (lambda[i] < 0.0) {
            if (lambda[i] < -1e-12 * std::max(1.0, lambda[0])) {
                throw NumericalBreakdown("compute_pod: inner product is not positive semidefinite");
            }
            lambda[i] = 0.0;
        }
    }
    if (d == 0 || lambda[0] <= 1e-300) throw std::invalid_argument("compute_pod: all snapshots are zero");

    const double cutoff = std::max(1e-13 * lambda[0], 1e-300);
    int numerical = 0;
    while (numerical < d && lambda[numerical] > cutoff) ++numerical;

    PodBasis basis;
    basis.eigenvalues = lambda;
    basis.requested_rank = rank;
    basis.numerical_rank = numerical;
    basis.capped = rank > numerical;
    const int kept = std::min(rank, numerical);
    basis.modes = scaled * vectors.leftCols(kept);
    for (int i = 0; i < kept; ++i) {
        Eigen::VectorXd mode = basis.modes.col(i) / std::sqrt(lambda[i]);
        for (Eigen::Index k = 0; k < mode.size(); ++k) {
            if (mode[k] != 0.0) {
                if (mode[k] < 0.0) mode = -mode;
                break;
            }
        }
        basis.modes.col(i) = mode;
    }
    return basis;
}

double projection_error(const Eigen::MatrixXd& snapshots, const Eigen::VectorXd& weights,
                        const SparseMatrix& inner_product, const Eigen::MatrixXd& modes) {
    if (weights.size() != snapshots.cols() || inner_product.rows() != snapshots.rows() ||
        (modes.cols() > 0 && modes.rows() != snapshots.rows())) {
        throw std::invalid_argument("projection_error: dimension mismatch");
    }
    Eigen::MatrixXd residual = snapshots;
    if (modes.cols() > 0) {
        residual -= modes * (modes.transpose() * (inner_product * snapshots));
    }
    const Eigen::MatrixXd w_residual = inner_product * residual;
    double error = 0.0;
    for (Eigen::Index j = 0; j < snapshots.cols(); ++j) {
        error += weights[j] * residual.col(j).dot(w_residual.col(j));
    }
    return error;
}

ReducedOperators reduce_operators(const FemOperatorsP1& ops, const Eigen::MatrixXd& basis,
                                  const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing,
                                  const Eigen::MatrixXd& desired) {
    const Eigen::Index n = ops.size();
    if (basis.rows() != n || y0.size() != n || forcing.rows() != n || desired.rows() != n ||
        forcing.cols() != desired.cols()) {
        throw std::invalid_argument("reduce_operators: dimension mismatch");
    }
    const Eigen::MatrixXd m_basis = ops.mass * basis;
    ReducedOperators out;
    out.basis = basis;
    out.mass = basis.transpose() * m_basis;
    out.stiffness = basis.transpose() * (ops.stiffness * basis);
    out.initial = m_basis.transpose() * y0;
    out.forcing = m_basis.transpose() * forcing;
    out.desired = m_basis.transpose() * desired;
    return out;
}

void write_spectrum_csv(std::ostream& out, const PodBasis& basis) {
    out << "index,eigenvalue,cumulative_energy\n";
    const double total = basis.eigenvalues.sum();
    double running = 0.0;
    for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) {
        running += basis.eigenvalues[i];
        out << (i + 1) << ',' << format_number(basis.eigenvalues[i]) << ','
            << format_number(total > 0.0 ? running / total : 0.0) << '\n';
    }
}

}  // namespace snaploc
