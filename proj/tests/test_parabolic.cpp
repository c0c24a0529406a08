#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "snaploc/parabolic.hpp"

using namespace snaploc;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd sine(const SpatialGrid& g) {
    return interpolate_p1([](double x) { return std::sin(kPi * x); }, g);
}

double mass_norm(const FemOperatorsP1& ops, const Eigen::VectorXd& v) { return std::sqrt(v.dot(ops.mass * v)); }

double rayleigh(const FemOperatorsP1& ops, const Eigen::VectorXd& s) {
    return s.dot(ops.stiffness * s) / s.dot(ops.mass * s);
}

/// Largest distance of the columns from span{s}, relative to their size.
double collinearity_defect(const Eigen::MatrixXd& values, const Eigen::VectorXd& s) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        const Eigen::VectorXd v = values.col(j);
        const Eigen::VectorXd r = v - (v.dot(s) / s.dot(s)) * s;
        worst = std::max(worst, r.norm() / std::max(v.norm(), 1e-300));
    }
    return worst;
}

}  // namespace

TEST(SolveHeat, ZeroDataGivesZero) {
    const SpatialGrid g(8);
    const auto ops = assemble_p1(g);
    const TimeGrid t = uniform_time_grid(1.0, 5);
    const Trajectory zero = Trajectory::zero(t, ops.size());
    const Trajectory y = solve_heat(ops, t, 1.0, zero, zero, Eigen::VectorXd::Zero(ops.size()));
    EXPECT_EQ(y.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SolveHeat, FirstModeDecay) {
    const SpatialGrid g(64);
    const auto ops = assemble_p1(g);
    const TimeGrid t = uniform_time_grid(1.0, 512);
    const Trajectory zero = Trajectory::zero(t, ops.size());
    const Eigen::VectorXd y0 = sine(g);
    const Trajectory y = solve_heat(ops, t, 1.0, zero, zero, y0);
    const double ratio = mass_norm(ops, y.at(t.dof() - 1)) / mass_norm(ops, y0);
    // Implicit Euler damps the mode by (1 + dt lambda_h)^-n exactly.
    const double discrete = std::pow(1.0 + rayleigh(ops, y0) / 512.0, -512.0);
    EXPECT_NEAR(ratio / discrete, 1.0, 1e-10);
    // Against exp(-pi^2) the time error exp(lambda^2 dt / 2) ~ 1.1 remains.
    EXPECT_NEAR(ratio / std::exp(-kPi * kPi), 1.0, 0.11);
}

TEST(SolveHeat, SineSubspaceIsInvariant) {
    const SpatialGrid g(30);
    const auto ops = assemble_p1(g);
    const TimeGrid t({0.0, 0.1, 0.15, 0.4, 0.41, 1.0});
    const Eigen::VectorXd s = sine(g);
    Trajectory f = Trajectory::zero(t, ops.size());
    for (std::size_t j = 0; j < t.dof(); ++j) f.at(j) = std::cos(3.0 * t[j]) * s;
    const Trajectory y = solve_heat(ops, t, 0.7, f, Trajectory::zero(t, ops.size()), 2.0 * s);
    EXPECT_LE(collinearity_defect(y.values, s), 1e-12);
}

TEST(SolveHeat, StableOnArbitraryGridsProperty) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> step(1e-4, 0.3);
    const SpatialGrid g(25);
    const auto ops = assemble_p1(g);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pts = {0.0};
        for (int j = 0; j < 15; ++j) pts.push_back(pts.back() + step(rng));
        const TimeGrid t(pts);
        Eigen::VectorXd y0(ops.size());
        for (auto& v : y0) v = u(rng);
        const Trajectory zero = Trajectory::zero(t, ops.size());
        const Trajectory y = solve_heat(ops, t, 1.0, zero, zero, y0);
        for (std::size_t j = 1; j < t.dof(); ++j) {
            EXPECT_LE(mass_norm(ops, y.at(j)), mass_norm(ops, y.at(j - 1)) * (1.0 + 1e-14));
        }
    }
}

TEST(SolveHeat, FirstOrderInTime) {
    // y = sin(pi x) cos(t), so f = sin(pi x) (-sin t + pi^2 cos t).
    const SpatialGrid g(200);
    const auto ops = assemble_p1(g);
    const Eigen::VectorXd s = sine(g);
    std::vector<double> errors;
    for (int n : {10, 20, 40, 80}) {
        const TimeGrid t = uniform_time_grid(1.0, n);
        Trajectory f = Trajectory::zero(t, ops.size());
        for (std::size_t j = 0; j < t.dof(); ++j) f.at(j) = (-std::sin(t[j]) + kPi * kPi * std::cos(t[j])) * s;
        const Trajectory y = solve_heat(ops, t, 1.0, f, Trajectory::zero(t, ops.size()), s);
        errors.push_back(mass_norm(ops, y.at(t.dof() - 1) - std::cos(1.0) * s));
    }
    for (std::size_t k = 1; k < errors.size(); ++k) EXPECT_GE(std::log2(errors[k - 1] / errors[k]), 0.9);
}

TEST(SolveHeat, RejectsMismatchedInputs) {
    const auto ops = assemble_p1(SpatialGrid(6));
    const TimeGrid t = uniform_time_grid(1.0, 4);
    const Trajectory zero = Trajectory::zero(t, ops.size());
    const Trajectory other = Trajectory::zero(uniform_time_grid(1.0, 3), ops.size());
    EXPECT_THROW(solve_heat(ops, t, 1.0, other, zero, Eigen::VectorXd::Zero(ops.size())), std::invalid_argument);
    EXPECT_THROW(solve_heat(ops, t, 1.0, zero, zero, Eigen::VectorXd::Zero(2)), std::invalid_argument);
    EXPECT_THROW(solve_adjoint(ops, t, 1.0, zero, Trajectory::zero(t, 2)), std::invalid_argument);
}

TEST(SolveAdjoint, MatchingStateGivesZero) {
    const SpatialGrid g(10);
    const auto ops = assemble_p1(g);
    const TimeGrid t = uniform_time_grid(1.0, 7);
    Trajectory y = Trajectory::zero(t, ops.size());
    for (std::size_t j = 0; j < t.dof(); ++j) y.at(j) = (1.0 + t[j]) * sine(g);
    EXPECT_EQ(solve_adjoint(ops, t, 1.0, y, y).values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SolveAdjoint, TimeReversalOfHeat) {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const SpatialGrid g(12);
    const auto ops = assemble_p1(g);
    const std::size_t n = 9;
    const TimeGrid t = uniform_time_grid(2.0, static_cast<int>(n));
    Trajectory mismatch = Trajectory::zero(t, ops.size());
    for (Eigen::Index k = 0; k < mismatch.values.size(); ++k) mismatch.values.data()[k] = u(rng);
    const Trajectory zero = Trajectory::zero(t, ops.size());
    const Trajectory p = solve_adjoint(ops, t, 0.5, mismatch, zero);

    Trajectory reversed = Trajectory::zero(t, ops.size());
    for (std::size_t k = 0; k <= n; ++k) reversed.at(k) = mismatch.at(n - k);
    const Trajectory y = solve_heat(ops, t, 0.5, reversed, zero, Eigen::VectorXd::Zero(ops.size()));
    for (std::size_t j = 0; j <= n; ++j) {
        EXPECT_LE((p.at(j) - y.at(n - j)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SolveAdjoint, ScalarModalRecursion) {
    const SpatialGrid g(40);
    const auto ops = assemble_p1(g);
    const TimeGrid t({0.0, 0.2, 0.25, 0.6, 1.0});
    const Eigen::VectorXd s = sine(g);
    const double c = 1.7;
    const double nu = 0.8;
    const double lambda = rayleigh(ops, s);
    Trajectory y = Trajectory::zero(t, ops.size());
    for (std::size_t j = 0; j < t.dof(); ++j) y.at(j) = c * s;
    const Trajectory p = solve_adjoint(ops, t, nu, y, Trajectory::zero(t, ops.size()));
    double scalar = 0.0;
    for (std::size_t j = t.dof() - 1; j >= 1; --j) {
        const double dt = t.step(j - 1);
        scalar = (scalar + dt * c) / (1.0 + dt * nu * lambda);
        EXPECT_LE((p.at(j - 1) - scalar * s).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ImplicitEuler, CachesOneFactorPerStep) {
    const auto ops = assemble_p1(SpatialGrid(10));
    const ImplicitEuler stepper(ops.mass, ops.stiffness, 1.0);
    const TimeGrid t = bisect_marked(uniform_time_grid(1.0, 4), std::vector<std::size_t>{1, 2});
    stepper.forward(t, Eigen::VectorXd::Ones(ops.size()), Eigen::MatrixXd::Zero(ops.size(), 7));
    EXPECT_EQ(stepper.cached_factorizations(), 2u);
}
