#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "snaploc/fem1d.hpp"

using namespace snaploc;

namespace {

constexpr double kPi = std::numbers::pi;

double asymmetry(const SparseMatrix& m) {
    const Eigen::MatrixXd d(m);
    return (d - d.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(P1, TwoCells) {
    const auto ops = assemble_p1(SpatialGrid(2));
    ASSERT_EQ(ops.size(), 1);
    EXPECT_NEAR(ops.mass.coeff(0, 0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(ops.stiffness.coeff(0, 0), 4.0, 1e-14);
}

TEST(P1, FourCellsMassStencil) {
    const auto ops = assemble_p1(SpatialGrid(4));
    ASSERT_EQ(ops.size(), 3);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(ops.mass.coeff(i, i), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(ops.mass.coeff(0, 1), 1.0 / 24.0, 1e-15);
    EXPECT_NEAR(ops.mass.coeff(1, 2), 1.0 / 24.0, 1e-15);
    EXPECT_EQ(ops.mass.coeff(0, 2), 0.0);
}

TEST(P1, OneCellHasNoInteriorNode) { EXPECT_THROW(assemble_p1(SpatialGrid(1)), std::invalid_argument); }

TEST(P1, SymmetricPositiveDefiniteProperty) {
    std::mt19937 rng(1);
    std::normal_distribution<double> normal;
    for (int n : {2, 3, 7, 20, 64}) {
        const auto ops = assemble_p1(SpatialGrid(n));
        EXPECT_LE(asymmetry(ops.mass), 1e-14);
        EXPECT_LE(asymmetry(ops.stiffness), 1e-14);
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXd x(ops.size());
            for (auto& v : x) v = normal(rng);
            EXPECT_GT(x.dot(ops.stiffness * x), 0.0);
            EXPECT_GT(x.dot(ops.mass * x), 0.0);
        }
    }
}

TEST(P1, DiscreteSineIsGeneralizedEigenvector) {
    for (int n : {5, 16, 100}) {
        const SpatialGrid g(n);
        const auto ops = assemble_p1(g);
        const Eigen::VectorXd s = interpolate_p1([](double x) { return std::sin(kPi * x); }, g);
        const Eigen::VectorXd as = ops.stiffness * s;
        const Eigen::VectorXd ms = ops.mass * s;
        const double lambda = s.dot(as) / s.dot(ms);
        EXPECT_LE((as - lambda * ms).norm(), 1e-12 * as.norm());
        EXPECT_NEAR(lambda, kPi * kPi, 10.0 / (n * n));
    }
}

TEST(Hermite, ElementBendingIsBeamElement) {
    const double h = 0.3;
    Eigen::Matrix4d expected;
    expected << 12, 6 * h, -12, 6 * h, 6 * h, 4 * h * h, -6 * h, 2 * h * h, -12, -6 * h, 12, -6 * h, 6 * h,
        2 * h * h, -6 * h, 4 * h * h;
    expected /= h * h * h;
    EXPECT_LE((hermite_element_bending(h) - expected).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Hermite, ElementMassIntegratesConstants) {
    // The value shape functions sum to 1 and the slope functions carry the linear part.
    const double h = 0.25;
    const Eigen::Vector4d one(1.0, 0.0, 1.0, 0.0);
    EXPECT_NEAR(one.dot(hermite_element_mass(h) * one), h, 1e-15);
    const Eigen::Vector4d line(0.0, 1.0, h, 1.0);  // u(x) = x
    EXPECT_NEAR(line.dot(hermite_element_stiffness(h) * line), h, 1e-15);
}

TEST(Hermite, ParabolaBendingEnergy) {
    for (int n : {1, 2, 5, 13}) {
        const SpatialGrid g(n);
        const auto ops = assemble_hermite(g);
        EXPECT_EQ(ops.size(), 2 * n);
        const Eigen::VectorXd u = interpolate_hermite([](double x) { return x * (1.0 - x); },
                                                      [](double x) { return 1.0 - 2.0 * x; }, g);
        EXPECT_NEAR(u.dot(ops.bending * u), 4.0, 1e-11);
        EXPECT_NEAR(u.dot(ops.stiffness * u), 1.0 / 3.0, 1e-12);
        EXPECT_NEAR(u.dot(ops.mass * u), 1.0 / 30.0, 1e-13);
        EXPECT_EQ(asymmetry(ops.bending), 0.0);
        EXPECT_LE(asymmetry(ops.mass), 1e-14);
        EXPECT_LE(asymmetry(ops.stiffness), 1e-14);
    }
}

TEST(Hermite, ConstrainedLayout) {
    const auto ops = assemble_hermite(SpatialGrid(3));
    EXPECT_EQ(ops.constrained_index(0, false), -1);
    EXPECT_EQ(ops.constrained_index(0, true), 0);
    EXPECT_EQ(ops.constrained_index(1, false), 1);
    EXPECT_EQ(ops.constrained_index(1, true), 2);
    EXPECT_EQ(ops.constrained_index(2, false), 3);
    EXPECT_EQ(ops.constrained_index(2, true), 4);
    EXPECT_EQ(ops.constrained_index(3, false), -1);
    EXPECT_EQ(ops.constrained_index(3, true), 5);
}

TEST(Hermite, ReproducesCubics) {
    const SpatialGrid g(4);
    auto f = [](double x) { return x * (1.0 - x) * (2.0 * x + 1.0); };
    auto df = [](double x) { return -6.0 * x * x + 2.0 * x + 1.0; };
    const Eigen::VectorXd c = interpolate_hermite(f, df, g);
    for (int k = 0; k <= 100; ++k) {
        const double x = k / 100.0;
        EXPECT_NEAR(evaluate_hermite(c, g, x), f(x), 1e-12);
        EXPECT_NEAR(evaluate_hermite(c, g, x, 1), df(x), 1e-11);
        EXPECT_NEAR(evaluate_hermite(c, g, x, 2), -12.0 * x + 2.0, 1e-10);
    }
}

TEST(Interpolation, Examples) {
    const SpatialGrid g(4);
    EXPECT_EQ(interpolate_p1([](double) { return 0.0; }, g), Eigen::VectorXd::Zero(3));
    const Eigen::VectorXd s = interpolate_p1([](double x) { return std::sin(kPi * x); }, g);
    EXPECT_NEAR(s[0], std::sin(kPi / 4), 1e-15);
    EXPECT_NEAR(s[1], 1.0, 1e-15);
    EXPECT_NEAR(s[2], std::sin(3 * kPi / 4), 1e-15);
    EXPECT_NEAR(evaluate_p1(s, g, 0.125), 0.5 * std::sin(kPi / 4), 1e-15);
    EXPECT_EQ(evaluate_p1(s, g, 0.0), 0.0);
}

TEST(Prolongation, ReproducesLinearFunctionsAndIdentity) {
    const SpatialGrid coarse(5);
    const SpatialGrid fine(100);
    // Piecewise linear with zero boundary values and a kink at a coarse node.
    auto tent = [](double x) { return x < 0.4 ? x : (1.0 - x) * 0.4 / 0.6; };
    const Eigen::VectorXd v = interpolate_p1(tent, coarse);
    const Eigen::VectorXd w = prolongate(v, coarse, fine);
    EXPECT_LE((w - interpolate_p1(tent, fine)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(prolongate(v, coarse, coarse), v);
    EXPECT_EQ(prolongate(Eigen::VectorXd::Zero(4), coarse, fine), Eigen::VectorXd::Zero(99));
    EXPECT_THROW(prolongate(v, coarse, SpatialGrid(7)), std::invalid_argument);
}

TEST(Prolongation, PreservesFunctionProperty) {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const SpatialGrid coarse(6);
    const SpatialGrid fine(42);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd v(5);
        for (auto& c : v) c = u(rng);
        const Eigen::VectorXd w = prolongate(v, coarse, fine);
        for (int k = 0; k <= 97; ++k) {
            const double x = k / 97.0;
            EXPECT_NEAR(evaluate_p1(v, coarse, x), evaluate_p1(w, fine, x), 1e-13);
        }
    }
}

TEST(SpaceTimeNorm, Examples) {
    const SpatialGrid g(200);
    const auto ops = assemble_p1(g);
    const TimeGrid t = uniform_time_grid(1.0, 200);
    EXPECT_EQ(spacetime_l2_norm(Trajectory::zero(t, ops.size()), ops.mass), 0.0);

    const Eigen::VectorXd v = interpolate_p1([](double x) { return x * (1.0 - x); }, g);
    Trajectory constant(t, v.replicate(1, static_cast<Eigen::Index>(t.dof())));
    EXPECT_NEAR(spacetime_l2_norm(constant, ops.mass), std::sqrt(v.dot(ops.mass * v)), 1e-14);

    const Eigen::VectorXd s = interpolate_p1([](double x) { return std::sin(kPi * x); }, g);
    Trajectory ramp = Trajectory::zero(t, ops.size());
    for (std::size_t j = 0; j < t.dof(); ++j) ramp.at(j) = t[j] * s;
    EXPECT_NEAR(spacetime_l2_norm(ramp, ops.mass), std::sqrt(1.0 / 6.0), 1e-4);

    EXPECT_NEAR(spacetime_l2_norm(Trajectory(t, -2.5 * ramp.values), ops.mass),
                2.5 * spacetime_l2_norm(ramp, ops.mass), 1e-14);
    EXPECT_THROW(spacetime_l2_norm(ramp, assemble_p1(SpatialGrid(10)).mass), std::invalid_argument);
}

TEST(Trajectory, RejectsWrongColumnCount) {
    EXPECT_THROW(Trajectory(uniform_time_grid(1.0, 3), Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST(Trajectory, CsvWritesBoundaryZeros) {
    const SpatialGrid g(2);
    Trajectory traj(uniform_time_grid(1.0, 1), Eigen::MatrixXd::Constant(1, 2, 3.0));
    std::ostringstream out;
    write_trajectory_csv(out, traj, g);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("x/t,", 0), 0u);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_NE(out.str().find("5.00000000000000000e-01,3.00000000000000000e+00"), std::string::npos);
}
