#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "snaploc/manufactured.hpp"
#include "snaploc/spacetime.hpp"

using namespace snaploc;

namespace {

SpaceTimeData zero_data() {
    auto zero = [](double, double) { return 0.0; };
    auto zero_x = [](double) { return 0.0; };
    return SpaceTimeData{Field{zero, zero, zero, zero}, std::nullopt, Profile{zero_x, zero_x}};
}

SpaceTimeData scaled(const SpaceTimeData& d, double c) {
    SpaceTimeData out = d;
    out.desired.value = [f = d.desired.value, c](double x, double t) { return c * f(x, t); };
    out.desired.dx = [f = d.desired.dx, c](double x, double t) { return c * f(x, t); };
    out.initial.value = [f = d.initial.value, c](double x) { return c * f(x); };
    out.initial.dx = [f = d.initial.dx, c](double x) { return c * f(x); };
    return out;
}

const SpaceTimeParameters kUnit{1.0, 1.0, true};

}  // namespace

TEST(SpaceTime, ZeroDataGivesZeroSolutionAndIndicators) {
    const auto system = assemble_spacetime(SpatialGrid(4), uniform_time_grid(1.0, 6), zero_data(), kUnit);
    EXPECT_EQ(system.load.cwiseAbs().maxCoeff(), 0.0);
    const Trajectory y = solve_spacetime(system);
    EXPECT_EQ(y.values.cwiseAbs().maxCoeff(), 0.0);
    const EstimatorReport r = estimate(system, y);
    EXPECT_EQ(r.total(), 0.0);
}

TEST(SpaceTime, SystemIsSymmetricAndSolvedExactly) {
    const ManufacturedProblem p(1e-3);
    const auto system =
        assemble_spacetime(SpatialGrid(5), uniform_time_grid(1.0, 12), p.spacetime_data(), kUnit);
    EXPECT_EQ(system.matrix.rows(), 12 * 10);
    EXPECT_EQ(system.unknowns_before_elimination(), 13 * 10);
    const Eigen::MatrixXd dense(system.matrix);
    EXPECT_LE((dense - dense.transpose()).cwiseAbs().maxCoeff(), 1e-12 * dense.cwiseAbs().maxCoeff());

    const Trajectory y = solve_spacetime(system);
    const Eigen::VectorXd x = free_unknowns(system, y);
    EXPECT_LE((system.matrix * x - system.load).norm(), 1e-10 * system.load.norm());

    const Eigen::VectorXd y0 = interpolate_hermite([&](double s) { return p.initial(s); },
                                                   p.initial_profile().dx, SpatialGrid(5));
    EXPECT_EQ(y.at(0), y0);
}

TEST(SpaceTime, InteriorLayerCrossesZeroAtHalf) {
    const ManufacturedProblem p(1e-3);
    const SpatialGrid g(10);
    const TimeGrid t = uniform_time_grid(1.0, 10);
    const Trajectory y = solve_spacetime(assemble_spacetime(g, t, p.spacetime_data(), kUnit));
    const Eigen::Index mid = assemble_hermite(g).constrained_index(5, false);
    EXPECT_LT(y.values(mid, 4), 0.0);
    EXPECT_GT(y.values(mid, 6), 0.0);
}

TEST(SpaceTime, RejectsBadParameters) {
    const ManufacturedProblem p(1e-3);
    EXPECT_THROW(assemble_spacetime(SpatialGrid(5), uniform_time_grid(1.0, 4), p.spacetime_data(),
                                    SpaceTimeParameters{0.0, 1.0, true}),
                 std::invalid_argument);
    EXPECT_THROW(assemble_spacetime(SpatialGrid(5), uniform_time_grid(1.0, 4), p.spacetime_data(),
                                    SpaceTimeParameters{1.0, -1.0, true}),
                 std::invalid_argument);
}

TEST(SpaceTime, SmoothCaseConvergesInTime) {
    // Reference on a fine nested grid; errors measured at the coarse time points.
    const ManufacturedProblem p(1.0);
    const SpatialGrid g(4);
    const auto ops = assemble_hermite(g);
    const Trajectory ref =
        solve_spacetime(assemble_spacetime(g, uniform_time_grid(1.0, 128), p.spacetime_data(), kUnit));
    std::vector<double> errors;
    for (int n : {4, 8, 16}) {
        const Trajectory y =
            solve_spacetime(assemble_spacetime(g, uniform_time_grid(1.0, n), p.spacetime_data(), kUnit));
        double e2 = 0.0;
        for (int j = 0; j <= n; ++j) {
            const Eigen::VectorXd d = y.at(static_cast<std::size_t>(j)) - ref.at(static_cast<std::size_t>(j * 128 / n));
            e2 += d.dot(ops.mass * d) / n;
        }
        errors.push_back(std::sqrt(e2));
    }
    EXPECT_GE(std::log2(errors[0] / errors[1]), 1.8);
    EXPECT_GE(std::log2(errors[1] / errors[2]), 1.8);
}

TEST(Estimator, PeaksAtTheLayer) {
    const ManufacturedProblem p(1e-3);
    const TimeGrid t = uniform_time_grid(1.0, 5);
    const auto system = assemble_spacetime(SpatialGrid(5), t, p.spacetime_data(), kUnit);
    const EstimatorReport r = estimate(system, solve_spacetime(system));
    Eigen::Index argmax = 0;
    r.indicators().maxCoeff(&argmax);
    EXPECT_EQ(argmax, 2);
    EXPECT_TRUE((r.interior.array() >= 0.0).all());
    EXPECT_TRUE((r.boundary.array() >= 0.0).all());
}

TEST(Estimator, DecreasesUnderUniformRefinement) {
    const ManufacturedProblem p(1e-3);
    auto total = [&](int n, bool forcing) {
        const auto system = assemble_spacetime(SpatialGrid(5), uniform_time_grid(1.0, n), p.spacetime_data(),
                                               SpaceTimeParameters{1.0, 1.0, forcing});
        return estimate(system, solve_spacetime(system)).total();
    };
    double previous = INFINITY;
    for (int n : {5, 10, 20, 40, 80}) {
        const double t = total(n, false);
        EXPECT_LE(t, previous);
        previous = t;
    }
    // With the forcing the f_t spike of height ~1/eps^2 dominates until dt resolves it.
    EXPECT_LT(total(320, true), total(160, true));
    EXPECT_LT(total(160, true), total(80, true));
}

TEST(Estimator, QuadraticInTheData) {
    SpaceTimeData data = ManufacturedProblem(1e-2).spacetime_data();
    data.forcing.reset();
    const SpatialGrid g(6);
    const TimeGrid t = bisect_marked(uniform_time_grid(1.0, 6), std::vector<std::size_t>{2, 3});
    auto indicators = [&](const SpaceTimeData& d) {
        const auto system = assemble_spacetime(g, t, d, kUnit);
        return estimate(system, solve_spacetime(system)).indicators();
    };
    const Eigen::VectorXd base = indicators(data);
    for (double c : {-2.0, 0.5, 3.0}) {
        const Eigen::VectorXd s = indicators(scaled(data, c));
        EXPECT_LE((s - c * c * base).cwiseAbs().maxCoeff(), 1e-10 * c * c * base.maxCoeff());
    }
}

TEST(Estimator, RejectsForeignSolution) {
    const ManufacturedProblem p(1e-3);
    const auto a = assemble_spacetime(SpatialGrid(5), uniform_time_grid(1.0, 5), p.spacetime_data(), kUnit);
    const auto b = assemble_spacetime(SpatialGrid(5), uniform_time_grid(1.0, 6), p.spacetime_data(), kUnit);
    EXPECT_THROW(estimate(a, solve_spacetime(b)), std::invalid_argument);
}

TEST(Estimator, CsvColumns) {
    const auto system = assemble_spacetime(SpatialGrid(3), uniform_time_grid(1.0, 2), zero_data(), kUnit);
    std::ostringstream out;
    write_estimator_csv(out, estimate(system, solve_spacetime(system)));
    const std::string csv = out.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t_left,t_right,interior,boundary,eta2");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Dorfler, SmallestSetWithEarlierTies) {
    Eigen::VectorXd eta(5);
    eta << 1.0, 4.0, 2.0, 4.0, 1.0;
    EXPECT_EQ(dorfler_mark(eta, 0.5), (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(dorfler_mark(eta, 0.3), (std::vector<std::size_t>{1}));
    EXPECT_EQ(dorfler_mark(eta, 1.0), (std::vector<std::size_t>{1, 3, 2, 0, 4}));
    EXPECT_EQ(rank_intervals(eta), (std::vector<std::size_t>{1, 3, 2, 0, 4}));
    EXPECT_THROW(dorfler_mark(eta, 0.0), std::invalid_argument);
    EXPECT_THROW(dorfler_mark(eta, 1.5), std::invalid_argument);
}

TEST(Adapt, LayerGridProperties) {
    const ManufacturedProblem p(1e-3);
    const AdaptResult r = adapt(SpatialGrid(5), p.spacetime_data(), kUnit, AdaptOptions{21, 0.5, 10, 1.0});
    ASSERT_EQ(r.grid.dof(), 21u);
    const TimeGrid initial = uniform_time_grid(1.0, 10);
    for (double t : initial.points()) {
        EXPECT_TRUE(std::binary_search(r.grid.points().begin(), r.grid.points().end(), t));
    }
    std::size_t smallest = 0;
    std::size_t largest = 0;
    for (std::size_t j = 1; j < r.grid.intervals(); ++j) {
        if (r.grid.step(j) < r.grid.step(smallest)) smallest = j;
        if (r.grid.step(j) > r.grid.step(largest)) largest = j;
    }
    EXPECT_LE(std::abs(r.grid[smallest] - 0.5), r.grid.step(smallest) + 1e-14);
    const double tie = 1e-12;
    EXPECT_TRUE(r.grid.step(0) >= r.grid.step(largest) - tie ||
                r.grid.step(r.grid.intervals() - 1) >= r.grid.step(largest) - tie);
    EXPECT_EQ(r.history.back().dof, 21u);
    EXPECT_EQ(r.solution.time_grid, r.grid);
}

TEST(Adapt, HitsEveryBudgetExactly) {
    const ManufacturedProblem p(1e-3);
    for (std::size_t budget : {11u, 12u, 30u, 47u}) {
        const AdaptResult r = adapt(SpatialGrid(5), p.spacetime_data(), kUnit, AdaptOptions{budget, 0.5, 10, 1.0});
        EXPECT_EQ(r.grid.dof(), budget);
    }
}

TEST(Adapt, SmoothProblemGivesQuasiUniformGrid) {
    const ManufacturedProblem p(1.0);
    const AdaptResult r = adapt(SpatialGrid(5), p.spacetime_data(), kUnit, AdaptOptions{21, 0.5, 10, 1.0});
    EXPECT_LE(r.grid.max_step() / r.grid.min_step(), 4.0 + 1e-9);
}

TEST(Adapt, RejectsSmallBudgetAndBadTheta) {
    const ManufacturedProblem p(1e-3);
    EXPECT_THROW(adapt(SpatialGrid(5), p.spacetime_data(), kUnit, AdaptOptions{10, 0.5, 10, 1.0}),
                 std::invalid_argument);
    EXPECT_THROW(adapt(SpatialGrid(5), p.spacetime_data(), kUnit, AdaptOptions{21, 0.0, 10, 1.0}),
                 std::invalid_argument);
}
