#include "snaploc/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "snaploc/manufactured.hpp"
#include "snaploc/pipeline.hpp"
#include "snaploc/pod.hpp"

namespace snaploc {

namespace {

constexpr double kPi = std::numbers::pi;

std::string scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

double manufactured_state_residual(double eps, double alpha, double nu, int n) {
    const ManufacturedProblem problem(eps, alpha, nu);
    double worst = 0.0;
    for (int a = 1; a <= n; ++a) {
        for (int b = 1; b <= n; ++b) {
            const double x = a / (n + 1.0);
            const double t = b / (n + 1.0);
            const double s = t - 0.5;
            const double y = std::sin(kPi * x) * std::atan(s / eps);
            const double y_t = std::sin(kPi * x) * eps / (eps * eps + s * s);
            const double y_xx = -kPi * kPi * y;
            const double u = -std::sin(kPi * x) * std::sin(kPi * t) / alpha;
            const double r = y_t - nu * y_xx - problem.forcing(x, t) - u;
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

double manufactured_adjoint_residual(double eps, double alpha, double nu, int n) {
    const ManufacturedProblem problem(eps, alpha, nu);
    double worst = 0.0;
    for (int a = 1; a <= n; ++a) {
        for (int b = 1; b <= n; ++b) {
            const double x = a / (n + 1.0);
            const double t = b / (n + 1.0);
            const double p = std::sin(kPi * x) * std::sin(kPi * t);
            const double p_t = kPi * std::sin(kPi * x) * std::cos(kPi * t);
            const double p_xx = -kPi * kPi * p;
            const double y = std::sin(kPi * x) * std::atan((t - 0.5) / eps);
            const double r = -p_t - nu * p_xx - (y - problem.desired(x, t));
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

double gradient_check(const LqSolver& solver, int trials, double h, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto rows = solver.model().size();
    const auto cols = static_cast<Eigen::Index>(solver.model().grid.dof());
    auto random_matrix = [&] {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
        return m;
    };
    const auto scheme = AdjointScheme::DiscretizeThenOptimize;
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        const Eigen::MatrixXd u = random_matrix();
        const Eigen::MatrixXd du = random_matrix();
        const Eigen::MatrixXd g = solver.gradient(u, solver.adjoint(solver.state(u), scheme), scheme);
        const double analytic = solver.inner(g, du);
        const double fd = (solver.cost(u + h * du) - solver.cost(u - h * du)) / (2.0 * h);
        const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-300});
        worst = std::max(worst, std::abs(fd - analytic) / scale);
    }
    return worst;
}

double pod_identity_check(int trials, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(2, 30);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::uniform_real_distribution<double> positive(0.1, 1.0);
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        const int n = dim(rng);
        const int m = dim(rng);
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = uniform(rng);
        const Eigen::MatrixXd w_dense = g * g.transpose() + n * Eigen::MatrixXd::Identity(n, n);
        const SparseMatrix w = w_dense.sparseView();
        Eigen::MatrixXd y(n, m);
        for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = uniform(rng);
        Eigen::VectorXd beta(m);
        for (int j = 0; j < m; ++j) beta[j] = positive(rng);
        const int ell = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(n, m)));
        const PodBasis basis = compute_pod(y, beta, w, ell);
        const double direct = projection_error(y, beta, w, basis.modes);
        const double tail = basis.eigenvalues.tail(basis.eigenvalues.size() - basis.rank()).sum();
        const double scale = std::max(std::abs(tail), 1e-300);
        // A complete basis leaves only roundoff, so compare against the total energy there.
        const double gap = tail > 1e-12 * basis.eigenvalues.sum()
                               ? std::abs(direct - tail) / scale
                               : std::abs(direct - tail) / basis.eigenvalues.sum();
        worst = std::max(worst, gap);
    }
    return worst;
}

std::vector<CheckResult> run_selfcheck() {
    std::vector<CheckResult> results;
    auto add = [&](std::string name, double value, double limit) {
        results.push_back({std::move(name), value <= limit,
                           scientific(value) + " (limit " + scientific(limit) + ")"});
    };

    add("manufactured state residual", manufactured_state_residual(1e-3, 1.0, 1.0, 50), 1e-12);
    add("manufactured adjoint residual", manufactured_adjoint_residual(1e-3, 1.0, 1.0, 50), 1e-12);
    add("pod error identity", pod_identity_check(100, 7), 1e-10);

    const ManufacturedProblem problem(1e-3, 1.0, 1.0);
    const SpatialGrid space(20);
    const FemOperatorsP1 ops = assemble_p1(space);
    const TimeGrid grid = bisect_marked(uniform_time_grid(1.0, 8), std::vector<std::size_t>{3, 4});
    const Trajectory forcing = sample([&](double x, double t) { return problem.forcing(x, t); }, space, grid);
    const Trajectory desired = sample([&](double x, double t) { return problem.desired(x, t); }, space, grid);
    const Eigen::VectorXd y0 = interpolate_p1([&](double x) { return problem.initial(x); }, space);
    const LqSolver full(full_order_model(ops, 1.0, 1.0, y0, forcing, desired));
    add("full gradient vs central differences", gradient_check(full, 10, 1e-4, 11), 1e-5);

    const Trajectory snapshots = solve_heat(ops, grid, 1.0, forcing, Trajectory::zero(grid, ops.size()), y0);
    const PodBasis basis = compute_pod(snapshots.values, trapezoidal_weights(grid), ops.mass, 1);
    const ReducedOperators reduced = reduce_operators(ops, basis.modes, y0, forcing.values, desired.values);
    const LqSolver rom(reduced_order_model(reduced, ops, 1.0, 1.0, grid, desired));
    add("reduced gradient vs central differences", gradient_check(rom, 10, 1e-4, 13), 1e-5);

    const OcpSolution solution = solve_ocp(full, GradientOptions{});
    add("full optimality residual", solution.gradient_norm, GradientOptions{}.tolerance);
    return results;
}

}  // namespace snaploc
