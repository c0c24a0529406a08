#include "snaploc/spacetime.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "snaploc/errors.hpp"
#include "snaploc/io.hpp"
#include "snaploc/quadrature.hpp"

namespace snaploc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& out, const SparseMatrix& block, double scale, Eigen::Index row0,
               Eigen::Index col0) {
    if (scale == 0.0) return;
    for (int k = 0; k < block.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(block, k); it; ++it) {
            out.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
        }
    }
}

Eigen::VectorXd interpolate_at(const SpaceTimeFunction& value, const SpaceTimeFunction& dx,
                               const SpatialGrid& grid, double t) {
    return interpolate_hermite([&](double x) { return value(x, t); },
                               [&](double x) { return dx(x, t); }, grid);
}

void check_field(const Field& f, bool need_time, const char* name) {
    if (!f.value || !f.dx || (need_time && (!f.dt || !f.dxdt))) {
        throw std::invalid_argument(std::string("SpaceTimeData: incomplete field ") + name);
    }
}

constexpr std::array<double, 3> kGauss3X = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr std::array<double, 3> kGauss3W = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

SpaceTimeSystem assemble_spacetime(const SpatialGrid& spatial, const TimeGrid& time_grid,
                                   const SpaceTimeData& data, const SpaceTimeParameters& params) {
    if (!(params.alpha > 0.0)) throw std::invalid_argument("assemble_spacetime: alpha must be > 0");
    if (!(params.nu > 0.0)) throw std::invalid_argument("assemble_spacetime: nu must be > 0");
    check_field(data.desired, false, "desired");
    if (!data.initial.value || !data.initial.dx) {
        throw std::invalid_argument("SpaceTimeData: incomplete initial profile");
    }
    const bool with_forcing = params.include_forcing && data.forcing.has_value();
    if (with_forcing) check_field(*data.forcing, true, "forcing");

    FemOperatorsHermite ops = assemble_hermite(spatial);
    const Eigen::Index m = ops.size();
    const std::size_t n = time_grid.intervals();
    const Eigen::Index unknowns = static_cast<Eigen::Index>(n) * m;
    const double alpha = params.alpha;
    const double nu = params.nu;

    const SparseMatrix reaction = (1.0 / alpha) * ops.mass + (nu * nu) * ops.bending;
    const Eigen::VectorXd y0 = interpolate_hermite(data.initial.value, data.initial.dx, spatial);

    Triplets triplets;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(unknowns);
    // Time node k >= 1 maps to block k-1; node 0 is eliminated.
    auto offset = [m](std::size_t node) { return static_cast<Eigen::Index>(node - 1) * m; };

    for (std::size_t j = 0; j < n; ++j) {
        const double dt = time_grid.step(j);
        const double tmass[2][2] = {{dt / 3.0, dt / 6.0}, {dt / 6.0, dt / 3.0}};
        const double tstiff[2][2] = {{1.0 / dt, -1.0 / dt}, {-1.0 / dt, 1.0 / dt}};
        for (int a = 0; a < 2; ++a) {
            const std::size_t row = j + static_cast<std::size_t>(a);
            if (row == 0) continue;
            for (int b = 0; b < 2; ++b) {
                const std::size_t col = j + static_cast<std::size_t>(b);
                if (col == 0) {
                    load.segment(offset(row), m) -=
                        tstiff[a][b] * (ops.mass * y0) + tmass[a][b] * (reaction * y0);
                    continue;
                }
                add_block(triplets, ops.mass, tstiff[a][b], offset(row), offset(col));
                add_block(triplets, reaction, tmass[a][b], offset(row), offset(col));
            }
        }

        // Stacked integrand: [phi_0 yd, phi_1 yd, f, phi_0 f, phi_1 f].
        const double t0 = time_grid[j];
        const double t1 = time_grid[j + 1];
        const int blocks = with_forcing ? 5 : 2;
        auto integrand = [&](double t) {
            Eigen::VectorXd v(blocks * m);
            const double phi1 = (t - t0) / dt;
            const double phi0 = 1.0 - phi1;
            const Eigen::VectorXd yd = interpolate_at(data.desired.value, data.desired.dx, spatial, t);
            v.segment(0, m) = phi0 * yd;
            v.segment(m, m) = phi1 * yd;
            if (with_forcing) {
                const Eigen::VectorXd f =
                    interpolate_at(data.forcing->value, data.forcing->dx, spatial, t);
                v.segment(2 * m, m) = f;
                v.segment(3 * m, m) = phi0 * f;
                v.segment(4 * m, m) = phi1 * f;
            }
            return v;
        };
        const Eigen::VectorXd integral = integrate_adaptive(integrand, t0, t1);
        for (int a = 0; a < 2; ++a) {
            const std::size_t row = j + static_cast<std::size_t>(a);
            if (row == 0) continue;
            Eigen::VectorXd contribution = ops.mass * integral.segment(a * m, m) / alpha;
            if (with_forcing) {
                const double dphi = (a == 0 ? -1.0 : 1.0) / dt;
                contribution += dphi * (ops.mass * integral.segment(2 * m, m));
                contribution += nu * (ops.stiffness * integral.segment((3 + a) * m, m));
            }
            load.segment(offset(row), m) += contribution;
        }
    }
    add_block(triplets, ops.stiffness, nu, offset(n), offset(n));

    SparseMatrix matrix(unknowns, unknowns);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    return SpaceTimeSystem{std::move(ops), time_grid,        data, params, std::move(matrix),
                           std::move(load), y0};
}

Trajectory solve_spacetime(const SpaceTimeSystem& system) {
    const Eigen::Index m = system.spatial.size();
    const auto dof = static_cast<Eigen::Index>(system.time_grid.dof());
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(system.matrix);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
        throw NumericalBreakdown("solve_spacetime: system matrix is not positive definite");
    }
    const Eigen::VectorXd x = ldlt.solve(system.load);
    if (ldlt.info() != Eigen::Success) throw NumericalBreakdown("solve_spacetime: solve failed");
    Eigen::MatrixXd values(m, dof);
    values.col(0) = system.initial;
    values.rightCols(dof - 1) = Eigen::Map<const Eigen::MatrixXd>(x.data(), m, dof - 1);
    return Trajectory(system.time_grid, std::move(values));
}

Eigen::VectorXd free_unknowns(const SpaceTimeSystem& system, const Trajectory& solution) {
    if (!(solution.time_grid == system.time_grid) || solution.space_dim() != system.spatial.size()) {
        throw std::invalid_argument("free_unknowns: trajectory does not match the system");
    }
    const Eigen::MatrixXd tail = solution.values.rightCols(solution.values.cols() - 1);
    return Eigen::Map<const Eigen::VectorXd>(tail.data(), tail.size());
}

EstimatorReport estimate(const SpaceTimeSystem& system, const Trajectory& solution) {
    if (!(solution.time_grid == system.time_grid) || solution.space_dim() != system.spatial.size()) {
        throw std::invalid_argument("estimate: solution does not belong to the system");
    }
    const auto& ops = system.spatial;
    const SpatialGrid& grid = ops.grid;
    const std::size_t n = system.time_grid.intervals();
    const double alpha = system.params.alpha;
    const double nu = system.params.nu;
    const bool with_forcing = system.uses_forcing();

    Eigen::SimplicialLDLT<SparseMatrix> mass_solver(ops.mass);
    if (mass_solver.info() != Eigen::Success) {
        throw NumericalBreakdown("estimate: Hermite mass matrix factorization failed");
    }

    const Field& yd = system.data.desired;
    auto data_term = [&](double x, double t) {
        double v = yd.value(x, t) / alpha;
        if (with_forcing) v -= system.data.forcing->dt(x, t);
        return v;
    };
    auto data_term_dx = [&](double x, double t) {
        double v = yd.dx(x, t) / alpha;
        if (with_forcing) v -= system.data.forcing->dxdt(x, t);
        return v;
    };

    EstimatorReport report{system.time_grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                           Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
    for (std::size_t j = 0; j < n; ++j) {
        const double dt = system.time_grid.step(j);
        double interior = 0.0;
        double boundary = 0.0;
        for (std::size_t q = 0; q < kGauss3X.size(); ++q) {
            const double s = kGauss3X[q];
            const double t = system.time_grid[j] + s * dt;
            const double w = kGauss3W[q] * dt;
            const Eigen::VectorXd y = (1.0 - s) * solution.at(j) + s * solution.at(j + 1);

            Eigen::VectorXd riesz = (nu * nu) * (ops.bending * y);
            if (with_forcing) {
                riesz -= nu * (ops.stiffness * interpolate_at(system.data.forcing->value,
                                                              system.data.forcing->dx, grid, t));
            }
            const Eigen::VectorXd z = mass_solver.solve(riesz);
            const Eigen::VectorXd r = interpolate_at(data_term, data_term_dx, grid, t) - y / alpha - z;
            interior += w * r.dot(ops.mass * r);

            const double left = nu * evaluate_hermite(y, grid, 0.0, 2);
            const double right = nu * evaluate_hermite(y, grid, 1.0, 2);
            boundary += w * (left * left + right * right);
        }
        report.interior[static_cast<Eigen::Index>(j)] = dt * dt * interior;
        report.boundary[static_cast<Eigen::Index>(j)] = boundary;
    }
    return report;
}

void write_estimator_csv(std::ostream& out, const EstimatorReport& report) {
    out << "t_left,t_right,interior,boundary,eta2\n";
    for (std::size_t j = 0; j < report.time_grid.intervals(); ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        out << format_number(report.time_grid[j]) << ',' << format_number(report.time_grid[j + 1])
            << ',' << format_number(report.interior[k]) << ',' << format_number(report.boundary[k])
            << ',' << format_number(report.interior[k] + report.boundary[k]) << '\n';
    }
}

std::vector<std::size_t> rank_intervals(const Eigen::VectorXd& indicators) {
    std::vector<std::size_t> order(static_cast<std::size_t>(indicators.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return indicators[static_cast<Eigen::Index>(a)] > indicators[static_cast<Eigen::Index>(b)];
    });
    return order;
}

std::vector<std::size_t> dorfler_mark(const Eigen::VectorXd& indicators, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("dorfler_mark: theta in (0,1]");
    if (indicators.size() == 0) return {};
    const auto order = rank_intervals(indicators);
    const double target = theta * indicators.sum();
    std::vector<std::size_t> marked;
    double accumulated = 0.0;
    for (std::size_t j : order) {
        marked.push_back(j);
        accumulated += indicators[static_cast<Eigen::Index>(j)];
        if (accumulated >= target) break;
    }
    return marked;
}

AdaptResult adapt(const SpatialGrid& spatial, const SpaceTimeData& data,
                  const SpaceTimeParameters& params, const AdaptOptions& options) {
    if (!(options.theta > 0.0 && options.theta <= 1.0)) {
        throw std::invalid_argument("adapt: theta must lie in (0, 1]");
    }
    TimeGrid grid = uniform_time_grid(options.final_time, options.initial_intervals);
    if (options.dof_budget < grid.dof()) {
        throw std::invalid_argument("adapt: dof budget below the initial grid size");
    }
    std::vector<AdaptStep> history;
    for (;;) {
        const SpaceTimeSystem system = assemble_spacetime(spatial, grid, data, params);
        Trajectory solution = solve_spacetime(system);
        EstimatorReport report = estimate(system, solution);
        const Eigen::VectorXd indicators = report.indicators();
        if (grid.dof() == options.dof_budget) {
            history.push_back({grid.dof(), report.total(), 0});
            return AdaptResult{grid, std::move(solution), std::move(report), std::move(history)};
        }
        std::vector<std::size_t> marked = dorfler_mark(indicators, options.theta);
        const std::size_t room = options.dof_budget - grid.dof();
        if (marked.size() > room) {
            marked = rank_intervals(indicators);
            marked.resize(room);
        }
        history.push_back({grid.dof(), report.total(), marked.size()});
        grid = bisect_marked(grid, marked);
    }
}

}  // namespace snaploc
