#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "snaploc/fem1d.hpp"
#include "snaploc/field.hpp"

namespace snaploc {

/// Data of the state-only elliptic reformulation
///   -y_tt + nu^2 Delta^2 y + y/alpha = y_d/alpha - f_t - nu Delta f,
/// with y(0) = y0, y = Delta y = 0 on the lateral boundary and
/// (y_t - nu Delta y)(T) = f(T).
struct SpaceTimeData {
    Field desired;
    std::optional<Field> forcing;  ///< needs value, dx, dt and dxdt
    Profile initial;
};

struct SpaceTimeParameters {
    double alpha = 1.0;
    double nu = 1.0;
    /// Adds the forcing terms to the load and to the residual. Ignored when
    /// the data carry no forcing.
    bool include_forcing = true;
};

/// Galerkin system for P1-in-time x cubic-Hermite-in-space trial functions.
///
/// The bilinear form is
///   int (v_t w_t + v w / alpha + nu^2 v'' w'') + nu int v'(T) w'(T),
/// and the load is int (y_d/alpha) v + f v_t + nu f' v'. The first time slice
/// is fixed to the Hermite interpolant of y0 and eliminated, so `matrix`
/// acts on time points 1..n (block j-1 holds t_j).
struct SpaceTimeSystem {
    FemOperatorsHermite spatial;
    TimeGrid time_grid;
    SpaceTimeData data;
    SpaceTimeParameters params;
    SparseMatrix matrix;
    Eigen::VectorXd load;
    Eigen::VectorXd initial;

    bool uses_forcing() const { return params.include_forcing && data.forcing.has_value(); }
    /// Unknown count with the initial slice included.
    Eigen::Index unknowns_before_elimination() const {
        return static_cast<Eigen::Index>(time_grid.dof()) * spatial.size();
    }
};

SpaceTimeSystem assemble_spacetime(const SpatialGrid& spatial, const TimeGrid& time_grid,
                                   const SpaceTimeData& data, const SpaceTimeParameters& params);

/// Hermite coefficients per time point; slice 0 equals the interpolated y0.
Trajectory solve_spacetime(const SpaceTimeSystem& system);

/// Stacks slices 1..n of a trajectory into the unknown vector of `system`.
Eigen::VectorXd free_unknowns(const SpaceTimeSystem& system, const Trajectory& solution);

/// Temporal residual indicators per interval.
struct EstimatorReport {
    TimeGrid time_grid;
    Eigen::VectorXd interior;  ///< dt_j^2 int_{I_j} |r|^2_{L2}
    Eigen::VectorXd boundary;  ///< int_{I_j} (nu y''(0))^2 + (nu y''(1))^2

    Eigen::VectorXd indicators() const { return interior + boundary; }
    double total() const { return interior.sum() + boundary.sum(); }
};

/// Residual r = Pi(y_d/alpha - f_t) - y/alpha - z with M z = nu^2 B y - nu A f_h;
/// the second time derivative of a P1-in-time solution vanishes on each
/// interval. Time integrals use 3-point Gauss.
EstimatorReport estimate(const SpaceTimeSystem& system, const Trajectory& solution);

void write_estimator_csv(std::ostream& out, const EstimatorReport& report);

/// Smallest set of intervals carrying at least `theta` of the summed
/// indicators, taken in decreasing order with ties going to earlier intervals.
std::vector<std::size_t> dorfler_mark(const Eigen::VectorXd& indicators, double theta);

/// Interval indices sorted by decreasing indicator, ties toward earlier intervals.
std::vector<std::size_t> rank_intervals(const Eigen::VectorXd& indicators);

struct AdaptOptions {
    std::size_t dof_budget = 21;
    double theta = 0.5;
    int initial_intervals = 10;
    double final_time = 1.0;
};

struct AdaptStep {
    std::size_t dof;
    double estimate;
    std::size_t marked;
};

struct AdaptResult {
    TimeGrid grid;
    Trajectory solution;
    EstimatorReport report;
    std::vector<AdaptStep> history;
};

/// Solve-estimate-mark-bisect loop starting from a uniform grid. Stops when
/// the grid holds exactly dof_budget points; the last pass bisects only the
/// highest-ranked intervals when a full Dorfler pass would overshoot.
AdaptResult adapt(const SpatialGrid& spatial, const SpaceTimeData& data,
                  const SpaceTimeParameters& params, const AdaptOptions& options);

}  // namespace snaploc
