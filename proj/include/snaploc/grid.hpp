#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace snaploc {

/// Uniform partition of the unit interval (0,1) into n_cells cells.
class SpatialGrid {
public:
    explicit SpatialGrid(int n_cells);

    int n_cells() const { return n_cells_; }
    double h() const { return 1.0 / n_cells_; }
    /// Interior (non-Dirichlet) node count of the P1 space.
    int interior_nodes() const { return n_cells_ - 1; }
    double node(int i) const;
    std::vector<double> nodes() const;

    bool operator==(const SpatialGrid&) const = default;

private:
    int n_cells_;
};

/// Strictly increasing partition 0 = t_0 < ... < t_n = T.
///
/// Intervals are indexed from 0: interval j is [t_j, t_{j+1}] with length step(j).
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> points);

    std::size_t dof() const { return points_.size(); }
    std::size_t intervals() const { return points_.size() - 1; }
    double final_time() const { return points_.back(); }
    double operator[](std::size_t j) const { return points_[j]; }
    double step(std::size_t j) const { return points_[j + 1] - points_[j]; }
    double max_step() const;
    double min_step() const;
    std::span<const double> points() const { return points_; }

    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> points_;
};

TimeGrid uniform_time_grid(double final_time, int intervals);

/// Splits every marked interval at its midpoint; unmarked intervals are kept.
/// Duplicate indices are ignored.
TimeGrid bisect_marked(const TimeGrid& grid, std::span<const std::size_t> marked);

/// Composite trapezoidal weights beta_0..beta_n of the grid; they sum to T.
Eigen::VectorXd trapezoidal_weights(const TimeGrid& grid);

/// Single-column CSV with header "t".
void write_time_grid_csv(std::ostream& out, const TimeGrid& grid);

}  // namespace snaploc
