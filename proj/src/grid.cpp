#include "snaploc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "snaploc/io.hpp"

namespace snaploc {

SpatialGrid::SpatialGrid(int n_cells) : n_cells_(n_cells) {
    if (n_cells < 1) {
        throw std::invalid_argument("SpatialGrid: n_cells must be positive, got " +
                                    std::to_string(n_cells));
    }
}

double SpatialGrid::node(int i) const {
    if (i == n_cells_) return 1.0;
    return static_cast<double>(i) / n_cells_;
}

std::vector<double> SpatialGrid::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n_cells_) + 1);
    for (int i = 0; i <= n_cells_; ++i) x[static_cast<std::size_t>(i)] = node(i);
    return x;
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw std::invalid_argument("TimeGrid: need at least two points");
    }
    if (points_.front() != 0.0) {
        throw std::invalid_argument("TimeGrid: first point must be 0");
    }
    for (std::size_t j = 1; j < points_.size(); ++j) {
        if (!(points_[j] > points_[j - 1])) {
            throw std::invalid_argument("TimeGrid: points must be strictly increasing");
        }
    }
}

double TimeGrid::max_step() const {
    double m = 0.0;
    for (std::size_t j = 0; j < intervals(); ++j) m = std::max(m, step(j));
    return m;
}

double TimeGrid::min_step() const {
    double m = step(0);
    for (std::size_t j = 1; j < intervals(); ++j) m = std::min(m, step(j));
    return m;
}

TimeGrid uniform_time_grid(double final_time, int intervals) {
    if (intervals < 1) throw std::invalid_argument("uniform_time_grid: need n >= 1");
    if (!(final_time > 0.0)) throw std::invalid_argument("uniform_time_grid: need T > 0");
    std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
    for (int j = 0; j < intervals; ++j) {
        t[static_cast<std::size_t>(j)] = final_time * j / intervals;
    }
    t.back() = final_time;
    return TimeGrid(std::move(t));
}

TimeGrid bisect_marked(const TimeGrid& grid, std::span<const std::size_t> marked) {
    std::vector<char> split(grid.intervals(), 0);
    for (std::size_t j : marked) {
        if (j >= grid.intervals()) {
            throw std::invalid_argument("bisect_marked: interval index " + std::to_string(j) +
                                        " out of range");
        }
        split[j] = 1;
    }
    std::vector<double> t;
    t.reserve(grid.dof() + marked.size());
    for (std::size_t j = 0; j < grid.intervals(); ++j) {
        t.push_back(grid[j]);
        if (split[j]) t.push_back(0.5 * (grid[j] + grid[j + 1]));
    }
    t.push_back(grid.final_time());
    return TimeGrid(std::move(t));
}

Eigen::VectorXd trapezoidal_weights(const TimeGrid& grid) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.dof()));
    for (std::size_t j = 0; j < grid.intervals(); ++j) {
        const double half = 0.5 * grid.step(j);
        beta[static_cast<Eigen::Index>(j)] += half;
        beta[static_cast<Eigen::Index>(j + 1)] += half;
    }
    return beta;
}

void write_time_grid_csv(std::ostream& out, const TimeGrid& grid) {
    out << "t\n";
    for (double t : grid.points()) out << format_number(t) << '\n';
}

}  // namespace snaploc
