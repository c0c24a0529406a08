#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "snaploc/manufactured.hpp"
#include "snaploc/optctrl.hpp"
#include "snaploc/pod.hpp"
#include "snaploc/spacetime.hpp"

namespace snaploc {

enum class GridMode { Adaptive, Equidistant };
enum class SnapshotSource { Uncontrolled, CoarseOptimal };

struct ExperimentConfig {
    int coarse_cells = 5;    ///< coarse_dx = 1 / coarse_cells
    int fine_cells = 100;    ///< fine_h = 1 / fine_cells
    std::size_t dof = 21;
    GridMode grid_mode = GridMode::Adaptive;
    int equidistant_n = 20;
    SnapshotSource snapshot_source = SnapshotSource::Uncontrolled;
    int ell = 1;
    double alpha = 1.0;
    double nu = 1.0;
    double final_time = 1.0;
    double epsilon = 1e-3;
    double tolerance = 1e-6;
    int max_iterations = 50;
    double theta = 0.5;
    int initial_intervals = 10;
    bool include_forcing = true;
    AdjointScheme adjoint_scheme = AdjointScheme::OptimizeThenDiscretize;
    std::filesystem::path output_dir = "out";

    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

/// Parses `key = value` lines. Blank lines, `#` comments and `[section]`
/// headers are skipped; unknown keys and malformed values throw
/// std::invalid_argument naming the line. Lengths such as coarse_dx accept
/// decimals or fractions like 1/5 and must be reciprocals of integers.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical key = value form; output_dir is left out.
std::string canonical_config(const ExperimentConfig& cfg);
/// FNV-1a 64-bit hash of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct ErrorMetrics {
    double state = 0.0;    ///< |y - y_exact| in L2 space-time
    double control = 0.0;  ///< |u - u_exact|
};

/// Compares nodal trajectories on `fine` with the exact solution sampled at the nodes.
ErrorMetrics error_metrics(const Trajectory& state, const Trajectory& control,
                           const ManufacturedProblem& exact, const FemOperatorsP1& fine);

/// Exact state or control sampled at interior nodes and time points.
Trajectory sample(const SpaceTimeFunction& f, const SpatialGrid& grid, const TimeGrid& time);

struct StageTiming {
    std::string stage;
    double seconds;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string hash;
    TimeGrid grid;
    std::vector<AdaptStep> adapt_history;
    PodBasis basis;
    OcpSolution reduced;
    Trajectory lifted_state;
    Trajectory lifted_control;
    Trajectory exact_state;
    ErrorMetrics errors;
    std::size_t snapshot_pde_solves = 0;
    std::vector<StageTiming> timings;
};

/// Adapted (or uniform) time grid, snapshots, POD basis, reduced control
/// problem and errors. Failures are rethrown as StageError tagged with the stage.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Adaptive time grid for the manufactured problem of `cfg` at `coarse_cells`.
AdaptResult adaptive_grid(const ExperimentConfig& cfg, int coarse_cells, std::size_t dof);

struct ComparisonTables {
    std::vector<ExperimentReport> equidistant;  ///< n = 20, 46, 82, 108
    std::vector<ExperimentReport> adaptive;     ///< dof = 21, 47, 83, 109
};

inline constexpr std::array<int, 4> kEquidistantSizes = {20, 46, 82, 108};
inline constexpr std::array<std::size_t, 4> kAdaptiveSizes = {21, 47, 83, 109};

/// Runs the eight experiments concurrently; results keep the order above.
ComparisonTables compare_grids(const ExperimentConfig& base);

void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_timings_csv(std::ostream& out, const ExperimentReport& report);
/// Columns: dt, n, error_y, error_u.
void write_table1_csv(std::ostream& out, const std::vector<ExperimentReport>& rows);
/// Columns: dof, error_y, error_u, min_dt, max_dt.
void write_table2_csv(std::ostream& out, const std::vector<ExperimentReport>& rows);

/// Writes report.csv, grid.csv, spectrum.csv, convergence.csv, state_pod.csv,
/// state_exact.csv and timings.csv into cfg.output_dir.
void write_run_outputs(const ExperimentReport& report);
/// Writes table1.csv, table2.csv and timings.csv into base.output_dir.
void write_compare_outputs(const ExperimentConfig& base, const ComparisonTables& tables);

}  // namespace snaploc
