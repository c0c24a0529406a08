#include "snaploc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "snaploc/errors.hpp"
#include "snaploc/io.hpp"
#include "snaploc/parabolic.hpp"

namespace snaploc {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters in '" + text + "'");
    return v;
}

long parse_integer(const std::string& text) {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument("not an integer: '" + text + "'");
    return v;
}

/// "0.2" or "1/5" to the cell count 5.
int parse_cells(const std::string& text) {
    double length = 0.0;
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        length = parse_double(trim(text.substr(0, slash))) / parse_double(trim(text.substr(slash + 1)));
    } else {
        length = parse_double(text);
    }
    if (!(length > 0.0 && length <= 1.0)) throw std::invalid_argument("mesh size must lie in (0, 1]");
    const long cells = std::lround(1.0 / length);
    if (std::abs(1.0 / static_cast<double>(cells) - length) > 1e-12) {
        throw std::invalid_argument("mesh size must be 1/N for an integer N");
    }
    return static_cast<int>(cells);
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw std::invalid_argument("not a boolean: '" + text + "'");
}

const char* to_string(GridMode m) { return m == GridMode::Adaptive ? "adaptive" : "equidistant"; }
const char* to_string(SnapshotSource s) {
    return s == SnapshotSource::Uncontrolled ? "uncontrolled" : "coarse-optimal";
}
const char* to_string(AdjointScheme s) {
    return s == AdjointScheme::OptimizeThenDiscretize ? "optimize-then-discretize"
                                                       : "discretize-then-optimize";
}

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "coarse_dx") cfg.coarse_cells = parse_cells(value);
    else if (key == "fine_h") cfg.fine_cells = parse_cells(value);
    else if (key == "dof") cfg.dof = static_cast<std::size_t>(parse_integer(value));
    else if (key == "grid_mode") {
        if (value == "adaptive") cfg.grid_mode = GridMode::Adaptive;
        else if (value == "equidistant") cfg.grid_mode = GridMode::Equidistant;
        else throw std::invalid_argument("grid_mode must be adaptive or equidistant");
    } else if (key == "equidistant_n") cfg.equidistant_n = static_cast<int>(parse_integer(value));
    else if (key == "snapshot_source") {
        if (value == "uncontrolled") cfg.snapshot_source = SnapshotSource::Uncontrolled;
        else if (value == "coarse-optimal") cfg.snapshot_source = SnapshotSource::CoarseOptimal;
        else throw std::invalid_argument("snapshot_source must be uncontrolled or coarse-optimal");
    } else if (key == "ell") cfg.ell = static_cast<int>(parse_integer(value));
    else if (key == "alpha") cfg.alpha = parse_double(value);
    else if (key == "nu") cfg.nu = parse_double(value);
    else if (key == "T") cfg.final_time = parse_double(value);
    else if (key == "epsilon") cfg.epsilon = parse_double(value);
    else if (key == "tolerance") cfg.tolerance = parse_double(value);
    else if (key == "max_iterations") cfg.max_iterations = static_cast<int>(parse_integer(value));
    else if (key == "theta") cfg.theta = parse_double(value);
    else if (key == "initial_intervals") cfg.initial_intervals = static_cast<int>(parse_integer(value));
    else if (key == "include_forcing") cfg.include_forcing = parse_bool(value);
    else if (key == "adjoint_scheme") {
        if (value == "optimize-then-discretize") cfg.adjoint_scheme = AdjointScheme::OptimizeThenDiscretize;
        else if (value == "discretize-then-optimize") cfg.adjoint_scheme = AdjointScheme::DiscretizeThenOptimize;
        else throw std::invalid_argument("adjoint_scheme must be optimize-then-discretize or discretize-then-optimize");
    } else if (key == "output_dir") cfg.output_dir = value;
    else throw std::invalid_argument("unknown key '" + key + "'");
}

class Stopwatch {
public:
    explicit Stopwatch(std::vector<StageTiming>& sink) : sink_(sink) {}
    template <typename F>
    auto stage(const std::string& name, F&& body) {
        const auto start = std::chrono::steady_clock::now();
        auto record = [&] {
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            sink_.push_back({name, elapsed.count()});
        };
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                record();
            } else {
                auto result = body();
                record();
                return result;
            }
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    }

private:
    std::vector<StageTiming>& sink_;
};

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (coarse_cells < 2 || fine_cells < 2) throw std::invalid_argument("config: need at least 2 cells");
    if (fine_cells % coarse_cells != 0) {
        throw std::invalid_argument("config: fine grid must be nested in the coarse grid");
    }
    if (ell < 1) throw std::invalid_argument("config: ell must be >= 1");
    if (!(alpha > 0.0) || !(nu > 0.0) || !(final_time > 0.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("config: alpha, nu, T and epsilon must be positive");
    }
    if (!(tolerance > 0.0) || max_iterations < 0) throw std::invalid_argument("config: bad solver limits");
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("config: theta must lie in (0, 1]");
    if (initial_intervals < 1 || equidistant_n < 1) throw std::invalid_argument("config: bad interval count");
    if (grid_mode == GridMode::Adaptive && dof < static_cast<std::size_t>(initial_intervals) + 1) {
        throw std::invalid_argument("config: dof below the initial grid size");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty() || (line.front() == '[' && line.back() == ']')) continue;
        const auto eq = line.find('=');
        try {
            if (eq == std::string::npos) throw std::invalid_argument("expected key = value");
            apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    return parse_config(in);
}

std::string canonical_config(const ExperimentConfig& cfg) {
    std::ostringstream s;
    s << "coarse_dx = 1/" << cfg.coarse_cells << '\n'
      << "fine_h = 1/" << cfg.fine_cells << '\n'
      << "dof = " << cfg.dof << '\n'
      << "grid_mode = " << to_string(cfg.grid_mode) << '\n'
      << "equidistant_n = " << cfg.equidistant_n << '\n'
      << "snapshot_source = " << to_string(cfg.snapshot_source) << '\n'
      << "ell = " << cfg.ell << '\n'
      << "alpha = " << format_number(cfg.alpha) << '\n'
      << "nu = " << format_number(cfg.nu) << '\n'
      << "T = " << format_number(cfg.final_time) << '\n'
      << "epsilon = " << format_number(cfg.epsilon) << '\n'
      << "tolerance = " << format_number(cfg.tolerance) << '\n'
      << "max_iterations = " << cfg.max_iterations << '\n'
      << "theta = " << format_number(cfg.theta) << '\n'
      << "initial_intervals = " << cfg.initial_intervals << '\n'
      << "include_forcing = " << (cfg.include_forcing ? "true" : "false") << '\n'
      << "adjoint_scheme = " << to_string(cfg.adjoint_scheme) << '\n';
    return s.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : canonical_config(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Trajectory sample(const SpaceTimeFunction& f, const SpatialGrid& grid, const TimeGrid& time) {
    Eigen::MatrixXd values(grid.interior_nodes(), static_cast<Eigen::Index>(time.dof()));
    for (std::size_t j = 0; j < time.dof(); ++j) {
        for (int i = 1; i < grid.n_cells(); ++i) {
            values(i - 1, static_cast<Eigen::Index>(j)) = f(grid.node(i), time[j]);
        }
    }
    return Trajectory(time, std::move(values));
}

ErrorMetrics error_metrics(const Trajectory& state, const Trajectory& control,
                           const ManufacturedProblem& exact, const FemOperatorsP1& fine) {
    const Trajectory ye = sample([&](double x, double t) { return exact.state(x, t); }, fine.grid,
                                 state.time_grid);
    const Trajectory ue = sample([&](double x, double t) { return exact.control(x, t); }, fine.grid,
                                 control.time_grid);
    return ErrorMetrics{
        spacetime_l2_norm(Trajectory(state.time_grid, state.values - ye.values), fine.mass),
        spacetime_l2_norm(Trajectory(control.time_grid, control.values - ue.values), fine.mass)};
}

AdaptResult adaptive_grid(const ExperimentConfig& cfg, int coarse_cells, std::size_t dof) {
    const ManufacturedProblem problem(cfg.epsilon, cfg.alpha, cfg.nu);
    const SpaceTimeParameters params{cfg.alpha, cfg.nu, cfg.include_forcing};
    const AdaptOptions options{dof, cfg.theta, cfg.initial_intervals, cfg.final_time};
    return adapt(SpatialGrid(coarse_cells), problem.spacetime_data(), params, options);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const ManufacturedProblem problem(cfg.epsilon, cfg.alpha, cfg.nu);
    std::vector<StageTiming> timings;
    Stopwatch watch(timings);

    const SpatialGrid coarse(cfg.coarse_cells);
    const SpatialGrid fine_grid(cfg.fine_cells);

    // Time grid, plus the coarse space-time state when the snapshots need it.
    std::optional<AdaptResult> adapted;
    TimeGrid grid = uniform_time_grid(cfg.final_time, cfg.equidistant_n);
    watch.stage("time_grid", [&] {
        if (cfg.grid_mode == GridMode::Adaptive) {
            adapted = adaptive_grid(cfg, cfg.coarse_cells, cfg.dof);
            grid = adapted->grid;
        }
    });

    const FemOperatorsP1 fine = assemble_p1(fine_grid);
    const Trajectory forcing = sample([&](double x, double t) { return problem.forcing(x, t); }, fine_grid, grid);
    const Trajectory desired = sample([&](double x, double t) { return problem.desired(x, t); }, fine_grid, grid);
    const Eigen::VectorXd y0 = interpolate_p1([&](double x) { return problem.initial(x); }, fine_grid);

    std::size_t snapshot_solves = 0;
    const Trajectory snapshots = watch.stage("snapshots", [&] {
        Trajectory control = Trajectory::zero(grid, fine.size());
        if (cfg.snapshot_source == SnapshotSource::CoarseOptimal) {
            const Trajectory hermite =
                adapted ? adapted->solution
                        : solve_spacetime(assemble_spacetime(
                              coarse, grid, problem.spacetime_data(),
                              SpaceTimeParameters{cfg.alpha, cfg.nu, cfg.include_forcing}));
            const FemOperatorsHermite hermite_ops = assemble_hermite(coarse);
            const FemOperatorsP1 coarse_ops = assemble_p1(coarse);
            Eigen::MatrixXd values(coarse_ops.size(), static_cast<Eigen::Index>(grid.dof()));
            for (int i = 1; i < coarse.n_cells(); ++i) {
                values.row(i - 1) = hermite.values.row(hermite_ops.constrained_index(i, false));
            }
            const Trajectory coarse_desired =
                sample([&](double x, double t) { return problem.desired(x, t); }, coarse, grid);
            const Trajectory p = solve_adjoint(coarse_ops, grid, cfg.nu, Trajectory(grid, values), coarse_desired);
            for (std::size_t j = 0; j < grid.dof(); ++j) {
                control.at(j) = prolongate(-p.at(j) / cfg.alpha, coarse, fine_grid);
            }
            ++snapshot_solves;
        }
        ++snapshot_solves;
        return solve_heat(fine, grid, cfg.nu, forcing, control, y0);
    });

    const Eigen::VectorXd weights = trapezoidal_weights(grid);
    PodBasis basis = watch.stage("pod", [&] { return compute_pod(snapshots.values, weights, fine.mass, cfg.ell); });

    ReducedOcpSolution solution = watch.stage("reduced_ocp", [&] {
        const ReducedOperators reduced = reduce_operators(fine, basis.modes, y0, forcing.values, desired.values);
        const LqSolver solver(reduced_order_model(reduced, fine, cfg.nu, cfg.alpha, grid, desired));
        return solve_reduced_ocp(solver, basis.modes,
                                 GradientOptions{cfg.tolerance, cfg.max_iterations, cfg.adjoint_scheme});
    });

    Trajectory exact_state = sample([&](double x, double t) { return problem.state(x, t); }, fine_grid, grid);
    const ErrorMetrics errors = watch.stage("errors", [&] {
        return error_metrics(solution.lifted_state, solution.lifted_control, problem, fine);
    });

    ExperimentReport report{cfg,
                            config_hash(cfg),
                            grid,
                            adapted ? adapted->history : std::vector<AdaptStep>{},
                            std::move(basis),
                            std::move(solution.reduced),
                            std::move(solution.lifted_state),
                            std::move(solution.lifted_control),
                            std::move(exact_state),
                            errors,
                            snapshot_solves,
                            std::move(timings)};
    return report;
}

ComparisonTables compare_grids(const ExperimentConfig& base) {
    std::vector<ExperimentConfig> configs;
    for (int n : kEquidistantSizes) {
        ExperimentConfig c = base;
        c.grid_mode = GridMode::Equidistant;
        c.equidistant_n = n;
        configs.push_back(c);
    }
    for (std::size_t dof : kAdaptiveSizes) {
        ExperimentConfig c = base;
        c.grid_mode = GridMode::Adaptive;
        c.dof = dof;
        configs.push_back(c);
    }
    std::vector<std::future<ExperimentReport>> jobs;
    for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, run_experiment, c));
    ComparisonTables tables;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        (k < kEquidistantSizes.size() ? tables.equidistant : tables.adaptive).push_back(jobs[k].get());
    }
    return tables;
}

void write_report_csv(std::ostream& out, const ExperimentReport& r) {
    const auto& lambda = r.basis.eigenvalues;
    const double decay = lambda.size() > 1 && lambda[0] > 0.0 ? lambda[1] / lambda[0] : 0.0;
    std::vector<std::pair<std::string, std::string>> rows = {
        {"config_hash", r.hash},
        {"grid_mode", to_string(r.config.grid_mode)},
        {"snapshot_source", to_string(r.config.snapshot_source)},
        {"adjoint_scheme", to_string(r.config.adjoint_scheme)},
        {"time_points", std::to_string(r.grid.dof())},
        {"min_dt", format_number(r.grid.min_step())},
        {"max_dt", format_number(r.grid.max_step())},
        {"error_y", format_number(r.errors.state)},
        {"error_u", format_number(r.errors.control)},
        {"pod_rank", std::to_string(r.basis.rank())},
        {"pod_numerical_rank", std::to_string(r.basis.numerical_rank)},
        {"pod_rank_capped", r.basis.capped ? "true" : "false"},
        {"energy_ratio", format_number(r.basis.energy_ratio())},
        {"lambda2_over_lambda1", format_number(decay)},
        {"iterations", std::to_string(r.reduced.iterations)},
        {"converged", r.reduced.converged ? "true" : "false"},
        {"reduced_cost", format_number(r.reduced.cost)},
        {"gradient_norm", format_number(r.reduced.gradient_norm)},
        {"snapshot_pde_solves", std::to_string(r.snapshot_pde_solves)},
        {"reduced_ode_solves", std::to_string(r.reduced.pde_solves)},
    };
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
}

void write_timings_csv(std::ostream& out, const ExperimentReport& report) {
    out << "config_hash,stage,seconds\n";
    for (const auto& t : report.timings) {
        out << report.hash << ',' << t.stage << ',' << format_number(t.seconds) << '\n';
    }
}

void write_table1_csv(std::ostream& out, const std::vector<ExperimentReport>& rows) {
    out << "dt,n,error_y,error_u\n";
    for (const auto& r : rows) {
        out << format_number(r.grid.max_step()) << ',' << r.grid.intervals() << ','
            << format_number(r.errors.state) << ',' << format_number(r.errors.control) << '\n';
    }
}

void write_table2_csv(std::ostream& out, const std::vector<ExperimentReport>& rows) {
    out << "dof,error_y,error_u,min_dt,max_dt\n";
    for (const auto& r : rows) {
        out << r.grid.dof() << ',' << format_number(r.errors.state) << ','
            << format_number(r.errors.control) << ',' << format_number(r.grid.min_step()) << ','
            << format_number(r.grid.max_step()) << '\n';
    }
}

void write_run_outputs(const ExperimentReport& report) {
    const auto& dir = report.config.output_dir;
    std::filesystem::create_directories(dir);
    const SpatialGrid fine(report.config.fine_cells);
    {
        auto out = open_output(dir / "report.csv");
        write_report_csv(out, report);
    }
    {
        auto out = open_output(dir / "grid.csv");
        write_time_grid_csv(out, report.grid);
    }
    {
        auto out = open_output(dir / "spectrum.csv");
        write_spectrum_csv(out, report.basis);
    }
    {
        auto out = open_output(dir / "convergence.csv");
        write_convergence_csv(out, report.reduced.history);
    }
    {
        auto out = open_output(dir / "state_pod.csv");
        write_trajectory_csv(out, report.lifted_state, fine);
    }
    {
        auto out = open_output(dir / "state_exact.csv");
        write_trajectory_csv(out, report.exact_state, fine);
    }
    {
        auto out = open_output(dir / "timings.csv");
        write_timings_csv(out, report);
    }
}

void write_compare_outputs(const ExperimentConfig& base, const ComparisonTables& tables) {
    const auto& dir = base.output_dir;
    std::filesystem::create_directories(dir);
    {
        auto out = open_output(dir / "table1.csv");
        write_table1_csv(out, tables.equidistant);
    }
    {
        auto out = open_output(dir / "table2.csv");
        write_table2_csv(out, tables.adaptive);
    }
    auto out = open_output(dir / "timings.csv");
    out << "config_hash,stage,seconds\n";
    for (const auto* group : {&tables.equidistant, &tables.adaptive}) {
        for (const auto& r : *group) {
            for (const auto& t : r.timings) {
                out << r.hash << ',' << t.stage << ',' << format_number(t.seconds) << '\n';
            }
        }
    }
}

}  // namespace snaploc
