#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "snaploc/errors.hpp"
#include "snaploc/io.hpp"
#include "snaploc/pipeline.hpp"
#include "snaploc/selfcheck.hpp"

namespace {

int run(const std::string& config_path) {
    const auto cfg = snaploc::load_config(config_path);
    const auto report = snaploc::run_experiment(cfg);
    snaploc::write_run_outputs(report);
    std::printf("config %s: %zu time points, error_y %.4e, error_u %.4e, %d iterations%s\n",
                report.hash.c_str(), report.grid.dof(), report.errors.state, report.errors.control,
                report.reduced.iterations, report.reduced.converged ? "" : " (not converged)");
    std::printf("outputs in %s\n", cfg.output_dir.string().c_str());
    return report.reduced.converged ? 0 : 3;
}

int compare(const std::string& config_path) {
    const auto cfg = snaploc::load_config(config_path);
    const auto tables = snaploc::compare_grids(cfg);
    snaploc::write_compare_outputs(cfg, tables);
    std::printf("%-6s %-12s %-12s | %-5s %-12s %-12s\n", "n", "error_y", "error_u", "dof", "error_y",
                "error_u");
    for (std::size_t k = 0; k < tables.equidistant.size(); ++k) {
        const auto& e = tables.equidistant[k];
        const auto& a = tables.adaptive[k];
        std::printf("%-6zu %-12.4e %-12.4e | %-5zu %-12.4e %-12.4e\n", e.grid.intervals(), e.errors.state,
                    e.errors.control, a.grid.dof(), a.errors.state, a.errors.control);
    }
    std::printf("tables in %s\n", cfg.output_dir.string().c_str());
    return 0;
}

int grid_dump(const std::string& dx, std::size_t dof, double epsilon, const std::string& out_path,
              const std::string& estimator_path) {
    std::istringstream text("coarse_dx = " + dx + "\nepsilon = " + snaploc::format_number(epsilon) +
                            "\nfine_h = " + dx + "\n");
    const auto cfg = snaploc::parse_config(text);
    const auto result = snaploc::adaptive_grid(cfg, cfg.coarse_cells, dof);
    if (out_path.empty()) {
        snaploc::write_time_grid_csv(std::cout, result.grid);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        snaploc::write_time_grid_csv(out, result.grid);
    }
    if (!estimator_path.empty()) {
        std::ofstream out(estimator_path);
        if (!out) throw std::runtime_error("cannot write " + estimator_path);
        snaploc::write_estimator_csv(out, result.report);
    }
    return 0;
}

int check() {
    bool all = true;
    for (const auto& r : snaploc::run_selfcheck()) {
        std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"POD reduced optimal control of the heat equation on adaptive time grids"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "one experiment: grid, snapshots, POD, reduced control");
    run_cmd->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);

    auto* compare_cmd = app.add_subcommand("compare", "equidistant vs adaptive error tables");
    compare_cmd->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);

    std::string dx;
    std::size_t dof = 21;
    double epsilon = 1e-3;
    std::string out_path;
    std::string estimator_path;
    auto* dump_cmd = app.add_subcommand("grid-dump", "adaptive time grid only");
    dump_cmd->add_option("--dx", dx, "spatial mesh size, e.g. 0.2 or 1/5")->required();
    dump_cmd->add_option("--dof", dof, "number of time points")->required();
    dump_cmd->add_option("--epsilon", epsilon, "layer width")->capture_default_str();
    dump_cmd->add_option("--out", out_path, "grid CSV path (default stdout)");
    dump_cmd->add_option("--estimator", estimator_path, "also write the final indicators as CSV");

    auto* check_cmd = app.add_subcommand("check", "built-in property checks");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return run(config_path);
        if (*compare_cmd) return compare(config_path);
        if (*dump_cmd) return grid_dump(dx, dof, epsilon, out_path, estimator_path);
        if (*check_cmd) return check();
    } catch (const snaploc::StageError& e) {
        std::fprintf(stderr, "error in stage %s: %s\n", e.stage().c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
