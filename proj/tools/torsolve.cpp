// Batch front end: solve, sweep, convergence and reference commands over an INI run file.

#include "torsolve/config.hpp"
#include "torsolve/csv.hpp"
#include "torsolve/error.hpp"
#include "torsolve/plasticity.hpp"
#include "torsolve/postprocess.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace torsolve;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kSolver = 3, kPartial = 4 };

/// Removes every file it created unless commit() is reached.
class OutputGuard {
public:
    explicit OutputGuard(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }
    OutputGuard(const OutputGuard&) = delete;
    OutputGuard& operator=(const OutputGuard&) = delete;
    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (const fs::path& p : created_) fs::remove(p, ec);
    }

    std::string file(const fs::path& relative) {
        const fs::path p = dir_ / relative;
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        created_.push_back(p);
        return p.string();
    }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> created_;
    bool committed_ = false;
};

TorsionModel build_model(const RunConfig& cfg) {
    return TorsionModel(cfg.shape, cfg.material, cfg.discretization);
}

void report_warnings(const TorsionModel& model) {
    for (const std::string& w : model.operators().warnings) std::cerr << "warning: " << w << '\n';
}

void check_moment(const PlasticState& s) {
    if (s.moment_mismatch) {
        std::cerr << "warning: boundary and area-quadrature torques differ by more than 1% at theta = " << s.theta
                  << " (" << s.moment << " vs " << s.moment_direct << ")\n";
    }
}

void write_fields(const std::string& path, const FieldTable& table) {
    CsvWriter csv(path, {"x", "y", "phi", "w", "gamma_xz", "gamma_yz", "tau_xz", "tau_yz", "sigma_eq", "eps_eq",
                         "E_eff", "plastic"});
    for (const FieldRow& r : table.rows) {
        csv.row({r.x, r.y, r.phi, r.w, r.gamma_xz, r.gamma_yz, r.tau_xz, r.tau_yz, r.sigma_eq, r.eps_eq, r.E_eff,
                 r.plastic ? 1.0 : 0.0});
    }
    csv.close();
}

std::vector<Vec2> extra_points(const RunConfig& cfg, const TorsionModel& model) {
    if (cfg.output.field_grid <= 0) return {};
    return generate_collocation(cfg.shape, cfg.output.field_grid, model.collocation().inset).points;
}

int cmd_solve(const RunConfig& cfg) {
    const TorsionModel model = build_model(cfg);
    report_warnings(model);
    const FirstYield& fy = model.first_yield();
    const double theta = cfg.schedule.theta ? *cfg.schedule.theta : cfg.schedule.theta_ratio * fy.theta;
    const PlasticState state = model.solve_continued(theta, cfg.solver, cfg.schedule.continuation_step);
    check_moment(state);
    const FieldTable table = derive_fields(state, model, extra_points(cfg, model));

    OutputGuard out(cfg.output.directory);
    write_fields(out.file("fields.csv"), table);
    CsvWriter summary(out.file("summary.csv"), {"theta", "theta_ratio", "Mt", "Mt_ratio", "plastic_fraction",
                                                "newton_iters", "residual_norm"});
    summary.row({theta, theta / fy.theta, state.moment, state.moment / fy.moment, state.plastic_fraction(),
                 static_cast<double>(state.iterations), state.residual_norm});
    summary.close();
    out.commit();

    std::cout << "theta_el " << format_number(fy.theta) << "  M_el " << format_number(fy.moment) << '\n'
              << "theta " << format_number(theta) << "  Mt " << format_number(state.moment) << "  Mt/M_el "
              << format_number(state.moment / fy.moment) << "  plastic fraction "
              << format_number(state.plastic_fraction()) << "  Newton iterations " << state.iterations << '\n';
    return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
    const TorsionModel model = build_model(cfg);
    report_warnings(model);
    const std::vector<double> ratios = cfg.schedule.ratios.empty()
                                           ? default_schedule(cfg.schedule.theta_max_ratio, cfg.schedule.steps)
                                           : cfg.schedule.ratios;
    const SweepResult result = model.sweep(ratios, cfg.solver);
    const std::vector<Vec2> extra = extra_points(cfg, model);

    OutputGuard out(cfg.output.directory);
    CsvWriter curve(out.file("curve.csv"), {"theta", "theta_ratio", "Mt", "Mt_ratio", "plastic_fraction"});
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        const SweepStep& s = result.steps[i];
        check_moment(s.state);
        curve.row({s.theta, s.theta_ratio, s.moment, s.moment_ratio, s.state.plastic_fraction()});
        const std::string name = "step_" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1) + "_ratio_" +
                                 format_number(s.theta_ratio) + ".csv";
        write_fields(out.file(fs::path("fields_at_steps") / name), derive_fields(s.state, model, extra));
        std::cerr << "theta/theta_el " << format_number(s.theta_ratio) << "  Mt/M_el "
                  << format_number(s.moment_ratio) << "  iterations " << s.state.iterations << '\n';
    }
    curve.close();
    out.commit();

    std::cout << "theta_el " << format_number(result.first_yield.theta) << "  M_el "
              << format_number(result.first_yield.moment) << "  steps " << result.steps.size() << '/'
              << ratios.size() << '\n';
    if (!result.complete) {
        std::cerr << "error: sweep stopped early: " << result.failure << '\n';
        return kPartial;
    }
    return kOk;
}

int cmd_convergence(const RunConfig& cfg) {
    if (cfg.convergence.grid.size() < 2) throw ConfigError("[convergence] grid needs at least two NxM cells");
    struct Row {
        int n;
        int m;
        double mt_ratio;
    };
    std::vector<Row> rows;
    bool failed = false;
    for (const auto& [n, m] : cfg.convergence.grid) {
        RunConfig cell = cfg;
        cell.discretization.boundary_elements = n;
        cell.discretization.collocation_target = m;
        Row row{n, m, std::numeric_limits<double>::quiet_NaN()};
        try {
            const TorsionModel model = build_model(cell);
            row.m = model.size();
            const double theta = cfg.convergence.theta_ratio * model.first_yield().theta;
            const PlasticState s = model.solve_continued(theta, cfg.solver, cfg.schedule.continuation_step);
            check_moment(s);
            row.mt_ratio = s.moment / model.first_yield().moment;
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            std::cerr << "error: cell N=" << n << " M=" << m << ": " << e.what() << '\n';
            failed = true;
        }
        std::cerr << "N " << n << "  M " << row.m << "  Mt/M_el " << format_number(row.mt_ratio) << '\n';
        rows.push_back(row);
    }
    OutputGuard out(cfg.output.directory);
    CsvWriter csv(out.file("convergence.csv"), {"N", "M", "theta_ratio", "Mt_ratio"});
    for (const Row& r : rows) {
        csv.row({static_cast<double>(r.n), static_cast<double>(r.m), cfg.convergence.theta_ratio, r.mt_ratio});
    }
    csv.close();
    out.commit();
    return failed ? kSolver : kOk;
}

int cmd_reference(const RunConfig& cfg) {
    const double sy = cfg.reference_yield_stress();
    const AnalyticReference ref = analytic_references(cfg.shape, sy);
    std::cout << "shape,sigma_y,M_el,M_pl\n"
              << cfg.shape.name() << ',' << format_number(sy) << ',' << format_number(ref.elastic) << ','
              << format_number(ref.plastic) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elastic-plastic Saint-Venant torsion of homogeneous and graded bars"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> theta_ratio;
    std::optional<std::string> out_dir;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--theta-ratio", theta_ratio,
                        "twist as a multiple of first-yield twist (solve target, sweep end, convergence level)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory (overrides [output] directory)");
    };
    CLI::App* solve = app.add_subcommand("solve", "converged state at one twist: fields.csv, summary.csv");
    CLI::App* sweep = app.add_subcommand("sweep", "moment-rotation curve: curve.csv, fields_at_steps/");
    CLI::App* conv = app.add_subcommand("convergence", "Mt/M_el over a grid of (N, M): convergence.csv");
    CLI::App* ref = app.add_subcommand("reference", "closed-form first-yield and fully plastic torques");
    for (CLI::App* sub : {solve, sweep, conv, ref}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (out_dir) cfg.output.directory = *out_dir;
        if (theta_ratio) {
            cfg.schedule.theta_ratio = *theta_ratio;
            cfg.schedule.theta.reset();
            cfg.schedule.theta_max_ratio = *theta_ratio;
            cfg.schedule.ratios.clear();
            cfg.convergence.theta_ratio = *theta_ratio;
        }
        if (*solve) return cmd_solve(cfg);
        if (*sweep) return cmd_sweep(cfg);
        if (*conv) return cmd_convergence(cfg);
        return cmd_reference(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << '\n';
        return kConfig;
    } catch (const ConvergenceError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const NumericalError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
