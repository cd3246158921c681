#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracbif/bifurcation.hpp"
#include "fracbif/config.hpp"
#include "fracbif/diagnostics.hpp"
#include "fracbif/output.hpp"

namespace fs = std::filesystem;
using namespace fracbif;

namespace {

enum Exit { ok = 0, config_error = 1, solver_failure = 2, no_solution = 3, verify_failure = 4 };

struct Flags {
    std::string config;
    std::optional<double> lambda;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    std::optional<int> steps;
    std::string bracket;
    std::optional<double> width;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool corrupt_kernel = false;
    bool dump_kernel = false;
};

RunConfig resolve(const Flags& f) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (f.lambda) cfg.raw.lambda = *f.lambda;
    if (f.lambda_min) cfg.lambda_min = *f.lambda_min;
    if (f.lambda_max) cfg.lambda_max = *f.lambda_max;
    if (f.steps) cfg.steps = *f.steps;
    if (f.width) {
        if (!(*f.width > 0.0)) throw ConfigError("--width must be positive");
        cfg.width = *f.width;
    }
    if (f.out) cfg.out_dir = *f.out;
    if (f.seed) cfg.solver.seed = *f.seed;
    if (!f.bracket.empty()) {
        const auto comma = f.bracket.find(',');
        if (comma == std::string::npos) throw ConfigError("--bracket expects LO,HI");
        set_config_value(cfg, "bracket.lo", f.bracket.substr(0, comma));
        set_config_value(cfg, "bracket.hi", f.bracket.substr(comma + 1));
    }
    if (f.threads) {
        cfg.threads = *f.threads;
    } else if (const char* env = std::getenv("FRACBIF_THREADS")) {
        set_config_value(cfg, "threads", env);
    }
    cfg.dump_kernel = f.dump_kernel;
    return cfg;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    const auto path = fs::path(cfg.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const nlohmann::ordered_json& j) {
    auto out = open_out(cfg, name);
    out << j.dump(2) << '\n';
}

KernelMatrix setup_kernel(const RunConfig& cfg, const ProblemParams& params) {
    set_num_threads(cfg.threads);
    auto kern = assemble_kernel(build_mesh(cfg.a, cfg.b, cfg.n), params);
    if (cfg.dump_kernel) {
        auto out = open_out(cfg, "kernel.csv");
        write_kernel_csv(kern, out);
    }
    return kern;
}

PipelineOptions pipeline(const RunConfig& cfg) {
    PipelineOptions opts;
    opts.solver = cfg.solver;
    opts.width = cfg.width;
    return opts;
}

int cmd_eigen(const RunConfig& cfg) {
    const auto params = config_params(cfg);
    const auto kern = setup_kernel(cfg, params);
    const auto eig = principal_eigenpair(kern, params.p, cfg.solver);
    std::printf("principal eigenvalue %.12g (residual %.3g, %d iterations)\n", eig.value, eig.residual,
                eig.iterations);
    auto csv = open_out(cfg, "eigenfunction.csv");
    write_eigen_csv(eig, cfg, csv);
    auto rec = run_record(cfg, "eigen");
    rec["eigenvalue"] = eig.value;
    rec["residual"] = eig.residual;
    rec["iterations"] = eig.iterations;
    rec["converged"] = eig.converged;
    write_json(cfg, "eigen.json", rec);
    return eig.converged ? ok : solver_failure;
}

int cmd_solve(const RunConfig& cfg) {
    const auto params = config_params(cfg, LambdaPolicy::require_positive);
    const auto kern = setup_kernel(cfg, params);
    const auto pt = solve_at_lambda(kern, params, std::nullopt, pipeline(cfg));

    auto csv = open_out(cfg, "solution.csv");
    write_solution_csv(pt, params.s, cfg, csv);
    auto rec = run_record(cfg, "solve");
    rec["point"] = to_json(pt);
    if (pt.u_big) {
        const auto diag = diagnose(kern, params, pt.u_big->solution, pt.v_saddle ? &pt.v_saddle->solution : nullptr);
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (const auto& c : diag.bound_checks) {
            checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.worst}, {"detail", c.detail}});
        }
        rec["diagnostics_u"] = {{"hopf_ratio", diag.hopf_ratio},
                                {"cs_norm", diag.cs_norm},
                                {"weighted_holder", diag.weighted_holder},
                                {"checks", checks}};
        rec["outcome"] = pt.v_saddle ? "two ordered solutions" : "one nontrivial solution";
    } else {
        rec["outcome"] = pt.unresolved_starts > 0 ? "unresolved" : "no nontrivial solution";
    }
    write_json(cfg, "solve.json", rec);

    for (const auto& n : pt.notes) std::printf("note: %s\n", n.c_str());
    if (!pt.nontrivial()) {
        if (pt.unresolved_starts > 0) {
            std::printf("lambda %.10g: no start converged\n", params.lambda);
            return solver_failure;
        }
        std::printf("lambda %.10g: no nontrivial solution\n", params.lambda);
        return no_solution;
    }
    const auto& d = pt.diagnostics;
    std::printf("lambda %.10g: sup u %.10g (energy %.10g)", params.lambda, d.sup_u, d.energy_u);
    if (pt.v_saddle) std::printf(", sup v %.10g (energy %.10g), margin %.6g", d.sup_v, d.energy_v, d.margin);
    std::printf("\n");
    return pt.converged() && pt.v_saddle ? ok : solver_failure;
}

int cmd_bifurcation(const RunConfig& cfg) {
    if (!cfg.lambda_min) throw ConfigError("missing config key 'lambda.min'");
    if (!cfg.lambda_max) throw ConfigError("missing config key 'lambda.max'");
    const auto grid = descending_grid(*cfg.lambda_min, *cfg.lambda_max, cfg.steps);
    const auto params = config_params(cfg);
    const auto kern = setup_kernel(cfg, params);
    const auto opts = pipeline(cfg);

    auto diag = continue_branch(kern, params, grid, opts);
    const double lo = cfg.bracket_lo.value_or(*cfg.lambda_min);
    const double hi = cfg.bracket_hi.value_or(*cfg.lambda_max);
    diag.lambda_star = estimate_lambda_star(kern, params, lo, hi, opts, &diag);
    const auto& est = *diag.lambda_star;
    diag.method_record += "; bisection on the multi-start predicate to width " + std::to_string(cfg.width);

    auto csv = open_out(cfg, "branch.csv");
    write_branch_csv(diag, cfg, csv);
    auto svg = open_out(cfg, "branch.svg");
    write_branch_svg(diag, svg);
    auto rec = run_record(cfg, "bifurcation");
    rec["lambda_star"] = to_json(est);
    rec["method"] = diag.method_record;
    rec["warnings"] = diag.warnings;
    rec["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : diag.points) rec["points"].push_back(to_json(pt));
    write_json(cfg, "bifurcation.json", rec);

    std::printf("lambda* in [%.10g, %.10g] (estimate %.10g), continuation fold %.10g\n", est.lo, est.hi,
                est.estimate(), est.fold());
    for (const auto& w : est.warnings) std::printf("warning: %s\n", w.c_str());
    for (const auto& w : diag.warnings) std::printf("warning: %s\n", w.c_str());
    return ok;
}

int cmd_verify(const RunConfig& cfg, bool corrupt) {
    const auto params = config_params(cfg);
    set_num_threads(cfg.threads);
    const auto checks =
        verification_suite(build_mesh(cfg.a, cfg.b, cfg.n), params, cfg.trials, cfg.solver.seed, cfg.solver, corrupt);
    std::string failed;
    auto rec = run_record(cfg, "verify");
    rec["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        std::printf("%s %-20s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        rec["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"worst", c.worst}, {"detail", c.detail}});
        if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    write_json(cfg, "verify.json", rec);
    if (!failed.empty()) {
        std::printf("failed: %s\n", failed.c_str());
        return verify_failure;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bifurcation solver for the sublinear fractional p-Laplacian on an interval"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "key=value configuration file");
    app.add_option("--lambda", f.lambda, "parameter lambda");
    app.add_option("--lambda-min", f.lambda_min, "smallest lambda of the continuation grid");
    app.add_option("--lambda-max", f.lambda_max, "largest lambda of the continuation grid");
    app.add_option("--steps", f.steps, "number of grid values")->check(CLI::PositiveNumber);
    app.add_option("--bracket", f.bracket, "initial lambda* bracket LO,HI");
    app.add_option("--width", f.width, "target width of the lambda* bracket");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--seed", f.seed, "random seed");
    app.add_option("--threads", f.threads, "worker threads (default: FRACBIF_THREADS or 1)")->check(CLI::PositiveNumber);
    app.add_flag("--dump-kernel", f.dump_kernel, "write kernel.csv");
    app.add_flag("--corrupt-kernel", f.corrupt_kernel)->group("");

    auto* eigen = app.add_subcommand("eigen", "principal eigenpair");
    auto* solve = app.add_subcommand("solve", "both solutions at one lambda");
    auto* bif = app.add_subcommand("bifurcation", "continuation, lambda* bracket, branch.csv and SVG");
    auto* verify = app.add_subcommand("verify", "operator and bound property suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        const auto cfg = resolve(f);
        if (eigen->parsed()) return cmd_eigen(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (bif->parsed()) return cmd_bifurcation(cfg);
        if (verify->parsed()) return cmd_verify(cfg, f.corrupt_kernel);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return solver_failure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return solver_failure;
    }
    return ok;
}
