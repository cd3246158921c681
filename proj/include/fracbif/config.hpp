#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "fracbif/core.hpp"
#include "fracbif/solvers.hpp"

namespace fracbif {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a command needs: problem, mesh, solver and command options.
struct RunConfig {
    RawParams raw;
    double a = -1.0;
    double b = 1.0;
    std::size_t n = 200;
    SolverOptions solver;

    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    int steps = 8;
    std::optional<double> bracket_lo;
    std::optional<double> bracket_hi;
    double width = 0.05;
    int trials = 200;
    int threads = 1;
    std::string out_dir = ".";
    bool dump_kernel = false;
};

/// Sets one key. Throws ConfigError on unknown keys or malformed values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// key = value lines; '#' starts a comment. `origin` names the source in error messages.
RunConfig parse_config(std::istream& in, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

/// Problem parameters; λ defaults to 0 when absent unless `policy` requires it.
ProblemParams config_params(const RunConfig& cfg, LambdaPolicy policy = LambdaPolicy::allow_zero);

/// Sorted key=value listing of every setting that influences results.
std::string canonical_config(const RunConfig& cfg);

/// 64-bit FNV-1a of canonical_config(), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace fracbif
