#include "fracbif/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fracbif {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& value) {
    long long out = 0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': not an integer: '" + value + "'");
    return out;
}

int positive_int(const std::string& key, const std::string& value) {
    const auto v = to_int(key, value);
    if (v < 1 || v > 100000000) throw ConfigError("config key '" + key + "': must be a positive integer");
    return static_cast<int>(v);
}

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto& o = cfg.solver;
    if (key == "p") cfg.raw.p = to_double(key, value);
    else if (key == "s") cfg.raw.s = to_double(key, value);
    else if (key == "q") cfg.raw.q = to_double(key, value);
    else if (key == "r") cfg.raw.r = to_double(key, value);
    else if (key == "lambda") cfg.raw.lambda = to_double(key, value);
    else if (key == "domain.a") cfg.a = to_double(key, value);
    else if (key == "domain.b") cfg.b = to_double(key, value);
    else if (key == "mesh.n") cfg.n = static_cast<std::size_t>(positive_int(key, value));
    else if (key == "tol") o.tol = to_double(key, value);
    else if (key == "max_iter") o.max_iter = positive_int(key, value);
    else if (key == "starts") o.starts = positive_int(key, value);
    else if (key == "path_points") o.path_points = positive_int(key, value);
    else if (key == "damping") o.damping = to_double(key, value);
    else if (key == "seed") o.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "lambda.min") cfg.lambda_min = to_double(key, value);
    else if (key == "lambda.max") cfg.lambda_max = to_double(key, value);
    else if (key == "lambda.steps") cfg.steps = positive_int(key, value);
    else if (key == "bracket.lo") cfg.bracket_lo = to_double(key, value);
    else if (key == "bracket.hi") cfg.bracket_hi = to_double(key, value);
    else if (key == "width") cfg.width = to_double(key, value);
    else if (key == "trials") cfg.trials = positive_int(key, value);
    else if (key == "threads") cfg.threads = positive_int(key, value);
    else if (key == "out") cfg.out_dir = value;
    else throw ConfigError("unknown config key '" + key + "'");

    if (!(o.tol > 0.0)) throw ConfigError("config key 'tol': must be positive");
    if (!(o.damping > 0.0 && o.damping <= 1.0)) throw ConfigError("config key 'damping': must be in (0, 1]");
    if (o.path_points < 5) throw ConfigError("config key 'path_points': need at least 5");
    if (!(cfg.width > 0.0)) throw ConfigError("config key 'width': must be positive");
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

ProblemParams config_params(const RunConfig& cfg, LambdaPolicy policy) {
    RawParams raw = cfg.raw;
    if (!raw.lambda && policy == LambdaPolicy::allow_zero) raw.lambda = 0.0;
    return validate_params(raw, policy);
}

std::string canonical_config(const RunConfig& cfg) {
    std::map<std::string, std::string> kv;
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) kv[key] = g17(*v);
    };
    opt("p", cfg.raw.p);
    opt("s", cfg.raw.s);
    opt("q", cfg.raw.q);
    opt("r", cfg.raw.r);
    opt("lambda", cfg.raw.lambda);
    kv["domain.a"] = g17(cfg.a);
    kv["domain.b"] = g17(cfg.b);
    kv["mesh.n"] = std::to_string(cfg.n);
    kv["tol"] = g17(cfg.solver.tol);
    kv["max_iter"] = std::to_string(cfg.solver.max_iter);
    kv["starts"] = std::to_string(cfg.solver.starts);
    kv["path_points"] = std::to_string(cfg.solver.path_points);
    kv["damping"] = g17(cfg.solver.damping);
    kv["seed"] = std::to_string(cfg.solver.seed);
    opt("lambda.min", cfg.lambda_min);
    opt("lambda.max", cfg.lambda_max);
    kv["lambda.steps"] = std::to_string(cfg.steps);
    opt("bracket.lo", cfg.bracket_lo);
    opt("bracket.hi", cfg.bracket_hi);
    kv["width"] = g17(cfg.width);
    kv["trials"] = std::to_string(cfg.trials);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_config(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fracbif
