#include "fracbif/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fracbif {

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string g4(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

}  // namespace

std::string csv_banner(const RunConfig& cfg) {
    return std::string("# fracbif ") + kVersion + " config=" + config_hash(cfg) +
           " seed=" + std::to_string(cfg.solver.seed);
}

void write_branch_csv(const BifurcationDiagram& diag, const RunConfig& cfg, std::ostream& out) {
    out << csv_banner(cfg) << '\n';
    out << "lambda,sup_u,sup_v,energy_u,energy_v,hopf_u,hopf_v,margin,iterations_u,iterations_v,converged\n";
    for (const auto& pt : diag.points) {
        const auto& d = pt.diagnostics;
        out << g17(pt.lambda) << ',' << g17(d.sup_u) << ',' << g17(d.sup_v) << ',' << g17(d.energy_u) << ','
            << g17(d.energy_v) << ',' << g17(d.hopf_u) << ',' << g17(d.hopf_v) << ',' << g17(d.margin) << ','
            << (pt.u_big ? pt.u_big->iterations : 0) << ',' << (pt.v_saddle ? pt.v_saddle->iterations : 0) << ','
            << (pt.converged() ? 1 : 0) << '\n';
    }
}

void write_solution_csv(const BranchPoint& pt, double s, const RunConfig& cfg, std::ostream& out) {
    out << csv_banner(cfg) << '\n';
    out << "x,u,v,u_over_ds,v_over_ds\n";
    if (!pt.u_big) return;
    const auto& u = pt.u_big->solution;
    const auto& mesh = *u.mesh();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ds = std::pow(mesh.dist()[i], s);
        out << g17(mesh.nodes()[i]) << ',' << g17(u[i]) << ',';
        if (pt.v_saddle) out << g17(pt.v_saddle->solution[i]);
        out << ',' << g17(u[i] / ds) << ',';
        if (pt.v_saddle) out << g17(pt.v_saddle->solution[i] / ds);
        out << '\n';
    }
}

void write_eigen_csv(const EigenResult& eig, const RunConfig& cfg, std::ostream& out) {
    out << csv_banner(cfg) << '\n';
    out << "x,phi\n";
    const auto& phi = eig.eigenfunction;
    for (std::size_t i = 0; i < phi.size(); ++i) out << g17(phi.mesh()->nodes()[i]) << ',' << g17(phi[i]) << '\n';
}

nlohmann::ordered_json to_json(const SolveReport& rep, bool with_solution) {
    nlohmann::ordered_json j;
    j["classification"] = to_string(rep.classification);
    j["converged"] = rep.converged;
    j["energy"] = rep.energy;
    j["residual"] = rep.residual;
    j["plain_residual"] = rep.plain_residual;
    j["iterations"] = rep.iterations;
    j["sup_norm"] = rep.solution.sup_norm();
    j["warnings"] = rep.warnings;
    if (with_solution) j["values"] = rep.solution.vec();
    return j;
}

nlohmann::ordered_json to_json(const BranchPoint& pt) {
    nlohmann::ordered_json j;
    j["lambda"] = pt.lambda;
    j["nontrivial"] = pt.nontrivial();
    j["converged"] = pt.converged();
    j["u_big"] = pt.u_big ? to_json(*pt.u_big, false) : nlohmann::ordered_json();
    j["v_saddle"] = pt.v_saddle ? to_json(*pt.v_saddle, false) : nlohmann::ordered_json();
    const auto& d = pt.diagnostics;
    j["diagnostics"] = {{"sup_u", d.sup_u},       {"sup_v", d.sup_v},   {"energy_u", d.energy_u},
                        {"energy_v", d.energy_v}, {"hopf_u", d.hopf_u}, {"hopf_v", d.hopf_v},
                        {"margin", d.margin},     {"weighted_margin", d.weighted_margin}};
    j["notes"] = pt.notes;
    return j;
}

nlohmann::ordered_json to_json(const LambdaStarEstimate& est) {
    nlohmann::ordered_json j;
    j["estimate"] = est.estimate();
    j["bracket"] = {est.lo, est.hi};
    j["width"] = est.width();
    j["bisection_steps"] = est.bisection_steps;
    j["fold_bracket"] = {est.fold_lo, est.fold_hi};
    j["fold"] = est.fold();
    j["relative_disagreement"] = est.disagreement();
    j["warnings"] = est.warnings;
    return j;
}

nlohmann::ordered_json run_record(const RunConfig& cfg, const std::string& command) {
    nlohmann::ordered_json j;
    j["program"] = "fracbif";
    j["version"] = kVersion;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.solver.seed;
    nlohmann::ordered_json params;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) params[key] = *v;
    };
    put("p", cfg.raw.p);
    put("s", cfg.raw.s);
    put("q", cfg.raw.q);
    put("r", cfg.raw.r);
    put("lambda", cfg.raw.lambda);
    j["parameters"] = params;
    j["mesh"] = {{"a", cfg.a}, {"b", cfg.b}, {"n", cfg.n}};
    j["solver"] = {{"tol", cfg.solver.tol},
                   {"max_iter", cfg.solver.max_iter},
                   {"starts", cfg.solver.starts},
                   {"path_points", cfg.solver.path_points},
                   {"damping", cfg.solver.damping}};
    return j;
}

void write_branch_svg(const BifurcationDiagram& diag, std::ostream& out) {
    constexpr double W = 640, H = 420, L = 70, R = 20, T = 30, B = 50;
    double lmin = 0.0, lmax = 1.0, ymax = 1e-12;
    if (!diag.points.empty()) {
        lmin = diag.points.front().lambda;
        lmax = diag.points.back().lambda;
    }
    if (diag.lambda_star) {
        lmin = std::min(lmin, diag.lambda_star->lo);
        lmax = std::max(lmax, diag.lambda_star->hi);
    }
    if (!(lmax > lmin)) lmax = lmin + 1.0;
    for (const auto& pt : diag.points) ymax = std::max({ymax, pt.diagnostics.sup_u, pt.diagnostics.sup_v});
    ymax *= 1.05;
    auto X = [&](double lam) { return L + (W - L - R) * (lam - lmin) / (lmax - lmin); };
    auto Y = [&](double y) { return H - B - (H - T - B) * y / ymax; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (diag.lambda_star) {
        const double x0 = X(diag.lambda_star->lo), x1 = X(diag.lambda_star->hi);
        out << "<rect class=\"lambda-star\" x=\"" << x0 << "\" y=\"" << T << "\" width=\"" << std::max(x1 - x0, 1.0)
            << "\" height=\"" << H - T - B << "\" fill=\"#f4c7c3\"/>\n";
        out << "<text x=\"" << x1 + 4 << "\" y=\"" << T + 14 << "\" font-size=\"12\">lambda* ~ "
            << g4(diag.lambda_star->estimate()) << "</text>\n";
    }
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double lam = lmin + (lmax - lmin) * k / 5.0;
        const double y = ymax * k / 5.0;
        out << "<line x1=\"" << X(lam) << "\" y1=\"" << H - B << "\" x2=\"" << X(lam) << "\" y2=\"" << H - B + 5
            << "\" stroke=\"black\"/><text x=\"" << X(lam) << "\" y=\"" << H - B + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">" << g4(lam) << "</text>\n";
        out << "<line x1=\"" << L - 5 << "\" y1=\"" << Y(y) << "\" x2=\"" << L << "\" y2=\"" << Y(y)
            << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << Y(y) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << g4(y) << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" font-size=\"13\" text-anchor=\"middle\">lambda</text>\n";
    out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\" text-anchor=\"middle\">sup-norm</text>\n";

    auto series = [&](const char* cls, const char* color, bool saddle) {
        std::string pts;
        for (const auto& pt : diag.points) {
            const auto& rep = saddle ? pt.v_saddle : pt.u_big;
            if (!rep) continue;
            const double y = saddle ? pt.diagnostics.sup_v : pt.diagnostics.sup_u;
            pts += g4(X(pt.lambda)) + "," + g4(Y(y)) + " ";
        }
        if (!pts.empty()) {
            pts.pop_back();
            out << "<polyline class=\"" << cls << "\" points=\"" << pts << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"2\"/>\n";
        }
    };
    series("branch-u", "#1f77b4", false);
    series("branch-v", "#d62728", true);
    for (const auto& pt : diag.points) {
        const double y = pt.nontrivial() ? pt.diagnostics.sup_u : 0.0;
        out << "<circle class=\"point\" data-lambda=\"" << g17(pt.lambda) << "\" cx=\"" << g4(X(pt.lambda))
            << "\" cy=\"" << g4(Y(y)) << "\" r=\"3\" fill=\"" << (pt.nontrivial() ? "#1f77b4" : "gray") << "\"/>\n";
        if (pt.v_saddle) {
            out << "<circle class=\"point-v\" data-lambda=\"" << g17(pt.lambda) << "\" cx=\"" << g4(X(pt.lambda))
                << "\" cy=\"" << g4(Y(pt.diagnostics.sup_v)) << "\" r=\"3\" fill=\"#d62728\"/>\n";
        }
    }
    out << "<text x=\"" << W - R - 150 << "\" y=\"" << T + 14 << "\" font-size=\"12\" fill=\"#1f77b4\">u (biggest)</text>\n";
    out << "<text x=\"" << W - R - 150 << "\" y=\"" << T + 30 << "\" font-size=\"12\" fill=\"#d62728\">v (mountain pass)</text>\n";
    out << "</svg>\n";
}

}  // namespace fracbif
