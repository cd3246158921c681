#include "fracbif/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracbif/diagnostics.hpp"
#include "fracbif/reaction.hpp"

namespace fracbif {

namespace {

bool alive(const SolveReport& rep, const SolverOptions& opts) {
    return rep.converged && rep.solution.sup_norm() > opts.zero_threshold;
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void require_positive_lambda(const ProblemParams& params, const char* where) {
    if (!(params.lambda > 0.0)) throw ConfigError(std::string(where) + ": need lambda > 0");
}

BranchPoint complete_point(const KernelMatrix& kern, const ProblemParams& params, std::vector<SolveReport> known,
                           std::vector<std::string> notes, const PipelineOptions& opts) {
    BranchPoint pt;
    pt.lambda = params.lambda;
    pt.notes = std::move(notes);
    if (known.empty()) return pt;

    // starts that reached the same solution differ only at the residual level
    std::vector<SolveReport> distinct;
    for (auto& k : known) {
        const double scale = std::max(1.0, k.solution.sup_norm());
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const SolveReport& d) {
            return (d.solution - k.solution).sup_norm() <= 1e-6 * scale;
        });
        if (!seen) distinct.push_back(std::move(k));
    }
    known = std::move(distinct);
    if (known.size() == 1) {
        pt.u_big = std::move(known.front());
    } else {
        std::vector<GridFunction> sols;
        for (const auto& k : known) sols.push_back(k.solution);
        pt.u_big = biggest_solution(kern, params, sols, opts.solver);
    }
    auto& u = *pt.u_big;
    for (auto& w : u.warnings) pt.notes.push_back("u: " + w);
    if (u.solution.sup_norm() <= sign_threshold_delta(params)) {
        pt.notes.emplace_back("nontrivial solution with sup-norm below delta");
    }

    if (opts.saddles) {
        try {
            pt.v_saddle = find_saddle(kern, params, u.solution, opts.solver);
            for (auto& w : pt.v_saddle->warnings) pt.notes.push_back("v: " + w);
        } catch (const SolverError& e) {
            pt.notes.emplace_back(e.what());
        }
    }

    auto& d = pt.diagnostics;
    d.sup_u = u.solution.sup_norm();
    d.energy_u = u.energy;
    d.hopf_u = hopf_ratio(u.solution, params.s);
    if (pt.v_saddle) {
        const auto& v = pt.v_saddle->solution;
        d.sup_v = v.sup_norm();
        d.energy_v = pt.v_saddle->energy;
        d.hopf_v = hopf_ratio(v, params.s);
        const auto m = check_ordering(u.solution, v, params.s);
        d.margin = m.margin;
        d.weighted_margin = m.weighted;
    }
    return pt;
}

}  // namespace

bool BranchPoint::converged() const noexcept {
    if (!u_big) return true;
    return u_big->converged && (!v_saddle || v_saddle->converged);
}

double LambdaStarEstimate::disagreement() const noexcept {
    const double e = estimate();
    return e > 0.0 ? std::abs(e - fold()) / e : 0.0;
}

std::vector<GridFunction> lambda_starts(const KernelMatrix& kern, const ProblemParams& params,
                                        const SolverOptions& opts) {
    require_positive_lambda(params, "lambda_starts");
    const auto& mesh = kern.mesh();
    // Rayleigh quotient of the start shape: an upper bound for the principal eigenvalue
    GridFunction shape(mesh);
    const auto d = mesh->dist();
    const double dmax = *std::max_element(d.begin(), d.end());
    double norm = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        shape[i] = std::pow(d[i] / dmax, params.s);
        norm += mesh->h() * std::pow(shape[i], params.p);
    }
    const double rayleigh = params.p * seminorm_energy(kern, shape, params.p) / norm;
    const double amp_hi = 4.0 * std::max(1.0, std::pow(params.lambda / rayleigh, 1.0 / (params.p - params.q)));
    const double amp_lo = std::min(sign_threshold_delta(params), 0.5 * amp_hi);
    return random_positive_starts(mesh, params.s, opts.starts, amp_lo, amp_hi, opts.seed);
}

bool finds_nontrivial(const KernelMatrix& kern, const ProblemParams& params, const SolverOptions& opts) {
    const auto model = ReactionModel::plain(params);
    for (const auto& start : lambda_starts(kern, params, opts)) {
        if (alive(minimize(kern, model, start, opts), opts)) return true;
    }
    return false;
}

SolveReport biggest_solution(const KernelMatrix& kern, const ProblemParams& params,
                             const std::vector<GridFunction>& known, const SolverOptions& opts) {
    if (known.empty()) throw std::invalid_argument("biggest_solution: no known solutions");
    GridFunction top = known.front();
    for (std::size_t k = 1; k < known.size(); ++k) top = pointwise_max(top, known[k]);
    return solve_above(kern, params, top, opts);
}

BranchPoint solve_at_lambda(const KernelMatrix& kern, const ProblemParams& params,
                            const std::optional<GridFunction>& warm_start, const PipelineOptions& opts) {
    require_positive_lambda(params, "solve_at_lambda");
    std::vector<std::string> notes;
    if (warm_start) {
        auto rep = minimize(kern, ReactionModel::plain(params), *warm_start, opts.solver);
        if (alive(rep, opts.solver)) return complete_point(kern, params, {std::move(rep)}, std::move(notes), opts);
        notes.emplace_back("warm start collapsed; multi-start used");
    }
    std::vector<SolveReport> known;
    const auto reports = multi_start_minimize(kern, params, lambda_starts(kern, params, opts.solver), opts.solver);
    int unresolved = 0;
    for (const auto& rep : reports) {
        if (!rep.converged && rep.solution.sup_norm() > opts.solver.zero_threshold) ++unresolved;
        if (alive(rep, opts.solver)) known.push_back(rep);
    }
    if (unresolved > 0) notes.push_back(std::to_string(unresolved) + " start(s) hit the iteration cap away from zero");
    if (known.empty()) notes.emplace_back(unresolved > 0 ? "no converged nontrivial solution" : "no nontrivial solution");
    auto pt = complete_point(kern, params, std::move(known), std::move(notes), opts);
    pt.unresolved_starts = unresolved;
    return pt;
}

std::vector<double> descending_grid(double lo, double hi, int steps) {
    if (steps < 2 || !(lo < hi)) throw ConfigError("lambda grid: need lambda-min < lambda-max and steps >= 2");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) grid[static_cast<std::size_t>(k)] = hi - (hi - lo) * k / (steps - 1);
    return grid;
}

BifurcationDiagram continue_branch(const KernelMatrix& kern, const ProblemParams& params,
                                   const std::vector<double>& lambdas, const PipelineOptions& opts) {
    for (std::size_t k = 1; k < lambdas.size(); ++k) {
        if (!(lambdas[k] < lambdas[k - 1])) throw ConfigError("continue_branch: grid must be strictly decreasing");
    }
    BifurcationDiagram diag;
    std::optional<GridFunction> warm;
    double last_alive = 0.0;
    for (double lam : lambdas) {
        const auto at = params.with_lambda(lam);
        BranchPoint pt;
        if (warm) {
            auto rep = minimize(kern, ReactionModel::plain(at), *warm, opts.solver);
            if (alive(rep, opts.solver)) {
                pt = complete_point(kern, at, {std::move(rep)}, {}, opts);
            } else {
                if (!diag.fold) diag.fold = std::make_pair(lam, last_alive);
                pt = solve_at_lambda(kern, at, std::nullopt, opts);
                pt.notes.insert(pt.notes.begin(), "continuation collapsed to zero");
                if (pt.nontrivial()) {
                    diag.warnings.push_back("multi-start found a solution below the continuation fold at lambda=" +
                                            num(lam));
                }
            }
        } else {
            pt = solve_at_lambda(kern, at, std::nullopt, opts);
        }
        if (pt.nontrivial()) {
            warm = pt.u_big->solution;
            last_alive = lam;
        } else {
            warm.reset();
        }
        diag.points.push_back(std::move(pt));
    }
    std::reverse(diag.points.begin(), diag.points.end());

    if (diag.fold) {
        // refine between the first collapse and the last survivor, warm-starting from the survivor
        auto [lo, hi] = *diag.fold;
        std::optional<GridFunction> survivor;
        for (const auto& pt : diag.points) {
            if (pt.lambda == hi && pt.u_big) survivor = pt.u_big->solution;
        }
        while (survivor && hi - lo > opts.width) {
            const double mid = 0.5 * (lo + hi);
            auto rep = minimize(kern, ReactionModel::plain(params.with_lambda(mid)), *survivor, opts.solver);
            if (alive(rep, opts.solver)) {
                hi = mid;
                survivor = rep.solution;
            } else {
                lo = mid;
            }
        }
        diag.fold = std::make_pair(lo, hi);
    } else {
        diag.warnings.emplace_back("continuation did not reach the fold");
    }
    diag.method_record = "top-down warm-started continuation over " + std::to_string(lambdas.size()) +
                         " grid values; fold refined by warm bisection to width " + num(opts.width);
    return diag;
}

LambdaStarEstimate estimate_lambda_star(const KernelMatrix& kern, const ProblemParams& params, double lo,
                                        double hi, const PipelineOptions& opts,
                                        const BifurcationDiagram* continuation) {
    if (!(lo > 0.0) || !(lo < hi)) throw ConfigError("estimate_lambda_star: need 0 < lo < hi");
    auto pred = [&](double lam) { return finds_nontrivial(kern, params.with_lambda(lam), opts.solver); };
    auto hint = [&] {
        const auto eig = principal_eigenpair(kern, params.p, opts.solver);
        return " (principal eigenvalue " + num(eig.value) + "; no solutions below " +
               num(nonexistence_bound(params, 0.999 * eig.value)) + ")";
    };

    LambdaStarEstimate est;
    for (int k = 0; pred(lo); ++k) {
        if (k == 30) throw SolverError("bracket cannot be established: solutions found down to lambda=" + num(lo) + hint());
        hi = lo;
        lo *= 0.5;
    }
    for (int k = 0; !pred(hi); ++k) {
        if (k == 12) throw SolverError("bracket cannot be established: no solution up to lambda=" + num(hi) + hint());
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > opts.width) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid)) hi = mid;
        else lo = mid;
        ++est.bisection_steps;
    }
    est.lo = lo;
    est.hi = hi;

    BifurcationDiagram own;
    if (!continuation || !continuation->fold) {
        auto quick = opts;
        quick.saddles = false;
        own = continue_branch(kern, params, descending_grid(0.5 * lo, 2.0 * hi, 7), quick);
        continuation = &own;
    }
    if (continuation->fold) {
        est.fold_lo = continuation->fold->first;
        est.fold_hi = continuation->fold->second;
        if (est.disagreement() > 0.1) {
            est.warnings.push_back("bisection estimate " + num(est.estimate()) + " and continuation fold " +
                                   num(est.fold()) + " differ by more than 10%");
        }
    } else {
        est.warnings.emplace_back("no continuation fold available for the cross-check");
    }
    return est;
}

}  // namespace fracbif
