#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracbif/core.hpp"
#include "fracbif/kernel.hpp"
#include "fracbif/solvers.hpp"

namespace fracbif {

struct PointDiagnostics {
    double sup_u = 0.0;
    double sup_v = 0.0;
    double energy_u = 0.0;
    double energy_v = 0.0;
    double hopf_u = 0.0;
    double hopf_v = 0.0;
    /// min_i (u_i - v_i) and its d^s-weighted version; zero when v is absent.
    double margin = 0.0;
    double weighted_margin = 0.0;
};

struct BranchPoint {
    double lambda = 0.0;
    /// Absent when only the zero solution was found.
    std::optional<SolveReport> u_big;
    std::optional<SolveReport> v_saddle;
    PointDiagnostics diagnostics;
    std::vector<std::string> notes;
    /// Starts that hit the iteration cap away from zero; nonexistence is not claimed while positive.
    int unresolved_starts = 0;

    [[nodiscard]] bool nontrivial() const noexcept { return u_big.has_value(); }
    [[nodiscard]] bool converged() const noexcept;
};

struct LambdaStarEstimate {
    /// Final bisection bracket: no nontrivial solution at lo, one at hi.
    double lo = 0.0;
    double hi = 0.0;
    /// Bracket from warm-started continuation (last collapse, last survivor).
    double fold_lo = 0.0;
    double fold_hi = 0.0;
    int bisection_steps = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] double estimate() const noexcept { return 0.5 * (lo + hi); }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] double fold() const noexcept { return 0.5 * (fold_lo + fold_hi); }
    /// |estimate - fold| / estimate
    [[nodiscard]] double disagreement() const noexcept;
};

struct BifurcationDiagram {
    /// Ascending in λ.
    std::vector<BranchPoint> points;
    std::optional<LambdaStarEstimate> lambda_star;
    /// Fold bracket located by continue_branch (lo: first collapse, hi: last survivor).
    std::optional<std::pair<double, double>> fold;
    std::string method_record;
    std::vector<std::string> warnings;
};

/// Predicate and start generation shared by the per-λ solves.
struct PipelineOptions {
    SolverOptions solver;
    /// Compute the mountain-pass solution at every nontrivial point.
    bool saddles = true;
    /// Bisection stops once the bracket is at most this wide.
    double width = 0.05;
};

/// Seeded positive starts for multi-start minimization at params.lambda; amplitudes span
/// δ = λ^{-1/(q-r)} up to a few times the size where λu^{q-1} balances the operator.
std::vector<GridFunction> lambda_starts(const KernelMatrix& kern, const ProblemParams& params,
                                        const SolverOptions& opts);

/// True when some randomized start converges to a nontrivial solution.
bool finds_nontrivial(const KernelMatrix& kern, const ProblemParams& params, const SolverOptions& opts);

/// Minimizes above the nodewise maximum of the known solutions.
SolveReport biggest_solution(const KernelMatrix& kern, const ProblemParams& params,
                             const std::vector<GridFunction>& known, const SolverOptions& opts);

BranchPoint solve_at_lambda(const KernelMatrix& kern, const ProblemParams& params,
                            const std::optional<GridFunction>& warm_start, const PipelineOptions& opts);

/// Warm-started continuation over a strictly decreasing λ grid. The point where the warm
/// start first collapses to zero is refined by warm bisection to `opts.width`.
BifurcationDiagram continue_branch(const KernelMatrix& kern, const ProblemParams& params,
                                   const std::vector<double>& lambdas, const PipelineOptions& opts);

/// Bisection on finds_nontrivial() over [lo, hi], expanding the bracket when needed, and
/// cross-checked against the fold in `continuation` (computed here when null).
LambdaStarEstimate estimate_lambda_star(const KernelMatrix& kern, const ProblemParams& params, double lo,
                                        double hi, const PipelineOptions& opts,
                                        const BifurcationDiagram* continuation = nullptr);

/// Descending grid of `steps` values from hi to lo (inclusive).
std::vector<double> descending_grid(double lo, double hi, int steps);

}  // namespace fracbif
