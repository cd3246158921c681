#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracbif/core.hpp"
#include "fracbif/kernel.hpp"
#include "fracbif/reaction.hpp"

namespace fracbif {

struct SolverOptions {
    /// Converged when sup|∇Φ| ≤ tol · max(1, |Φ|).
    double tol = 1e-9;
    int max_iter = 50000;
    /// Randomized starts used whenever absence of a nontrivial solution is claimed.
    int starts = 10;
    int path_points = 41;
    double damping = 0.2;
    std::uint64_t seed = 20240607;

    double armijo = 1e-4;
    double backtrack = 0.5;
    double step_min = 1e-8;
    double step_max = 1e2;
    /// Nodal sup-norm below which a result counts as the zero solution.
    double zero_threshold = 1e-6;
    /// Mountain-pass iterations spent on the path before switching to local refinement.
    int path_iter = 4000;
};

enum class Classification { zero, minimizer, saddle, pinned };

const char* to_string(Classification c) noexcept;

struct SolveReport {
    GridFunction solution;
    double energy = 0.0;
    /// sup-norm of the energy gradient at `solution`.
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    Classification classification = Classification::zero;
    /// Residual of the untruncated problem; differs from `residual` only for truncated models.
    double plain_residual = 0.0;
    std::vector<std::string> warnings;
};

struct MountainPassPath {
    std::vector<GridFunction> points;
    std::vector<double> energies;
    std::size_t peak = 0;
};

struct EigenResult {
    double value = 0.0;
    /// Nonnegative, with h Σ |φ_i|^p = 1.
    GridFunction eigenfunction;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Φ(u) = seminorm_energy(u) - h Σ_i F(i, u_i).
double total_energy(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u);

/// ∇Φ(u)_i = A(u)_i - h f(i, u_i).
GridFunction total_gradient(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u);

double convergence_threshold(const SolverOptions& opts, double energy) noexcept;

/// Armijo-backtracking gradient descent with Barzilai–Borwein trial steps.
///
/// For the plain model a result with negative entries is truncated to its positive
/// part (which never raises the energy) and descended again.
SolveReport minimize(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u0,
                     const SolverOptions& opts);

/// Energy trace variant of minimize() used to check monotone descent.
SolveReport minimize(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u0,
                     const SolverOptions& opts, std::vector<double>* energy_trace);

/// Minimizes the energy truncated below `subsol`; the result dominates `subsol` and solves
/// the untruncated problem.
SolveReport solve_above(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& subsol,
                        const SolverOptions& opts);

/// Largest nodal violation of A(u) ≤ h f_λ(u) (zero for an exact discrete subsolution).
double subsolution_defect(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& u);

/// Minimizes p·seminorm_energy(u) over h Σ|u_i|^p = 1 by projected descent.
EigenResult principal_eigenpair(const KernelMatrix& kern, double p, const SolverOptions& opts);

/// Mountain-pass search on the energy truncated above `u_big`, between 0 and `u_big`.
SolveReport find_saddle(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& u_big,
                        const SolverOptions& opts, MountainPassPath* final_path = nullptr);

/// Seeded positive starting profiles c·d^s·(1/2 + ξ_i) with amplitudes log-uniform in [amp_lo, amp_hi].
std::vector<GridFunction> random_positive_starts(const MeshPtr& mesh, double s, int count, double amp_lo,
                                                 double amp_hi, std::uint64_t seed);

/// Plain minimization from each start; returned in start order.
std::vector<SolveReport> multi_start_minimize(const KernelMatrix& kern, const ProblemParams& params,
                                              const std::vector<GridFunction>& starts, const SolverOptions& opts);

}  // namespace fracbif
