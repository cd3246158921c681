#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracbif/core.hpp"
#include "fracbif/kernel.hpp"
#include "fracbif/solvers.hpp"

namespace fracbif {

/// One named pass/fail check with the worst measured quantity.
struct PropertyCheck {
    std::string name;
    bool passed = false;
    double worst = 0.0;
    std::string detail;
};

/// min_i u_i / d_i^s
double hopf_ratio(const GridFunction& u, double s);

struct CsNorms {
    /// max_i |u_i| / d_i^s
    double cs_norm = 0.0;
    /// max_{i≠j} |w_i - w_j| / |x_i - x_j|^α with w = u / d^s
    double weighted_holder = 0.0;
};

/// Requires 0 ≤ alpha < s.
CsNorms cs_norms(const GridFunction& u, double s, double alpha);

inline double default_holder_exponent(double s) noexcept { return 0.9 * s; }

struct OrderingMargin {
    /// min_i (u_i - v_i)
    double margin = 0.0;
    /// min_i (u_i - v_i) / d_i^s
    double weighted = 0.0;
};

OrderingMargin check_ordering(const GridFunction& u, const GridFunction& v, double s);

/// Seeded random trials of the discrete monotonicity properties of A:
///   mon-i    ⟨A(u), u⁺⟩ ≥ p·E(u⁺)  and  ⟨A(u), -u⁻⟩ ≥ p·E(u⁻)
///   mon-ii   ⟨A(u) - A(v), (u-v)⁺⟩ > 0  whenever (u-v)⁺ ≠ 0
///   mon-iii  ⟨A(u) - A(v), (u-v)^t⟩ ≥ 0  for t ≥ 2
///   odd      A(-u) = -A(u)
std::vector<PropertyCheck> verify_operator_properties(const KernelMatrix& kern, double p, int trials,
                                                      std::uint64_t seed);

/// Links of  p·E(u) = ⟨A(u),u⟩ = h Σ f(u_i) u_i ≤ c0 (h Σ|u_i| + h Σ|u_i|^q).
struct EnergyBound {
    double seminorm = 0.0;  ///< p·E(u)
    double pairing = 0.0;   ///< ⟨A(u), u⟩
    double weak_rhs = 0.0;  ///< h Σ f(u_i) u_i
    double bound = 0.0;     ///< c0 (h Σ|u_i| + h Σ|u_i|^q)
    /// p·E(u) / (h Σ|u_i| + h Σ|u_i|^q), the smallest constant that closes the chain.
    double realized_c0 = 0.0;
    double identity_error = 0.0;  ///< relative gap between pairing and weak_rhs
    bool passed = false;
};

EnergyBound verify_energy_bound(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& u);

struct DiagnosticReport {
    double hopf_ratio = 0.0;
    double cs_norm = 0.0;
    double weighted_holder = 0.0;
    std::optional<OrderingMargin> ordering;
    std::vector<PropertyCheck> bound_checks;
};

/// Everything above for one solution; `below` (when given) is checked to lie under u.
DiagnosticReport diagnose(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& u,
                          const GridFunction* below = nullptr);

/// Full property suite run by the verify command. `corrupt` swaps in KernelMatrix::corrupted().
std::vector<PropertyCheck> verification_suite(const MeshPtr& mesh, const ProblemParams& params, int trials,
                                              std::uint64_t seed, const SolverOptions& opts = {},
                                              bool corrupt = false);

}  // namespace fracbif
