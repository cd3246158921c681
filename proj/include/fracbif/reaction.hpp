#pragma once

#include <cstddef>
#include <optional>

#include "fracbif/core.hpp"

namespace fracbif {

/// The reaction f_λ(t) = λ (t⁺)^{q-1} - (t⁺)^{r-1}, optionally truncated at a nodal profile.
///
///  plain : f_λ(t)
///  hat   : f_λ(anchor_i)           for t ≤ anchor_i,  f_λ(t) above   (minimization above a subsolution)
///  tilde : f_λ(t)                  for t < ceiling_i,
///          λ ceiling_i^{q-1} - t^{r-1} at or above                    (mountain pass below a solution)
class ReactionModel {
public:
    enum class Variant { plain, hat, tilde };

    static ReactionModel plain(const ProblemParams& params);
    static ReactionModel hat(const ProblemParams& params, GridFunction anchor);
    static ReactionModel tilde(const ProblemParams& params, GridFunction ceiling);

    [[nodiscard]] Variant variant() const noexcept { return variant_; }
    [[nodiscard]] const ProblemParams& params() const noexcept { return params_; }
    /// Anchor (hat) or ceiling (tilde); empty for plain.
    [[nodiscard]] const std::optional<GridFunction>& profile() const noexcept { return profile_; }
    /// Growth constant with |f(i,t)| ≤ c0 (1 + |t|^{q-1}) for every node.
    [[nodiscard]] double c0() const noexcept { return c0_; }

    [[nodiscard]] double f(std::size_t node, double t) const;
    /// ∫_0^t f(node, τ) dτ, closed form.
    [[nodiscard]] double F(std::size_t node, double t) const;

    /// The untruncated f_λ and F_λ.
    [[nodiscard]] double f_plain(double t) const noexcept;
    [[nodiscard]] double F_plain(double t) const noexcept;

    /// Throws MeshMismatch unless the truncation profile lives on `mesh` (plain: always fine).
    void require_mesh(const Mesh1D& mesh, const char* where) const;

private:
    ReactionModel(const ProblemParams& params, Variant variant, std::optional<GridFunction> profile);

    ProblemParams params_;
    Variant variant_;
    std::optional<GridFunction> profile_;
    double c0_;
};

const char* to_string(ReactionModel::Variant v) noexcept;

/// δ = λ^{-1/(q-r)}: f_λ ≤ 0 on [0, δ], with f_λ(δ) = 0.
double sign_threshold_delta(const ProblemParams& params);

/// λ₀ = min{1, ε}: for λ < λ₀ one has f_λ(t) ≤ ε t^{p-1} for all t ≥ 0.
double nonexistence_bound(const ProblemParams& params, double eps);

}  // namespace fracbif
