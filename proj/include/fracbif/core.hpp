#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracbif {

/// Invalid problem data: parameter ordering, mesh geometry, missing config keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two objects that must share a mesh do not.
class MeshMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside an iterative method.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unvalidated parameter record, as read from a config file or flags.
struct RawParams {
    std::optional<double> p;
    std::optional<double> s;
    std::optional<double> q;
    std::optional<double> r;
    std::optional<double> lambda;
};

/// Exponents and parameter of  (-Δ)_p^s u = λ u^{q-1} - u^{r-1}  on an interval.
///
/// Only constructed through validate_params(), which enforces
/// 1 < r < q < p, 0 < s < 1, p·s < 1 and λ ≥ 0.
struct ProblemParams {
    double p = 0.0;
    double s = 0.0;
    double q = 0.0;
    double r = 0.0;
    double lambda = 0.0;
    /// Growth constant C0 with |f_λ(t)| ≤ C0 (1 + |t|^{q-1}); equals λ + 1.
    double c0 = 0.0;
    /// Critical Sobolev exponent p/(1 - p·s) in dimension one.
    double pstar = 0.0;

    [[nodiscard]] double sigma() const noexcept { return p * s; }
    /// Same exponents, different λ (c0 recomputed).
    [[nodiscard]] ProblemParams with_lambda(double lam) const;
};

enum class LambdaPolicy { allow_zero, require_positive };

ProblemParams validate_params(const RawParams& raw,
                              LambdaPolicy policy = LambdaPolicy::allow_zero);

/// Uniform partition of [a,b] into n cells, nodes at cell midpoints.
class Mesh1D {
public:
    Mesh1D(double a, double b, std::size_t n);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] std::span<const double> edges() const noexcept { return edges_; }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    /// Distance from each node to the complement of (a,b).
    [[nodiscard]] std::span<const double> dist() const noexcept { return dist_; }

    [[nodiscard]] bool same_as(const Mesh1D& other) const noexcept;

private:
    double a_;
    double b_;
    double h_;
    std::vector<double> edges_;
    std::vector<double> nodes_;
    std::vector<double> dist_;
};

using MeshPtr = std::shared_ptr<const Mesh1D>;

MeshPtr build_mesh(double a, double b, std::size_t n);

/// Nodal values on a mesh; identified with its zero extension outside (a,b).
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(MeshPtr mesh, double fill = 0.0);
    GridFunction(MeshPtr mesh, std::vector<double> values);

    [[nodiscard]] const MeshPtr& mesh() const noexcept { return mesh_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& vec() const noexcept { return values_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] double sup_norm() const noexcept;
    [[nodiscard]] double min() const noexcept;
    [[nodiscard]] double max() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    [[nodiscard]] GridFunction positive_part() const;
    /// max(-u, 0), so that u = u⁺ - u⁻.
    [[nodiscard]] GridFunction negative_part() const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double c);

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Nodewise maximum.
GridFunction pointwise_max(const GridFunction& a, const GridFunction& b);

/// Throws MeshMismatch unless both are defined on the same mesh.
void require_same_mesh(const Mesh1D& a, const Mesh1D& b, const char* where);
void require_same_mesh(const GridFunction& a, const GridFunction& b, const char* where);

/// Signed power |a|^{t-1} sign(a), i.e. the odd extension with a·odd_power(a,t) = |a|^t.
/// Zero at a = 0 for every t > 0.
inline double odd_power(double a, double t) {
    if (a == 0.0) return 0.0;
    const double m = std::pow(std::abs(a), t - 1.0);
    return a > 0.0 ? m : -m;
}

inline double pos(double t) noexcept { return t > 0.0 ? t : 0.0; }

}  // namespace fracbif
