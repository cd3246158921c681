#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "fracbif/core.hpp"

namespace fracbif {

/// Discrete Gagliardo form for piecewise-constant functions on a uniform mesh.
///
/// pair(i,j) = ∬_{C_i×C_j} |x-y|^{-(1+σ)} dx dy  (zero on the diagonal)
/// tail(i)   = ∫_{C_i} ∫_{(a,b)^c} |x-y|^{-(1+σ)} dy dx
///
/// With these weights the Gagliardo energy of the zero extension of u is
///   (1/p) [ Σ_{i≠j} pair(i,j) |u_i-u_j|^p + 2 Σ_i tail(i) |u_i|^p ].
class KernelMatrix {
public:
    KernelMatrix(MeshPtr mesh, double sigma, std::vector<double> pair, std::vector<double> tail);

    [[nodiscard]] const MeshPtr& mesh() const noexcept { return mesh_; }
    [[nodiscard]] std::size_t size() const noexcept { return tail_.size(); }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double pair(std::size_t i, std::size_t j) const noexcept { return pair_[i * size() + j]; }
    [[nodiscard]] double tail(std::size_t i) const noexcept { return tail_[i]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(pair_).subspan(i * size(), size());
    }
    [[nodiscard]] std::span<const double> tails() const noexcept { return tail_; }

    /// Kernel with every weight multiplied by c > 0.
    [[nodiscard]] KernelMatrix scaled(double c) const;
    /// Negative control for the verification suite: flips the sign of every pair weight.
    [[nodiscard]] KernelMatrix corrupted() const;

private:
    MeshPtr mesh_;
    double sigma_;
    std::vector<double> pair_;
    std::vector<double> tail_;
};

/// Exact cell-pair and cell-exterior integrals of |x-y|^{-(1+σ)}, σ = p·s.
KernelMatrix assemble_kernel(const MeshPtr& mesh, const ProblemParams& params);
KernelMatrix assemble_kernel(const MeshPtr& mesh, double sigma);

/// (1/p)[u]^p of the zero extension of u.
double seminorm_energy(const KernelMatrix& kern, const GridFunction& u, double p);

/// A(u)_i = 2 Σ_{j≠i} pair(i,j) (u_i-u_j)^{p-1} + 2 tail(i) u_i^{p-1}, the gradient of seminorm_energy.
GridFunction apply_operator(const KernelMatrix& kern, const GridFunction& u, double p);

/// Σ_i Au_i φ_i.
double pairing(const GridFunction& au, const GridFunction& phi);

/// Dense dump: n rows of n pair weights followed by the tail weight.
void write_kernel_csv(const KernelMatrix& kern, std::ostream& out);

/// Number of worker threads used by the row-parallel loops (1 when built without OpenMP).
void set_num_threads(int threads);
int num_threads();

namespace detail {

/// |a|^p and |a|^{p-1} sign(a) with fast paths for the common exponents.
class PowerLaw {
public:
    explicit PowerLaw(double p);
    [[nodiscard]] double abs_pow(double a) const noexcept;
    [[nodiscard]] double odd(double a) const noexcept;
    [[nodiscard]] double exponent() const noexcept { return p_; }

private:
    enum class Kind { two, three, four, three_halves, five_halves, general };
    double p_;
    Kind kind_;
};

double seminorm_energy(const KernelMatrix& kern, std::span<const double> u, const PowerLaw& law);
void apply_operator(const KernelMatrix& kern, std::span<const double> u, const PowerLaw& law,
                    std::span<double> out);

}  // namespace detail

}  // namespace fracbif
