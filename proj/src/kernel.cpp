#include "fracbif/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#ifdef FRACBIF_HAVE_OPENMP
#include <omp.h>
#endif

namespace fracbif {

namespace {

int g_threads = 1;

// 2 k^a - (k+1)^a - (k-1)^a for integer k >= 1 and a = 1-σ in (0,1).
// For large k the three powers nearly cancel; use the even binomial series instead.
double second_difference(std::size_t k, double a) {
    const double kd = static_cast<double>(k);
    if (k < 8) {
        return 2.0 * std::pow(kd, a) - std::pow(kd + 1.0, a) - std::pow(kd - 1.0, a);
    }
    const double x2 = 1.0 / (kd * kd);
    double coeff = a * (a - 1.0) / 2.0;  // binom(a, 2)
    double xpow = x2;
    double sum = 0.0;
    for (int m = 1; m < 60; ++m) {
        const double term = coeff * xpow;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        const double j = 2.0 * m;
        coeff *= (a - j) * (a - j - 1.0) / ((j + 1.0) * (j + 2.0));
        xpow *= x2;
    }
    return -2.0 * std::pow(kd, a) * sum;
}

}  // namespace

void set_num_threads(int threads) { g_threads = std::max(1, threads); }

int num_threads() {
#ifdef FRACBIF_HAVE_OPENMP
    return g_threads;
#else
    return 1;
#endif
}

KernelMatrix::KernelMatrix(MeshPtr mesh, double sigma, std::vector<double> pair, std::vector<double> tail)
    : mesh_(std::move(mesh)), sigma_(sigma), pair_(std::move(pair)), tail_(std::move(tail)) {
    if (!mesh_ || tail_.size() != mesh_->size() || pair_.size() != tail_.size() * tail_.size()) {
        throw MeshMismatch("KernelMatrix: weight arrays do not match mesh");
    }
}

KernelMatrix KernelMatrix::scaled(double c) const {
    auto pair = pair_;
    auto tail = tail_;
    for (double& w : pair) w *= c;
    for (double& w : tail) w *= c;
    return KernelMatrix(mesh_, sigma_, std::move(pair), std::move(tail));
}

KernelMatrix KernelMatrix::corrupted() const {
    auto pair = pair_;
    for (double& w : pair) w = -w;
    return KernelMatrix(mesh_, sigma_, std::move(pair), tail_);
}

KernelMatrix assemble_kernel(const MeshPtr& mesh, const ProblemParams& params) {
    return assemble_kernel(mesh, params.sigma());
}

KernelMatrix assemble_kernel(const MeshPtr& mesh, double sigma) {
    if (!mesh) throw std::invalid_argument("assemble_kernel: null mesh");
    if (!(sigma > 0.0) || !(sigma < 1.0 - 1e-12)) {
        throw ConfigError("assemble_kernel: need 0 < p*s < 1 (closed form degenerates at p*s = 1)");
    }
    const std::size_t n = mesh->size();
    const double a = 1.0 - sigma;
    const double scale = std::pow(mesh->h(), a) / (sigma * a);

    // uniform mesh: pair weights depend on |i-j| only
    std::vector<double> by_offset(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) by_offset[k] = scale * second_difference(k, a);

    std::vector<double> pair(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            pair[i * n + j] = by_offset[i > j ? i - j : j - i];
        }
    }

    // ∫_{C_i} (b-x)^{-σ}/σ dx and its mirror image for the left exterior
    std::vector<double> tail(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = std::pow(static_cast<double>(i + 1), a) - std::pow(static_cast<double>(i), a);
        const double right = std::pow(static_cast<double>(n - i), a) - std::pow(static_cast<double>(n - i - 1), a);
        tail[i] = scale * (left + right);
    }
    return KernelMatrix(mesh, sigma, std::move(pair), std::move(tail));
}

namespace detail {

PowerLaw::PowerLaw(double p) : p_(p) {
    if (p == 2.0) kind_ = Kind::two;
    else if (p == 3.0) kind_ = Kind::three;
    else if (p == 4.0) kind_ = Kind::four;
    else if (p == 1.5) kind_ = Kind::three_halves;
    else if (p == 2.5) kind_ = Kind::five_halves;
    else kind_ = Kind::general;
}

double PowerLaw::abs_pow(double a) const noexcept {
    const double m = std::abs(a);
    switch (kind_) {
        case Kind::two: return m * m;
        case Kind::three: return m * m * m;
        case Kind::four: return (m * m) * (m * m);
        case Kind::three_halves: return m * std::sqrt(m);
        case Kind::five_halves: return m * m * std::sqrt(m);
        case Kind::general: break;
    }
    return m == 0.0 ? 0.0 : std::pow(m, p_);
}

double PowerLaw::odd(double a) const noexcept {
    switch (kind_) {
        case Kind::two: return a;
        case Kind::three: return a * std::abs(a);
        case Kind::four: return a * a * a;
        case Kind::three_halves: return a >= 0.0 ? std::sqrt(a) : -std::sqrt(-a);
        case Kind::five_halves: return a * std::sqrt(std::abs(a));
        case Kind::general: break;
    }
    return odd_power(a, p_);
}

double seminorm_energy(const KernelMatrix& kern, std::span<const double> u, const PowerLaw& law) {
    const std::size_t n = kern.size();
    std::vector<double> rows(n);
    const auto nn = static_cast<long long>(n);
#ifdef FRACBIF_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
#endif
    for (long long ii = 0; ii < nn; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto w = kern.row(i);
        const double ui = u[i];
        double acc = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) acc += w[j] * law.abs_pow(ui - u[j]);
        rows[i] = 2.0 * acc + 2.0 * kern.tail(i) * law.abs_pow(ui);
    }
    double total = 0.0;
    for (double v : rows) total += v;
    return total / law.exponent();
}

void apply_operator(const KernelMatrix& kern, std::span<const double> u, const PowerLaw& law,
                    std::span<double> out) {
    const std::size_t n = kern.size();
    const auto nn = static_cast<long long>(n);
#ifdef FRACBIF_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
#endif
    for (long long ii = 0; ii < nn; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto w = kern.row(i);
        const double ui = u[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) acc += w[j] * law.odd(ui - u[j]);
        }
        out[i] = 2.0 * acc + 2.0 * kern.tail(i) * law.odd(ui);
    }
}

}  // namespace detail

double seminorm_energy(const KernelMatrix& kern, const GridFunction& u, double p) {
    require_same_mesh(*kern.mesh(), *u.mesh(), "seminorm_energy");
    return detail::seminorm_energy(kern, u.values(), detail::PowerLaw(p));
}

GridFunction apply_operator(const KernelMatrix& kern, const GridFunction& u, double p) {
    require_same_mesh(*kern.mesh(), *u.mesh(), "apply_operator");
    GridFunction out(u.mesh());
    detail::apply_operator(kern, u.values(), detail::PowerLaw(p), out.values());
    return out;
}

double pairing(const GridFunction& au, const GridFunction& phi) {
    require_same_mesh(au, phi, "pairing");
    double acc = 0.0;
    for (std::size_t i = 0; i < au.size(); ++i) acc += au[i] * phi[i];
    return acc;
}

void write_kernel_csv(const KernelMatrix& kern, std::ostream& out) {
    const auto old = out.precision(17);
    const std::size_t n = kern.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out << kern.pair(i, j) << ',';
        out << kern.tail(i) << '\n';
    }
    out.precision(old);
}

}  // namespace fracbif
