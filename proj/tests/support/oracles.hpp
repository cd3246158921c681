#pragma once

// Independent reference computations: adaptive double-exponential quadrature of the
// singular kernel and dense symmetric eigen-decomposition. Nothing here calls the
// closed-form assembly.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/Dense>

#include "fracbif/kernel.hpp"

namespace oracle {

using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::tanh_sinh;

// ∫_g^{g+w} t^{-1-σ} dt (w may be infinite), integrated numerically in t = e^v where the
// integrand e^{-σv} is smooth even for gaps g near underflow.
inline double power_segment(double g, double w, double sigma) {
    auto f = [&](double v) { return std::exp(-sigma * v); };
    if (std::isinf(w)) {
        exp_sinh<double> es;
        return es.integrate(f, std::log(g), std::numeric_limits<double>::infinity(), 1e-15);
    }
    tanh_sinh<double> ts;
    return ts.integrate(f, std::log(g), std::log(g + w), 1e-15);
}

// Distances from x ∈ (x0,x1) to both cell edges, accurate next to either edge.
// xc is the signed distance to the nearest endpoint passed by two-argument tanh_sinh
struct EdgeDistance {
    double left;
    double right;
};

// (xc = x0 - x < 0 on the left half, x1 - x > 0 on the right half).
inline EdgeDistance edge_distance(double x, double xc, double x0, double x1) {
    if (xc > 0.0) return {x - x0, xc};
    return {-xc, x1 - x};
}

// ∫_{x0}^{x1} ∫_{y0}^{y1} (y-x)^{-1-σ} dy dx  for x1 ≤ y0.
inline double pair_weight(double x0, double x1, double y0, double y1, double sigma) {
    tanh_sinh<double> outer;
    auto fx = [&](double x, double xc) {
        const auto d = edge_distance(x, xc, x0, x1);
        return power_segment(d.right + (y0 - x1), y1 - y0, sigma);
    };
    return outer.integrate(fx, x0, x1, 1e-14);
}

// ∫_{x0}^{x1} ∫_b^∞ (y-x)^{-1-σ} dy dx  for x1 ≤ b.
inline double right_tail(double x0, double x1, double b, double sigma) {
    tanh_sinh<double> outer;
    auto fx = [&](double x, double xc) {
        const auto d = edge_distance(x, xc, x0, x1);
        return power_segment(d.right + (b - x1), std::numeric_limits<double>::infinity(), sigma);
    };
    return outer.integrate(fx, x0, x1, 1e-14);
}

// Both exterior parts of (a,b) seen from the cell [x0,x1]; the left part by reflection.
inline double tail_weight(double x0, double x1, double a, double b, double sigma) {
    return right_tail(x0, x1, b, sigma) + right_tail(-x1, -x0, -a, sigma);
}

// (1/p)[u]^p for a continuous profile on (a,b) extended by zero.
inline double gagliardo_energy_smooth(const std::function<double(double)>& u, double a, double b, double p,
                                      double sigma) {
    tanh_sinh<double> ts;
    auto fx = [&](double x, double xc) {
        const auto d = edge_distance(x, xc, a, b);
        // difference quotient times |x-y|^{p-1-σ}: finite as y → x
        auto g = [&](double y, double yc) {
            const double dist = y < x ? (yc > 0.0 ? yc : x - y) : (yc < 0.0 ? -yc : y - x);
            if (dist == 0.0) return 0.0;
            return std::pow(std::abs(u(x) - u(y)) / dist, p) * std::pow(dist, p - 1.0 - sigma);
        };
        double inside = 0.0;
        if (d.left > 0.0 && x > a) inside += ts.integrate(g, a, x, 1e-12);
        if (d.right > 0.0 && x < b) inside += ts.integrate(g, x, b, 1e-12);
        const double inf = std::numeric_limits<double>::infinity();
        const double ext = power_segment(d.right, inf, sigma) + power_segment(d.left, inf, sigma);
        return inside + 2.0 * std::pow(std::abs(u(x)), p) * ext;
    };
    return ts.integrate(fx, a, b, 1e-10) / p;
}

// (1/p) ∬_{ℝ×ℝ} |ũ(x)-ũ(y)|^p |x-y|^{-1-σ} for the piecewise-constant zero extension ũ,
// organized as ∫_Ω [ ∫_ℝ + ∫_{Ω^c} ] dy dx with the inner integral split at every cell edge.
inline double gagliardo_energy(const std::vector<double>& edges, const std::vector<double>& u, double p,
                               double sigma) {
    const std::size_t n = u.size();
    const double inf = std::numeric_limits<double>::infinity();
    tanh_sinh<double> ts;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = edges[i], x1 = edges[i + 1];
        auto fx = [&](double x, double xc) {
            const auto d = edge_distance(x, xc, x0, x1);
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double jump = std::pow(std::abs(u[i] - u[j]), p);
                const double w = edges[j + 1] - edges[j];
                const double gap = j < i ? d.left + (x0 - edges[j + 1]) : d.right + (edges[j] - x1);
                acc += jump * power_segment(gap, w, sigma);
            }
            const double ext = power_segment(d.right + (edges[n] - x1), inf, sigma) +
                               power_segment(d.left + (x0 - edges[0]), inf, sigma);
            return acc + 2.0 * std::pow(std::abs(u[i]), p) * ext;
        };
        total += ts.integrate(fx, x0, x1, 1e-13);
    }
    return total / p;
}

// Smallest eigenvalue of the p = 2 form: p·E(u) = uᵀMu over h·uᵀu = 1.
inline std::pair<double, Eigen::VectorXd> dense_principal_p2(const fracbif::KernelMatrix& kern) {
    const auto n = static_cast<Eigen::Index>(kern.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = kern.tail(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double k = kern.pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            m(i, j) = -2.0 * k;
            diag += k;
        }
        m(i, i) = 2.0 * diag;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double h = kern.mesh()->h();
    return {es.eigenvalues()(0) / h, es.eigenvectors().col(0)};
}

// Central differences of a scalar function of a vector.
inline std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = 1e-5 * std::max(1.0, std::abs(x[i]));
        const double xi = x[i];
        x[i] = xi + step;
        const double up = f(x);
        x[i] = xi - step;
        const double dn = f(x);
        x[i] = xi;
        g[i] = (up - dn) / (2.0 * step);
    }
    return g;
}

}  // namespace oracle
