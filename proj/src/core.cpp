#include "fracbif/core.hpp"

#include <algorithm>
#include <sstream>

namespace fracbif {

namespace {

double require(const std::optional<double>& v, const char* key) {
    if (!v) throw ConfigError(std::string("missing parameter '") + key + "'");
    if (!std::isfinite(*v)) throw ConfigError(std::string("parameter '") + key + "' is not finite");
    return *v;
}

}  // namespace

ProblemParams ProblemParams::with_lambda(double lam) const {
    RawParams raw{p, s, q, r, lam};
    return validate_params(raw);
}

ProblemParams validate_params(const RawParams& raw, LambdaPolicy policy) {
    ProblemParams out;
    out.p = require(raw.p, "p");
    out.s = require(raw.s, "s");
    out.q = require(raw.q, "q");
    out.r = require(raw.r, "r");
    out.lambda = require(raw.lambda, "lambda");

    std::ostringstream why;
    if (!(out.r > 1.0)) why << "need r > 1 (got r=" << out.r << "); ";
    if (!(out.q > out.r)) why << "need q > r (got q=" << out.q << ", r=" << out.r << "); ";
    if (!(out.p > out.q)) why << "need p > q (got p=" << out.p << ", q=" << out.q << "); ";
    if (!(out.s > 0.0 && out.s < 1.0)) why << "need 0 < s < 1 (got s=" << out.s << "); ";
    if (!(out.p * out.s < 1.0)) why << "need p*s < 1 (got p*s=" << out.p * out.s << "); ";
    if (out.lambda < 0.0) why << "need lambda >= 0; ";
    if (policy == LambdaPolicy::require_positive && !(out.lambda > 0.0)) why << "need lambda > 0; ";
    if (const auto msg = why.str(); !msg.empty()) {
        throw ConfigError("invalid parameters: " + msg.substr(0, msg.size() - 2));
    }

    out.c0 = out.lambda + 1.0;
    out.pstar = out.p / (1.0 - out.p * out.s);
    return out;
}

Mesh1D::Mesh1D(double a, double b, std::size_t n) : a_(a), b_(b) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
        throw ConfigError("mesh: need finite endpoints a < b");
    }
    if (n < 2) throw ConfigError("mesh: need at least 2 cells");
    h_ = (b - a) / static_cast<double>(n);
    edges_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) edges_[k] = a + h_ * static_cast<double>(k);
    edges_[n] = b;
    nodes_.resize(n);
    dist_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // midpoint of cell i; dist evaluated in index space so that it is exactly symmetric
        nodes_[i] = a + h_ * (static_cast<double>(i) + 0.5);
        const double left = static_cast<double>(i) + 0.5;
        const double right = static_cast<double>(n - i) - 0.5;
        dist_[i] = h_ * std::min(left, right);
    }
}

bool Mesh1D::same_as(const Mesh1D& other) const noexcept {
    return this == &other || (a_ == other.a_ && b_ == other.b_ && size() == other.size());
}

MeshPtr build_mesh(double a, double b, std::size_t n) { return std::make_shared<const Mesh1D>(a, b, n); }

GridFunction::GridFunction(MeshPtr mesh, double fill) : mesh_(std::move(mesh)) {
    if (!mesh_) throw std::invalid_argument("GridFunction: null mesh");
    values_.assign(mesh_->size(), fill);
}

GridFunction::GridFunction(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_) throw std::invalid_argument("GridFunction: null mesh");
    if (values_.size() != mesh_->size()) throw MeshMismatch("GridFunction: value count does not match mesh");
}

double GridFunction::sup_norm() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

bool GridFunction::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

GridFunction GridFunction::positive_part() const {
    GridFunction out(*this);
    for (double& v : out.values_) v = pos(v);
    return out;
}

GridFunction GridFunction::negative_part() const {
    GridFunction out(*this);
    for (double& v : out.values_) v = pos(-v);
    return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_same_mesh(*this, o, "operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_same_mesh(*this, o, "operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction pointwise_max(const GridFunction& a, const GridFunction& b) {
    require_same_mesh(a, b, "pointwise_max");
    GridFunction out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(a[i], b[i]);
    return out;
}

void require_same_mesh(const Mesh1D& a, const Mesh1D& b, const char* where) {
    if (!a.same_as(b)) throw MeshMismatch(std::string(where) + ": mesh mismatch");
}

void require_same_mesh(const GridFunction& a, const GridFunction& b, const char* where) {
    if (!a.mesh() || !b.mesh()) throw MeshMismatch(std::string(where) + ": grid function without mesh");
    require_same_mesh(*a.mesh(), *b.mesh(), where);
}

}  // namespace fracbif
