#include "fracbif/reaction.hpp"

#include <algorithm>
#include <cmath>

namespace fracbif {

namespace {

double pow_pos(double t, double e) noexcept { return t > 0.0 ? std::pow(t, e) : 0.0; }

}  // namespace

ReactionModel::ReactionModel(const ProblemParams& params, Variant variant, std::optional<GridFunction> profile)
    : params_(params), variant_(variant), profile_(std::move(profile)), c0_(params.lambda + 1.0) {
    if (profile_) {
        if (!profile_->all_finite()) throw std::invalid_argument("ReactionModel: non-finite truncation profile");
        // plain part: λ t^{q-1} + t^{r-1} ≤ (λ+1)(1 + t^{q-1})
        double extra = 0.0;
        if (variant_ == Variant::hat) {
            for (double a : profile_->values()) extra = std::max(extra, std::abs(f_plain(a)));
        } else {
            extra = params_.lambda * pow_pos(profile_->max(), params_.q - 1.0) + 1.0;
        }
        c0_ = std::max(c0_, extra);
    }
}

ReactionModel ReactionModel::plain(const ProblemParams& params) { return {params, Variant::plain, std::nullopt}; }

ReactionModel ReactionModel::hat(const ProblemParams& params, GridFunction anchor) {
    return {params, Variant::hat, std::move(anchor)};
}

ReactionModel ReactionModel::tilde(const ProblemParams& params, GridFunction ceiling) {
    return {params, Variant::tilde, std::move(ceiling)};
}

double ReactionModel::f_plain(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    return params_.lambda * std::pow(t, params_.q - 1.0) - std::pow(t, params_.r - 1.0);
}

double ReactionModel::F_plain(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    return params_.lambda * std::pow(t, params_.q) / params_.q - std::pow(t, params_.r) / params_.r;
}

double ReactionModel::f(std::size_t node, double t) const {
    switch (variant_) {
        case Variant::plain:
            return f_plain(t);
        case Variant::hat: {
            const double a = (*profile_)[node];
            return t <= a ? f_plain(a) : f_plain(t);
        }
        case Variant::tilde: {
            const double c = (*profile_)[node];
            if (t < c) return f_plain(t);
            return params_.lambda * pow_pos(c, params_.q - 1.0) - pow_pos(t, params_.r - 1.0);
        }
    }
    return 0.0;
}

double ReactionModel::F(std::size_t node, double t) const {
    switch (variant_) {
        case Variant::plain:
            return F_plain(t);
        case Variant::hat: {
            const double a = (*profile_)[node];
            const double fa = f_plain(a);
            if (t <= a) return fa * t;
            return fa * a + F_plain(t) - F_plain(a);
        }
        case Variant::tilde: {
            const double c = (*profile_)[node];
            if (t < c) return F_plain(t);
            const double slope = params_.lambda * pow_pos(c, params_.q - 1.0);
            return F_plain(c) + slope * (t - c) - (pow_pos(t, params_.r) - pow_pos(c, params_.r)) / params_.r;
        }
    }
    return 0.0;
}

void ReactionModel::require_mesh(const Mesh1D& mesh, const char* where) const {
    if (profile_) require_same_mesh(mesh, *profile_->mesh(), where);
}

const char* to_string(ReactionModel::Variant v) noexcept {
    switch (v) {
        case ReactionModel::Variant::plain: return "plain";
        case ReactionModel::Variant::hat: return "hat";
        case ReactionModel::Variant::tilde: return "tilde";
    }
    return "?";
}

double sign_threshold_delta(const ProblemParams& params) {
    if (!(params.lambda > 0.0)) throw std::invalid_argument("sign_threshold_delta: need lambda > 0");
    return std::pow(params.lambda, -1.0 / (params.q - params.r));
}

double nonexistence_bound(const ProblemParams& /*params*/, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("nonexistence_bound: need eps > 0");
    return std::min(1.0, eps);
}

}  // namespace fracbif
