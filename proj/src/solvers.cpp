#include "fracbif/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace fracbif {

namespace {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Relative size of objective changes that double rounding no longer resolves.
constexpr double kObjectiveNoise = 1e-13;

struct StepOutcome {
    bool accepted = false;
    double alpha = 0.0;
    double value = 0.0;
};

// Backtracking from `alpha`. `eval(alpha)` fills the trial point and returns its objective;
// `residual_at()` is the gradient sup-norm at the last trial point. Once the predicted
// Armijo decrease is below the objective's rounding level, a step is accepted if the
// objective does not rise beyond that level and the residual drops.
template <class Eval, class Residual>
StepOutcome line_search(double value, double slope, double residual, double alpha, const SolverOptions& opts,
                        Eval&& eval, Residual&& residual_at) {
    const double noise = kObjectiveNoise * std::max(1.0, std::abs(value));
    for (int bt = 0; bt < 80; ++bt) {
        const double v = eval(alpha);
        if (std::isfinite(v)) {
            if (v <= value + opts.armijo * alpha * slope) return {true, alpha, v};
            if (-opts.armijo * alpha * slope <= noise && v <= value + noise && residual_at() < residual) {
                return {true, alpha, v};
            }
        }
        alpha *= opts.backtrack;
    }
    return {false, alpha, value};
}

/// Φ and ∇Φ on raw nodal arrays.
class Functional {
public:
    Functional(const KernelMatrix& kern, const ReactionModel& model)
        : kern_(kern), model_(model), law_(model.params().p), h_(kern.mesh()->h()) {}

    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] std::size_t size() const noexcept { return kern_.size(); }

    [[nodiscard]] double value(std::span<const double> u) const {
        const double e = detail::seminorm_energy(kern_, u, law_);
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) acc += model_.F(i, u[i]);
        return e - h_ * acc;
    }

    void gradient(std::span<const double> u, std::span<double> g) const {
        detail::apply_operator(kern_, u, law_, g);
        for (std::size_t i = 0; i < u.size(); ++i) g[i] -= h_ * model_.f(i, u[i]);
    }

    [[nodiscard]] std::vector<double> gradient(std::span<const double> u) const {
        std::vector<double> g(u.size());
        gradient(u, g);
        return g;
    }

private:
    const KernelMatrix& kern_;
    const ReactionModel& model_;
    detail::PowerLaw law_;
    double h_;
};

struct DescentState {
    std::vector<double> u;
    double energy = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool stalled = false;
};

constexpr double kTrustFraction = 0.25;
constexpr double kTrustFloor = 1e-2;

// Armijo backtracking along -∇Φ/h (the gradient in the discrete L² metric), with a
// Barzilai–Borwein trial step. Energy is non-increasing by construction.
DescentState descend(const Functional& fn, std::vector<double> u, const SolverOptions& opts, int budget,
                     std::vector<double>* trace) {
    const std::size_t n = u.size();
    const double h = fn.h();
    DescentState st;
    st.energy = fn.value(u);
    if (!std::isfinite(st.energy)) throw SolverError("minimize: non-finite energy at start");
    std::vector<double> g = fn.gradient(u);
    std::vector<double> g_old(n), u_old(n), trial(n), d(n);
    if (trace) trace->push_back(st.energy);

    double alpha = 0.0;
    bool have_history = false;
    for (int it = 0;; ++it) {
        st.residual = sup_norm(g);
        if (st.residual <= convergence_threshold(opts, st.energy)) {
            st.converged = true;
            break;
        }
        if (it >= budget) break;

        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] / h;
        const double slope = dot(g, d);

        if (have_history) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = u[i] - u_old[i];
                const double y = (g[i] - g_old[i]) / h;
                ss += s * s;
                sy += s * y;
            }
            alpha = sy > 0.0 ? ss / sy : 2.0 * alpha;
        } else {
            alpha = opts.step_max;
        }
        // a bounded relative change per step keeps the iterate in the basin it started in
        const double cap = kTrustFraction * std::max(sup_norm(u), kTrustFloor) / std::max(sup_norm(d), 1e-300);
        alpha = std::clamp(std::min(alpha, cap), opts.step_min, opts.step_max);

        std::vector<double> g_trial(n);
        const auto step = line_search(
            st.energy, slope, st.residual, alpha, opts,
            [&](double a) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + a * d[i];
                return fn.value(trial);
            },
            [&] {
                fn.gradient(trial, g_trial);
                return sup_norm(g_trial);
            });
        if (!step.accepted) {
            st.stalled = true;
            break;
        }
        alpha = step.alpha;
        const double e_new = step.value;
        u_old.swap(u);
        u.swap(trial);
        g_old.swap(g);
        fn.gradient(u, g);
        st.energy = e_new;
        have_history = true;
        ++st.iterations;
        if (trace) trace->push_back(st.energy);
    }
    st.u = std::move(u);
    return st;
}

SolveReport make_report(const MeshPtr& mesh, DescentState st, Classification cls) {
    SolveReport rep;
    rep.solution = GridFunction(mesh, std::move(st.u));
    rep.energy = st.energy;
    rep.residual = st.residual;
    rep.iterations = st.iterations;
    rep.converged = st.converged;
    rep.classification = cls;
    rep.plain_residual = st.residual;
    if (st.stalled && !st.converged) rep.warnings.emplace_back("line search stalled before reaching tolerance");
    return rep;
}

double plain_residual(const KernelMatrix& kern, const ProblemParams& params, std::span<const double> u) {
    const auto model = ReactionModel::plain(params);
    return sup_norm(Functional(kern, model).gradient(u));
}

}  // namespace

const char* to_string(Classification c) noexcept {
    switch (c) {
        case Classification::zero: return "zero";
        case Classification::minimizer: return "minimizer";
        case Classification::saddle: return "saddle";
        case Classification::pinned: return "pinned";
    }
    return "?";
}

double convergence_threshold(const SolverOptions& opts, double energy) noexcept {
    return opts.tol * std::max(1.0, std::abs(energy));
}

double total_energy(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u) {
    require_same_mesh(*kern.mesh(), *u.mesh(), "total_energy");
    model.require_mesh(*kern.mesh(), "total_energy");
    return Functional(kern, model).value(u.values());
}

GridFunction total_gradient(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u) {
    require_same_mesh(*kern.mesh(), *u.mesh(), "total_gradient");
    model.require_mesh(*kern.mesh(), "total_gradient");
    GridFunction g(u.mesh());
    Functional(kern, model).gradient(u.values(), g.values());
    return g;
}

SolveReport minimize(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u0,
                     const SolverOptions& opts) {
    return minimize(kern, model, u0, opts, nullptr);
}

SolveReport minimize(const KernelMatrix& kern, const ReactionModel& model, const GridFunction& u0,
                     const SolverOptions& opts, std::vector<double>* energy_trace) {
    require_same_mesh(*kern.mesh(), *u0.mesh(), "minimize");
    model.require_mesh(*kern.mesh(), "minimize");
    if (!u0.all_finite()) throw SolverError("minimize: non-finite initial guess");

    const Functional fn(kern, model);
    std::vector<double> u(u0.vec());
    int used = 0;
    DescentState st = descend(fn, std::move(u), opts, opts.max_iter, energy_trace);
    used += st.iterations;

    // Φ(u⁺) ≤ Φ(u) for the plain reaction, so negative parts are never part of a minimizer.
    const bool plain = model.variant() == ReactionModel::Variant::plain;
    for (int round = 0; plain && round < 20; ++round) {
        if (*std::min_element(st.u.begin(), st.u.end()) >= 0.0) break;
        for (double& v : st.u) v = pos(v);
        st = descend(fn, std::move(st.u), opts, std::max(0, opts.max_iter - used), energy_trace);
        used += st.iterations;
    }
    st.iterations = used;

    Classification cls = Classification::minimizer;
    if (model.variant() == ReactionModel::Variant::hat) {
        cls = Classification::pinned;
    } else if (sup_norm(st.u) <= opts.zero_threshold) {
        cls = Classification::zero;
    }
    SolveReport rep = make_report(kern.mesh(), std::move(st), cls);
    if (!plain) rep.plain_residual = plain_residual(kern, model.params(), rep.solution.values());
    return rep;
}

double subsolution_defect(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& u) {
    const auto model = ReactionModel::plain(params);
    const auto g = total_gradient(kern, model, u);
    double worst = 0.0;
    for (double v : g.values()) worst = std::max(worst, v);
    return worst;
}

SolveReport solve_above(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& subsol,
                        const SolverOptions& opts) {
    require_same_mesh(*kern.mesh(), *subsol.mesh(), "solve_above");
    std::vector<std::string> warnings;
    const double defect = subsolution_defect(kern, params, subsol);
    const double anchor_energy = total_energy(kern, ReactionModel::plain(params), subsol);
    if (defect > convergence_threshold(opts, anchor_energy) * 10.0) {
        std::ostringstream msg;
        msg << "anchor is not a discrete subsolution (defect " << std::setprecision(3) << defect << ")";
        warnings.push_back(msg.str());
    }

    const auto model = ReactionModel::hat(params, subsol);
    SolveReport rep = minimize(kern, model, subsol, opts);
    rep.classification = Classification::pinned;

    double violation = 0.0;
    for (std::size_t i = 0; i < subsol.size(); ++i) violation = std::max(violation, subsol[i] - rep.solution[i]);
    // the hat truncation only agrees with f_λ above the anchor
    if (violation > 1e-6 * std::max(1.0, subsol.sup_norm())) {
        throw SolverError("solve_above: result falls below the anchor by " + std::to_string(violation) +
                          " (anchor is not a subsolution)");
    }
    rep.energy = total_energy(kern, ReactionModel::plain(params), rep.solution);
    rep.converged = rep.converged && rep.plain_residual <= convergence_threshold(opts, rep.energy) * 10.0;
    for (auto& w : warnings) rep.warnings.push_back(std::move(w));
    return rep;
}

EigenResult principal_eigenpair(const KernelMatrix& kern, double p, const SolverOptions& opts) {
    const auto& mesh = kern.mesh();
    const std::size_t n = kern.size();
    const double h = mesh->h();
    const detail::PowerLaw law(p);

    auto normalize = [&](std::vector<double>& u) {
        double m = 0.0;
        for (double v : u) m += law.abs_pow(v);
        const double c = std::pow(h * m, -1.0 / p);
        for (double& v : u) v *= c;
    };
    // Rayleigh quotient and its gradient on the normalized sphere
    auto quotient = [&](std::span<const double> u) {
        double m = 0.0;
        for (double v : u) m += law.abs_pow(v);
        return p * detail::seminorm_energy(kern, u, law) / (h * m);
    };
    auto grad = [&](std::span<const double> u, double rho, std::span<double> g) {
        detail::apply_operator(kern, u, law, g);
        for (std::size_t i = 0; i < n; ++i) g[i] -= rho * h * law.odd(u[i]);
    };

    std::vector<double> u(n);
    const auto dist = mesh->dist();
    for (std::size_t i = 0; i < n; ++i) u[i] = std::pow(dist[i], kern.sigma() / p);
    normalize(u);
    double rho = quotient(u);
    std::vector<double> g(n), g_old(n), u_old(n), trial(n);
    grad(u, rho, g);

    EigenResult res;
    double alpha = 1.0 / std::max(rho, 1e-300);
    bool have_history = false;
    for (int it = 0;; ++it) {
        res.residual = sup_norm(g) / h;
        if (res.residual <= opts.tol * rho) {
            res.converged = true;
            break;
        }
        if (it >= opts.max_iter) break;
        if (have_history) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = u[i] - u_old[i];
                ss += s * s;
                sy += s * (g[i] - g_old[i]) / h;
            }
            if (sy > 0.0) alpha = ss / sy;
        }
        const double gg = dot(g, g) / h;
        std::vector<double> g_trial(n);
        const auto step = line_search(
            rho, -gg, sup_norm(g), alpha, opts,
            [&](double a) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - a * g[i] / h;
                normalize(trial);
                return quotient(trial);
            },
            [&] {
                grad(trial, quotient(trial), g_trial);
                return sup_norm(g_trial);
            });
        if (!step.accepted) break;
        alpha = step.alpha;
        const double rho_new = step.value;
        u_old.swap(u);
        u.swap(trial);
        g_old.swap(g);
        rho = rho_new;
        grad(u, rho, g);
        have_history = true;
        ++res.iterations;
    }
    // |u| has the same denominator and no larger numerator
    for (double& v : u) v = std::abs(v);
    res.value = quotient(u);
    res.eigenfunction = GridFunction(mesh, std::move(u));
    if (!res.converged && res.iterations >= opts.max_iter) {
        throw SolverError("principal_eigenpair: iteration cap reached (residual " + std::to_string(res.residual) + ")");
    }
    return res;
}

namespace {

std::vector<double> lerp(std::span<const double> a, std::span<const double> b, double t) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
    return out;
}

// Redistribute points 1..anchor-1 equally by arclength along the polyline path[0..anchor].
void reparametrize(std::vector<std::vector<double>>& path, std::size_t anchor) {
    std::vector<double> cum(anchor + 1, 0.0);
    for (std::size_t k = 1; k <= anchor; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < path[k].size(); ++i) {
            const double d = path[k][i] - path[k - 1][i];
            acc += d * d;
        }
        cum[k] = cum[k - 1] + std::sqrt(acc);
    }
    const double total = cum[anchor];
    if (!(total > 0.0)) return;
    std::vector<std::vector<double>> moved(anchor + 1);
    std::size_t seg = 1;
    for (std::size_t k = 1; k < anchor; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(anchor);
        while (seg < anchor && cum[seg] < target) ++seg;
        const double len = cum[seg] - cum[seg - 1];
        const double t = len > 0.0 ? (target - cum[seg - 1]) / len : 0.0;
        moved[k] = lerp(path[seg - 1], path[seg], t);
    }
    for (std::size_t k = 1; k < anchor; ++k) path[k] = std::move(moved[k]);
}

struct RayPeak {
    bool found = false;
    double t = 0.0;
    double value = 0.0;
};

// Local maximum of t ↦ Φ(t·v) near t_guess, located as a + to − sign change of the
// directional derivative ∇Φ(t·v)·v and refined by Illinois regula falsi.
RayPeak ray_peak(const Functional& fn, std::span<const double> v, double t_guess, double slope_tol) {
    const std::size_t n = v.size();
    std::vector<double> x(n), g(n);
    auto slope = [&](double t) {
        for (std::size_t i = 0; i < n; ++i) x[i] = t * v[i];
        fn.gradient(x, g);
        return dot(g, v);
    };
    double lo = t_guess, hi = t_guess;
    double slo = slope(t_guess), shi = slo;
    constexpr double grow = 1.1;
    bool bracketed = false;
    if (slo > 0.0) {
        for (int k = 0; k < 200 && !bracketed; ++k) {
            lo = hi;
            slo = shi;
            hi *= grow;
            shi = slope(hi);
            bracketed = shi <= 0.0;
        }
    } else {
        for (int k = 0; k < 400 && !bracketed; ++k) {
            hi = lo;
            shi = slo;
            lo /= grow;
            slo = slope(lo);
            bracketed = slo > 0.0;
        }
    }
    RayPeak out;
    if (!bracketed) return out;

    int side = 0;
    double t = lo;
    for (int k = 0; k < 200; ++k) {
        t = (lo * shi - hi * slo) / (shi - slo);
        if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
        const double st = slope(t);
        if (std::abs(st) <= slope_tol || hi - lo <= 4e-16 * hi) break;
        if (st > 0.0) {
            lo = t;
            slo = st;
            if (side == 1) shi *= 0.5;
            side = 1;
        } else {
            hi = t;
            shi = st;
            if (side == -1) slo *= 0.5;
            side = -1;
        }
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = t * v[i];
    out.found = true;
    out.t = t;
    out.value = fn.value(x);
    return out;
}

}  // namespace

SolveReport find_saddle(const KernelMatrix& kern, const ProblemParams& params, const GridFunction& u_big,
                        const SolverOptions& opts, MountainPassPath* final_path) {
    require_same_mesh(*kern.mesh(), *u_big.mesh(), "find_saddle");
    const auto& mesh = kern.mesh();
    const std::size_t n = kern.size();
    const double h = mesh->h();
    const auto model = ReactionModel::tilde(params, u_big);
    const Functional fn(kern, model);
    std::vector<std::string> warnings;

    const std::vector<double> zero(n, 0.0);
    const std::vector<double> top(u_big.vec());
    const double e_top = fn.value(top);

    // both endpoints must be strict local minima of the truncated energy
    {
        std::mt19937_64 rng(opts.seed ^ 0x5eedULL);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int k = 0; k < 4; ++k) {
            std::vector<double> probe0(n), probe1(n);
            const double amp = 1e-3 * u_big.sup_norm();
            for (std::size_t i = 0; i < n; ++i) {
                const double xi = unif(rng);
                probe0[i] = amp * xi;
                probe1[i] = top[i] + amp * (2.0 * xi - 1.0);
            }
            if (fn.value(probe0) <= 0.0) warnings.emplace_back("probe: 0 may not be a strict local minimum");
            if (fn.value(probe1) < e_top) warnings.emplace_back("probe: u_big may not be a local minimum");
        }
    }

    // Straight-line initial path. When u_big lies deep below level 0 the barrier occupies a
    // short initial stretch of the segment; the path points are spread over that stretch
    // (up to the point after which the segment stays below 0) and joined to u_big by one
    // fixed straight segment.
    const auto path_size = static_cast<std::size_t>(std::max(opts.path_points, 5));
    double t_anchor = 1.0;
    if (e_top < 0.0) {
        constexpr int scan = 2000;
        std::vector<double> ray(scan + 1);
        for (int k = 0; k <= scan; ++k) ray[k] = fn.value(lerp(zero, top, static_cast<double>(k) / scan));
        int last_nonneg = 0;
        for (int k = 1; k <= scan; ++k) {
            if (ray[k] >= 0.0) last_nonneg = k;
        }
        t_anchor = std::min(1.0, 2.0 * static_cast<double>(last_nonneg + 1) / scan);
    }
    std::size_t anchor = path_size - 1;
    std::vector<std::vector<double>> path(path_size);
    if (t_anchor < 1.0) {
        anchor = path_size - 2;
        for (std::size_t k = 0; k <= anchor; ++k) {
            path[k] = lerp(zero, top, t_anchor * static_cast<double>(k) / static_cast<double>(anchor));
        }
        path.back() = top;
    } else {
        for (std::size_t k = 0; k < path_size; ++k) {
            path[k] = lerp(zero, top, static_cast<double>(k) / static_cast<double>(path_size - 1));
        }
    }
    std::vector<double> energies(path_size);
    for (std::size_t k = 0; k < path_size; ++k) energies[k] = fn.value(path[k]);

    auto peak_index = [&] {
        std::size_t best = 1;
        for (std::size_t k = 2; k < anchor; ++k) {
            if (energies[k] > energies[best]) best = k;
        }
        return best;
    };

    int iterations = 0;
    double alpha = 1.0;
    std::vector<double> g(n), trial(n);
    std::size_t peak = peak_index();
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;

    // Stage 1: push the highest path point downhill and re-equispace.
    double mark_res = std::numeric_limits<double>::infinity();
    int mark_iter = 0;
    double first_res = -1.0;
    for (; iterations < std::min(opts.path_iter, opts.max_iter); ++iterations) {
        peak = peak_index();
        auto& w = path[peak];
        fn.gradient(w, g);
        residual = sup_norm(g);
        if (first_res < 0.0) first_res = residual;
        if (residual <= convergence_threshold(opts, energies[peak])) {
            converged = true;
            break;
        }
        if (residual <= 1e-3 * first_res) break;
        // a path of finitely many points stops improving once it straddles the saddle
        if (residual < 0.5 * mark_res) {
            mark_res = residual;
            mark_iter = iterations;
        } else if (iterations - mark_iter > 50) {
            break;
        }
        const double gg = dot(g, g) / h;
        alpha = std::min(alpha * 2.0, opts.step_max);
        bool accepted = false;
        for (int bt = 0; bt < 100; ++bt) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] - alpha * g[i] / h;
            if (fn.value(trial) <= energies[peak] - opts.armijo * alpha * gg) {
                accepted = true;
                break;
            }
            alpha *= opts.backtrack;
        }
        if (!accepted) break;
        const double step = opts.damping * alpha;
        for (std::size_t i = 0; i < n; ++i) w[i] -= step * g[i] / h;
        reparametrize(path, anchor);
        for (std::size_t k = 1; k < anchor; ++k) energies[k] = fn.value(path[k]);
    }
    peak = peak_index();
    if (final_path) {
        final_path->points.clear();
        for (const auto& pt : path) final_path->points.emplace_back(mesh, pt);
        final_path->energies = energies;
        final_path->peak = peak;
    }
    std::vector<double> x = path[peak];

    // Stage 2: local minimax refinement. J(v) = max_t Φ(t v) over the ray through the
    // current peak; J is decreased along the gradient component orthogonal to the ray, so
    // that at a minimizer both the radial and tangential gradient vanish.
    if (!converged) {
        double t = norm2(x);
        std::vector<double> v(x);
        for (double& c : v) c /= t;
        const double slope_tol = 1e-3 * opts.tol;
        auto pk = ray_peak(fn, v, t, slope_tol);
        if (!pk.found) throw SolverError("find_saddle: saddle-not-found (no energy barrier along the path ray)");
        t = pk.t;
        double level = pk.value;

        std::vector<double> d(n), d_old(n), x_old(n), v_trial(n);
        auto tangential = [&](std::span<const double> grad, std::span<const double> dir, std::span<double> out) {
            double gv = 0.0;
            for (std::size_t i = 0; i < n; ++i) gv += grad[i] * dir[i];
            for (std::size_t i = 0; i < n; ++i) out[i] = -(grad[i] - gv * dir[i]) / h;
        };
        for (std::size_t i = 0; i < n; ++i) x[i] = t * v[i];
        fn.gradient(x, g);
        bool have_history = false;
        double beta = 0.0;
        RayPeak trial_peak;
        std::vector<double> g_trial(n);
        for (; iterations < opts.max_iter; ++iterations) {
            residual = sup_norm(g);
            if (residual <= convergence_threshold(opts, level)) {
                converged = true;
                break;
            }
            tangential(g, v, d);
            const double slope = dot(g, d);
            if (have_history) {
                double ss = 0.0, sy = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double s = x[i] - x_old[i];
                    ss += s * s;
                    sy += s * (d_old[i] - d[i]);
                }
                if (sy > 0.0) beta = ss / sy;
            } else {
                beta = 0.1 * t / std::max(norm2(d), 1e-300);
            }
            beta = std::clamp(beta, opts.step_min, opts.step_max);
            const auto step = line_search(
                level, slope, residual, beta, opts,
                [&](double a) {
                    for (std::size_t i = 0; i < n; ++i) v_trial[i] = v[i] + a * d[i] / t;
                    const double nv = norm2(v_trial);
                    for (double& c : v_trial) c /= nv;
                    trial_peak = ray_peak(fn, v_trial, t, slope_tol);
                    return trial_peak.found ? trial_peak.value : std::numeric_limits<double>::infinity();
                },
                [&] {
                    for (std::size_t i = 0; i < n; ++i) trial[i] = trial_peak.t * v_trial[i];
                    fn.gradient(trial, g_trial);
                    return sup_norm(g_trial);
                });
            if (!step.accepted) break;
            beta = step.alpha;
            x_old = x;
            d_old = d;
            v = v_trial;
            t = trial_peak.t;
            level = trial_peak.value;
            for (std::size_t i = 0; i < n; ++i) x[i] = t * v[i];
            fn.gradient(x, g);
            have_history = true;
        }
        residual = sup_norm(g);
    }

    SolveReport rep;
    rep.energy = fn.value(x);
    rep.residual = residual;
    rep.iterations = iterations;
    rep.classification = Classification::saddle;
    rep.solution = GridFunction(mesh, x);
    rep.warnings = std::move(warnings);

    const double sep = std::max(1e3 * convergence_threshold(opts, rep.energy), opts.zero_threshold);
    if (rep.solution.sup_norm() <= sep || (rep.solution - u_big).sup_norm() <= sep) {
        throw SolverError("find_saddle: saddle-not-found (mountain-pass path collapsed onto an endpoint)");
    }
    // 0 ≤ v ≤ u_big makes the truncation inactive; check the untruncated equation
    rep.plain_residual = plain_residual(kern, params, x);
    rep.energy = total_energy(kern, ReactionModel::plain(params), rep.solution);
    rep.converged = converged && rep.plain_residual <= 10.0 * convergence_threshold(opts, rep.energy);
    if (converged && !rep.converged) rep.warnings.emplace_back("residual check failed after removing the truncation");
    if (!converged) rep.warnings.emplace_back("saddle refinement did not reach tolerance");
    return rep;
}

std::vector<GridFunction> random_positive_starts(const MeshPtr& mesh, double s, int count, double amp_lo,
                                                 double amp_hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto dist = mesh->dist();
    const double dmax = *std::max_element(dist.begin(), dist.end());
    std::vector<GridFunction> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    const double llo = std::log(amp_lo), lhi = std::log(amp_hi);
    for (int k = 0; k < count; ++k) {
        const double amp = std::exp(llo + (lhi - llo) * unif(rng));
        GridFunction u(mesh);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = amp * std::pow(dist[i] / dmax, s) * (0.5 + unif(rng));
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<SolveReport> multi_start_minimize(const KernelMatrix& kern, const ProblemParams& params,
                                              const std::vector<GridFunction>& starts, const SolverOptions& opts) {
    const auto model = ReactionModel::plain(params);
    std::vector<SolveReport> out;
    out.reserve(starts.size());
    for (const auto& u0 : starts) out.push_back(minimize(kern, model, u0, opts));
    return out;
}

}  // namespace fracbif
