#pragma once

// Linearization spectra at the equilibria, domain/resolution rules derived
// from them, tail diagnostics of computed minimizers, the scaled test
// function energy, and the g -> 1+ sweep.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dwall/minimize.hpp"
#include "dwall/model.hpp"
#include "dwall/quadrature.hpp"

namespace dwall {

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

/// Roots of the linearization of the system at an equilibrium: the A-equation
/// gives eps lambda^4 = -c_A (four complex roots, closed under negation and
/// conjugation), the B-equation lambda^2 = c_B (a real pair). c_A and c_B are
/// the diagonal entries of the potential Hessian there.
struct SpectrumReport {
    EquilibriumTag equilibrium = EquilibriumTag::MPlus;
    std::array<std::complex<double>, 4> a_roots;
    std::array<double, 2> b_roots;
    bool hyperbolic = false;
};

inline SpectrumReport equilibrium_spectrum(const Params& params, EquilibriumTag which) {
    validate(params);
    SpectrumReport r;
    r.equilibrium = which;
    // Hessian diagonal at the equilibria: (2, g-1) at M-, (g-1, 2) at M+
    const double cA = (which == EquilibriumTag::MPlus) ? (params.g - 1.0) : 2.0;
    const double cB = (which == EquilibriumTag::MPlus) ? 2.0 : (params.g - 1.0);
    const double radius = std::pow(cA / params.eps, 0.25);
    for (int k = 0; k < 4; ++k) {
        const double angle = 0.25 * M_PI + 0.5 * M_PI * k;
        r.a_roots[static_cast<std::size_t>(k)] =
            radius * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    r.b_roots = {-std::sqrt(cB), std::sqrt(cB)};
    double min_re = std::abs(r.b_roots[0]);
    for (const auto& z : r.a_roots) min_re = std::min(min_re, std::abs(z.real()));
    r.hyperbolic = min_re > 0.0;
    return r;
}

/// Smallest |Re lambda| over both equilibria's spectra: the slowest approach
/// rate of the heteroclinic toward its limits.
inline double slowest_decay_rate(double eps, double g) {
    Params p;
    p.eps = eps;
    p.g = g;
    double m = std::numeric_limits<double>::infinity();
    for (EquilibriumTag tag : {EquilibriumTag::MMinus, EquilibriumTag::MPlus}) {
        const SpectrumReport s = equilibrium_spectrum(p, tag);
        for (const auto& z : s.a_roots) m = std::min(m, std::abs(z.real()));
        m = std::min(m, std::abs(s.b_roots[1]));
    }
    return m;
}

/// Domain rule: L large enough that the exponential clamp error is dead.
inline double recommended_L(double eps, double g) {
    return 20.0 / std::min(std::sqrt(g - 1.0), slowest_decay_rate(eps, g));
}

/// Resolution rule: at least 16 nodes per wavelength of the slow A-tail
/// oscillation (root magnitude ((g-1)/eps)^{1/4} at M+).
inline double recommended_h(double eps, double g) {
    return (2.0 * M_PI / 16.0) * std::pow(eps / (g - 1.0), 0.25);
}

inline int recommended_n(double eps, double g, double L) {
    int n = static_cast<int>(std::ceil(2.0 * L / recommended_h(eps, g)));
    n += n % 2;
    return std::max(16, n);
}

// ---------------------------------------------------------------------------
// test function energy
// ---------------------------------------------------------------------------

// shape functions of the circle-valued arctan profile
inline double testfn_theta(double x) { return 0.25 * M_PI + 0.5 * std::atan(x); }
inline double testfn_A1(double x) { return std::cos(testfn_theta(x)); }
inline double testfn_B1(double x) { return std::sin(testfn_theta(x)); }
inline double testfn_B1_prime(double x) { return std::cos(testfn_theta(x)) / (2.0 * (x * x + 1.0)); }
inline double testfn_A1_pp(double x) {
    const double t = testfn_theta(x);
    const double d2 = (x * x + 1.0) * (x * x + 1.0);
    return -std::cos(t) / (4.0 * d2) + std::sin(t) * x / d2;
}

/// The three parameter-free base integrals (I0, I1, I2) =
/// (int A1^2 B1^2, int B1'^2, int A1''^2), computed once.
inline const std::array<double, 3>& testfn_base_integrals() {
    static const std::array<double, 3> vals = [] {
        std::array<double, 3> v{};
        v[0] = integrate_line([](double x) { const double a = testfn_A1(x), b = testfn_B1(x); return a * a * b * b; }, 1e-12);
        v[1] = integrate_line([](double x) { const double d = testfn_B1_prime(x); return d * d; }, 1e-12);
        v[2] = integrate_line([](double x) { const double d = testfn_A1_pp(x); return d * d; }, 1e-12);
        return v;
    }();
    return vals;
}

/// J_{eps,g} of the gamma-dilated test function. The profile lies on the
/// circle A^2 + B^2 = 1, so the quartic part of P contributes nothing and
/// the energy separates into three scaled base integrals:
///   gamma^3 eps I2/2 + gamma I1/2 + gamma^{-1} (g-1) I0/2.
inline double testfn_energy(const Params& params, double gamma) {
    validate(params);
    if (!(gamma > 0.0)) throw std::invalid_argument("testfn_energy: gamma must be > 0");
    const auto& I = testfn_base_integrals();
    return 0.5 * gamma * gamma * gamma * params.eps * I[2] + 0.5 * gamma * I[1] +
           0.5 * (params.g - 1.0) / gamma * I[0];
}

// ---------------------------------------------------------------------------
// tail diagnostics
// ---------------------------------------------------------------------------

/// Fitted exponential rates of the approach to the equilibria over the outer
/// 25% of each side, and the number of sign changes of A in the right
/// window. A-rates fit the log of the oscillation envelope (|A - clamp| at
/// its local maxima); B-rates fit log|B - clamp| at the nodes. Fits use the
/// monotone-decreasing-outward prefix above 1e-14 so that values drowned in
/// the discretization/solver floor are excluded; if a window holds too few
/// usable points its inner edge moves toward the center (underflow shrink).
/// Rates that still cannot be fitted are NaN.
struct TailFit {
    double a_rate_left = std::numeric_limits<double>::quiet_NaN();
    double a_rate_right = std::numeric_limits<double>::quiet_NaN();
    double b_rate_left = std::numeric_limits<double>::quiet_NaN();
    double b_rate_right = std::numeric_limits<double>::quiet_NaN();
    int a_sign_changes_right = 0;
};

namespace detail {

struct Sample {
    double x, v;
};

// least-squares slope of log v against x over the monotone prefix; samples
// are ordered from the window's inner edge outward
inline double fit_log_slope(const std::vector<Sample>& pts, std::size_t min_pts) {
    std::vector<Sample> kept;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : pts) {
        if (s.v < 1e-14 || s.v >= prev) break;
        kept.push_back(s);
        prev = s.v;
    }
    if (kept.size() < min_pts) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : kept) {
        const double y = std::log(s.v);
        sx += s.x;
        sy += y;
        sxx += s.x * s.x;
        sxy += s.x * y;
    }
    const double m = static_cast<double>(kept.size());
    return std::abs((m * sxy - sx * sy) / (m * sxx - sx * sx));
}

// collect |field - clamp| at nodes (or at envelope peaks) on one side,
// ordered inner -> outer, shrinking the inner edge while the fit fails
template <typename Collect>
inline double shrinking_fit(double L, Collect collect, std::size_t min_pts) {
    double inner = 0.5 * L;
    while (inner > 0.05 * L) {
        const double r = fit_log_slope(collect(inner), min_pts);
        if (std::isfinite(r)) return r;
        inner *= 0.8;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline int sign_changes(const Profile& p, double lo, double hi) {
    int count = 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        if (p.x[i] < lo || p.x[i] > hi) continue;
        const double s = (p.A[i] > 0.0) ? 1.0 : (p.A[i] < 0.0 ? -1.0 : 0.0);
        if (s == 0.0) continue;
        if (prev != 0.0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

inline TailFit tail_fit(const Profile& p, const Params& params) {
    detail::check_dims(p, params, "tail_fit");
    const double L = params.L;
    const std::size_t N = p.size();

    auto node_samples = [&](bool right, const std::vector<double>& f, double clamp) {
        return [&, right, clamp](double inner) {
            std::vector<detail::Sample> pts;
            if (right) {
                for (std::size_t i = 0; i < N; ++i)
                    if (p.x[i] >= inner) pts.push_back({p.x[i], std::abs(f[i] - clamp)});
            } else {
                for (std::size_t i = N; i-- > 0;)
                    if (p.x[i] <= -inner) pts.push_back({p.x[i], std::abs(f[i] - clamp)});
            }
            return pts;
        };
    };
    auto peak_samples = [&](bool right, const std::vector<double>& f, double clamp) {
        return [&, right, clamp](double inner) {
            std::vector<detail::Sample> pts;
            auto peak = [&](std::size_t i) {
                const double v = std::abs(f[i] - clamp);
                return v > std::abs(f[i - 1] - clamp) && v > std::abs(f[i + 1] - clamp);
            };
            if (right) {
                for (std::size_t i = 1; i + 1 < N; ++i)
                    if (p.x[i] >= inner && peak(i)) pts.push_back({p.x[i], std::abs(f[i] - clamp)});
            } else {
                for (std::size_t i = N - 1; i-- > 1;)
                    if (p.x[i] <= -inner && peak(i)) pts.push_back({p.x[i], std::abs(f[i] - clamp)});
            }
            return pts;
        };
    };

    TailFit out;
    out.a_rate_right = detail::shrinking_fit(L, peak_samples(true, p.A, 0.0), 2);
    out.a_rate_left = detail::shrinking_fit(L, peak_samples(false, p.A, 1.0), 2);
    out.b_rate_right = detail::shrinking_fit(L, node_samples(true, p.B, 1.0), 4);
    out.b_rate_left = detail::shrinking_fit(L, node_samples(false, p.B, 0.0), 4);
    out.a_sign_changes_right = sign_changes(p, 0.5 * L, L);
    return out;
}

// ---------------------------------------------------------------------------
// g -> 1+ sweep
// ---------------------------------------------------------------------------

inline double circle_sup(const Profile& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        s = std::max(s, std::abs(p.A[i] * p.A[i] + p.B[i] * p.B[i] - 1.0));
    return s;
}

struct SweepRecord {
    double g = 0.0;
    double min_energy = 0.0;
    double testfn_bound = 0.0;
    double circle_sup = 0.0;
    bool converged = false;
};

struct SweepPoint {
    SweepRecord record;
    Params params;
    SolveResult solve;
};

/// Domain/grid for a sweep solve: the rule-based L with a floor of 30, and a
/// step fine enough for both the slow tail oscillation and the O(1) wall.
inline Params sweep_params(double eps, double g) {
    Params p;
    p.eps = eps;
    p.g = g;
    p.L = std::max(30.0, recommended_L(eps, g));
    const double h = std::min(0.05, recommended_h(eps, g));
    int n = static_cast<int>(std::ceil(2.0 * p.L / h));
    n += n % 2;
    p.n = std::max(16, n);
    return p;
}

/// Continuation-driven solves along a decreasing g-list, warm-started point
/// to point. Stops early if a solve fails to converge.
inline std::vector<SweepPoint> g_sweep(double eps, const std::vector<double>& g_list, const SolveOptions& opts) {
    if (g_list.empty()) throw std::invalid_argument("g_sweep: empty g list");
    for (std::size_t i = 0; i < g_list.size(); ++i) {
        if (!(g_list[i] > 1.0)) throw std::invalid_argument("g_sweep: all g must be > 1");
        if (i > 0 && !(g_list[i] < g_list[i - 1]))
            throw std::invalid_argument("g_sweep: g list must be strictly decreasing");
    }
    std::vector<SweepPoint> out;
    SolveOptions step_opts = opts;
    const Profile* carry = nullptr;
    for (double g : g_list) {
        const Params p = sweep_params(eps, g);
        if (carry != nullptr) {
            step_opts.init = InitKind::Given;
            step_opts.given = resample(*carry, p);
        }
        SweepPoint pt;
        pt.params = p;
        pt.solve = minimize(p, step_opts);
        pt.record.g = g;
        pt.record.min_energy = pt.solve.energy.total;
        pt.record.testfn_bound = testfn_energy(p, std::sqrt(g - 1.0));
        pt.record.circle_sup = circle_sup(pt.solve.profile);
        pt.record.converged = pt.solve.converged;
        out.push_back(std::move(pt));
        if (!out.back().record.converged) break;
        carry = &out.back().solve.profile;
    }
    return out;
}

}  // namespace dwall
