#pragma once

// Discretization of the energy
//
//   J_eps(A,B) = int ( eps/2 A''^2 + 1/2 B'^2 + P(A,B) ) dx
//
// on the clamped grid. A'' uses the 3-point second difference and B' the
// central difference, both with ghost values outside [-L, L] fixed to the
// equilibrium constants (A,B) = (1,0) on the left and (0,1) on the right.
// The quadrature is the composite trapezoid rule on nodal integrand values.
//
// Degrees of freedom: A at nodes 2..n-2 and B at nodes 1..n-1. The endpoint
// nodes are fixed by the clamp; the two A-nodes adjacent to each boundary
// are held at the equilibrium values as the discrete counterpart of the
// boundary conditions A(+-L) = const, A'(+-L) = 0 of the truncated problem.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dwall/model.hpp"

namespace dwall {

// ghost constants
inline constexpr double kGhostLeftA = 1.0;
inline constexpr double kGhostLeftB = 0.0;
inline constexpr double kGhostRightA = 0.0;
inline constexpr double kGhostRightB = 1.0;

/// Exact gradient of the discrete J_eps with respect to the free nodal
/// values: dA over nodes 2..n-2 (n-3 entries), dB over nodes 1..n-1
/// (n-1 entries).
struct DiscreteGradient {
    std::vector<double> dA;
    std::vector<double> dB;

    double sup() const {
        double s = 0.0;
        for (double v : dA) s = std::max(s, std::abs(v));
        for (double v : dB) s = std::max(s, std::abs(v));
        return s;
    }
};

/// Pointwise residual of the stationarity system,
///   resA = eps A'''' - A (1 - A^2 - g B^2)   at nodes 2..n-2,
///   resB = B'' - B (-1 + g A^2 + B^2)        at nodes 1..n-1,
/// with the 5-point and 3-point central stencils. At these nodes the
/// stencils use only grid values, so no ghost extension enters.
struct ResidualReport {
    std::vector<double> resA;
    std::vector<double> resB;
    double sup_norm = 0.0;
};

namespace detail {

inline void check_dims(const Profile& p, const Params& params, const char* who) {
    if (!grid_consistent(p, params))
        throw std::invalid_argument(std::string(who) + ": profile grid does not match params");
}

// A'' at node i (0..n) with equilibrium ghosts
inline double second_diff_A(const Profile& p, int i, double h) {
    const int n = p.intervals();
    const double am = (i == 0) ? kGhostLeftA : p.A[static_cast<std::size_t>(i - 1)];
    const double ap = (i == n) ? kGhostRightA : p.A[static_cast<std::size_t>(i + 1)];
    return (ap - 2.0 * p.A[static_cast<std::size_t>(i)] + am) / (h * h);
}

// B' at node i (0..n) with equilibrium ghosts
inline double central_diff_B(const Profile& p, int i, double h) {
    const int n = p.intervals();
    const double bm = (i == 0) ? kGhostLeftB : p.B[static_cast<std::size_t>(i - 1)];
    const double bp = (i == n) ? kGhostRightB : p.B[static_cast<std::size_t>(i + 1)];
    return (bp - bm) / (2.0 * h);
}

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

}  // namespace detail

inline EnergyReport energy(const Profile& p, const Params& params) {
    detail::check_dims(p, params, "energy");
    if (!clamps_hold(p)) throw std::invalid_argument("energy: endpoint clamps violated");
    const int n = params.n;
    const double h = params.h();

    detail::KahanSum bend, diri, pot;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        const double app = detail::second_diff_A(p, i, h);
        const double bp = detail::central_diff_B(p, i, h);
        bend.add(w * 0.5 * params.eps * app * app);
        diri.add(w * 0.5 * bp * bp);
        pot.add(w * potential(p.A[static_cast<std::size_t>(i)], p.B[static_cast<std::size_t>(i)], params.g));
    }
    EnergyReport r;
    r.bending = h * bend.s;
    r.dirichlet = h * diri.s;
    r.potential = h * pot.s;
    r.total = r.bending + r.dirichlet + r.potential;
    return r;
}

inline DiscreteGradient energy_gradient(const Profile& p, const Params& params) {
    detail::check_dims(p, params, "energy_gradient");
    const int n = params.n;
    const double h = params.h();
    const std::size_t N = p.size();

    // scatter dJ/d(node) over all nodes, then restrict to the free ones
    std::vector<double> gA(N, 0.0), gB(N, 0.0);
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        const std::size_t ui = static_cast<std::size_t>(i);

        const double capp = h * w * params.eps * detail::second_diff_A(p, i, h) / (h * h);
        if (i - 1 >= 0) gA[ui - 1] += capp;
        gA[ui] += -2.0 * capp;
        if (i + 1 <= n) gA[ui + 1] += capp;

        const double cbp = h * w * detail::central_diff_B(p, i, h) / (2.0 * h);
        if (i + 1 <= n) gB[ui + 1] += cbp;
        if (i - 1 >= 0) gB[ui - 1] -= cbp;

        const auto gp = grad_potential(p.A[ui], p.B[ui], params.g);
        gA[ui] += h * w * gp[0];
        gB[ui] += h * w * gp[1];
    }

    DiscreteGradient out;
    out.dA.assign(gA.begin() + 2, gA.end() - 2);
    out.dB.assign(gB.begin() + 1, gB.end() - 1);
    return out;
}

inline ResidualReport el_residual(const Profile& p, const Params& params) {
    detail::check_dims(p, params, "el_residual");
    const int n = params.n;
    const double h = params.h();
    const double h2 = h * h, h4 = h2 * h2;
    const auto& A = p.A;
    const auto& B = p.B;

    ResidualReport r;
    r.resA.reserve(static_cast<std::size_t>(n) - 3);
    r.resB.reserve(static_cast<std::size_t>(n) - 1);
    for (int i = 2; i <= n - 2; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const double a4 = (A[u - 2] - 4.0 * A[u - 1] + 6.0 * A[u] - 4.0 * A[u + 1] + A[u + 2]) / h4;
        r.resA.push_back(params.eps * a4 - A[u] * (1.0 - A[u] * A[u] - params.g * B[u] * B[u]));
    }
    for (int i = 1; i <= n - 1; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const double b2 = (B[u + 1] - 2.0 * B[u] + B[u - 1]) / h2;
        r.resB.push_back(b2 - B[u] * (-1.0 + params.g * A[u] * A[u] + B[u] * B[u]));
    }
    double s = 0.0;
    for (double v : r.resA) s = std::max(s, std::abs(v));
    for (double v : r.resB) s = std::max(s, std::abs(v));
    r.sup_norm = s;
    return r;
}

}  // namespace dwall
