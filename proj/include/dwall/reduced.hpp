#pragma once

// Closed-form singular-limit (eps = 0) heteroclinic. The B-component solves
//
//   B'' = -B + B^3                      for B^2 >= 1/g   (outer branch)
//   B'' = (g-1) B + (1-g^2) B^3         for B^2 <= 1/g   (inner branch)
//
// glued C^1 at the junction B = 1/sqrt(g). Each branch carries a first
// integral:
//   outer: B'^2 + B^2 - B^4/2                 = 1/2
//   inner: B'^2 + (1-g) B^2 - (1-g^2) B^4/2   = 0
// which give the closed forms
//   inner: B(x) = b_cap sech(a (c - x)),  b_cap = sqrt(2/(g+1)), a = sqrt(g-1)
//   outer: B(x) = tanh((x - x0)/sqrt(2))
// on the increasing part. A is induced by A^2 = max{0, 1 - g B^2}.

#include <cmath>
#include <stdexcept>

#include "dwall/model.hpp"
#include "dwall/quadrature.hpp"

namespace dwall {

struct ReducedOrbit {
    double g = 0.0;
    double b_cap = 0.0;        // inner amplitude factor sqrt(2/(g+1))
    double rate = 0.0;         // inner decay rate sqrt(g-1)
    double inner_center = 0.0; // c in B = b_cap sech(rate (c - x))
    double outer_center = 0.0; // x0 in B = tanh((x - x0)/sqrt(2))
    double x_junction = 0.0;   // where B = 1/sqrt(g)
    double b_pin = 0.0;        // pinned value of B at x = 0
};

namespace detail {

inline double asech(double y) { return std::log((1.0 + std::sqrt(1.0 - y * y)) / y); }

inline double stable_sech(double u) {
    const double e = std::exp(-std::abs(u));
    return 2.0 * e / (1.0 + e * e);
}

}  // namespace detail

/// Construct the orbit pinned at B(0) = 1/2 (fallback B(0) = 1/sqrt(2g) when
/// g >= 4, where 1/2 would not lie on the inner branch).
inline ReducedOrbit reduced_orbit(double g) {
    if (!(g > 1.0)) throw std::invalid_argument("reduced_orbit: g must be > 1");
    ReducedOrbit o;
    o.g = g;
    o.b_cap = std::sqrt(2.0 / (g + 1.0));
    o.rate = std::sqrt(g - 1.0);
    const double b_junction = 1.0 / std::sqrt(g);
    o.b_pin = (g < 4.0) ? 0.5 : 1.0 / std::sqrt(2.0 * g);
    o.inner_center = detail::asech(o.b_pin / o.b_cap) / o.rate;
    o.x_junction = o.inner_center - detail::asech(b_junction / o.b_cap) / o.rate;
    o.outer_center = o.x_junction - std::sqrt(2.0) * std::atanh(b_junction);
    return o;
}

inline double reduced_B(const ReducedOrbit& o, double x) {
    if (x <= o.x_junction) return o.b_cap * detail::stable_sech(o.rate * (o.inner_center - x));
    return std::tanh((x - o.outer_center) / std::sqrt(2.0));
}

inline double reduced_Bprime(const ReducedOrbit& o, double x) {
    if (x <= o.x_junction) {
        const double u = o.rate * (o.inner_center - x);
        return o.b_cap * o.rate * detail::stable_sech(u) * std::tanh(u);
    }
    const double t = std::tanh((x - o.outer_center) / std::sqrt(2.0));
    return (1.0 - t * t) / std::sqrt(2.0);
}

/// A on the inner branch from the relation A^2 = 1 - g B^2; identically 0
/// past the junction.
inline double reduced_A(const ReducedOrbit& o, double x) {
    if (x >= o.x_junction) return 0.0;
    const double B = reduced_B(o, x);
    const double s = 1.0 - o.g * B * B;
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

/// Integrand of the reduced functional J_red at the orbit point x.
inline double reduced_integrand(const ReducedOrbit& o, double x) {
    const double B = reduced_B(o, x);
    const double Bp = reduced_Bprime(o, x);
    const double Ap2 = std::max(0.0, 1.0 - o.g * B * B);
    const double r = Ap2 + B * B - 1.0;
    return 0.5 * Bp * Bp + 0.25 * r * r + 0.5 * (o.g - 1.0) * Ap2 * B * B;
}

/// Adaptive quadrature of J_red over the orbit; the domain is split at the
/// junction where the (.)_+ kink makes the integrand only piecewise smooth.
inline double reduced_energy(const ReducedOrbit& o, double quad_tol) {
    if (!(quad_tol > 0.0)) throw std::invalid_argument("reduced_energy: quad_tol must be > 0");
    auto f = [&o](double x) { return reduced_integrand(o, x); };
    const double left = integrate_lower(f, o.x_junction, 0.5 * quad_tol);
    const double right = integrate_upper(f, o.x_junction, 0.5 * quad_tol);
    return left + right;
}

/// Sample the orbit on the params grid, endpoints overwritten with the clamps.
inline Profile sample_reduced(const ReducedOrbit& o, const Params& params) {
    validate(params);
    Profile p;
    p.x = make_grid(params);
    p.A.resize(p.x.size());
    p.B.resize(p.x.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        p.A[i] = reduced_A(o, p.x[i]);
        p.B[i] = reduced_B(o, p.x[i]);
    }
    apply_clamps(p);
    return p;
}

}  // namespace dwall
