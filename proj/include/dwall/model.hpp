#pragma once

// Core types for the amplitude system
//
//   eps A'''' = A (1 - A^2 - g B^2)
//   B''       = B (-1 + g A^2 + B^2)
//
// together with the potential P(A,B) = 1/4 (A^2+B^2-1)^2 + 1/2 (g-1) A^2 B^2
// and its derivatives. The system has the two real equilibria
// M- = (1,0) and M+ = (0,1); a domain wall is a heteroclinic joining them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwall {

// ---------------------------------------------------------------------------
// parameters and grid
// ---------------------------------------------------------------------------

/// Model and discretization parameters. The truncated domain is [-L, L]
/// with n uniform intervals; n must be even so that x = 0 is a grid node.
struct Params {
    double eps = 1.0;  // stiffness of the fourth-order term, eps > 0
    double g = 2.0;    // coupling, g > 1
    double L = 30.0;   // half-length of the truncated domain
    int n = 3000;      // number of grid intervals, even, >= 16

    double h() const { return 2.0 * L / n; }
};

inline void validate(const Params& p) {
    if (!(p.eps > 0.0))
        throw std::invalid_argument("params: eps must satisfy eps > 0, got " + std::to_string(p.eps));
    if (!(p.g > 1.0))
        throw std::invalid_argument("params: g must satisfy g > 1, got " + std::to_string(p.g));
    if (!(p.L > 0.0))
        throw std::invalid_argument("params: L must satisfy L > 0, got " + std::to_string(p.L));
    if (p.n < 16 || p.n % 2 != 0)
        throw std::invalid_argument("params: n must be even and >= 16, got " + std::to_string(p.n));
}

inline std::vector<double> make_grid(const Params& p) {
    std::vector<double> x(static_cast<std::size_t>(p.n) + 1);
    const double h = p.h();
    for (int i = 0; i <= p.n; ++i) x[static_cast<std::size_t>(i)] = -p.L + h * i;
    x.front() = -p.L;
    x.back() = p.L;
    return x;
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

/// Sampled real pair (A,B) on a uniform grid. Endpoints are clamped to the
/// equilibria: (A,B)(-L) = (1,0), (A,B)(+L) = (0,1).
struct Profile {
    std::vector<double> x;
    std::vector<double> A;
    std::vector<double> B;

    std::size_t size() const { return x.size(); }
    int intervals() const { return static_cast<int>(x.size()) - 1; }
};

/// Overwrite the endpoint values with the exact equilibrium clamps.
inline void apply_clamps(Profile& p) {
    p.A.front() = 1.0;
    p.B.front() = 0.0;
    p.A.back() = 0.0;
    p.B.back() = 1.0;
}

/// Grid/shape consistency between a profile and params.
inline bool grid_consistent(const Profile& p, const Params& params) {
    if (p.x.size() != static_cast<std::size_t>(params.n) + 1) return false;
    if (p.A.size() != p.x.size() || p.B.size() != p.x.size()) return false;
    const double h = params.h();
    for (std::size_t i = 1; i < p.x.size(); ++i) {
        if (std::abs((p.x[i] - p.x[i - 1]) - h) > 1e-9 * (1.0 + std::abs(h))) return false;
    }
    return true;
}

inline bool clamps_hold(const Profile& p) {
    return p.A.front() == 1.0 && p.B.front() == 0.0 && p.A.back() == 0.0 && p.B.back() == 1.0;
}

// ---------------------------------------------------------------------------
// energy report
// ---------------------------------------------------------------------------

/// Value of J_eps split into its three parts; total = bending + dirichlet + potential.
struct EnergyReport {
    double total = 0.0;
    double bending = 0.0;    // eps/2 int A''^2
    double dirichlet = 0.0;  // 1/2 int B'^2
    double potential = 0.0;  // int P(A,B)
};

// ---------------------------------------------------------------------------
// equilibria
// ---------------------------------------------------------------------------

enum class EquilibriumTag { MMinus, MPlus };

struct Equilibrium {
    EquilibriumTag tag;
    std::array<double, 2> point;
};

inline Equilibrium equilibrium(EquilibriumTag tag) {
    if (tag == EquilibriumTag::MMinus) return {tag, {1.0, 0.0}};
    return {tag, {0.0, 1.0}};
}

// ---------------------------------------------------------------------------
// potential P and derivatives
// ---------------------------------------------------------------------------

inline double potential(double a, double b, double g) {
    const double r = a * a + b * b - 1.0;
    return 0.25 * r * r + 0.5 * (g - 1.0) * a * a * b * b;
}

/// (dP/dA, dP/dB) = (A(A^2+gB^2-1), B(gA^2+B^2-1)).
inline std::array<double, 2> grad_potential(double a, double b, double g) {
    return {a * (a * a + g * b * b - 1.0), b * (g * a * a + b * b - 1.0)};
}

/// Hessian [[3A^2+gB^2-1, 2gAB], [2gAB, gA^2+3B^2-1]].
inline std::array<std::array<double, 2>, 2> hessian_potential(double a, double b, double g) {
    const double off = 2.0 * g * a * b;
    return {{{3.0 * a * a + g * b * b - 1.0, off}, {off, g * a * a + 3.0 * b * b - 1.0}}};
}

/// Smallest ratio P(a,b) / min{(b+-1)^2+a^2, b^2+(a+-1)^2} over a deterministic
/// sample set: a Cartesian grid over the disk of radius 3 plus a ring at
/// radius 10, the four equilibria excluded. The coercivity bound guarantees
/// the ratio is bounded below by a positive constant; the sampled infimum is
/// an empirical estimate of it.
inline double coercivity_check(double g, int sample_count) {
    if (!(g > 1.0)) throw std::invalid_argument("coercivity_check: g must be > 1");
    if (sample_count < 10000) throw std::invalid_argument("coercivity_check: sample_count must be >= 1e4");

    auto dist2 = [](double a, double b) {
        const double d1 = (b - 1.0) * (b - 1.0) + a * a;
        const double d2 = (b + 1.0) * (b + 1.0) + a * a;
        const double d3 = b * b + (a - 1.0) * (a - 1.0);
        const double d4 = b * b + (a + 1.0) * (a + 1.0);
        return std::min(std::min(d1, d2), std::min(d3, d4));
    };

    double inf = std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sample_count))));
    const double step = 6.0 / (m - 1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double a = -3.0 + step * i;
            const double b = -3.0 + step * j;
            if (a * a + b * b > 9.0) continue;
            const double d = dist2(a, b);
            if (d < 1e-24) continue;  // equilibrium hit
            inf = std::min(inf, potential(a, b, g) / d);
        }
    }
    const int ring = 1024;
    for (int k = 0; k < ring; ++k) {
        const double t = 2.0 * M_PI * k / ring;
        const double a = 10.0 * std::cos(t);
        const double b = 10.0 * std::sin(t);
        inf = std::min(inf, potential(a, b, g) / dist2(a, b));
    }
    if (!(inf > 0.0)) throw std::runtime_error("coercivity_check: sampled infimum not positive");
    return inf;
}

// ---------------------------------------------------------------------------
// rescaling between the working coordinates and the original system
// ---------------------------------------------------------------------------

// The working system uses xbar = eps^{1/4} x with eps = epsilon^4; amplitudes
// are unchanged. rescale_to_original maps a profile on the xbar-grid back to
// the x-grid of the original system.

inline Profile rescale_to_original(const Profile& p, const Params& params) {
    validate(params);
    const double s = std::pow(params.eps, 0.25);
    Profile out = p;
    for (auto& xi : out.x) xi /= s;
    return out;
}

inline Profile rescale_from_original(const Profile& p, const Params& params) {
    validate(params);
    const double s = std::pow(params.eps, 0.25);
    Profile out = p;
    for (auto& xi : out.x) xi *= s;
    return out;
}

}  // namespace dwall
