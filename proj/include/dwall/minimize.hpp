#pragma once

// Minimization of the discrete J_eps over the clamped profile space.
//
// The optimizer is limited-memory BFGS with Armijo backtracking. Its H0 is
// the inverse of the block-diagonal part of the exact discrete Hessian
// (pentadiagonal bending/Dirichlet blocks plus the pointwise potential
// curvature, floored to keep the blocks positive definite), refactorized at
// every iterate. The A''-term makes the Hessian extremely stiff (~eps/h^3 on
// the finest modes); with a scalar H0 those modes cannot be descended at
// double precision because their energy increments fall below roundoff, so
// the banded H0 is load-bearing, not an optimization.
//
// Pipeline: coarse descent -> translation pinning (integer grid shift to
// B(0) = 1/2) -> full descent to grad_tol -> sign normalization B <- |B|
// with a polish descent, repeated if negative values reappear -> final pin
// verification. Pinning mid-solve keeps the final iterate free of the
// node-level kink a post-convergence shift would leave behind.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dwall/energy.hpp"
#include "dwall/model.hpp"
#include "dwall/reduced.hpp"

namespace dwall {

enum class InitKind { TestFunction, ReducedLimit, Given };

struct SolveOptions {
    double grad_tol = 1e-8;  // sup-norm stopping tolerance on the discrete gradient
    int max_iters = 50000;   // total accepted-step budget across all phases
    int memory = 10;         // quasi-Newton history length
    InitKind init = InitKind::TestFunction;
    Profile given;           // used when init == Given
};

inline void validate(const SolveOptions& o) {
    if (!(o.grad_tol > 0.0)) throw std::invalid_argument("options: grad_tol must be > 0");
    if (o.max_iters < 1) throw std::invalid_argument("options: max_iters must be >= 1");
    if (o.memory < 1) throw std::invalid_argument("options: memory must be >= 1");
}

enum class SolveStatus { Converged, NonConvergence, LineSearchStall };

struct SolveResult {
    Profile profile;
    EnergyReport energy;
    double grad_norm = 0.0;
    long iterations = 0;
    bool converged = false;
    SolveStatus status = SolveStatus::Converged;
    std::vector<double> energy_history;  // energy after each accepted step
};

// ---------------------------------------------------------------------------
// initial guesses
// ---------------------------------------------------------------------------

/// Circle-valued arctan profile dilated by gamma = sqrt(g-1):
/// (A,B)(x) = (cos t, sin t), t = pi/4 + arctan(gamma x)/2.
inline Profile initial_guess_testfn(const Params& params) {
    validate(params);
    const double gamma = std::sqrt(params.g - 1.0);
    Profile p;
    p.x = make_grid(params);
    p.A.resize(p.x.size());
    p.B.resize(p.x.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        const double t = 0.25 * M_PI + 0.5 * std::atan(gamma * p.x[i]);
        p.A[i] = std::cos(t);
        p.B[i] = std::sin(t);
    }
    apply_clamps(p);
    return p;
}

/// Linear resampling of a profile onto the params grid; outside the source
/// grid the equilibrium constants are used.
inline Profile resample(const Profile& src, const Params& params) {
    validate(params);
    Profile p;
    p.x = make_grid(params);
    p.A.resize(p.x.size());
    p.B.resize(p.x.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        const double x = p.x[i];
        if (x <= src.x.front()) {
            p.A[i] = 1.0;
            p.B[i] = 0.0;
        } else if (x >= src.x.back()) {
            p.A[i] = 0.0;
            p.B[i] = 1.0;
        } else {
            while (j + 2 < src.x.size() && src.x[j + 1] < x) ++j;
            const double t = (x - src.x[j]) / (src.x[j + 1] - src.x[j]);
            p.A[i] = (1.0 - t) * src.A[j] + t * src.A[j + 1];
            p.B[i] = (1.0 - t) * src.B[j] + t * src.B[j + 1];
        }
    }
    apply_clamps(p);
    return p;
}

// ---------------------------------------------------------------------------
// translation pinning
// ---------------------------------------------------------------------------

struct PinResult {
    int shift = 0;      // applied shift in grid nodes
    double x_star = 0.0;  // where linear interpolation of B crosses 1/2
};

/// Shift the profile by a whole number of nodes so that the B = 1/2 crossing
/// (located by linear interpolation) lands as close to x = 0 as the grid
/// allows. Vacated nodes are filled with the equilibrium constants. A pure
/// relabeling up to the exponentially dead tails, so the energy is unchanged
/// to far below 1e-12.
inline PinResult pin_translate(Profile& p, const Params& params) {
    const int n = params.n;
    const double h = params.h();
    int cross = -1;
    for (int i = 1; i <= n; ++i) {
        if (p.B[static_cast<std::size_t>(i)] >= 0.5) {
            cross = i;
            break;
        }
    }
    if (cross <= 0) return {};
    const double b0 = p.B[static_cast<std::size_t>(cross - 1)];
    const double b1 = p.B[static_cast<std::size_t>(cross)];
    const double x_star = p.x[static_cast<std::size_t>(cross - 1)] + h * (0.5 - b0) / (b1 - b0);
    const int k = static_cast<int>(std::lround(x_star / h));
    if (k == 0) return {0, x_star};

    Profile q = p;
    if (k > 0) {
        for (int i = 0; i + k <= n; ++i) {
            q.A[static_cast<std::size_t>(i)] = p.A[static_cast<std::size_t>(i + k)];
            q.B[static_cast<std::size_t>(i)] = p.B[static_cast<std::size_t>(i + k)];
        }
        for (int i = n - k + 1; i <= n; ++i) {
            q.A[static_cast<std::size_t>(i)] = 0.0;
            q.B[static_cast<std::size_t>(i)] = 1.0;
        }
    } else {
        for (int i = n; i + k >= 0; --i) {
            q.A[static_cast<std::size_t>(i)] = p.A[static_cast<std::size_t>(i + k)];
            q.B[static_cast<std::size_t>(i)] = p.B[static_cast<std::size_t>(i + k)];
        }
        for (int i = 0; i < -k; ++i) {
            q.A[static_cast<std::size_t>(i)] = 1.0;
            q.B[static_cast<std::size_t>(i)] = 0.0;
        }
    }
    apply_clamps(q);
    p = std::move(q);
    return {k, x_star};
}

// ---------------------------------------------------------------------------
// banded SPD factorization (bandwidth 2)
// ---------------------------------------------------------------------------

namespace detail {

/// Lower-band storage: band[d][j] = M(j+d, j), d = 0..2.
struct Band2 {
    std::size_t m = 0;
    std::vector<double> d0, d1, d2;

    void resize(std::size_t size) {
        m = size;
        d0.assign(m, 0.0);
        d1.assign(m, 0.0);
        d2.assign(m, 0.0);
    }

    // in-place Cholesky M = L L^T
    void factorize() {
        for (std::size_t j = 0; j < m; ++j) {
            double diag = d0[j];
            if (j >= 1) diag -= d1[j - 1] * d1[j - 1];
            if (j >= 2) diag -= d2[j - 2] * d2[j - 2];
            if (!(diag > 0.0)) throw std::runtime_error("band factorization: matrix not positive definite");
            d0[j] = std::sqrt(diag);
            if (j + 1 < m) {
                double v = d1[j];
                if (j >= 1) v -= d2[j - 1] * d1[j - 1];
                d1[j] = v / d0[j];
            }
            if (j + 2 < m) d2[j] = d2[j] / d0[j];
        }
    }

    // solve L L^T x = b
    void solve(std::vector<double>& b) const {
        for (std::size_t j = 0; j < m; ++j) {
            double v = b[j];
            if (j >= 1) v -= d1[j - 1] * b[j - 1];
            if (j >= 2) v -= d2[j - 2] * b[j - 2];
            b[j] = v / d0[j];
        }
        for (std::size_t jj = m; jj-- > 0;) {
            double v = b[jj];
            if (jj + 1 < m) v -= d1[jj] * b[jj + 1];
            if (jj + 2 < m) v -= d2[jj] * b[jj + 2];
            b[jj] = v / d0[jj];
        }
    }
};

/// Block-diagonal Hessian preconditioner at the current iterate.
struct Preconditioner {
    Band2 A, B;

    void build(const Profile& p, const Params& params, double floor = 0.1) {
        const int n = params.n;
        const double h = params.h();
        const double cb = params.eps / (h * h * h);
        A.resize(static_cast<std::size_t>(n) - 3);
        // bending block: rows of (1,-2,1) stencils, all interior weights
        for (std::size_t j = 0; j < A.m; ++j) {
            const std::size_t node = j + 2;
            A.d0[j] = 6.0 * cb + h * std::max(3.0 * p.A[node] * p.A[node] + params.g * p.B[node] * p.B[node] - 1.0, floor);
            if (j + 1 < A.m) A.d1[j] = -4.0 * cb;
            if (j + 2 < A.m) A.d2[j] = cb;
        }
        A.factorize();

        B.resize(static_cast<std::size_t>(n) - 1);
        const double cd = 1.0 / (4.0 * h);
        for (std::size_t j = 0; j < B.m; ++j) {
            const int node = static_cast<int>(j) + 1;
            const std::size_t u = static_cast<std::size_t>(node);
            const double wm = (node - 1 == 0) ? 0.5 : 1.0;
            const double wp = (node + 1 == n) ? 0.5 : 1.0;
            B.d0[j] = (wm + wp) * cd + h * std::max(params.g * p.A[u] * p.A[u] + 3.0 * p.B[u] * p.B[u] - 1.0, floor);
            if (j + 2 < B.m) B.d2[j] = -cd;  // equals -w_{node+1}/(4h); node+1 is interior here
        }
        B.factorize();
    }

    void apply(std::vector<double>& vA, std::vector<double>& vB) const {
        A.solve(vA);
        B.solve(vB);
    }
};

struct Dof {
    int n = 0;

    std::size_t sizeA() const { return static_cast<std::size_t>(n) - 3; }
    std::size_t sizeB() const { return static_cast<std::size_t>(n) - 1; }
    std::size_t size() const { return sizeA() + sizeB(); }

    void gather(const Profile& p, std::vector<double>& v) const {
        v.resize(size());
        for (std::size_t j = 0; j < sizeA(); ++j) v[j] = p.A[j + 2];
        for (std::size_t j = 0; j < sizeB(); ++j) v[sizeA() + j] = p.B[j + 1];
    }

    void scatter(const std::vector<double>& v, Profile& p) const {
        for (std::size_t j = 0; j < sizeA(); ++j) p.A[j + 2] = v[j];
        for (std::size_t j = 0; j < sizeB(); ++j) p.B[j + 1] = v[sizeA() + j];
    }

    void gather_grad(const DiscreteGradient& g, std::vector<double>& v) const {
        v.resize(size());
        for (std::size_t j = 0; j < sizeA(); ++j) v[j] = g.dA[j];
        for (std::size_t j = 0; j < sizeB(); ++j) v[sizeA() + j] = g.dB[j];
    }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double sup(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

struct DescentOutcome {
    double energy = 0.0;
    double grad_sup = 0.0;
    long iterations = 0;
    SolveStatus status = SolveStatus::Converged;
};

/// One L-BFGS descent phase on the profile, in place. `budget` is the
/// remaining accepted-step allowance and is decremented.
inline DescentOutcome descend(Profile& p, const Params& params, const SolveOptions& opts, double tol,
                              long& budget, std::vector<double>* history) {
    const Dof dof{params.n};
    Preconditioner pre;

    std::vector<double> x, grad, q, d, xn, gn, s, y;
    dof.gather(p, x);

    auto eval = [&](const std::vector<double>& v, Profile& into, std::vector<double>& gout) {
        dof.scatter(v, into);
        const EnergyReport er = energy(into, params);
        gout.clear();
        dof.gather_grad(energy_gradient(into, params), gout);
        return er.total;
    };

    double e = eval(x, p, grad);

    std::vector<std::vector<double>> S, Y;
    std::vector<double> rho;

    DescentOutcome out;
    out.energy = e;
    out.grad_sup = sup(grad);

    Profile trial = p;
    while (true) {
        if (out.grad_sup <= tol) {
            out.status = SolveStatus::Converged;
            break;
        }
        if (budget <= 0) {
            out.status = SolveStatus::NonConvergence;
            break;
        }

        pre.build(p, params);

        // two-loop recursion with H0 = preconditioner inverse
        q = grad;
        std::vector<double> alpha(S.size());
        for (std::size_t i = S.size(); i-- > 0;) {
            alpha[i] = rho[i] * dot(S[i], q);
            for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * Y[i][j];
        }
        {
            std::vector<double> qa(q.begin(), q.begin() + static_cast<long>(dof.sizeA()));
            std::vector<double> qb(q.begin() + static_cast<long>(dof.sizeA()), q.end());
            pre.apply(qa, qb);
            std::copy(qa.begin(), qa.end(), q.begin());
            std::copy(qb.begin(), qb.end(), q.begin() + static_cast<long>(dof.sizeA()));
        }
        for (std::size_t i = 0; i < S.size(); ++i) {
            const double beta = rho[i] * dot(Y[i], q);
            for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[i] - beta) * S[i][j];
        }
        d = q;
        for (auto& v : d) v = -v;

        double dg = dot(d, grad);
        if (dg >= 0.0) {
            // curvature information unusable; restart from the preconditioned
            // steepest descent direction
            S.clear();
            Y.clear();
            rho.clear();
            std::vector<double> qa(grad.begin(), grad.begin() + static_cast<long>(dof.sizeA()));
            std::vector<double> qb(grad.begin() + static_cast<long>(dof.sizeA()), grad.end());
            pre.apply(qa, qb);
            d.assign(grad.size(), 0.0);
            for (std::size_t j = 0; j < dof.sizeA(); ++j) d[j] = -qa[j];
            for (std::size_t j = 0; j < dof.sizeB(); ++j) d[dof.sizeA() + j] = -qb[j];
            dg = dot(d, grad);
        }

        // Armijo backtracking; near roundoff the decrease condition cannot be
        // evaluated, so accept any non-increase within one ulp of the energy
        double t = 1.0;
        double en = 0.0;
        bool stalled = false;
        while (true) {
            xn = x;
            for (std::size_t j = 0; j < xn.size(); ++j) xn[j] += t * d[j];
            en = eval(xn, trial, gn);
            if (en <= e + 1e-4 * t * dg) break;
            if (t < 1e-12) {
                if (en <= e + 1e-14 * std::max(1.0, std::abs(e))) break;
                stalled = true;
                break;
            }
            t *= 0.5;
        }
        if (stalled) {
            out.status = SolveStatus::LineSearchStall;
            break;
        }

        s.resize(x.size());
        y.resize(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            s[j] = xn[j] - x[j];
            y[j] = gn[j] - grad[j];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * norm2(s) * norm2(y)) {
            S.push_back(s);
            Y.push_back(y);
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opts.memory) {
                S.erase(S.begin());
                Y.erase(Y.begin());
                rho.erase(rho.begin());
            }
        }

        x.swap(xn);
        grad.swap(gn);
        std::swap(p, trial);
        e = en;
        ++out.iterations;
        --budget;
        if (history) history->push_back(e);
        out.energy = e;
        out.grad_sup = sup(grad);
    }
    return out;
}

inline void snap_boundary_nodes(Profile& p) {
    apply_clamps(p);
    const std::size_t n = p.x.size() - 1;
    p.A[1] = 1.0;
    p.A[n - 1] = 0.0;
}

inline double min_B(const Profile& p) {
    double m = p.B.front();
    for (double v : p.B) m = std::min(m, v);
    return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// minimize
// ---------------------------------------------------------------------------

inline SolveResult minimize(const Params& params, const SolveOptions& opts) {
    validate(params);
    validate(opts);

    Profile p;
    switch (opts.init) {
        case InitKind::TestFunction:
            p = initial_guess_testfn(params);
            break;
        case InitKind::ReducedLimit:
            p = sample_reduced(reduced_orbit(params.g), params);
            break;
        case InitKind::Given:
            p = grid_consistent(opts.given, params) ? opts.given : resample(opts.given, params);
            break;
    }
    detail::snap_boundary_nodes(p);

    SolveResult res;
    long budget = opts.max_iters;
    detail::DescentOutcome last;

    // coarse descent, then pin while the remaining descent can still absorb
    // the node-level kink the shift leaves at the boundaries
    last = detail::descend(p, params, opts, std::max(opts.grad_tol, 1e-5), budget, &res.energy_history);
    res.iterations += last.iterations;
    pin_translate(p, params);
    detail::snap_boundary_nodes(p);

    last = detail::descend(p, params, opts, opts.grad_tol, budget, &res.energy_history);
    res.iterations += last.iterations;

    // sign normalization with polish; the polish can nudge dead-tail values
    // negative again at roundoff scale, hence the bounded retry
    for (int round = 0; round < 3 && last.status != SolveStatus::NonConvergence; ++round) {
        if (detail::min_B(p) >= 0.0) break;
        for (auto& b : p.B) b = std::abs(b);
        detail::snap_boundary_nodes(p);
        last = detail::descend(p, params, opts, opts.grad_tol, budget, &res.energy_history);
        res.iterations += last.iterations;
        if (detail::min_B(p) >= -1e-12) break;
    }

    // the pinning crossing may have drifted across a node boundary during the
    // later phases; re-pin and heal if it did
    if (last.status != SolveStatus::NonConvergence) {
        const PinResult rp = pin_translate(p, params);
        if (rp.shift != 0) {
            detail::snap_boundary_nodes(p);
            last = detail::descend(p, params, opts, opts.grad_tol, budget, &res.energy_history);
            res.iterations += last.iterations;
        }
    }

    res.profile = std::move(p);
    res.energy = energy(res.profile, params);
    const DiscreteGradient dg = energy_gradient(res.profile, params);
    res.grad_norm = dg.sup();
    res.converged = res.grad_norm <= opts.grad_tol;
    res.status = res.converged ? SolveStatus::Converged : last.status;
    if (!res.converged && res.status == SolveStatus::Converged) res.status = SolveStatus::NonConvergence;
    return res;
}

// ---------------------------------------------------------------------------
// continuation
// ---------------------------------------------------------------------------

/// Warm-started chain of solves along the geometric interpolation of
/// (eps, g-1) from params_from to params_to; L and n are interpolated
/// geometrically as well (n rounded to an even integer). Stops early if a
/// step fails to converge; callers detect that through the last result.
inline std::vector<SolveResult> continuation(const Params& params_from, const Params& params_to, int steps,
                                             const SolveOptions& opts) {
    validate(params_from);
    validate(params_to);
    validate(opts);
    if (steps < 1) throw std::invalid_argument("continuation: steps must be >= 1");

    std::vector<SolveResult> out;
    SolveOptions step_opts = opts;

    SolveResult base = minimize(params_from, opts);
    Profile carry = base.profile;
    if (!base.converged) {
        out.push_back(std::move(base));
        return out;
    }

    for (int k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        Params pk;
        pk.eps = params_from.eps * std::pow(params_to.eps / params_from.eps, t);
        pk.g = 1.0 + (params_from.g - 1.0) * std::pow((params_to.g - 1.0) / (params_from.g - 1.0), t);
        pk.L = params_from.L * std::pow(params_to.L / params_from.L, t);
        int nk = static_cast<int>(std::lround(params_from.n * std::pow(static_cast<double>(params_to.n) / params_from.n, t)));
        nk += nk % 2;
        pk.n = std::max(16, nk);
        if (k == steps) pk = params_to;

        step_opts.init = InitKind::Given;
        step_opts.given = resample(carry, pk);
        SolveResult r = minimize(pk, step_opts);
        const bool ok = r.converged;
        carry = r.profile;
        out.push_back(std::move(r));
        if (!ok) break;
    }
    return out;
}

}  // namespace dwall
