#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dwall/analysis.hpp"
#include "dwall/energy.hpp"
#include "dwall/minimize.hpp"
#include "dwall/model.hpp"

using namespace dwall;

namespace {

Params fast_params(double g = 2.0) {
    Params p;
    p.eps = 1.0;
    p.g = g;
    p.L = 30.0;
    p.n = 1200;
    return p;
}

}  // namespace

TEST_CASE("test-function initial guess") {
    Params params = fast_params();
    const Profile p = initial_guess_testfn(params);
    const int mid = params.n / 2;
    CHECK(p.A[static_cast<std::size_t>(mid)] == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
    CHECK(p.B[static_cast<std::size_t>(mid)] == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
    CHECK(clamps_hold(p));
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.A[i] * p.A[i] + p.B[i] * p.B[i] == Catch::Approx(1.0).margin(1e-12));
        CHECK(p.B[i] >= 0.0);
    }
    // gamma dilation: with g = 1 + tan(pi/6)^2 the angle pi/3 sits at x = 1/gamma... just
    // check the dilation pulls the wall tighter for larger g
    Params gs = params;
    gs.g = 5.0;
    const Profile q = initial_guess_testfn(gs);
    const std::size_t probe = static_cast<std::size_t>(mid + 100);
    CHECK(q.B[probe] > p.B[probe]);
}

TEST_CASE("solve at desk scale: convergence, invariants, diagnostics") {
    Params params = fast_params();
    SolveOptions opts;
    const SolveResult res = minimize(params, opts);

    REQUIRE(res.converged);
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.grad_norm <= opts.grad_tol);
    CHECK(clamps_hold(res.profile));

    SECTION("monotone descent across accepted iterations") {
        for (std::size_t k = 1; k < res.energy_history.size(); ++k)
            CHECK(res.energy_history[k] <= res.energy_history[k - 1] + 1e-12);
    }
    SECTION("sign normalization outcome") {
        double mb = 0.0;
        for (double b : res.profile.B) mb = std::min(mb, b);
        CHECK(mb >= -1e-12);
    }
    SECTION("pinned translate: B(0) within half a node of 1/2") {
        const double b0 = res.profile.B[static_cast<std::size_t>(params.n / 2)];
        CHECK(std::abs(b0 - 0.5) <= 0.5 * params.h() * 0.5);  // |B'| <= 1/sqrt(2) near the wall
    }
    SECTION("energy decomposition") {
        CHECK(res.energy.total ==
              Catch::Approx(res.energy.bending + res.energy.dirichlet + res.energy.potential).epsilon(1e-12));
    }
    SECTION("stationarity in the residual sense") {
        const ResidualReport r = el_residual(res.profile, params);
        CHECK(r.sup_norm <= 1e-3);
    }
    SECTION("boundary approach") {
        const std::size_t il = static_cast<std::size_t>(std::lround((5.0) / params.h()));
        const std::size_t ir = static_cast<std::size_t>(params.n) - il;
        CHECK(std::abs(res.profile.A[il] - 1.0) + std::abs(res.profile.B[il]) <= 1e-3);
        CHECK(std::abs(res.profile.A[ir]) + std::abs(res.profile.B[ir] - 1.0) <= 1e-3);
    }
    SECTION("oscillatory tail") {
        CHECK(sign_changes(res.profile, params.L / 2.0, params.L) >= 3);
    }
    SECTION("pinning is a pure relabeling") {
        Profile q = res.profile;
        const double before = energy(q, params).total;
        pin_translate(q, params);
        const double after = energy(q, params).total;
        CHECK(std::abs(after - before) <= 1e-12 * std::max(1.0, std::abs(before)));
    }
}

TEST_CASE("warm restart from a minimizer is a fixed point") {
    Params params = fast_params();
    SolveOptions opts;
    const SolveResult first = minimize(params, opts);
    REQUIRE(first.converged);

    SolveOptions warm = opts;
    warm.init = InitKind::Given;
    warm.given = first.profile;
    const SolveResult again = minimize(params, warm);
    CHECK(again.converged);
    CHECK(again.iterations <= 5);
    CHECK(again.energy.total == Catch::Approx(first.energy.total).margin(1e-12));
}

TEST_CASE("reduced-limit initial guess converges too") {
    Params params = fast_params();
    SolveOptions opts;
    opts.init = InitKind::ReducedLimit;
    const SolveResult res = minimize(params, opts);
    CHECK(res.converged);
    // same orbit as from the test function
    SolveOptions t;
    const SolveResult ref = minimize(params, t);
    CHECK(res.energy.total == Catch::Approx(ref.energy.total).margin(1e-10));
}

TEST_CASE("sign normalization never increases the energy") {
    Params params;
    params.L = 10.0;
    params.n = 80;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.6, 1.2);
    for (int trial = 0; trial < 25; ++trial) {
        Profile p;
        p.x = make_grid(params);
        p.A.resize(p.size());
        p.B.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p.A[i] = u(rng);
            p.B[i] = u(rng);
        }
        apply_clamps(p);
        Profile q = p;
        for (auto& b : q.B) b = std::abs(b);
        CHECK(energy(q, params).total <= energy(p, params).total + 1e-12);
    }
}

TEST_CASE("toward g = 1 the orbit hugs the unit circle") {
    Params params = fast_params(1.5);
    SolveOptions opts;
    const SolveResult at15 = minimize(params, opts);
    REQUIRE(at15.converged);

    Params tighter = fast_params(1.05);
    SolveOptions warm;
    warm.init = InitKind::Given;
    warm.given = at15.profile;
    const SolveResult at105 = minimize(tighter, warm);
    REQUIRE(at105.converged);
    CHECK(circle_sup(at105.profile) < circle_sup(at15.profile));
}

TEST_CASE("budget exhaustion reports non-convergence with the best iterate") {
    Params params = fast_params();
    SolveOptions opts;
    opts.max_iters = 2;
    const SolveResult res = minimize(params, opts);
    CHECK_FALSE(res.converged);
    CHECK(res.status == SolveStatus::NonConvergence);
    CHECK(res.profile.size() == static_cast<std::size_t>(params.n) + 1);
    CHECK(std::isfinite(res.energy.total));
}

TEST_CASE("continuation") {
    SECTION("steps = 1 equals a single warm-started solve") {
        Params from = fast_params(2.0);
        Params to = fast_params(1.5);
        SolveOptions opts;
        const auto chain = continuation(from, to, 1, opts);
        REQUIRE(chain.size() == 2);
        CHECK(chain.back().converged);

        const SolveResult base = minimize(from, opts);
        SolveOptions warm;
        warm.init = InitKind::Given;
        warm.given = base.profile;
        const SolveResult direct = minimize(to, warm);
        CHECK(chain.back().energy.total == Catch::Approx(direct.energy.total).margin(1e-10));
    }
    SECTION("energies decrease strictly along a g-descending chain") {
        Params from = fast_params(2.0);
        Params to = fast_params(1.2);
        SolveOptions opts;
        const auto chain = continuation(from, to, 4, opts);
        REQUIRE(chain.size() == 5);
        for (const auto& r : chain) CHECK(r.converged);
        for (std::size_t k = 1; k < chain.size(); ++k)
            CHECK(chain[k].energy.total < chain[k - 1].energy.total);
    }
    SECTION("eps-descending chain with n scaled by the resolution rule") {
        Params from = fast_params(2.0);
        Params to = from;
        to.eps = 1e-2;
        to.n = recommended_n(to.eps, to.g, to.L);
        SolveOptions opts;
        const auto chain = continuation(from, to, 3, opts);
        REQUIRE(chain.size() == 4);
        for (const auto& r : chain) CHECK(r.converged);
    }
    SECTION("parameter validation") {
        CHECK_THROWS_AS(continuation(fast_params(), fast_params(), 0, SolveOptions{}), std::invalid_argument);
    }
}

TEST_CASE("options validation") {
    SolveOptions o;
    o.grad_tol = 0.0;
    CHECK_THROWS_AS(validate(o), std::invalid_argument);
    o = SolveOptions{};
    o.max_iters = 0;
    CHECK_THROWS_AS(validate(o), std::invalid_argument);
}
