#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <gsl/gsl_poly.h>

#include "dwall/analysis.hpp"
#include "dwall/minimize.hpp"
#include "dwall/model.hpp"

using namespace dwall;

namespace {

// independent oracle: roots of eps z^4 + c = 0 from the general polynomial solver
std::array<std::complex<double>, 4> quartic_roots_oracle(double eps, double c) {
    const double coef[5] = {c, 0.0, 0.0, 0.0, eps};
    double z[8];
    gsl_poly_complex_workspace* w = gsl_poly_complex_workspace_alloc(5);
    const int status = gsl_poly_complex_solve(coef, 5, w, z);
    gsl_poly_complex_workspace_free(w);
    REQUIRE(status == 0);
    std::array<std::complex<double>, 4> roots;
    for (int k = 0; k < 4; ++k) roots[static_cast<std::size_t>(k)] = {z[2 * k], z[2 * k + 1]};
    return roots;
}

double match_distance(const std::array<std::complex<double>, 4>& a,
                      const std::array<std::complex<double>, 4>& b) {
    double worst = 0.0;
    for (const auto& za : a) {
        double best = 1e300;
        for (const auto& zb : b) best = std::min(best, std::abs(za - zb));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_CASE("spectrum at the equilibria for eps=1, g=2") {
    Params params;  // eps=1, g=2 defaults
    const SpectrumReport plus = equilibrium_spectrum(params, EquilibriumTag::MPlus);
    const SpectrumReport minus = equilibrium_spectrum(params, EquilibriumTag::MMinus);

    SECTION("M+ roots against the closed forms and the polynomial oracle") {
        const double r = std::sqrt(0.5);
        std::array<std::complex<double>, 4> expect = {{{r, r}, {-r, r}, {-r, -r}, {r, -r}}};
        CHECK(match_distance(plus.a_roots, expect) < 1e-10);
        CHECK(match_distance(plus.a_roots, quartic_roots_oracle(params.eps, params.g - 1.0)) < 1e-10);
        CHECK(plus.b_roots[0] == Catch::Approx(-std::sqrt(2.0)).margin(1e-12));
        CHECK(plus.b_roots[1] == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    }
    SECTION("M- roots") {
        const double r = std::pow(2.0, -0.25);
        std::array<std::complex<double>, 4> expect = {{{r, r}, {-r, r}, {-r, -r}, {r, -r}}};
        CHECK(match_distance(minus.a_roots, expect) < 1e-10);
        CHECK(match_distance(minus.a_roots, quartic_roots_oracle(params.eps, 2.0)) < 1e-10);
        CHECK(minus.b_roots[1] == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("hyperbolicity") {
        CHECK(plus.hyperbolic);
        CHECK(minus.hyperbolic);
    }
}

TEST_CASE("spectrum properties across parameters") {
    for (double eps : {0.1, 1.0, 7.0}) {
        for (double g : {1.01, 1.5, 3.0}) {
            Params params;
            params.eps = eps;
            params.g = g;
            for (auto tag : {EquilibriumTag::MMinus, EquilibriumTag::MPlus}) {
                const SpectrumReport s = equilibrium_spectrum(params, tag);
                const double c = (tag == EquilibriumTag::MPlus) ? g - 1.0 : 2.0;

                // each root satisfies its characteristic polynomial
                std::complex<double> prod = 1.0;
                for (const auto& z : s.a_roots) {
                    CHECK(std::abs(eps * z * z * z * z + c) <= 1e-10 * std::max(1.0, c));
                    prod *= z;
                    // closed under negation and conjugation
                    double dneg = 1e300, dconj = 1e300;
                    for (const auto& w : s.a_roots) {
                        dneg = std::min(dneg, std::abs(w + z));
                        dconj = std::min(dconj, std::abs(w - std::conj(z)));
                    }
                    CHECK(dneg < 1e-12 * (1.0 + std::abs(z)));
                    CHECK(dconj < 1e-12 * (1.0 + std::abs(z)));
                    CHECK(std::abs(z.real()) > 0.0);
                }
                // product of the four roots equals the constant term c/eps
                CHECK(std::abs(prod - c / eps) <= 1e-10 * std::max(1.0, c / eps));
                CHECK(s.hyperbolic);
            }
        }
    }
}

TEST_CASE("domain and resolution rules at eps=1, g=2") {
    CHECK(slowest_decay_rate(1.0, 2.0) == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
    CHECK(recommended_L(1.0, 2.0) == Catch::Approx(20.0 / std::sqrt(0.5)).margin(1e-9));
    CHECK(recommended_h(1.0, 2.0) == Catch::Approx(2.0 * M_PI / 16.0).margin(1e-12));
    const int n = recommended_n(1.0, 2.0, 30.0);
    CHECK(n % 2 == 0);
    CHECK(n >= 2.0 * 30.0 / (2.0 * M_PI / 16.0));
}

TEST_CASE("test function energy") {
    SECTION("base integrals against an independent direct quadrature of the dilated profile") {
        Params params;
        params.eps = 0.7;
        params.g = 2.4;
        for (double gamma : {0.35, 1.0, 2.0}) {
            const double via_scaling = testfn_energy(params, gamma);
            // direct quadrature of J(A_gamma, B_gamma); the profile lies on the
            // circle so P reduces to the coupling term
            const double direct = integrate_line(
                [&](double x) {
                    const double app = gamma * gamma * testfn_A1_pp(gamma * x);
                    const double bp = gamma * testfn_B1_prime(gamma * x);
                    const double a = testfn_A1(gamma * x);
                    const double b = testfn_B1(gamma * x);
                    return 0.5 * params.eps * app * app + 0.5 * bp * bp +
                           potential(a, b, params.g);
                },
                1e-12);
            CHECK(via_scaling == Catch::Approx(direct).margin(1e-8));
        }
    }
    SECTION("the quartic part of P contributes nothing on the circle") {
        for (double x : {-3.0, 0.0, 1.7}) {
            const double a = testfn_A1(x), b = testfn_B1(x);
            CHECK(std::abs(a * a + b * b - 1.0) < 1e-15);
        }
    }
    SECTION("scaling toward g = 1 with gamma = sqrt(g-1)") {
        Params params;
        double prev_log = 0.0;
        std::vector<double> lg, lv;
        for (double g : {1.05, 1.04, 1.03, 1.02, 1.01}) {
            params.g = g;
            const double v = testfn_energy(params, std::sqrt(g - 1.0));
            lg.push_back(std::log(g - 1.0));
            lv.push_back(std::log(v));
            (void)prev_log;
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lg.size(); ++i) {
            sx += lg[i]; sy += lv[i]; sxx += lg[i] * lg[i]; sxy += lg[i] * lv[i];
        }
        const double m = static_cast<double>(lg.size());
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        CHECK(slope == Catch::Approx(0.5).margin(0.05));
    }
    SECTION("validation") {
        Params params;
        CHECK_THROWS_AS(testfn_energy(params, 0.0), std::invalid_argument);
    }
}

TEST_CASE("tail_fit recovers rates from synthetic tails") {
    Params params;
    params.L = 30.0;
    params.n = 3000;
    Profile p;
    p.x = make_grid(params);
    p.A.resize(p.size());
    p.B.resize(p.size());
    const double nu = std::sqrt(0.5);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = p.x[i];
        if (x >= 0.0) {
            p.A[i] = 0.4 * std::exp(-nu * x) * std::cos(nu * x + 0.3);
            p.B[i] = 1.0 - 0.7 * std::exp(-std::sqrt(2.0) * x);
        } else {
            p.A[i] = 1.0 - 0.4 * std::exp(std::pow(2.0, -0.25) * x) * std::cos(std::pow(2.0, -0.25) * x);
            p.B[i] = 0.6 * std::exp(x);  // rate sqrt(g-1) with g = 2
        }
    }
    apply_clamps(p);
    const TailFit f = tail_fit(p, params);
    CHECK(f.a_rate_right == Catch::Approx(nu).epsilon(0.02));
    CHECK(f.b_rate_right == Catch::Approx(std::sqrt(2.0)).epsilon(0.02));
    CHECK(f.b_rate_left == Catch::Approx(1.0).epsilon(0.02));
    CHECK(f.a_rate_left == Catch::Approx(std::pow(2.0, -0.25)).epsilon(0.02));
    // zeros of cos(nu x + 0.3) spaced pi/nu ~ 4.44 over [15, 30]
    CHECK(f.a_sign_changes_right >= 3);
}

TEST_CASE("sweep over a short g list") {
    SolveOptions opts;
    const std::vector<double> gs = {1.5, 1.35, 1.2};
    const auto pts = g_sweep(1.0, gs, opts);
    REQUIRE(pts.size() == 3);
    double prev_sup = 1e300;
    for (const auto& pt : pts) {
        CHECK(pt.record.converged);
        CHECK(pt.record.min_energy <= pt.record.testfn_bound + 1e-9);
        CHECK(pt.record.circle_sup <= prev_sup + 1e-3);
        prev_sup = pt.record.circle_sup;
    }
    CHECK(pts.front().record.min_energy > pts.back().record.min_energy);

    CHECK_THROWS_AS(g_sweep(1.0, {1.2, 1.5}, opts), std::invalid_argument);
    CHECK_THROWS_AS(g_sweep(1.0, {0.9}, opts), std::invalid_argument);
    CHECK_THROWS_AS(g_sweep(1.0, {}, opts), std::invalid_argument);
}
