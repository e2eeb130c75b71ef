#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebandit/exact_dp.hpp"
#include "ebandit/limit.hpp"
#include "ebandit/quadrature.hpp"

using namespace ebandit;

namespace {

ScaledPrior symmetric_scaled(double d, int N) {
    return ScaledPrior::exponential({{d, -d, 0.5}, {-d, d, 0.5}}, 1.0, N);
}

struct Moments {
    double mass, mean, second;
};

Moments kernel_moments(double t, double x_hat, double eps) {
    const double k = t / eps;
    const double b = 1.0 + std::sqrt(eps) * x_hat;
    const double zmax = k * b * std::expm1(40.0 / (k - 1.0));
    const auto rule = composite_gl16(-1.0, zmax - 1.0, 96);
    Moments m{0, 0, 0};
    for (const auto& q : rule) {
        const double f = f_kernel(q.x, t, x_hat, eps);
        m.mass += q.w * f;
        m.mean += q.w * q.x * f;
        m.second += q.w * q.x * q.x * f;
    }
    return m;
}

// Closed-form moments of the pre-limit kernel (beta integrals).
Moments exact_moments(double t, double x_hat, double eps) {
    const double k = t / eps;
    const double b = 1.0 + std::sqrt(eps) * x_hat;
    const double m0 = k / (k - 1.0);
    const double z1 = b * k * k / ((k - 1.0) * (k - 2.0));
    const double z2 = 2.0 * b * b * k * k * k / ((k - 1.0) * (k - 2.0) * (k - 3.0));
    return {m0, z1 - m0, z2 - 2.0 * z1 + m0};
}

}  // namespace

TEST_CASE("scaled state round trip") {
    ScaledPrior sp = symmetric_scaled(1.0, 100);
    const BanditState s{37.5, 40, 12.0, 11};
    const ScaledState z = scale_state(s, sp);
    CHECK(z.t1 == doctest::Approx(0.4));
    const BanditState back = unscale_state(z, sp);
    CHECK(back.X1 == doctest::Approx(s.X1).epsilon(1e-12));
    CHECK(back.n1 == s.n1);
    CHECK(back.X2 == doctest::Approx(s.X2).epsilon(1e-12));

    // Centered income maps to x = 0; a full horizon on one arm to t = 1.
    CHECK(scale_state({40.0, 40, 0.0, 0}, sp).x1 == doctest::Approx(0.0));
    CHECK(scale_state({90.0, 100, 0.0, 0}, sp).t1 == doctest::Approx(1.0));
}

TEST_CASE("scaled gap densities") {
    ScaledPrior pm({{0.7, 0.7, 1.0}}, 1.0, 1.0, 50);
    auto [g1, g2] = g_limit(0.3, 0.4, -0.2, 0.5, pm);
    CHECK(g1 == 0.0);
    CHECK(g2 == 0.0);

    ScaledPrior sym = symmetric_scaled(1.0, 50);
    auto a = g_limit(0.3, 0.4, 0.3, 0.4, sym);
    CHECK(a.first == doctest::Approx(a.second).epsilon(1e-14));

    // Two-term sum at x1 = x2 = 0, t1 = t2 = 0.5 collapses to exp(-1/2)/pi.
    auto b = g_limit(0.0, 0.5, 0.0, 0.5, sym);
    CHECK(b.first == doctest::Approx(std::exp(-0.5) / M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(g_limit(0.0, 0.0, 0.0, 0.5, sym), std::domain_error);
}

TEST_CASE("g mass equals the prior mean gap") {
    ScaledPrior sp = symmetric_scaled(1.0, 100);
    const double t1 = 0.45, t2 = 0.6;
    // Trapezoid over a wide grid; Gaussian factors integrate to one each.
    const int n = 501;
    const double span = 12.0, step = 2 * span / (n - 1);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int j = 0; j < n; ++j) {
            const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            auto [g1, g2] = g_limit(-span + i * step, t1, -span + j * step, t2, sp);
            total += wi * wj * (g1 + g2) * step * step;
        }
    }
    CHECK(total == doctest::Approx(sp.mean_abs_gap()).epsilon(1e-6));
}

TEST_CASE("pre-limit kernel moment identities") {
    // Stated check points.
    {
        Moments m = kernel_moments(0.5, 0.0, 1e-4);
        CHECK(std::abs(m.mass - (1.0 + 2e-4)) <= 1e-6);
        CHECK(std::abs(m.second - 1.0) <= 0.02);
    }
    {
        Moments m = kernel_moments(0.5, 1.0, 1e-4);
        CHECK(std::abs(m.mean - 0.01) <= 5e-4);
    }
    // Quadrature agrees with the closed-form beta-integral moments, and the
    // residues against the limiting identities carry their exact orders:
    // mass - (1+e/t) = O((e/t)^2), mean - d*xh = 2e/t(1+O(d xh)),
    // second - 1 = 2 d xh + O(d^2 xh^2 + e/t).
    for (double eps : {1e-3, 1e-4}) {
        const double delta = std::sqrt(eps);
        for (double t : {0.1, 0.5, 0.9}) {
            for (double xh : {-2.0, 0.0, 2.0}) {
                const Moments q = kernel_moments(t, xh, eps);
                const Moments ex = exact_moments(t, xh, eps);
                CHECK(std::abs(q.mass - ex.mass) <= 1e-9);
                CHECK(std::abs(q.mean - ex.mean) <= 1e-9);
                CHECK(std::abs(q.second - ex.second) <= 1e-8);
                const double r = eps / t;
                CHECK(std::abs(q.mass - 1.0 - r) <= 1.1 * r * r);
                CHECK(std::abs(q.mean - delta * xh) <= (2.5 + 4.0 * std::abs(delta * xh)) * r);
                CHECK(std::abs(q.second - 1.0) <=
                      2.1 * std::abs(delta * xh) + 3.0 * delta * delta * xh * xh + 14.0 * r);
            }
        }
    }
    CHECK(f_kernel(-1.5, 0.5, 0.0, 1e-4) == 0.0);
    CHECK_THROWS_AS(f_kernel(0.0, 0.5, -150.0, 1e-2), std::domain_error);
}

TEST_CASE("point-mass scaled prior gives identically zero fields") {
    ScaledPrior pm({{0.4, 0.4, 1.0}}, 1.0, 1.0, 20);
    LimitSolveOptions o;
    o.retain_all = true;
    for (auto* solver : {&solve_integro_difference_exponential,
                         &solve_integro_difference_gaussian}) {
        auto f = (*solver)(pm, 1.0 / 10, o);
        for (const auto& s : f.slices())
            for (double v : s.r) CHECK(v == 0.0);
    }
    auto f = solve_pde(pm, 1.0 / 10, 8.0, 0.1, o);
    for (const auto& s : f.slices())
        for (double v : s.r) CHECK(v == 0.0);
}

TEST_CASE("arm-swap symmetry of the scaled fields") {
    ScaledPrior sp = symmetric_scaled(1.0, 20);
    LimitSolveOptions o;
    o.retain_all = true;
    for (auto* solver : {&solve_integro_difference_exponential,
                         &solve_integro_difference_gaussian}) {
        auto f = (*solver)(sp, 1.0 / 20, o);
        const int nx = f.axis().count;
        const auto* sl = f.find(6, 6);
        REQUIRE(sl != nullptr);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                CHECK(std::abs(sl->r[static_cast<std::size_t>(i) * nx + j] -
                               sl->r[static_cast<std::size_t>(j) * nx + i]) <= 1e-12);
    }
}

TEST_CASE("terminal, min and sign structure of a scaled field") {
    ScaledPrior sp = symmetric_scaled(1.0, 20);
    LimitSolveOptions o;
    o.retain_all = true;
    auto f = solve_integro_difference_exponential(sp, 1.0 / 10, o);
    for (const auto& s : f.slices()) {
        if (s.i1 + s.i2 == 10)
            for (double v : s.r) CHECK(v == 0.0);
        for (std::size_t a = 0; a < s.r.size(); ++a) {
            CHECK(s.r[a] >= 0.0);
            CHECK(s.r[a] == std::min(s.r1[a], s.r2[a]));
        }
    }
}

TEST_CASE("gaussian one-step mass identity") {
    // (t+eps) int N(delta x - t y; 0, t(t+eps)) dy = 1 + eps/t.
    const double eps = 0.02, t = 0.3, x = 0.7;
    const double delta = std::sqrt(eps);
    const auto rule = composite_gl16(-60.0, 60.0, 64);
    double mass = 0.0;
    for (const auto& q : rule)
        mass += q.w * gaussian_density(delta * x - t * q.x, 0.0, t * (t + eps));
    mass *= (t + eps);
    CHECK(mass == doctest::Approx(1.0 + eps / t).epsilon(1e-12));
}

TEST_CASE("exponential and gaussian fields drift together as eps shrinks") {
    ScaledPrior sp = symmetric_scaled(1.0, 200);
    auto coarse = compare_exponential_gaussian(sp, 1.0 / 20, 0.2, 0.1);
    auto fine = compare_exponential_gaussian(sp, 1.0 / 40, 0.2, 0.1);
    CHECK(fine.distance.relative() < coarse.distance.relative());
}

TEST_CASE("scaled risk basics") {
    ScaledPrior pm({{0.4, 0.4, 1.0}}, 1.0, 1.0, 20);
    LimitSolveOptions o;
    o.retain_eps0 = {0.1};
    auto f = solve_integro_difference_exponential(pm, 1.0 / 10, o);
    CHECK(scaled_risk(f, pm, 0.1) == doctest::Approx(0.0));

    ScaledPrior sp = symmetric_scaled(1.0, 100);
    LimitSolveOptions o2;
    o2.retain_eps0 = {0.1};
    auto g = solve_integro_difference_exponential(sp, 1.0 / 20, o2);
    const double lower = std::sqrt(sp.D() * sp.N()) * 0.1 * sp.mean_abs_gap();
    CHECK(scaled_risk(g, sp, 0.1) >= lower);
    CHECK_THROWS_AS(scaled_risk(g, sp, 0.13), std::domain_error);
    CHECK_THROWS_AS(scaled_risk(g, sp, 0.2), std::invalid_argument);
}

TEST_CASE("scaled risk tracks the exact forced-start risk") {
    // Finite-N correspondence at eps = 1/100, eps0 = 0.05 <-> n0 = 5.
    ScaledPrior sp = symmetric_scaled(1.0, 100);
    LimitSolveOptions o;
    o.retain_eps0 = {0.05};
    auto f = solve_integro_difference_exponential(sp, 1.0 / 100, o);
    const double sr = scaled_risk(f, sp, 0.05);
    DiscretePrior prior = sp.to_prior();
    const double fr = risk_with_forced_start(prior, 100, 5, GridSpec::for_prior(prior, 48), {2});
    CHECK(std::abs(sr - fr) / fr <= 0.10);
}

TEST_CASE("pde scheme consistency under refinement") {
    ScaledPrior sp = symmetric_scaled(1.0, 200);
    LimitSolveOptions o;
    o.x_span = 6.0;
    o.retain_eps0 = {0.25};
    auto a = solve_pde(sp, 1.0 / 8, 6.0, 0.25, o);
    auto b = solve_pde(sp, 1.0 / 32, 6.0, 0.25, o);
    auto c = solve_pde(sp, 1.0 / 128, 6.0, 0.25, o);
    const double ra = scaled_risk(a, sp, 0.25);
    const double rb = scaled_risk(b, sp, 0.25);
    const double rc = scaled_risk(c, sp, 0.25);
    // First-order scheme: the (b, c) difference is bounded by the coarser
    // (a, b) difference, which is the scheme's refinement error report.
    CHECK(std::abs(rc - rb) <= std::abs(rb - ra));
}

TEST_CASE("pde field matches the exponential recursion on the floored region") {
    ScaledPrior sp = symmetric_scaled(1.0, 200);
    auto res = compare_pde_exponential(sp, 1.0 / 40, 0.3);
    // Modest tolerance at this coarse eps; the acceptance suite runs the
    // full-size configuration.
    CHECK(res.distance.relative() < 0.25);
    CHECK(res.risk_a > 0.0);
    CHECK(res.risk_b > 0.0);
}
