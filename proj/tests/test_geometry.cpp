#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pspectral/geometry.hpp"
#include "pspectral/interp.hpp"

using namespace pspectral;
using Catch::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("bump plateaus, antisymmetry, monotonicity") {
    CHECK(bump(-2.0) == 1.0);
    CHECK(bump(-1.0) == 1.0);
    CHECK(bump(1.0) == 0.0);
    CHECK(bump(3.0) == 0.0);
    CHECK(bump(0.0) == Approx(0.5).margin(1e-15));
    CHECK(bump(0.5) == Approx(1.0 - bump(-0.5)).margin(1e-15));
    double prev = 1.1;
    for (double s = -1.2; s <= 1.2; s += 0.05) {
        const double v = bump(s);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("SurfaceSpec validation") {
    CHECK_THROWS_AS(SurfaceSpec(1, 0.0, 1.0, 0.05, 0.005), SpecInfeasible);
    CHECK_THROWS_AS(SurfaceSpec(3, 0.0, 1.0, 0.4, 0.01), SpecInfeasible);  // cap too large
    CHECK_THROWS_AS(SurfaceSpec(3, 0.0, 1.0, 0.05, 0.02), SpecInfeasible); // delta >= r/4
    CHECK_NOTHROW(SurfaceSpec(3, 1.0, 1.0, 0.05, 0.005));
}

TEST_CASE("profile reproduces the spherical cap") {
    const SurfaceSpec spec(3, 1.0, 1.0, 0.1, 0.01);
    const RevolutionSurface surf = build_surface(spec, 2048);
    const double r = spec.cap_radius;
    double worst = 0.0;
    for (std::size_t i = 0; i < surf.s_grid.size(); ++i) {
        const double s = surf.s_grid[i];
        if (s > 0.5 * kPi * r - spec.smoothing_half_width) break;
        worst = std::max(worst, std::abs(surf.y[i] - r * std::sin(s / r)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("flat region has k = 0, nearly constant radius") {
    const SurfaceSpec spec(3, 1.0, 1.0, 0.1, 0.01);
    const RevolutionSurface surf = build_surface(spec, 2048);
    const double join = 0.5 * kPi * spec.cap_radius + spec.smoothing_half_width;
    for (std::size_t i = 0; i < surf.s_grid.size(); ++i) {
        const double s = surf.s_grid[i];
        if (s <= join || s >= spec.D - join) continue;
        CHECK(surf.k[i] == 0.0);
        CHECK(std::abs(surf.y_prime[i]) < 1e-7);
        CHECK(std::abs(surf.y[i] / spec.cap_radius - 1.0) < 0.05);
        CHECK(surf.f_double_prime[i] == spec.kappa);
    }
}

TEST_CASE("profile closure and potential symmetry") {
    for (double r : {0.1, 0.05}) {
        const SurfaceSpec spec(3, 1.0, 1.0, r, r / 10.0);
        const RevolutionSurface surf = build_surface(spec, 4096);
        const std::size_t N = surf.s_grid.size() - 1;
        CHECK(std::abs(surf.y.back()) < 1e-8 * r);
        CHECK(std::abs(surf.y_prime.back() + 1.0) < 1e-6);
        CHECK(std::abs(surf.f_prime[N / 2]) < 1e-10);
        // evenness of the mirrored data, exact on grid points
        for (std::size_t i = 0; i <= N; ++i) {
            CHECK(surf.k[i] == surf.k[N - i]);
            CHECK(surf.f_double_prime[i] == surf.f_double_prime[N - i]);
        }
    }
}

TEST_CASE("ricci eigenvalues in the cap and flat regions") {
    const SurfaceSpec spec(3, 1.0, 1.0, 0.1, 0.01);
    const RevolutionSurface surf = build_surface(spec, 2048);
    const auto [radial, tangential] = ricci_f(surf, 3);
    const double expect_cap = 1.0 + 200.0 - 10.0 / kPi; // kappa + (n-1)/r^2 - kappa D/(pi r)
    const double join = 0.5 * kPi * 0.1;

    bool cap_checked = false, flat_checked = false;
    for (std::size_t i = 0; i < surf.s_grid.size(); ++i) {
        const double s = surf.s_grid[i];
        if (s > 0.01 && s < join - 0.015) {
            CHECK(radial[i] == Approx(expect_cap).margin(1e-6));
            cap_checked = true;
        }
        if (s > join + 0.02 && s < spec.D - join - 0.02) {
            CHECK(radial[i] == Approx(spec.kappa).margin(1e-12));
            flat_checked = true;
        }
    }
    CHECK(cap_checked);
    CHECK(flat_checked);
}

TEST_CASE("curvature admissibility") {
    SECTION("n = 3 admits positive kappa for small caps") {
        const SurfaceSpec spec(3, 1.0, 1.0, 0.05, 0.005);
        const RevolutionSurface surf = build_surface(spec, 2048);
        // the flat-part radial direction saturates Ric_f = kappa g exactly
        CHECK(verify_curvature(surf, 3, 1.0) >= 0.0);
    }
    SECTION("n = 2 fails for positive kappa") {
        const SurfaceSpec spec(2, 1.0, 1.0, 0.05, 0.005);
        const RevolutionSurface surf = build_surface(spec, 2048);
        CHECK(verify_curvature(surf, 2, 1.0) < 0.0);
    }
    SECTION("kappa = 0 flat radial slack is exactly zero") {
        const SurfaceSpec spec(3, 0.0, 1.0, 0.05, 0.005);
        const RevolutionSurface surf = build_surface(spec, 2048);
        CHECK(verify_curvature(surf, 3, 0.0) == 0.0);
    }
}

TEST_CASE("reduction to a weighted interval") {
    const SurfaceSpec spec(3, 1.0, 1.0, 0.1, 0.01);
    const RevolutionSurface surf = build_surface(spec, 2048);
    const WeightedInterval dom = reduce_to_interval(surf, 3, PExponent(2.0));
    CHECK(dom.rho.front() == 0.0);
    CHECK(dom.rho.back() == 0.0);
    double mass = 0.0;
    for (double m : dom.node_masses()) mass += m;
    CHECK(mass > 0.0);
    CHECK(std::isfinite(mass));
    // flat region: rho = y^{n-1} e^{-f} with y = r (1 + o(delta))
    const std::size_t mid = surf.s_grid.size() / 2;
    const double expect = std::pow(spec.cap_radius, 2) * std::exp(-surf.f[mid]);
    CHECK(dom.rho[mid] == Approx(expect).epsilon(0.05));
}

TEST_CASE("cylinder interval reproduces mu_p") {
    PExponent p(2.0);
    const WeightedInterval dom = cylinder_interval(p, 1.0, 2.0, 3, 0.1, 1024);
    const DiscreteEigenpair ep = minimize_rayleigh(dom);
    const double mu = mu_p(p, 1.0, 2.0).lambda;
    CHECK(ep.lambda_hat == Approx(mu).epsilon(1e-3));
}

TEST_CASE("cylinder quotient does not depend on the radius") {
    PExponent p(3.0);
    const auto dom_a = cylinder_interval(p, 1.0, 2.0, 3, 0.1, 256);
    const auto dom_b = cylinder_interval(p, 1.0, 2.0, 3, 1.0, 256);
    // the constant factor r^{n-1} cancels from the quotient identically
    std::vector<double> phi(dom_a.size());
    for (std::size_t i = 0; i < phi.size(); ++i)
        phi[i] = dom_a.mesh[i] + 0.2 * std::sin(3.0 * dom_a.mesh[i]);
    CHECK(rayleigh_quotient(phi, dom_a) ==
          Approx(rayleigh_quotient(phi, dom_b)).epsilon(1e-14));
    // and the minimized values agree to solver tolerance
    const double a = minimize_rayleigh(dom_a).lambda_hat;
    const double b = minimize_rayleigh(dom_b).lambda_hat;
    CHECK(a == Approx(b).epsilon(1e-7));
}

TEST_CASE("cylinder at kappa = 0 converges to the closed form") {
    PExponent p(3.0);
    const double closed = 2.0 * std::pow(p.pi_p() / 2.0, 3.0);
    const double lam = minimize_rayleigh(cylinder_interval(p, 0.0, 2.0, 3, 0.5, 2048)).lambda_hat;
    CHECK(lam == Approx(closed).epsilon(1e-4));
}

TEST_CASE("test function bound on the reduced capped surface") {
    // psi(s) = w(s - D/2) on the waist, continued as a constant over the
    // caps, where w is the model of the shortened interval: its quotient
    // must lie between the discrete minimum and mu_p of that interval.
    PExponent p(2.0);
    const double kappa = 1.0, D = 1.0, r = 0.05, delta = 0.005;
    const SurfaceSpec spec(3, kappa, D, r, delta);
    const RevolutionSurface surf = build_surface(spec, 4096);
    const WeightedInterval dom = reduce_to_interval(surf, 3, p);

    const double L = D - kPi * r - 2.0 * delta;
    const double mu_L = mu_p(p, kappa, L).lambda;
    const ModelSolution model = model_for_range(p, kappa, mu_L, 1.0, 1e-8, 2048);
    const Pchip w_of_t(model.t, model.w);

    std::vector<double> psi(dom.size());
    const double t_left = model.t.front(), t_right = model.t.back();
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const double t = dom.mesh[i] - 0.5 * D;
        psi[i] = w_of_t(std::clamp(t, t_left, t_right));
    }
    const double R = rayleigh_quotient(psi, dom);
    const DiscreteEigenpair ep = minimize_rayleigh(dom);
    CHECK(R >= ep.lambda_hat - 1e-12);
    CHECK(R <= mu_L * 1.02);
}

TEST_CASE("sharpness rows shrink with the cap radius") {
    PExponent p(2.0);
    SharpnessOptions opt;
    opt.mesh_N = 1024;
    const auto rows = sharpness_experiment(p, 0.0, 3, 1.0, {0.1, 0.05}, opt);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "ok");
    CHECK(rows[1].status == "ok");
    CHECK(rows[0].min_slack >= 0.0);
    CHECK(std::abs(rows[1].gap) < std::abs(rows[0].gap));
}

TEST_CASE("sharpness reports inadmissible rows") {
    PExponent p(2.0);
    SharpnessOptions opt;
    opt.mesh_N = 512;
    const auto rows = sharpness_experiment(p, 1.0, 2, 1.0, {0.05}, opt);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == "curvature_violated");
    CHECK(std::isnan(rows[0].lambda_hat));
    CHECK(rows[0].min_slack < 0.0);
}
