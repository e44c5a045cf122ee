#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pspectral/prufer.hpp"
#include "oracles.hpp"

using namespace pspectral;
using Catch::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Largest ODE residual over grid points where |w'| > 1e-6 and the
// finite-difference stencil certifies itself: points where a Richardson
// estimate shows w''_fd unresolved (endpoint degeneracy for p > 2) are
// skipped, and the caller-visible fraction of checked points is returned
// through `checked_fraction`.
double max_ode_residual(const ModelSolution& sol, double* checked_fraction = nullptr,
                        double noise_budget = 1e-5) {
    const double p = sol.params.p.value();
    double worst = 0.0;
    std::size_t checked = 0, eligible = 0;
    for (std::size_t i = 2; i + 2 < sol.t.size(); ++i) {
        const double wp = sol.w_prime[i];
        if (std::abs(wp) <= 1e-6) continue;
        ++eligible;
        const double coeff = (p - 1.0) * std::pow(std::abs(wp), p - 2.0);
        const double fd1 = (sol.w_prime[i + 1] - sol.w_prime[i - 1]) /
                           (sol.t[i + 1] - sol.t[i - 1]);
        const double fd2 = (sol.w_prime[i + 2] - sol.w_prime[i - 2]) /
                           (sol.t[i + 2] - sol.t[i - 2]);
        if (coeff * std::abs(fd1 - fd2) / 3.0 > noise_budget * sol.params.lambda) continue;
        ++checked;
        const double res = coeff * fd1 -
                           sol.params.kappa * sol.t[i] * signed_pow(wp, p - 1.0) +
                           sol.params.lambda * signed_pow(sol.w[i], p - 1.0);
        worst = std::max(worst, std::abs(res));
    }
    if (checked_fraction)
        *checked_fraction = eligible ? double(checked) / double(eligible) : 0.0;
    return worst;
}
} // namespace

TEST_CASE("ModelParams derives alpha and validates") {
    ModelParams mp(PExponent(3.0), 1.0, 2.0);
    CHECK(mp.alpha == Approx(std::pow(1.0, 1.0 / 3.0)).epsilon(1e-15)); // (2/2)^{1/3}
    CHECK_THROWS_AS(ModelParams(PExponent(2.0), 0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(PExponent(2.0), 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("prufer_rhs special values") {
    ModelParams mp(PExponent(3.0), 2.0, 5.0);
    SECTION("kappa t term vanishes at t = 0") {
        const State2 d = prufer_rhs(0.0, 0.7, mp);
        CHECK(d[0] == Approx(mp.alpha).epsilon(1e-15));
        CHECK(d[1] == 0.0);
    }
    SECTION("cos_p vanishes at theta = -pi_p/2") {
        const State2 d = prufer_rhs(1.3, -0.5 * mp.p.pi_p(), mp);
        CHECK(d[0] == Approx(mp.alpha).epsilon(1e-13));
        CHECK(std::abs(d[1]) < 1e-13);
    }
    SECTION("classical evaluation at p = 2") {
        ModelParams cp(PExponent(2.0), 1.0, 1.0);
        const State2 d = prufer_rhs(1.0, kPi / 4.0, cp);
        CHECK(d[0] == Approx(1.0 - 0.5).epsilon(1e-12));
        CHECK(d[1] == Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("kappa = 0 phase flow is linear") {
    for (double pv : {1.5, 2.0, 3.0}) {
        ModelParams mp(PExponent(pv), 0.0, 2.0);
        const double tol = 1e-12;
        const PruferTrajectory tr = integrate_prufer(mp, 0.0, 0.0, 0.3, 4.0, tol);
        double worst_theta = 0.0, worst_logr = 0.0;
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            worst_theta = std::max(worst_theta, std::abs(tr.theta[i] - mp.alpha * tr.t[i]));
            worst_logr = std::max(worst_logr, std::abs(tr.log_r[i] - 0.3));
        }
        CHECK(worst_theta < 10.0 * tol);
        CHECK(worst_logr == 0.0);
    }
}

TEST_CASE("terminal phase matches a fixed-step RK4 oracle") {
    // p = 2: the oracle right-hand side uses classical trig only.
    ModelParams mp(PExponent(2.0), 1.0, 2.0);
    const PruferTrajectory tr = integrate_prufer(mp, 0.0, 0.0, 0.0, 1.0, 1e-13);
    const double alpha = std::sqrt(2.0);
    auto rhs = [alpha](double t, std::array<double, 2> y) -> std::array<double, 2> {
        return {alpha - t * std::cos(y[0]) * std::sin(y[0]),
                t * std::cos(y[0]) * std::cos(y[0])};
    };
    const auto ref = oracles::rk4_fixed(rhs, 0.0, {0.0, 0.0}, 1.0, 1000000);
    CHECK(std::abs(tr.theta.back() - ref[0]) < 1e-9);
    CHECK(std::abs(tr.log_r.back() - ref[1]) < 1e-9);
}

TEST_CASE("phase increments stay below pi_p/4") {
    ModelParams mp(PExponent(3.0), 1.0, 3.0);
    const PruferTrajectory tr = integrate_prufer(mp, -2.0, -0.5 * mp.p.pi_p(), 0.0, 3.0, 1e-10);
    for (std::size_t i = 1; i < tr.t.size(); ++i)
        CHECK(std::abs(tr.theta[i] - tr.theta[i - 1]) < 0.25 * mp.p.pi_p());
}

TEST_CASE("integration is deterministic") {
    ModelParams mp(PExponent(2.5), 1.0, 2.0);
    const PruferTrajectory t1 = integrate_prufer(mp, 0.0, 0.0, 0.0, 2.0, 1e-11);
    const PruferTrajectory t2 = integrate_prufer(mp, 0.0, 0.0, 0.0, 2.0, 1e-11);
    REQUIRE(t1.t.size() == t2.t.size());
    for (std::size_t i = 0; i < t1.t.size(); ++i) {
        CHECK(t1.t[i] == t2.t[i]);
        CHECK(t1.theta[i] == t2.theta[i]);
        CHECK(t1.log_r[i] == t2.log_r[i]);
    }
}

TEST_CASE("cap solution for kappa = 0 is the pure p-oscillator") {
    for (double pv : {1.5, 2.0, 3.0}) {
        ModelParams mp(PExponent(pv), 0.0, 2.0);
        const ModelSolution sol = solve_ivp_cap(mp, 0.0);
        CHECK(sol.b_of_a == Approx(mp.p.pi_p() / mp.alpha).margin(1e-10));
        CHECK(sol.m_of_a == Approx(1.0).margin(1e-10));
        CHECK(sol.delta_of_a == Approx(mp.p.pi_p() / mp.alpha).margin(1e-10));
        CHECK(sol.w.front() == Approx(-1.0).margin(1e-12));
        CHECK(std::abs(sol.w_prime.front()) < 1e-12);
    }
}

TEST_CASE("at lambda = lambda_0 the cap solution has no stationary point") {
    // Hermite case p = 2, kappa = 1: lambda_0 = 1 and w' = C int e^{s^2/2} > 0.
    ModelParams mp(PExponent(2.0), 1.0, 1.0);
    CHECK_THROWS_AS(solve_ivp_cap(mp, -3.0), NoStationaryPoint);
}

TEST_CASE("m(a) decreases toward zero as a recedes") {
    ModelParams mp(PExponent(2.0), 1.0, 1.5);
    const double m3 = solve_ivp_cap(mp, -3.0).m_of_a;
    const double m5 = solve_ivp_cap(mp, -5.0).m_of_a;
    const double m8 = solve_ivp_cap(mp, -8.0).m_of_a;
    CHECK(m3 > m5);
    CHECK(m5 > m8);
    CHECK(m8 > 0.0);
    CHECK(m8 < 0.05);
}

TEST_CASE("cap solution is strictly increasing up to b(a)") {
    ModelParams mp(PExponent(3.0), 1.0, 3.0);
    const ModelSolution sol = solve_ivp_cap(mp, -1.0, std::nan(""), 1e-12, 512);
    for (std::size_t i = 1; i + 1 < sol.t.size(); ++i) CHECK(sol.w_prime[i] > 0.0);
    CHECK(sol.w.back() == Approx(sol.m_of_a));
}

TEST_CASE("odd solution reduces to the p-sine for kappa = 0") {
    for (double pv : {1.5, 3.0}) {
        ModelParams mp(PExponent(pv), 0.0, 2.0);
        const ModelSolution sol = solve_ivp_odd(mp, 3.0, 1e-12, 256);
        double worst = 0.0;
        for (std::size_t i = 0; i < sol.t.size(); ++i) {
            const double ref = sin_p(mp.p, mp.alpha * sol.t[i]) / mp.alpha;
            worst = std::max(worst, std::abs(sol.w[i] - ref));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("odd Hermite solution is w = t") {
    ModelParams mp(PExponent(2.0), 1.0, 1.0);
    const ModelSolution sol = solve_ivp_odd(mp, 3.0, 1e-12, 256);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.t.size(); ++i)
        worst = std::max(worst, std::abs(sol.w[i] - sol.t[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("odd extension is exactly odd") {
    ModelParams mp(PExponent(3.0), 1.0, 4.0);
    const ModelSolution sol = solve_ivp_odd(mp, 2.0, 1e-11, 128);
    const std::size_t n = sol.t.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        CHECK(sol.t[i] == -sol.t[j]);
        CHECK(std::abs(sol.w[i] + sol.w[j]) < 1e-12);
        CHECK(sol.w_prime[i] == sol.w_prime[j]);
    }
}

TEST_CASE("reconstruction identity") {
    ModelParams mp(PExponent(2.5), 1.0, 2.0);
    const ModelSolution sol = solve_ivp_cap(mp, -1.5, std::nan(""), 1e-12, 512);
    double rmax = 0.0;
    for (double lr : sol.log_r) rmax = std::max(rmax, std::exp(lr));
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        const double r = std::exp(sol.log_r[i]);
        const SinCos sc = sincos_p(mp.p, sol.theta[i]);
        worst = std::max(worst, std::abs(mp.alpha * sol.w[i] - r * sc.s) +
                                    std::abs(sol.w_prime[i] - r * sc.c));
    }
    CHECK(worst < 1e-9 * rmax);
}

TEST_CASE("finite-difference ODE residual is small") {
    for (double pv : {2.0, 3.0}) {
        ModelParams mp(PExponent(pv), 1.0, 2.0);
        const ModelSolution sol = solve_ivp_cap(mp, -1.0, std::nan(""), 1e-12, 4096);
        double frac = 0.0;
        CHECK(max_ode_residual(sol, &frac) < 1e-4 * mp.lambda);
        CHECK(frac > 0.9);
    }
}

TEST_CASE("odd solution below lambda_0 never turns (p = 2)") {
    // lambda_0 = kappa for p = 2; slightly below it w' must stay positive.
    ModelParams mp(PExponent(2.0), 1.0, 0.999);
    const ModelSolution sol = solve_ivp_odd(mp, 50.0, 1e-11, 512);
    for (std::size_t i = 0; i < sol.t.size(); ++i) CHECK(sol.w_prime[i] > 0.0);
}

TEST_CASE("scale_solution") {
    ModelParams mp(PExponent(3.0), 1.0, 2.0);
    const ModelSolution sol = solve_ivp_cap(mp, -1.0, std::nan(""), 1e-12, 4096);

    SECTION("c = 1 is the identity") {
        const ModelSolution same = scale_solution(sol, 1.0);
        for (std::size_t i = 0; i < sol.t.size(); ++i) {
            CHECK(same.w[i] == sol.w[i]);
            CHECK(same.w_prime[i] == sol.w_prime[i]);
        }
    }
    SECTION("scaled solution still solves the equation") {
        const double c = 0.37;
        const ModelSolution scaled = scale_solution(sol, c);
        CHECK(max_ode_residual(scaled) < 1e-4 * mp.lambda);
        // pointwise homogeneity: every residual term scales by c^{p-1}
        const double p = mp.p.value();
        for (std::size_t i = 1; i + 1 < sol.t.size(); i += 16) {
            if (std::abs(sol.w_prime[i]) <= 1e-6) continue;
            auto res_at = [&](const ModelSolution& s) {
                const double fd = (s.w_prime[i + 1] - s.w_prime[i - 1]) /
                                  (s.t[i + 1] - s.t[i - 1]);
                return (p - 1.0) * std::pow(std::abs(s.w_prime[i]), p - 2.0) * fd -
                       mp.kappa * s.t[i] * signed_pow(s.w_prime[i], p - 1.0) +
                       mp.lambda * signed_pow(s.w[i], p - 1.0);
            };
            const double ru = res_at(sol);
            const double rs = res_at(scaled);
            CHECK(std::abs(rs - std::pow(c, p - 1.0) * ru) <
                  1e-10 * mp.lambda + 1e-9 * std::abs(ru));
        }
    }
    SECTION("m scales linearly") {
        const ModelSolution scaled = scale_solution(sol, 0.37);
        CHECK(scaled.m_of_a == Approx(0.37 * sol.m_of_a).epsilon(1e-14));
    }
    SECTION("c must be positive") {
        CHECK_THROWS_AS(scale_solution(sol, 0.0), std::invalid_argument);
    }
}

TEST_CASE("integrate_prufer validates inputs") {
    ModelParams mp(PExponent(2.0), 1.0, 1.0);
    CHECK_THROWS_AS(integrate_prufer(mp, 0.0, 0.0, 0.0, 1.0, 1e-14), std::invalid_argument);
    CHECK_THROWS_AS(integrate_prufer(mp, 0.0, 0.0, 0.0, 0.0, 1e-10), std::invalid_argument);
}
