#pragma once

// Runtime verification suites mirroring each module's documented
// invariants; used by the CLI `check` command and the acceptance tests.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pspectral/eigensolver.hpp"
#include "pspectral/geometry.hpp"
#include "pspectral/prufer.hpp"
#include "pspectral/ptrig.hpp"
#include "pspectral/rayleigh.hpp"

namespace pspectral {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline void add_check(std::vector<CheckResult>& out, const std::string& suite,
                      const std::string& name, bool pass, double observed, double bound) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << "observed " << observed << " vs bound " << bound;
    out.push_back({suite, name, pass, ss.str()});
}

} // namespace detail

inline std::vector<CheckResult> check_ptrig() {
    std::vector<CheckResult> out;
    const std::vector<double> ps = {1.2, 1.5, 2.0, 3.0, 7.0};

    double worst_id = 0.0, worst_refl = 0.0, worst_per = 0.0, worst_fd = 0.0, worst_pip = 0.0;
    for (double pv : ps) {
        PExponent p(pv);
        const double lo = -0.5 * pi_p(p), hi = 1.5 * pi_p(p);
        for (int i = 0; i <= 400; ++i) {
            const double t = lo + (hi - lo) * i / 400.0;
            const SinCos sc = sincos_p(p, t);
            worst_id = std::max(worst_id, std::abs(std::pow(std::abs(sc.s), pv) +
                                                   std::pow(std::abs(sc.c), pv) - 1.0));
            worst_refl = std::max(worst_refl, std::abs(sin_p(p, pi_p(p) - t) - sc.s));
            worst_per = std::max(worst_per, std::abs(sin_p(p, t + 2.0 * pi_p(p)) - sc.s));
            if (std::abs(sc.c) > 0.1) {
                const double fd = (sin_p(p, t + 1e-6) - sin_p(p, t - 1e-6)) / 2e-6;
                worst_fd = std::max(worst_fd, std::abs(fd - sc.c));
            }
        }
        worst_pip = std::max(worst_pip,
                             std::abs(pi_p_defining_integral(p) - pi_p(p)) / pi_p(p));
    }
    detail::add_check(out, "ptrig", "pythagorean identity on the 401-point grid",
                      worst_id < 1e-9, worst_id, 1e-9);
    detail::add_check(out, "ptrig", "reflection formula", worst_refl < 1e-10, worst_refl, 1e-10);
    detail::add_check(out, "ptrig", "2 pi_p periodicity", worst_per < 1e-10, worst_per, 1e-10);
    detail::add_check(out, "ptrig", "finite difference of sin_p vs cos_p",
                      worst_fd < 1e-6, worst_fd, 1e-6);
    detail::add_check(out, "ptrig", "pi_p closed form vs defining integral",
                      worst_pip < 1e-10, worst_pip, 1e-10);
    return out;
}

inline std::vector<CheckResult> check_ode() {
    std::vector<CheckResult> out;

    {
        ModelParams mp(PExponent(2.5), 1.0, 2.0);
        const ModelSolution sol = solve_ivp_cap(mp, -1.5, std::nan(""), 1e-12, 512);
        double rmax = 0.0, worst = 0.0;
        for (double lr : sol.log_r) rmax = std::max(rmax, std::exp(lr));
        for (std::size_t i = 0; i < sol.t.size(); ++i) {
            const double r = std::exp(sol.log_r[i]);
            const SinCos sc = sincos_p(mp.p, sol.theta[i]);
            worst = std::max(worst, std::abs(mp.alpha * sol.w[i] - r * sc.s) +
                                        std::abs(sol.w_prime[i] - r * sc.c));
        }
        detail::add_check(out, "ode", "reconstruction identity", worst < 1e-9 * rmax, worst,
                          1e-9 * rmax);
    }

    for (double pv : {2.0, 3.0}) {
        ModelParams mp(PExponent(pv), 1.0, 2.0);
        const ModelSolution sol = solve_ivp_cap(mp, -1.0, std::nan(""), 1e-12, 4096);
        double worst = 0.0;
        for (std::size_t i = 2; i + 2 < sol.t.size(); ++i) {
            const double wp = sol.w_prime[i];
            if (std::abs(wp) <= 1e-6) continue;
            const double coeff = (pv - 1.0) * std::pow(std::abs(wp), pv - 2.0);
            const double fd1 = (sol.w_prime[i + 1] - sol.w_prime[i - 1]) /
                               (sol.t[i + 1] - sol.t[i - 1]);
            const double fd2 = (sol.w_prime[i + 2] - sol.w_prime[i - 2]) /
                               (sol.t[i + 2] - sol.t[i - 2]);
            if (coeff * std::abs(fd1 - fd2) / 3.0 > 1e-5 * mp.lambda) continue;
            const double res = coeff * fd1 - mp.kappa * sol.t[i] * signed_pow(wp, pv - 1.0) +
                               mp.lambda * signed_pow(sol.w[i], pv - 1.0);
            worst = std::max(worst, std::abs(res));
        }
        detail::add_check(out, "ode", "ODE residual (p = " + std::to_string(pv) + ")",
                          worst < 1e-4 * mp.lambda, worst, 1e-4 * mp.lambda);
    }

    {
        ModelParams mp(PExponent(3.0), 0.0, 2.0);
        const ModelSolution sol = solve_ivp_odd(mp, 3.0, 1e-12, 256);
        double worst = 0.0, worst_odd = 0.0;
        const std::size_t n = sol.t.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double ref = sin_p(mp.p, mp.alpha * sol.t[i]) / mp.alpha;
            worst = std::max(worst, std::abs(sol.w[i] - ref));
            worst_odd = std::max(worst_odd, std::abs(sol.w[i] + sol.w[n - 1 - i]));
        }
        detail::add_check(out, "ode", "kappa = 0 odd solution is the p-sine", worst < 1e-8,
                          worst, 1e-8);
        detail::add_check(out, "ode", "odd extension is odd", worst_odd < 1e-12, worst_odd,
                          1e-12);
    }

    for (double pv : {2.0, 3.0}) {
        PExponent p(pv);
        const double l0 = pv == 2.0 ? 1.0 : lambda0(p, 1.0, 1e-6);
        ModelParams mp(p, 1.0, 0.999 * l0);
        const ModelSolution sol = solve_ivp_odd(mp, 50.0, 1e-11, 512);
        double min_wp = std::numeric_limits<double>::infinity();
        for (double wp : sol.w_prime) min_wp = std::min(min_wp, wp);
        detail::add_check(out, "ode",
                          "below lambda_0 the odd solution never turns (p = " +
                              std::to_string(pv) + ")",
                          min_wp > 0.0, min_wp, 0.0);
    }

    {
        ModelParams mp(PExponent(2.5), 1.0, 2.0);
        const PruferTrajectory t1 = integrate_prufer(mp, 0.0, 0.0, 0.0, 2.0, 1e-11);
        const PruferTrajectory t2 = integrate_prufer(mp, 0.0, 0.0, 0.0, 2.0, 1e-11);
        bool same = t1.t == t2.t && t1.theta == t2.theta && t1.log_r == t2.log_r;
        out.push_back({"ode", "trajectories are bit-deterministic", same,
                       same ? "bit-identical" : "mismatch"});
    }
    return out;
}

inline std::vector<CheckResult> check_eigen() {
    std::vector<CheckResult> out;
    constexpr double kPi = 3.14159265358979323846;

    {
        double worst = 0.0;
        for (double pv : {1.5, 2.0, 3.0, 4.0}) {
            PExponent p(pv);
            for (double D : {0.5, 1.0, kPi, 5.0}) {
                const double mu = mu_p(p, 0.0, D).lambda;
                const double closed = (pv - 1.0) * std::pow(p.pi_p() / D, pv);
                worst = std::max(worst, std::abs(mu - closed) / mu);
            }
        }
        detail::add_check(out, "eigen", "kappa = 0 closed-form grid", worst < 1e-8, worst, 1e-8);
    }

    {
        bool mono = true;
        for (double pv : {2.0, 3.0})
            for (double kappa : {-1.0, 0.0, 1.0}) {
                double prev = std::numeric_limits<double>::infinity();
                for (double D : {1.0, 2.0, 3.0, 4.0}) {
                    const double mu = mu_p(PExponent(pv), kappa, D).lambda;
                    mono = mono && mu < prev;
                    prev = mu;
                }
            }
        out.push_back({"eigen", "mu_p strictly decreasing in D", mono,
                       mono ? "all 24 transitions decreasing" : "violation found"});
    }

    {
        bool ordered = true;
        double margin = std::numeric_limits<double>::infinity();
        for (double pv : {2.0, 3.0}) {
            PExponent p(pv);
            const double l0 = lambda0(p, 1.0, 1e-6);
            for (double D : {1.0, 2.0, 4.0}) {
                const double mu = mu_p(p, 1.0, D).lambda;
                ordered = ordered && mu > l0;
                margin = std::min(margin, mu - l0);
            }
        }
        detail::add_check(out, "eigen", "mu_p(kappa > 0) dominates lambda0", ordered, margin,
                          0.0);
    }

    {
        bool ok = true;
        for (double pv : {2.0, 3.0}) {
            PExponent p(pv);
            const double l0 = pv == 2.0 ? 1.0 : lambda0(p, 1.0, 1e-6);
            const double lambda = 1.5 * l0;
            ModelParams mp(p, 1.0, lambda);
            const double db = delta_bar(p, 1.0, lambda);
            double m_prev = 1.0 + 1e-9;
            for (double off : {1.0, 2.0, 4.0}) {
                const ModelSolution sol = solve_ivp_cap(mp, -0.5 * db - off);
                ok = ok && sol.delta_of_a > db && sol.m_of_a < m_prev;
                m_prev = sol.m_of_a;
            }
            ok = ok && std::abs(solve_ivp_cap(mp, -0.5 * db).m_of_a - 1.0) < 1e-8;
        }
        out.push_back({"eigen", "delta(a) > delta_bar and m(a) decreasing for a < -a_bar", ok,
                       ok ? "sampled at offsets 1, 2, 4" : "violation found"});
    }

    {
        double worst = 0.0;
        const double s = 2.0;
        struct Case { double p, kappa, D; };
        for (const Case c : {Case{2.0, 1.0, 1.3}, Case{3.0, 1.0, 1.0}, Case{2.5, -1.0, 2.0}}) {
            PExponent p(c.p);
            const double lhs = mu_p(p, c.kappa, c.D, 1e-11).lambda;
            const double rhs =
                std::pow(s, c.p) * mu_p(p, c.kappa / (s * s), c.D * s, 1e-11).lambda;
            worst = std::max(worst, std::abs(lhs - rhs) / lhs);
        }
        detail::add_check(out, "eigen", "scaling consistency mu(p,kappa,D) = s^p mu(p,kappa/s^2,Ds)",
                          worst < 1e-7, worst, 1e-7);
    }
    return out;
}

inline std::vector<CheckResult> check_rayleigh() {
    std::vector<CheckResult> out;

    auto gaussian_dom = [](int n, double pv) {
        std::vector<double> mesh(n), rho(n);
        for (int i = 0; i < n; ++i) {
            mesh[i] = -1.0 + 2.0 * i / (n - 1);
            rho[i] = std::exp(-0.5 * mesh[i] * mesh[i]);
        }
        return WeightedInterval(std::move(mesh), std::move(rho), PExponent(pv));
    };

    {
        const auto dom = gaussian_dom(128, 3.0);
        const DiscreteEigenpair ep = minimize_rayleigh(dom);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        double worst = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> phi(dom.size());
            for (double& v : phi) v = uni(rng);
            const auto proj = project_constraint(phi, dom);
            worst = std::min(worst, rayleigh_quotient(proj, dom) - ep.lambda_hat);
        }
        detail::add_check(out, "rayleigh", "upper-bound property of trial functions",
                          worst >= -1e-12, worst, -1e-12);
    }

    {
        bool order_ok = true;
        for (double pv : {2.0, 3.0}) {
            std::vector<double> lam;
            for (int n : {129, 257, 513})
                lam.push_back(minimize_rayleigh(gaussian_dom(n, pv)).lambda_hat);
            const double d1 = std::abs(lam[0] - lam[1]);
            const double d2 = std::abs(lam[1] - lam[2]);
            order_ok = order_ok && d2 < d1 / 1.8;
        }
        out.push_back({"rayleigh", "mesh refinement converges at order >= 1", order_ok,
                       order_ok ? "successive gaps shrink by > 1.8x" : "violation"});
    }

    {
        const auto dom = gaussian_dom(256, 3.0);
        DescentTrace trace;
        minimize_rayleigh(dom, std::string("odd-linear"), 20000, 1e-10, 0, &trace);
        bool mono = true;
        for (std::size_t k = 1; k < trace.quotient.size(); ++k)
            mono = mono && trace.quotient[k] <= trace.quotient[k - 1];
        double mass = 0.0;
        for (double v : dom.node_masses()) mass += v;
        double worst_res = 0.0;
        for (double res : trace.constraint_residual)
            worst_res = std::max(worst_res, std::abs(res));
        out.push_back({"rayleigh", "descent is monotone", mono,
                       mono ? "non-increasing through all iterates" : "violation"});
        detail::add_check(out, "rayleigh", "constraint preserved at accepted iterates",
                          worst_res < 1e-10 * mass, worst_res, 1e-10 * mass);
    }
    return out;
}

inline std::vector<CheckResult> check_geometry() {
    std::vector<CheckResult> out;
    constexpr double kPi = 3.14159265358979323846;

    {
        bool ok = true;
        double worst_closure = 0.0, worst_fp = 0.0;
        for (double kappa : {0.0, 1.0}) {
            for (double r : {0.1, 0.05}) {
                const SurfaceSpec spec(3, kappa, 1.0, r, r / 10.0);
                const RevolutionSurface surf = build_surface(spec, 2048);
                const std::size_t N = surf.s_grid.size() - 1;
                worst_closure = std::max(worst_closure, std::abs(surf.y.back()) / r);
                worst_fp = std::max(worst_fp, std::abs(surf.f_prime[N / 2]));
                ok = ok && std::abs(surf.y_prime.back() + 1.0) < 1e-6;
                for (std::size_t i = 0; i <= N; ++i)
                    ok = ok && surf.k[i] == surf.k[N - i] &&
                         surf.f_double_prime[i] == surf.f_double_prime[N - i];
            }
        }
        detail::add_check(out, "geometry", "profile closure |y(D)| / r", worst_closure < 1e-8,
                          worst_closure, 1e-8);
        detail::add_check(out, "geometry", "f'(D/2) vanishes", worst_fp < 1e-10, worst_fp,
                          1e-10);
        out.push_back({"geometry", "mirror evenness of k and f'' on grid points", ok,
                       ok ? "exact" : "violation"});
    }

    {
        bool ok = true;
        double min_slack = std::numeric_limits<double>::infinity();
        for (double kappa : {0.0, 1.0}) {
            const SurfaceSpec spec(3, kappa, 1.0, 0.05, 0.005);
            const RevolutionSurface surf = build_surface(spec, 2048);
            const double slack = verify_curvature(surf, 3, kappa);
            ok = ok && slack >= 0.0;
            min_slack = std::min(min_slack, slack);
        }
        detail::add_check(out, "geometry", "curvature admissibility for n = 3, r <= 0.05",
                          ok, min_slack, 0.0);
    }

    {
        // test-function bound: R[psi] between the discrete minimum and
        // mu_p of the shortened interval
        PExponent p(2.0);
        const double kappa = 1.0, D = 1.0, r = 0.05, delta = 0.005;
        const SurfaceSpec spec(3, kappa, D, r, delta);
        const RevolutionSurface surf = build_surface(spec, 2048);
        const WeightedInterval dom = reduce_to_interval(surf, 3, p);
        const double L = D - kPi * r - 2.0 * delta;
        const double mu_L = mu_p(p, kappa, L).lambda;
        const ModelSolution model = model_for_range(p, kappa, mu_L, 1.0, 1e-8, 2048);
        const Pchip w_of_t(model.t, model.w);
        std::vector<double> psi(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i)
            psi[i] = w_of_t(std::clamp(dom.mesh[i] - 0.5 * D, model.t.front(), model.t.back()));
        const double R = rayleigh_quotient(psi, dom);
        const double lam_min = minimize_rayleigh(dom).lambda_hat;
        const bool ok = R >= lam_min - 1e-12 && R <= mu_L * 1.02;
        std::ostringstream ss;
        ss.precision(6);
        ss << "lambda_min " << lam_min << " <= R[psi] " << R << " <= mu(L) " << mu_L;
        out.push_back({"geometry", "test-function bound chain", ok, ss.str()});
    }
    return out;
}

inline std::vector<CheckResult> run_check_suite(const std::string& suite) {
    if (suite == "ptrig") return check_ptrig();
    if (suite == "ode") return check_ode();
    if (suite == "eigen") return check_eigen();
    if (suite == "rayleigh") return check_rayleigh();
    if (suite == "geometry") return check_geometry();
    if (suite == "all") {
        std::vector<CheckResult> out;
        for (const char* s : {"ptrig", "ode", "eigen", "rayleigh", "geometry"}) {
            auto part = run_check_suite(s);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    throw std::invalid_argument("unknown check suite '" + suite + "'");
}

} // namespace pspectral
