#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspectral/errors.hpp"
#include "pspectral/ode.hpp"
#include "pspectral/ptrig.hpp"

namespace pspectral {

/// Parameters of the one-dimensional model equation
///   (p-1)|w'|^{p-2} w'' - kappa t |w'|^{p-2} w' + lambda |w|^{p-2} w = 0
/// together with the derived phase speed alpha = (lambda/(p-1))^{1/p}.
struct ModelParams {
    PExponent p;
    double kappa;
    double lambda;
    double alpha;

    ModelParams(const PExponent& p_, double kappa_, double lambda_)
        : p(p_), kappa(kappa_), lambda(lambda_),
          alpha(std::pow(lambda_ / (p_.value() - 1.0), 1.0 / p_.value())) {
        if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
            throw std::invalid_argument("ModelParams: lambda must be positive");
        if (!std::isfinite(kappa_))
            throw std::invalid_argument("ModelParams: kappa must be finite");
    }
};

/// Right-hand side of the phase system in p-polar coordinates
///   theta' = alpha - (kappa t / (p-1)) cos_p^{p-1}(theta) sin_p(theta)
///   (log r)' = (kappa t / (p-1)) |cos_p(theta)|^p
/// where cos_p^{p-1} denotes the sign-preserving power |c|^{p-2} c.
inline State2 prufer_rhs(double t, double theta, const ModelParams& mp) {
    const SinCos sc = sincos_p(mp.p, theta);
    const double drift = mp.kappa * t / (mp.p.value() - 1.0);
    const double cabs = std::abs(sc.c);
    const double cpow = std::pow(cabs, mp.p.value() - 1.0); // |c|^{p-1}
    const double cpm1 = sc.c >= 0.0 ? cpow : -cpow;          // sign-preserving
    return {mp.alpha - drift * cpm1 * sc.s, drift * cpow * cabs};
}

/// Dense record of one phase-plane integration.
struct PruferTrajectory {
    ModelParams params;
    std::vector<double> t;
    std::vector<double> theta;
    std::vector<double> log_r;
};

namespace detail {

struct IntegrationResult {
    PruferTrajectory traj;
    bool event_hit = false;
};

/// Adaptive Dormand-Prince 5(4) driver for the Prufer system.  When
/// `event_theta` is set, integration stops at the first upward crossing
/// theta = event_theta, located by bisection with single-step
/// re-evaluations from the last accepted state (tolerance 1e-12 in t).
inline IntegrationResult integrate_prufer_core(const ModelParams& mp, double t0, double theta0,
                                               double logr0, double t1, double tol,
                                               double max_step,
                                               std::optional<double> event_theta) {
    if (!(tol >= 1e-13))
        throw std::invalid_argument("integrate_prufer: tol must be >= 1e-13");
    if (t0 == t1)
        throw std::invalid_argument("integrate_prufer: empty time interval");

    auto rhs = [&mp](double t, const State2& y) -> State2 {
        return prufer_rhs(t, y[0], mp);
    };

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double dtheta_cap = mp.p.pi_p() / 16.0;

    IntegrationResult out{PruferTrajectory{mp, {}, {}, {}}, false};
    auto& traj = out.traj;
    const std::size_t reserve = static_cast<std::size_t>(std::min(1e6, 64.0 + span * mp.alpha * 64.0));
    traj.t.reserve(reserve);
    traj.theta.reserve(reserve);
    traj.log_r.reserve(reserve);

    double t = t0;
    State2 y = {theta0, logr0};
    State2 k1 = rhs(t, y);
    traj.t.push_back(t);
    traj.theta.push_back(y[0]);
    traj.log_r.push_back(y[1]);

    double h = dir * std::min({max_step, 0.1 / std::max(mp.alpha, 1e-3), 0.25 * span});

    while (dir * (t1 - t) > 0.0) {
        if (std::abs(h) < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw StepSizeUnderflow("integrate_prufer: step size underflow at t = " +
                                    std::to_string(t));
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        const StepResult st = dopri5_step(rhs, t, y, k1, h);
        const double sc0 = tol + tol * std::max(std::abs(y[0]), std::abs(st.y[0]));
        const double sc1 = tol + tol * std::max(std::abs(y[1]), std::abs(st.y[1]));
        const double e0 = st.err[0] / sc0;
        const double e1 = st.err[1] / sc1;
        const double err = std::sqrt(0.5 * (e0 * e0 + e1 * e1));
        const bool theta_jump = std::abs(st.y[0] - y[0]) >= dtheta_cap;

        if (err <= 1.0 && !theta_jump) {
            // accepted
            if (event_theta && y[0] < *event_theta && st.y[0] >= *event_theta) {
                // refine the crossing by bisection; each probe is a single
                // 5th-order step from the accepted left state
                double lo = 0.0, hi = h;
                const double tol_t = 1e-12 * std::max(1.0, std::abs(t) + std::abs(h));
                for (int it = 0; it < 200 && std::abs(hi - lo) > tol_t; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const StepResult probe = dopri5_step(rhs, t, y, k1, mid);
                    if (probe.y[0] >= *event_theta) hi = mid; else lo = mid;
                }
                const StepResult fin = dopri5_step(rhs, t, y, k1, hi);
                traj.t.push_back(t + hi);
                traj.theta.push_back(fin.y[0]);
                traj.log_r.push_back(fin.y[1]);
                out.event_hit = true;
                return out;
            }
            t += h;
            y = st.y;
            k1 = st.k7;
            traj.t.push_back(t);
            traj.theta.push_back(y[0]);
            traj.log_r.push_back(y[1]);
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            fac = std::min(5.0, std::max(0.2, fac));
            h *= fac;
            if (std::abs(h) > max_step) h = dir * max_step;
        } else {
            const double fac = theta_jump
                                   ? 0.5
                                   : std::min(1.0, std::max(0.1, 0.9 * std::pow(err, -0.2)));
            h *= fac;
        }
    }
    return out;
}

} // namespace detail

/// Integrate the phase system from (t0, theta0, logr0) to t1 with local
/// error control at `tol` (absolute and relative alike).  Deterministic
/// for fixed inputs; output holds every accepted step.
inline PruferTrajectory integrate_prufer(const ModelParams& mp, double t0, double theta0,
                                         double logr0, double t1, double tol,
                                         double max_step = std::numeric_limits<double>::infinity()) {
    return detail::integrate_prufer_core(mp, t0, theta0, logr0, t1, tol, max_step, std::nullopt)
        .traj;
}

/// Samples of a model eigenfunction w together with the shooting data of
/// its defining interval.
struct ModelSolution {
    ModelParams params;
    std::vector<double> t;
    std::vector<double> theta;
    std::vector<double> log_r;
    std::vector<double> w;
    std::vector<double> w_prime;
    double a = 0.0;                                      // left endpoint
    double b_of_a = std::numeric_limits<double>::infinity(); // first stationary point
    double m_of_a = std::numeric_limits<double>::quiet_NaN();
    double delta_of_a = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void reconstruct_w(ModelSolution& sol) {
    const std::size_t n = sol.t.size();
    sol.w.resize(n);
    sol.w_prime.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::exp(sol.log_r[i]);
        const SinCos sc = sincos_p(sol.params.p, sol.theta[i]);
        sol.w[i] = r * sc.s / sol.params.alpha;
        sol.w_prime[i] = r * sc.c;
    }
}

} // namespace detail

/// Default integration horizon for cap-start solutions.
inline double cap_default_t_end(const ModelParams& mp, double a) {
    return a + 10.0 * std::max(mp.p.pi_p() / mp.alpha, std::abs(a));
}

/// Solution of the model equation with w(a) = -1, w'(a) = 0, taken from
/// the phase system with theta(a) = -pi_p/2 and r(a) = alpha.  Fills the
/// shooting quantities b(a) (first t > a with theta = pi_p/2, i.e. the
/// first stationary point of w), m(a) = w(b(a)) and delta(a) = b(a) - a.
/// Throws NoStationaryPoint when theta does not reach pi_p/2 by t_end,
/// which callers treat as b(a) = infinity.
inline ModelSolution solve_ivp_cap(const ModelParams& mp, double a,
                                   double t_end = std::numeric_limits<double>::quiet_NaN(),
                                   double tol = 1e-12, std::size_t min_samples = 0) {
    if (std::isnan(t_end)) t_end = cap_default_t_end(mp, a);
    if (!(t_end > a)) throw std::invalid_argument("solve_ivp_cap: t_end must exceed a");

    const double theta0 = -0.5 * mp.p.pi_p();
    const double logr0 = std::log(mp.alpha);
    auto res = detail::integrate_prufer_core(mp, a, theta0, logr0, t_end, tol,
                                             std::numeric_limits<double>::infinity(),
                                             0.5 * mp.p.pi_p());
    if (!res.event_hit)
        throw NoStationaryPoint("solve_ivp_cap: theta did not reach pi_p/2 before t_end = " +
                                std::to_string(t_end) + " (b(a) = infinity)");

    const double b = res.traj.t.back();
    ModelSolution sol{mp, {}, {}, {}, {}, {}, a, b, 0.0, b - a};
    if (min_samples >= 2) {
        const double max_step = (b - a) / static_cast<double>(min_samples);
        auto dense = detail::integrate_prufer_core(mp, a, theta0, logr0, b, tol, max_step,
                                                   std::nullopt);
        sol.t = std::move(dense.traj.t);
        sol.theta = std::move(dense.traj.theta);
        sol.log_r = std::move(dense.traj.log_r);
    } else {
        sol.t = std::move(res.traj.t);
        sol.theta = std::move(res.traj.theta);
        sol.log_r = std::move(res.traj.log_r);
    }
    // pin the endpoint phase; the event location is accurate to 1e-12
    sol.theta.back() = 0.5 * mp.p.pi_p();
    detail::reconstruct_w(sol);
    sol.m_of_a = sol.w.back();
    return sol;
}

/// Odd solution with w(0) = 0, w'(0) = 1 (phase data theta(0) = 0,
/// r(0) = 1), sampled on [0, t_end] and extended to [-t_end, 0] by
/// oddness.
inline ModelSolution solve_ivp_odd(const ModelParams& mp, double t_end, double tol = 1e-12,
                                   std::size_t min_samples = 0) {
    if (!(t_end > 0.0)) throw std::invalid_argument("solve_ivp_odd: t_end must be positive");
    const double max_step = min_samples >= 2 ? t_end / static_cast<double>(min_samples)
                                             : std::numeric_limits<double>::infinity();
    auto res = detail::integrate_prufer_core(mp, 0.0, 0.0, 0.0, t_end, tol, max_step,
                                             std::nullopt);

    ModelSolution half{mp, std::move(res.traj.t), std::move(res.traj.theta),
                       std::move(res.traj.log_r), {}, {}, 0.0,
                       std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::infinity()};
    detail::reconstruct_w(half);

    // Mirror the reconstructed arrays: w odd, w' and r even, theta odd.
    ModelSolution sol{mp, {}, {}, {}, {}, {}, -t_end,
                      std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::infinity()};
    const std::size_t n = half.t.size();
    sol.t.reserve(2 * n - 1);
    sol.theta.reserve(2 * n - 1);
    sol.log_r.reserve(2 * n - 1);
    sol.w.reserve(2 * n - 1);
    sol.w_prime.reserve(2 * n - 1);
    for (std::size_t i = n; i-- > 1;) {
        sol.t.push_back(-half.t[i]);
        sol.theta.push_back(-half.theta[i]);
        sol.log_r.push_back(half.log_r[i]);
        sol.w.push_back(-half.w[i]);
        sol.w_prime.push_back(half.w_prime[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        sol.t.push_back(half.t[i]);
        sol.theta.push_back(half.theta[i]);
        sol.log_r.push_back(half.log_r[i]);
        sol.w.push_back(half.w[i]);
        sol.w_prime.push_back(half.w_prime[i]);
    }
    return sol;
}

/// Homogeneity rescaling: (c w, c w') solves the same equation.
inline ModelSolution scale_solution(const ModelSolution& sol, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("scale_solution: c must be positive");
    ModelSolution out = sol;
    const double lc = std::log(c);
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        out.w[i] *= c;
        out.w_prime[i] *= c;
        out.log_r[i] += lc;
    }
    if (!std::isnan(out.m_of_a)) out.m_of_a *= c;
    return out;
}

} // namespace pspectral
