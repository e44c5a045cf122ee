#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspectral/errors.hpp"
#include "pspectral/interp.hpp"
#include "pspectral/prufer.hpp"
#include "pspectral/ptrig.hpp"

namespace pspectral {

/// Result of locating mu_p(kappa, D) by bisection on the shooting map.
struct EigenResult {
    double p = 0.0;
    double kappa = 0.0;
    double D = 0.0;
    double lambda = 0.0;
    double a_bar = 0.0;    // half-length of the symmetric model interval
    double residual = 0.0; // |delta_bar(lambda) - D|
    int iterations = 0;
};

namespace detail {

/// First positive crossing theta(t) = pi_p/2 of the odd phase flow, or
/// nullopt if it does not happen before `horizon`.
inline std::optional<double> odd_crossing(const ModelParams& mp, double horizon, double tol) {
    auto res = integrate_prufer_core(mp, 0.0, 0.0, 0.0, horizon, tol,
                                     std::numeric_limits<double>::infinity(),
                                     0.5 * mp.p.pi_p());
    if (!res.event_hit) return std::nullopt;
    return res.traj.t.back();
}

} // namespace detail

/// delta_bar(lambda) = 2 a_bar, the length of the symmetric model interval
/// on which lambda is the first nonzero Neumann eigenvalue.  Throws
/// NoCrossing when the odd phase never reaches pi_p/2 (lambda <= lambda_0,
/// only possible for kappa > 0).
inline double delta_bar(const PExponent& p, double kappa, double lambda, double tol = 1e-12,
                        double t_max = std::numeric_limits<double>::quiet_NaN()) {
    ModelParams mp(p, kappa, lambda);
    if (kappa == 0.0) return p.pi_p() / mp.alpha;
    if (std::isnan(t_max)) t_max = 100.0 * std::max(1.0, p.pi_p() / mp.alpha);
    const auto a_bar = detail::odd_crossing(mp, t_max, tol);
    if (!a_bar)
        throw NoCrossing("delta_bar: no phase crossing before t = " + std::to_string(t_max) +
                         " (lambda <= lambda_0?)");
    return 2.0 * *a_bar;
}

/// mu_p(kappa, D): the first nonzero Neumann eigenvalue of the model
/// problem on [-D/2, D/2], found by bisection on the strictly decreasing
/// map lambda -> delta_bar(lambda).  kappa = 0 uses the closed form
/// (p-1) (pi_p / D)^p.
inline EigenResult mu_p(const PExponent& p, double kappa, double D, double tol = 1e-10,
                        double lo_hint = 0.0) {
    if (!(D > 0.0)) throw std::invalid_argument("mu_p: D must be positive");
    if (!(tol >= 1e-14)) throw std::invalid_argument("mu_p: tol must be >= 1e-14");
    const double pv = p.value();

    EigenResult out;
    out.p = pv;
    out.kappa = kappa;
    out.D = D;

    if (kappa == 0.0) {
        out.lambda = (pv - 1.0) * std::pow(p.pi_p() / D, pv);
        out.a_bar = 0.5 * D;
        out.residual = 0.0;
        out.iterations = 0;
        return out;
    }

    const double ode_tol = std::max(1e-12, tol * 1e-3);
    // delta_bar(lambda) > D  <=>  lambda < mu_p; a missing crossing within
    // the horizon counts as delta_bar = infinity.
    auto delta_above_D = [&](double lambda) {
        ModelParams mp(p, kappa, lambda);
        const auto a_bar = detail::odd_crossing(mp, 0.75 * D, ode_tol);
        if (!a_bar) return true;
        return 2.0 * *a_bar > D;
    };

    double lo = (pv - 1.0) * std::pow(p.pi_p() / (2.0 * D), pv) * std::exp(-std::abs(kappa) * D * D);
    lo = std::max({lo, lo_hint, 1e-300}); // the exp factor underflows for large kappa D^2
    int guard = 0;
    while (!delta_above_D(lo)) {
        lo *= 0.25;
        if (++guard > 500 || lo < 1e-280)
            throw BracketFailure("mu_p: could not find a lower bracket for lambda");
    }
    double hi = lo;
    do {
        hi *= 2.0;
        if (hi > 1e12)
            throw BracketFailure("mu_p: lambda_hi exceeded 1e12; inputs look pathological");
    } while (delta_above_D(hi));

    int iterations = 0;
    while (hi - lo > tol * 0.5 * (hi + lo) && iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        if (delta_above_D(mid)) lo = mid; else hi = mid;
        ++iterations;
    }
    out.lambda = 0.5 * (lo + hi);
    double db;
    try {
        db = delta_bar(p, kappa, out.lambda, ode_tol, 2.0 * D);
    } catch (const NoCrossing&) {
        // Close to lambda_0 the bracket midpoint can fall below the
        // crossing threshold even though the bracket is tight; report the
        // upper end, which is known to cross.
        out.lambda = hi;
        db = delta_bar(p, kappa, out.lambda, ode_tol, 2.0 * D);
    }
    out.a_bar = 0.5 * db;
    out.residual = std::abs(db - D);
    out.iterations = iterations;
    return out;
}

/// First nonzero eigenvalue of the model problem on the whole real line
/// with the Gaussian-type weight.  Zero for kappa <= 0; for kappa > 0 it
/// is the decreasing limit of mu_p over growing intervals.
inline double lambda0(const PExponent& p, double kappa, double tol = 1e-6) {
    if (kappa <= 0.0) return 0.0;
    if (!(tol > 0.0)) throw std::invalid_argument("lambda0: tol must be positive");
    const double mu_tol = std::min(1e-8, 0.01 * tol);
    double d = 4.0 / std::sqrt(kappa);
    double prev = mu_p(p, kappa, d, mu_tol).lambda;
    for (int j = 0; j < 6; ++j) {
        d *= 2.0;
        // mu(2D) lies in (lambda_0, mu(D)); seed the bracket just below
        const double cur = mu_p(p, kappa, d, mu_tol, 0.4 * prev).lambda;
        if (std::abs(prev - cur) < tol * std::max(cur, tol)) return cur;
        prev = cur;
    }
    throw NonConvergence("lambda0: large-D limit did not settle");
}

/// Cap-start model solution whose maximum m(a) equals u_max, found by a
/// bracketed search on a <= -a_bar (Props of section 4: m(-a_bar) = 1 and
/// m(a) -> 0 as a -> -infinity).  For kappa = 0 the model is translation
/// invariant with m = 1, so only u_max = 1 is representable.
inline ModelSolution model_for_range(const PExponent& p, double kappa, double lambda,
                                     double u_max, double tol = 1e-8,
                                     std::size_t n_samples = 2048) {
    if (!(u_max > 0.0) || u_max > 1.0 + 1e-12)
        throw std::invalid_argument("model_for_range: u_max must lie in (0, 1]");
    u_max = std::min(u_max, 1.0);
    ModelParams mp(p, kappa, lambda);

    if (kappa == 0.0) {
        if (std::abs(u_max - 1.0) > tol)
            throw RangeUnreachable("model_for_range: kappa = 0 models all have m(a) = 1");
        const double a_bar = 0.5 * p.pi_p() / mp.alpha;
        return solve_ivp_cap(mp, -a_bar, std::numeric_limits<double>::quiet_NaN(), 1e-12,
                             n_samples);
    }

    const double a_bar = 0.5 * delta_bar(p, kappa, lambda); // throws NoCrossing if needed
    if (std::abs(u_max - 1.0) <= tol)
        return solve_ivp_cap(mp, -a_bar, std::numeric_limits<double>::quiet_NaN(), 1e-12,
                             n_samples);

    auto m_of = [&](double a) {
        return solve_ivp_cap(mp, a).m_of_a;
    };

    // m(-a_bar) = 1 > u_max; march left until m drops below u_max.
    double hi = -a_bar;            // m(hi) >= u_max
    double step = std::max(0.5, 0.25 * a_bar);
    double lo = hi - step;         // candidate with m(lo) < u_max
    while (m_of(lo) >= u_max) {
        hi = lo;
        step *= 2.0;
        lo -= step;
        if (lo < -1e4)
            throw RangeUnreachable("model_for_range: no a >= -1e4 with m(a) = " +
                                   std::to_string(u_max));
    }
    double a = lo;
    for (int it = 0; it < 200; ++it) {
        a = 0.5 * (lo + hi);
        const double m = m_of(a);
        if (std::abs(m - u_max) <= tol) break;
        if (m > u_max) hi = a; else lo = a;
    }
    return solve_ivp_cap(mp, a, std::numeric_limits<double>::quiet_NaN(), 1e-12, n_samples);
}

/// A function sampled with its derivative, e.g. a discrete eigenfunction.
struct SampledFunction {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> derivative;
};

/// Gradient comparison against a strictly increasing model solution:
/// returns max over samples of |u'| - w'(w^{-1}(u)).  The composite
/// w' o w^{-1} is interpolated monotone-cubically through the model grid
/// in the variable psi = (w')^p, which is linear in u at both endpoints
/// (w' itself has a vertical tangent there for p > 1).
inline double check_gradient_comparison(const SampledFunction& u, const ModelSolution& model,
                                        double range_eps = 1e-9) {
    if (u.t.size() != u.value.size() || u.t.size() != u.derivative.size() || u.t.empty())
        throw std::invalid_argument("check_gradient_comparison: inconsistent samples");
    const double pv = model.params.p.value();

    std::vector<double> w_knots, psi_knots;
    w_knots.reserve(model.w.size());
    psi_knots.reserve(model.w.size());
    for (std::size_t i = 0; i < model.w.size(); ++i) {
        if (!w_knots.empty() && !(model.w[i] > w_knots.back())) continue; // dedupe flats
        w_knots.push_back(model.w[i]);
        psi_knots.push_back(std::pow(std::abs(model.w_prime[i]), pv));
    }
    if (w_knots.size() < 2)
        throw std::invalid_argument("check_gradient_comparison: degenerate model range");
    const double w_lo = w_knots.front();
    const double w_hi = w_knots.back();
    const double slack = range_eps * (w_hi - w_lo);

    double u_min = u.value.front(), u_max = u.value.front();
    for (double v : u.value) {
        u_min = std::min(u_min, v);
        u_max = std::max(u_max, v);
    }
    if (u_min < w_lo - slack || u_max > w_hi + slack)
        throw RangeMismatch("check_gradient_comparison: sample range [" +
                            std::to_string(u_min) + ", " + std::to_string(u_max) +
                            "] is not contained in the model range [" + std::to_string(w_lo) +
                            ", " + std::to_string(w_hi) + "]");

    const Pchip psi(std::move(w_knots), std::move(psi_knots));
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.value.size(); ++i) {
        const double uv = std::clamp(u.value[i], w_lo, w_hi);
        const double bound = std::pow(std::max(0.0, psi(uv)), 1.0 / pv);
        worst = std::max(worst, std::abs(u.derivative[i]) - bound);
    }
    return worst;
}

} // namespace pspectral
