#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pspectral/errors.hpp"
#include "pspectral/ptrig.hpp"

namespace pspectral {

/// A 1D domain with a nonnegative weight density sampled on a mesh.
/// The weight may vanish at the endpoints (pole degeneracy of reduced
/// surfaces of revolution) but must be positive at interior nodes.
struct WeightedInterval {
    std::vector<double> mesh;
    std::vector<double> rho;
    PExponent p;

    WeightedInterval(std::vector<double> mesh_, std::vector<double> rho_, const PExponent& p_)
        : mesh(std::move(mesh_)), rho(std::move(rho_)), p(p_) {
        if (mesh.size() < 2 || mesh.size() != rho.size())
            throw std::invalid_argument("WeightedInterval: need matching mesh/rho, size >= 2");
        for (std::size_t i = 1; i < mesh.size(); ++i)
            if (!(mesh[i] > mesh[i - 1]))
                throw std::invalid_argument("WeightedInterval: mesh must increase strictly");
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (!std::isfinite(rho[i]) || rho[i] < 0.0)
                throw std::invalid_argument("WeightedInterval: rho must be finite and >= 0");
            if (i > 0 && i + 1 < rho.size() && !(rho[i] > 0.0))
                throw std::invalid_argument("WeightedInterval: rho must be positive at "
                                            "interior nodes");
        }
    }

    std::size_t size() const { return mesh.size(); }

    /// Trapezoidal node masses rho_i dx_i.
    std::vector<double> node_masses() const {
        const std::size_t n = mesh.size();
        std::vector<double> m(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = mesh[i + 1] - mesh[i];
            m[i] += 0.5 * h * rho[i];
            m[i + 1] += 0.5 * h * rho[i + 1];
        }
        return m;
    }

    /// Per-cell weights h_c (rho_i + rho_{i+1}) / 2 for the gradient term.
    std::vector<double> cell_weights() const {
        const std::size_t n = mesh.size();
        std::vector<double> w(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            w[i] = 0.5 * (mesh[i + 1] - mesh[i]) * (rho[i] + rho[i + 1]);
        return w;
    }
};

/// Discrete minimizer of the weighted Rayleigh quotient.
struct DiscreteEigenpair {
    double lambda_hat = 0.0;
    std::vector<double> phi;
    double constraint_residual = 0.0;
    int iterations = 0;
};

/// R[phi] = sum_c w_c |phi'_c|^p / sum_i m_i |phi_i|^p with piecewise
/// linear phi (per-cell constant gradient, trapezoidal weights).
inline double rayleigh_quotient(const std::vector<double>& phi, const WeightedInterval& dom) {
    if (phi.size() != dom.size())
        throw std::invalid_argument("rayleigh_quotient: phi size mismatch");
    const double pv = dom.p.value();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        const double h = dom.mesh[i + 1] - dom.mesh[i];
        const double g = (phi[i + 1] - phi[i]) / h;
        num += 0.5 * h * (dom.rho[i] + dom.rho[i + 1]) * std::pow(std::abs(g), pv);
        den += 0.5 * h * (dom.rho[i] * std::pow(std::abs(phi[i]), pv) +
                          dom.rho[i + 1] * std::pow(std::abs(phi[i + 1]), pv));
    }
    if (den <= 0.0) throw ZeroFunction("rayleigh_quotient: phi vanishes in the weighted norm");
    return num / den;
}

namespace detail {

/// Weighted p-mean residual G(c) = sum_i m_i |phi_i - c|^{p-2} (phi_i - c);
/// strictly decreasing and continuous in c.
inline double pmean_residual(const std::vector<double>& phi, const std::vector<double>& m,
                             double pv, double c) {
    double g = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        g += m[i] * signed_pow(phi[i] - c, pv - 1.0);
    return g;
}

inline double solve_pmean(const std::vector<double>& phi, const std::vector<double>& m,
                          double pv) {
    const auto [mn_it, mx_it] = std::minmax_element(phi.begin(), phi.end());
    double lo = *mn_it, hi = *mx_it;
    if (!(hi > lo))
        throw std::invalid_argument("project_constraint: phi must be non-constant");
    if (pv == 2.0) {
        double sm = 0.0, smphi = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            sm += m[i];
            smphi += m[i] * phi[i];
        }
        return smphi / sm;
    }
    // Safeguarded Newton on the strictly decreasing G: every other
    // iteration bisects, so the bracket provably shrinks, and a residual
    // exit relative to the term magnitudes catches roots that are already
    // balanced to roundoff.
    double c = 0.5 * (lo + hi);
    const double width0 = hi - lo;
    for (int it = 0; it < 200; ++it) {
        double g = 0.0, scale = 0.0, gp = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double term = m[i] * signed_pow(phi[i] - c, pv - 1.0);
            g += term;
            scale += std::abs(term);
            gp -= m[i] * (pv - 1.0) * std::pow(std::abs(phi[i] - c), pv - 2.0);
        }
        if (std::abs(g) <= 1e-14 * scale) return c;
        if (g > 0.0) lo = c; else hi = c;
        if (hi - lo <= 1e-13 * std::max(1.0, width0)) break;
        double cn = 0.5 * (lo + hi);
        if (it % 2 == 0 && std::isfinite(gp) && gp < 0.0) {
            const double newton = c - g / gp;
            if (newton > lo && newton < hi) cn = newton;
        }
        c = cn;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Shift phi so that the weighted p-mean constraint
/// sum_i m_i |phi_i - c|^{p-2}(phi_i - c) = 0 holds.
inline std::vector<double> project_constraint(const std::vector<double>& phi,
                                              const WeightedInterval& dom) {
    if (phi.size() != dom.size())
        throw std::invalid_argument("project_constraint: phi size mismatch");
    const auto m = dom.node_masses();
    const double c = detail::solve_pmean(phi, m, dom.p.value());
    std::vector<double> out(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] - c;
    return out;
}

/// Initialization tag for minimize_rayleigh.
using RayleighInit = std::variant<std::string, std::vector<double>>;

/// Optional record of the accepted iterates of minimize_rayleigh.
struct DescentTrace {
    std::vector<double> quotient;
    std::vector<double> constraint_residual;
};

/// Projected descent for the first nonzero eigenvalue: gradient steps with
/// Barzilai-Borwein seeding and Armijo backtracking, re-projecting onto
/// the p-mean-zero constraint and renormalizing after every step.  The
/// subdifferential selection sign(g)|g|^{p-1} (zero on flat cells) keeps
/// the descent defined where the quotient is not smooth.
inline DiscreteEigenpair minimize_rayleigh(const WeightedInterval& dom,
                                           const RayleighInit& init = std::string("odd-linear"),
                                           int steps = 20000, double tol = 1e-10,
                                           unsigned seed = 0, DescentTrace* trace = nullptr) {
    const std::size_t n = dom.size();
    if (n < 16) throw std::invalid_argument("minimize_rayleigh: mesh size must be >= 16");
    if (steps < 1) throw std::invalid_argument("minimize_rayleigh: steps must be >= 1");
    const double pv = dom.p.value();
    const auto masses = dom.node_masses();
    const auto cells = dom.cell_weights();

    std::vector<double> phi(n);
    if (std::holds_alternative<std::vector<double>>(init)) {
        phi = std::get<std::vector<double>>(init);
        if (phi.size() != n)
            throw std::invalid_argument("minimize_rayleigh: init vector size mismatch");
    } else {
        const std::string& name = std::get<std::string>(init);
        if (name == "odd-linear") {
            for (std::size_t i = 0; i < n; ++i) phi[i] = dom.mesh[i];
        } else if (name == "random") {
            std::mt19937 rng(seed);
            std::uniform_real_distribution<double> uni(-1.0, 1.0);
            for (std::size_t i = 0; i < n; ++i) phi[i] = uni(rng);
        } else {
            throw std::invalid_argument("minimize_rayleigh: unknown init '" + name + "'");
        }
    }

    // A zero-mass endpoint node (pole-degenerate weight) enters the
    // quotient only through its cell's gradient term, so its exact
    // partial minimizer equals the neighboring value.
    auto settle_poles = [&](std::vector<double>& f) {
        if (masses.front() == 0.0) f.front() = f[1];
        if (masses.back() == 0.0) f.back() = f[n - 2];
    };
    auto project = [&](std::vector<double>& f) {
        const double c = detail::solve_pmean(f, masses, pv);
        for (double& v : f) v -= c;
    };
    auto normalize = [&](std::vector<double>& f) {
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) den += masses[i] * std::pow(std::abs(f[i]), pv);
        const double s = std::pow(den, -1.0 / pv);
        for (double& v : f) v *= s;
    };
    auto quotient_parts = [&](const std::vector<double>& f, double& num, double& den) {
        num = den = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double g = (f[i + 1] - f[i]) / (dom.mesh[i + 1] - dom.mesh[i]);
            num += cells[i] * std::pow(std::abs(g), pv);
        }
        for (std::size_t i = 0; i < n; ++i) den += masses[i] * std::pow(std::abs(f[i]), pv);
    };

    settle_poles(phi);
    project(phi);
    normalize(phi);

    double num, den;
    quotient_parts(phi, num, den);
    double R = num / den;

    std::vector<double> grad(n), phi_prev, grad_prev, trial(n);
    double eta_bb = 0.0;
    double last_rel_dec = std::numeric_limits<double>::infinity();
    int stall_run = 0;
    int it = 0;
    const int window = 20;

    for (; it < steps; ++it) {
        // gradient of num/den at the current (feasible, normalized) phi
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = dom.mesh[i + 1] - dom.mesh[i];
            const double g = (phi[i + 1] - phi[i]) / h;
            const double dnum = pv * cells[i] * signed_pow(g, pv - 1.0) / h;
            grad[i] -= dnum;
            grad[i + 1] += dnum;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double dden = pv * masses[i] * signed_pow(phi[i], pv - 1.0);
            grad[i] = (grad[i] - R * dden) / den;
        }

        double gnorm2 = 0.0;
        for (double g : grad) gnorm2 += g * g;
        const double gnorm = std::sqrt(gnorm2);
        if (gnorm == 0.0) break;

        // Barzilai-Borwein step from the previous accepted move
        double eta = eta_bb;
        if (!phi_prev.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = phi[i] - phi_prev[i];
                const double y = grad[i] - grad_prev[i];
                sy += s * y;
                yy += y * y;
            }
            if (sy > 0.0 && yy > 0.0) eta = sy / yy;
        }
        if (!(eta > 0.0) || !std::isfinite(eta)) eta = 0.1 / gnorm;
        eta = std::clamp(eta, 1e-14, 1e6);

        phi_prev = phi;
        grad_prev = grad;

        auto backtrack = [&](double eta0, double& eta_used, double& R_new) {
            double e = eta0;
            for (int bt = 0; bt < 60 && e > 1e-18; ++bt, e *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = phi[i] - e * grad[i];
                settle_poles(trial);
                project(trial);
                normalize(trial);
                double num_t, den_t;
                quotient_parts(trial, num_t, den_t);
                const double R_t = num_t / den_t;
                if (R_t <= R - 1e-4 * e * gnorm2) {
                    phi.swap(trial);
                    num = num_t;
                    den = den_t;
                    R_new = R_t;
                    eta_used = e;
                    return true;
                }
            }
            return false;
        };

        double R_new = R;
        bool accepted = backtrack(eta, eta_bb, R_new);
        if (!accepted && eta < 0.5 / gnorm) {
            // a poisoned quasi-Newton step; retry at steepest-descent scale
            accepted = backtrack(1.0 / gnorm, eta_bb, R_new);
        }

        if (!accepted) {
            if (last_rel_dec >= 10.0 * tol)
                throw NonConvergence("minimize_rayleigh: descent stalled while still "
                                     "decreasing at rate " + std::to_string(last_rel_dec));
            break;
        }

        last_rel_dec = (R - R_new) / std::max(R_new, 1e-300);
        R = R_new;
        if (trace) {
            trace->quotient.push_back(R);
            trace->constraint_residual.push_back(detail::pmean_residual(phi, masses, pv, 0.0));
        }
        if (last_rel_dec < tol) {
            if (++stall_run >= window) { ++it; break; }
        } else {
            stall_run = 0;
        }
    }

    DiscreteEigenpair out;
    out.lambda_hat = R;
    out.phi = std::move(phi);
    out.constraint_residual = detail::pmean_residual(out.phi, masses, pv, 0.0);
    out.iterations = it;
    return out;
}

} // namespace pspectral
