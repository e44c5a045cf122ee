// Test-only reference implementations, kept independent of the library's
// production code paths.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pspectral/quadrature.hpp"

namespace oracles {

/// Incomplete p-arcsine integral int_0^x (1-s^p)^{-1/p} ds by tanh-sinh.
inline double arcsin_p_integral(double p, double x, double eps = 1e-13) {
    if (x == 0.0) return 0.0;
    const double ax = std::abs(x);
    const double val = pspectral::tanh_sinh(
        [p](double s) { return std::pow(1.0 - std::pow(s, p), -1.0 / p); }, 0.0, ax, eps);
    return std::copysign(val, x);
}

/// sin_p by plain bisection on the defining integral (no Newton, no
/// continued fractions).  tau must lie in [0, pi_p/2].
inline double sin_p_bisect(double p, double tau, double pi_p_half) {
    if (tau <= 0.0) return 0.0;
    if (tau >= pi_p_half) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (arcsin_p_integral(p, mid) < tau) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// arctan_p by quadrature of its defining derivative 1/(1+|s|^p).
inline double arctan_p_quadrature(double p, double x, double eps = 1e-13) {
    if (x == 0.0) return 0.0;
    const double ax = std::abs(x);
    const double val = pspectral::tanh_sinh(
        [p](double s) { return 1.0 / (1.0 + std::pow(s, p)); }, 0.0, ax, eps);
    return std::copysign(val, x);
}

/// Fixed-step classical RK4 for a 2-component system.
template <typename F>
std::array<double, 2> rk4_fixed(F&& f, double t0, std::array<double, 2> y, double t1,
                                long steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    double t = t0;
    for (long i = 0; i < steps; ++i) {
        const auto k1 = f(t, y);
        const auto k2 = f(t + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        const auto k3 = f(t + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        const auto k4 = f(t + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        t = t0 + (i + 1) * h;
    }
    return y;
}

/// Number of eigenvalues of the symmetric tridiagonal matrix
/// (diag d, off-diagonal e) strictly below x, by Sturm sequence count.
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    const std::size_t n = d.size();
    int count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        double denom = q;
        if (denom == 0.0) denom = 1e-300;
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

/// k-th smallest eigenvalue (k = 0 based) of a symmetric tridiagonal
/// matrix by bisection on the Sturm count.
inline double tridiag_eigenvalue(const std::vector<double>& d, const std::vector<double>& e,
                                 int k, double tol = 1e-13) {
    double rad = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double r = std::abs(d[i]);
        if (i > 0) r += std::abs(e[i - 1]);
        if (i + 1 < d.size()) r += std::abs(e[i]);
        rad = std::max(rad, r);
    }
    double lo = -rad, hi = rad;
    while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, mid) > k) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// First nonzero Neumann eigenvalue of -(rho u')' = lambda rho u on
/// [s0, s1], rho the weight density, by a dense second-order finite
/// difference discretization reduced to a symmetric tridiagonal problem.
inline double fd_neumann_eigenvalue(const std::function<double(double)>& rho, double s0,
                                    double s1, int n) {
    const double h = (s1 - s0) / (n - 1);
    std::vector<double> w(n);     // node masses (trapezoid)
    std::vector<double> flux(n - 1); // rho at cell midpoints
    for (int i = 0; i < n; ++i) {
        const double s = s0 + i * h;
        w[i] = rho(s) * ((i == 0 || i == n - 1) ? 0.5 * h : h);
    }
    for (int i = 0; i + 1 < n; ++i) flux[i] = rho(s0 + (i + 0.5) * h);

    // Symmetrized operator M^{-1/2} S M^{-1/2}.
    std::vector<double> d(n), e(n - 1);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        if (i > 0) diag += flux[i - 1] / h;
        if (i + 1 < n) diag += flux[i] / h;
        d[i] = diag / w[i];
    }
    for (int i = 0; i + 1 < n; ++i) e[i] = -flux[i] / h / std::sqrt(w[i] * w[i + 1]);
    return tridiag_eigenvalue(d, e, 1);
}

} // namespace oracles
