#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

namespace pspectral {

namespace detail {

template <typename F>
inline double invoke_integrand(F& f, double x, double xc) {
    if constexpr (std::is_invocable_v<F&, double, double>) {
        return f(x, xc);
    } else {
        (void)xc;
        return f(x);
    }
}

} // namespace detail

/// Tanh-sinh (double exponential) quadrature on a finite interval (a, b).
///
/// The integrand may have integrable singularities at either endpoint.
/// It is called as f(x) or, if it accepts two arguments, as f(x, xc)
/// where xc is the signed distance to the nearer endpoint (xc = x - a > 0
/// on the left half, xc = x - b < 0 on the right half).  Integrands that
/// are singular at an endpoint should be written in terms of xc: the
/// abscissae approach the endpoints far below the resolution of x itself.
///
/// Levels are refined (h -> h/2, reusing previous nodes) until two
/// successive levels agree to `eps` or `max_level` is reached.
template <typename F>
double tanh_sinh(F&& f, double a, double b, double eps = 1e-13, int max_level = 12) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double pi_half = 1.5707963267948966;

    // Symmetric pair of nodes at parameter u > 0; offsets from the
    // endpoints are formed directly, so the nodes never collapse onto a
    // or b even when the naive 1 - tanh(.) would round to zero.
    auto eval_pair = [&](double u) -> double {
        const double s = pi_half * std::sinh(u);
        const double ch = std::cosh(s);
        double w = pi_half * std::cosh(u) / (ch * ch);
        if (!std::isfinite(w)) return 0.0; // cosh overflow: weight is zero
        // 1 - tanh(s) = 2 / (exp(2 s) + 1)
        const double e2s = std::exp(2.0 * s);
        const double off = half * (std::isfinite(e2s) ? 2.0 / (e2s + 1.0) : 0.0);
        if (off == 0.0) return 0.0;
        double sum = 0.0;
        const double fp = detail::invoke_integrand(f, b - off, -off);
        const double fm = detail::invoke_integrand(f, a + off, off);
        if (std::isfinite(fp)) sum += fp * w;
        if (std::isfinite(fm)) sum += fm * w;
        return sum;
    };

    double h = 1.0;
    const double f0 = detail::invoke_integrand(f, mid, mid - a);
    double acc = std::isfinite(f0) ? pi_half * f0 : 0.0; // u = 0, weight pi/2
    // The range must cover slowly decaying tails from strong (but
    // integrable) endpoint singularities such as x^{-5/6}.
    const double u_cut = 6.8;
    for (double u = h; u <= u_cut; u += h) {
        acc += eval_pair(u);
    }
    double integral = acc * h * half;

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double u = h; u <= u_cut; u += 2.0 * h) {
            add += eval_pair(u);
        }
        acc += add;
        const double next = acc * h * half;
        const double err = std::abs(next - integral);
        integral = next;
        if (level >= 3 && err <= eps * std::max(1.0, std::abs(integral))) break;
    }
    return integral;
}

/// Cumulative integral of uniformly sampled values by per-interval cubic
/// rules (Adams-Moulton stencils), fourth order.  Returns the running
/// integral at every node; out[0] = 0.
inline std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i)
            out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        return out;
    }
    const double c = h / 24.0;
    out[1] = c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for (std::size_t i = 2; i + 1 < n; ++i)
        out[i] = out[i - 1] + c * (-f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1]);
    out[n - 1] = out[n - 2] +
                 c * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]);
    return out;
}

} // namespace pspectral
