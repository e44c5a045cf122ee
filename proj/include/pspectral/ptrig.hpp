#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pspectral/errors.hpp"
#include "pspectral/quadrature.hpp"

namespace pspectral {

namespace detail {

/// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 400;
    constexpr double kFpMin = 1e-300;
    constexpr double kEps = 3e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("beta_cf: continued fraction did not converge");
}

/// Regularized incomplete beta I_z(a, b).  The caller passes both z and
/// zc = 1 - z so that the near-endpoint branch keeps full precision.
inline double ibeta(double a, double b, double z, double zc, double log_beta) {
    if (z <= 0.0) return 0.0;
    if (zc <= 0.0) return 1.0;
    if (z < (a + 1.0) / (a + b + 2.0)) {
        const double front = std::exp(a * std::log(z) + b * std::log(zc) - log_beta);
        return front * beta_cf(a, b, z) / a;
    }
    const double front = std::exp(b * std::log(zc) + a * std::log(z) - log_beta);
    return 1.0 - front * beta_cf(b, a, zc) / b;
}

} // namespace detail

/// The exponent p of the p-Laplacian, 1 < p < infinity, with cached
/// constants of the associated p-trigonometry.
class PExponent {
public:
    explicit PExponent(double p) : p_(p) {
        if (!std::isfinite(p) || p <= 1.0 + 1e-9 || p >= 1e6)
            throw std::invalid_argument("PExponent: p must lie in (1 + 1e-9, 1e6), got " +
                                        std::to_string(p));
        const double pi = 3.14159265358979323846;
        pi_p_ = 2.0 * pi / (p * std::sin(pi / p));
        inv_p_ = 1.0 / p;
        conj_ = 1.0 - inv_p_; // (p-1)/p
        log_beta_ = std::log(pi / std::sin(pi / p));
    }

    double value() const { return p_; }
    double pi_p() const { return pi_p_; }
    double inv() const { return inv_p_; }       // 1/p
    double conjugate() const { return conj_; }  // (p-1)/p
    double log_beta() const { return log_beta_; }

private:
    double p_;
    double pi_p_;
    double inv_p_;
    double conj_;
    double log_beta_;
};

/// Half-period of sin_p:  pi_p = 2 pi / (p sin(pi/p)).
inline double pi_p(const PExponent& p) { return p.pi_p(); }

/// pi_p evaluated from its defining integral by tanh-sinh quadrature;
/// used as the debug cross-check of the closed form.
inline double pi_p_defining_integral(const PExponent& p, double eps = 1e-13) {
    const double pv = p.value();
    return 2.0 * tanh_sinh(
                     [pv](double s, double xc) {
                         // near s = 1 evaluate 1 - s^p from the endpoint
                         // distance (xc = s - 1 < 0 there)
                         const double one_minus_sp =
                             xc < 0.0 ? -std::expm1(pv * std::log1p(xc))
                                      : 1.0 - std::pow(s, pv);
                         return std::pow(one_minus_sp, -1.0 / pv);
                     },
                     0.0, 1.0, eps);
}

/// sign(x) * |x|^e
inline double signed_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return x > 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

/// An angle in the p-circle, stored as the normalized representative in
/// [-pi_p/2, 3 pi_p/2).
class PAngle {
public:
    PAngle(double theta, const PExponent& p) : p_(p) {
        const double period = 2.0 * p.pi_p();
        const double shift = (theta + 0.5 * p.pi_p()) / period;
        double frac = shift - std::floor(shift);
        if (frac >= 1.0) frac = 0.0; // rounding at the upper edge
        theta_ = frac * period - 0.5 * p.pi_p();
    }

    double value() const { return theta_; }
    const PExponent& p() const { return p_; }

private:
    double theta_;
    PExponent p_;
};

struct SinCos {
    double s;
    double c;
};

namespace detail {

/// sin_p and cos_p on the principal quarter-branch tau in [0, pi_p/2].
/// cos is returned as the nonnegative magnitude (1 - sin^p)^{1/p}.
///
/// Away from the endpoint, x = sin_p(tau) is found by safeguarded Newton
/// on the strictly convex incomplete integral
///   Phi(x) = (pi_p/2) I_{x^p}(1/p, 1-1/p),   Phi'(x) = (1 - x^p)^{-1/p}.
/// Within 1e-4 pi_p of pi_p/2 the iteration runs in the endpoint distance
/// eps = 1 - x (seeded by 1 - sin_p ~ c |tau - pi_p/2|^{p/(p-1)}), which
/// keeps cos_p free of cancellation since sin_p is only C^{1,alpha} there.
inline SinCos sincos_principal(double tau, const PExponent& p) {
    const double pv = p.value();
    const double a = p.inv();
    const double bb = p.conjugate();
    const double logB = p.log_beta();
    const double half_pi = 0.5 * p.pi_p();
    const double res_tol = 1e-13 * std::max(1.0, half_pi);

    if (tau <= 0.0) return {0.0, 1.0};
    if (tau >= half_pi) return {1.0, 0.0};

    const double u = half_pi - tau;
    // The endpoint-distance iteration takes over close to pi_p/2.  Its
    // reach is at least the 1e-4 pi_p expansion window, widened so that
    // eps = 1 - sin_p stays above ~1e-6 on the x-side branch: below that
    // the quantization of x near 1 would dominate the error of cos_p.
    const double c1 = 0.5 * (pv - 1.0) / pv;
    auto tail_asym = [&](double e) {
        return std::pow(pv, -a) * (std::pow(e, bb) / bb + c1 * std::pow(e, 1.0 + bb) / (1.0 + bb));
    };
    const double guard = std::max(1e-4 * p.pi_p(), tail_asym(1e-6));

    if (u < guard) {
        // Seed from the one-term tail expansion, then Newton in eps.
        double eps = std::pow(u * bb * std::pow(pv, a), 1.0 / bb);
        for (int it = 0; it < 8; ++it) {
            const double w = -std::expm1(pv * std::log1p(-eps)); // 1 - (1-eps)^p
            if (w <= 0.0) break;
            const double u_of_eps = half_pi * ibeta(bb, a, w, 1.0 - w, logB);
            const double r = u_of_eps - u;
            if (std::abs(r) < res_tol) break;
            eps -= r * std::pow(w, a);
            if (eps <= 0.0) { eps = 1e-320; break; }
        }
        const double w = -std::expm1(pv * std::log1p(-eps));
        return {1.0 - eps, w > 0.0 ? std::pow(w, a) : 0.0};
    }

    // Seed near the root; the bracket [0, 1] plus the residual signs keep
    // the safeguarded Newton iteration inside it (Phi is convex, Phi(x) >= x).
    const double eps_guard = std::pow(guard * bb * std::pow(pv, a), 1.0 / bb);
    double x = std::min(tau, 1.0 - eps_guard);
    double lo = 0.0, hi = 1.0;
    double xpc = 1.0; // 1 - x^p, kept in the cancellation-free form
    double xp = 0.0;
    for (int it = 0; it < 100; ++it) {
        if (x > 0.5) {
            xpc = -std::expm1(pv * std::log1p(-(1.0 - x)));
            xp = 1.0 - xpc;
        } else {
            xp = std::pow(x, pv);
            xpc = 1.0 - xp;
        }
        const double r = half_pi * ibeta(a, bb, xp, xpc, logB) - tau;
        if (std::abs(r) < res_tol) break;
        if (r >= 0.0) hi = x; else lo = x;
        double xn = x - r * std::pow(xpc, a);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return {x, std::pow(xpc, a)};
}

} // namespace detail

/// sin_p and cos_p together (one inversion).   cos_p is the derivative of
/// sin_p: nonnegative on [-pi_p/2, pi_p/2], nonpositive on the reflected
/// branch [pi_p/2, 3 pi_p/2].
inline SinCos sincos_p(const PAngle& angle) {
    const PExponent& p = angle.p();
    const double half_pi = 0.5 * p.pi_p();
    double t = angle.value();
    double cos_sign = 1.0;
    if (t > half_pi) { // reflect: sin_p(t) = sin_p(pi_p - t)
        t = p.pi_p() - t;
        cos_sign = -1.0;
    }
    double sin_sign = 1.0;
    if (t < 0.0) {
        t = -t;
        sin_sign = -1.0;
    }
    const SinCos sc = detail::sincos_principal(t, p);
    return {sin_sign * sc.s, cos_sign * sc.c};
}

inline double sin_p(const PAngle& angle) { return sincos_p(angle).s; }
inline double cos_p(const PAngle& angle) { return sincos_p(angle).c; }

inline double sin_p(const PExponent& p, double t) { return sin_p(PAngle(t, p)); }
inline double cos_p(const PExponent& p, double t) { return cos_p(PAngle(t, p)); }
inline SinCos sincos_p(const PExponent& p, double t) { return sincos_p(PAngle(t, p)); }

inline double tan_p(const PAngle& angle) {
    const SinCos sc = sincos_p(angle);
    if (sc.c == 0.0)
        throw PoleError("tan_p: cos_p vanishes at theta = " + std::to_string(angle.value()));
    return sc.s / sc.c;
}

inline double tan_p(const PExponent& p, double t) { return tan_p(PAngle(t, p)); }

/// Inverse of tan_p, with values in (-pi_p/2, pi_p/2):
///   arctan_p(x) = int_0^x ds / (1 + |s|^p).
inline double arctan_p(const PExponent& p, double x) {
    if (x == 0.0) return 0.0;
    const double ax = std::abs(x);
    const double xp = std::pow(ax, p.value());
    if (std::isinf(xp)) return std::copysign(0.5 * p.pi_p(), x);
    const double zc = 1.0 / (1.0 + xp);
    const double z = xp * zc;
    const double val = 0.5 * p.pi_p() * detail::ibeta(p.inv(), p.conjugate(), z, zc, p.log_beta());
    return std::copysign(val, x);
}

} // namespace pspectral
