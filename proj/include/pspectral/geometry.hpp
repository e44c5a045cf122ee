#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspectral/eigensolver.hpp"
#include "pspectral/errors.hpp"
#include "pspectral/interp.hpp"
#include "pspectral/quadrature.hpp"
#include "pspectral/rayleigh.hpp"

namespace pspectral {

/// Smooth nonincreasing partition function: 1 for s <= -1, 0 for s >= 1,
/// with bump(s) + bump(-s) = 1.
inline double bump(double s) {
    auto g = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    const double a = g(1.0 - s);
    const double b = g(1.0 + s);
    if (a == 0.0) return 0.0;
    if (b == 0.0) return 1.0;
    return a / (a + b);
}

/// Parameters of the capped-cylinder surface of revolution.
struct SurfaceSpec {
    int n;                      // manifold dimension, >= 2
    double kappa;               // curvature lower bound to realize
    double D;                   // pole-to-pole profile arclength
    double cap_radius;          // r
    double smoothing_half_width; // delta, << cap_radius

    SurfaceSpec(int n_, double kappa_, double D_, double r_, double delta_)
        : n(n_), kappa(kappa_), D(D_), cap_radius(r_), smoothing_half_width(delta_) {
        if (n < 2) throw SpecInfeasible("SurfaceSpec: dimension must be >= 2");
        if (!(D > 0.0) || !(r_ > 0.0) || !(delta_ > 0.0))
            throw SpecInfeasible("SurfaceSpec: D, r, delta must be positive");
        constexpr double half_pi = 1.5707963267948966;
        if (!(half_pi * r_ + delta_ < 0.5 * D))
            throw SpecInfeasible("SurfaceSpec: cap of radius r does not fit in half the "
                                 "profile (need pi r/2 + delta < D/2)");
        if (!(delta_ < 0.25 * r_))
            throw SpecInfeasible("SurfaceSpec: smoothing width must satisfy delta < r/4");
    }
};

/// Discretized profile of the surface of revolution together with the
/// potential and the Bakry-Emery Ricci eigenvalues.
struct RevolutionSurface {
    SurfaceSpec spec;
    std::vector<double> s_grid;
    std::vector<double> k;       // profile curvature
    std::vector<double> theta;   // turning angle int_0^s k
    std::vector<double> y;       // radius
    std::vector<double> y_prime;
    std::vector<double> f;
    std::vector<double> f_prime;
    std::vector<double> f_double_prime;
    std::vector<double> ric_f_radial;
    std::vector<double> ric_f_tangential;
};

/// Bakry-Emery Ricci eigenvalues of a built surface for dimension n:
///   radial     = (n-1) k c + f''
///   tangential = k c + (n-2) c^2 + (y'/y) f'
/// with c = sqrt(1 - y'^2)/y the orthogonal principal curvature; pole
/// values are the smooth cap limits (c -> k, (y'/y) f' -> f'').
inline std::pair<std::vector<double>, std::vector<double>> ricci_f(
    const RevolutionSurface& surf, int n) {
    const std::size_t m = surf.s_grid.size();
    std::vector<double> radial(m), tangential(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0 || i + 1 == m) {
            const double pole = (n - 1) * surf.k[i] * surf.k[i] + surf.f_double_prime[i];
            radial[i] = tangential[i] = pole;
            continue;
        }
        const double c = std::abs(std::sin(surf.theta[i])) / surf.y[i];
        radial[i] = (n - 1) * surf.k[i] * c + surf.f_double_prime[i];
        tangential[i] = surf.k[i] * c + (n - 2) * c * c +
                        surf.y_prime[i] / surf.y[i] * surf.f_prime[i];
    }
    return {std::move(radial), std::move(tangential)};
}

namespace detail {

/// Integral of the bump over [-1, sigma] by composite Gauss-Legendre
/// (the integrand is smooth; 12 panels of 10 points reach roundoff).
inline double bump_integral(double sigma) {
    if (sigma <= -1.0) return 0.0;
    const double upper = std::min(sigma, 1.0);
    static const double gx[5] = {0.1488743389816312, 0.4333953941292472,
                                 0.6794095682990244, 0.8650633666889845,
                                 0.9739065285171717};
    static const double gw[5] = {0.2955242247147529, 0.2692667193099963,
                                 0.2190863625159820, 0.1494513491505806,
                                 0.0666713443086881};
    double total = 0.0;
    const int panels = 12;
    const double width = (upper + 1.0) / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = -1.0 + pnl * width;
        const double mid = a + 0.5 * width;
        const double half = 0.5 * width;
        for (int q = 0; q < 5; ++q) {
            total += half * gw[q] * (bump(mid + half * gx[q]) + bump(mid - half * gx[q]));
        }
    }
    return total;
}

} // namespace detail

/// Build the capped cylinder: curvature 1/r on the caps, 0 on the flat
/// part, joined by the bump over [pi r/2 - delta, pi r/2 + delta] and
/// mirrored about s = D/2; the potential satisfies f'' = kappa on the
/// flat part and integrates to f'(D/2) = 0 exactly.  theta and f' use
/// the closed forms of the piecewise profile (quadrature only across the
/// bump), so the pole closure |y(D)| is limited by the y-integration
/// alone.  The grid resolves the smoothing region by at least 20 cells
/// regardless of mesh_N.
inline RevolutionSurface build_surface(const SurfaceSpec& spec, int mesh_N) {
    if (mesh_N < 16) throw std::invalid_argument("build_surface: mesh_N must be >= 16");
    constexpr double half_pi = 1.5707963267948966;
    const double r = spec.cap_radius;
    const double delta = spec.smoothing_half_width;
    const double D = spec.D;

    std::size_t N = static_cast<std::size_t>(mesh_N);
    N = std::max(N, static_cast<std::size_t>(std::ceil(20.0 * D / delta)));
    if (N % 2 != 0) ++N;
    const double h = D / static_cast<double>(N);

    RevolutionSurface surf{spec, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    surf.s_grid.resize(N + 1);
    surf.k.resize(N + 1);
    surf.f_double_prime.resize(N + 1);
    surf.theta.resize(N + 1);
    surf.f_prime.resize(N + 1);

    const double join = half_pi * r;                              // cap arclength
    const double fpp_cap = spec.kappa * (1.0 - D / (2.0 * join)); // kappa (1 - D/(pi r))
    auto k_half = [&](double s) {
        if (s <= join - delta) return 1.0 / r;
        if (s >= join + delta) return 0.0;
        return bump((s - join) / delta) / r;
    };
    auto fpp_half = [&](double s) {
        if (s <= join - delta) return fpp_cap;
        if (s >= join + delta) return spec.kappa;
        const double phi = bump((s - join) / delta);
        return phi * fpp_cap + (1.0 - phi) * spec.kappa;
    };
    // theta = int_0^s k and f' = int_0^s f'': closed forms off the bump,
    // B(sigma) = int_{-1}^sigma bump across it; int_{-1}^{1} bump = 1, so
    // theta(join + delta) = pi/2 and f'(D/2) = 0 hold identically.
    auto theta_half = [&](double s) {
        if (s <= join - delta) return s / r;
        if (s >= join + delta) return half_pi;
        return (join - delta) / r + delta / r * detail::bump_integral((s - join) / delta);
    };
    auto fprime_half = [&](double s) {
        if (s <= join - delta) return fpp_cap * s;
        const double at_join = fpp_cap * (join - delta);
        if (s >= join + delta) {
            const double over_bump = delta * (fpp_cap + spec.kappa); // both B(1) = 1 parts
            return at_join + over_bump + spec.kappa * (s - join - delta);
        }
        const double sigma = (s - join) / delta;
        const double B = detail::bump_integral(sigma);
        return at_join + delta * (fpp_cap * B + spec.kappa * (sigma + 1.0 - B));
    };

    for (std::size_t i = 0; i <= N / 2; ++i) {
        const double s = i * h;
        surf.s_grid[i] = s;
        surf.k[i] = k_half(s);
        surf.f_double_prime[i] = fpp_half(s);
        surf.theta[i] = theta_half(s);
        surf.f_prime[i] = fprime_half(s);
    }
    for (std::size_t i = N / 2 + 1; i <= N; ++i) { // exact mirror
        surf.s_grid[i] = i * h;
        surf.k[i] = surf.k[N - i];
        surf.f_double_prime[i] = surf.f_double_prime[N - i];
        surf.theta[i] = 2.0 * half_pi - surf.theta[N - i]; // theta(D - s) = pi - theta(s)
        surf.f_prime[i] = -surf.f_prime[N - i];
    }
    surf.s_grid[N] = D;

    surf.y_prime.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) surf.y_prime[i] = std::cos(surf.theta[i]);
    surf.y = cumulative_integral(surf.y_prime, h);
    surf.f = cumulative_integral(surf.f_prime, h);

    auto ric = ricci_f(surf, spec.n);
    surf.ric_f_radial = std::move(ric.first);
    surf.ric_f_tangential = std::move(ric.second);
    return surf;
}

/// Smallest slack min(radial, tangential) - kappa over the grid;
/// nonnegative means the surface is an admissible Bakry-Emery manifold
/// for the bound kappa.
inline double verify_curvature(const RevolutionSurface& surf, int n, double kappa) {
    const auto [radial, tangential] = ricci_f(surf, n);
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < radial.size(); ++i)
        slack = std::min(slack, std::min(radial[i], tangential[i]) - kappa);
    return slack;
}

/// Reduce the rotationally invariant eigenproblem to the weighted
/// interval [0, D] with density y^{n-1} e^{-f}; the weight vanishes at
/// the poles.
inline WeightedInterval reduce_to_interval(const RevolutionSurface& surf, int n,
                                           const PExponent& p) {
    std::vector<double> rho(surf.s_grid.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double y = std::max(0.0, surf.y[i]);
        rho[i] = std::pow(y, n - 1) * std::exp(-surf.f[i]);
    }
    rho.front() = 0.0;
    rho.back() = 0.0;
    return WeightedInterval(surf.s_grid, std::move(rho), p);
}

/// Weighted interval of the boundary cylinder r S^{n-1} x [-D/2, D/2]
/// with quadratic potential: rho = r^{n-1} e^{-kappa s^2 / 2}.
inline WeightedInterval cylinder_interval(const PExponent& p, double kappa, double D, int n,
                                          double r, int mesh_N = 1024) {
    if (!(r > 0.0)) throw std::invalid_argument("cylinder_interval: r must be positive");
    if (!(D > 0.0)) throw std::invalid_argument("cylinder_interval: D must be positive");
    if (mesh_N < 16) throw std::invalid_argument("cylinder_interval: mesh_N must be >= 16");
    std::vector<double> mesh(mesh_N + 1), rho(mesh_N + 1);
    const double scale = std::pow(r, n - 1);
    for (int i = 0; i <= mesh_N; ++i) {
        const double s = -0.5 * D + D * i / mesh_N;
        mesh[i] = s;
        rho[i] = scale * std::exp(-0.5 * kappa * s * s);
    }
    return WeightedInterval(std::move(mesh), std::move(rho), p);
}

/// One row of the sharpness experiment.
struct SharpnessRow {
    double r = 0.0;
    double delta = 0.0;
    double lambda_hat = std::numeric_limits<double>::quiet_NaN();
    double mu_ref = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    double min_slack = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

struct SharpnessOptions {
    double delta_factor = 0.1; // delta = delta_factor * r
    int mesh_N = 4096;
    int steps = 40000;
    double tol = 1e-10;
    unsigned seed = 0;
};

/// For each cap radius: build the surface, check admissibility, reduce,
/// minimize, and report the gap lambda_hat - mu_p(kappa, D).  A row with
/// negative curvature slack is reported as curvature_violated, never
/// silently dropped.
inline std::vector<SharpnessRow> sharpness_experiment(const PExponent& p, double kappa, int n,
                                                      double D,
                                                      const std::vector<double>& r_list,
                                                      const SharpnessOptions& opt = {}) {
    const double mu_ref = mu_p(p, kappa, D).lambda;
    std::vector<SharpnessRow> rows;
    rows.reserve(r_list.size());
    for (double r : r_list) {
        SharpnessRow row;
        row.r = r;
        row.delta = opt.delta_factor * r;
        row.mu_ref = mu_ref;
        try {
            const SurfaceSpec spec(n, kappa, D, r, row.delta);
            const RevolutionSurface surf = build_surface(spec, opt.mesh_N);
            row.min_slack = verify_curvature(surf, n, kappa);
            if (row.min_slack < 0.0) {
                row.status = "curvature_violated";
                rows.push_back(std::move(row));
                continue;
            }
            const WeightedInterval dom = reduce_to_interval(surf, n, p);
            const DiscreteEigenpair ep =
                minimize_rayleigh(dom, std::string("odd-linear"), opt.steps, opt.tol, opt.seed);
            row.lambda_hat = ep.lambda_hat;
            row.gap = ep.lambda_hat - mu_ref;
        } catch (const SpecInfeasible& e) {
            row.status = std::string("infeasible: ") + e.what();
        } catch (const NumericalError& e) {
            row.status = std::string("numerical_failure: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace pspectral
