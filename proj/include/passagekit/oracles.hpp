// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/common.hpp"
#include "passagekit/fourier.hpp"
#include "passagekit/levy_model.hpp"
#include "passagekit/quadrature.hpp"
#include "passagekit/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace passagekit {

/// Geometry of one tilted Fourier inversion.
struct InversionGrid {
    double lambda = 0.0;
    double t = 0.0;
    double z_max = 0.0;       // truncation: envelope <= 1e-14 of its peak there
    double panel_width = 0.0; // <= pi / max(x, 1) for target abscissa x
    double rel_tol = 1e-8;
    double underflow_floor = 1e-300;
};

enum class HVerdict { Pass, Fail };

/// Numerical verdict on the Fourier integrability hypothesis. Fail is the
/// conservative outcome; the samples and the fitted tail exponent ride along
/// so a boundary verdict can be audited.
struct HReport {
    HVerdict verdict = HVerdict::Fail;
    double t0_used = 0.0;
    /// epsilon in "integrand ~ z^{-1-epsilon}"; Pass needs epsilon > 0 beyond
    /// the +-0.2 fit band (or detected super-polynomial decay).
    double decay_exponent_estimate = 0.0;
    /// Same fit applied to the sufficient-condition integrand built from the
    /// truncated second moment and the integrated tail (a cheaper
    /// corroborating check).
    double sufficient_decay_exponent = 0.0;
    std::vector<std::pair<double, double>> integrand_samples;
};

struct InvertGResult {
    double g_value = 0.0;
    ScaledValue hJ;
    InversionGrid grid;
};

namespace detail {

inline bool is_stable_half_family(const SubordinatorSpec& m) {
    return m.kind == ModelKind::Stable && std::fabs(m.alpha - 0.5) < 1e-12;
}

/// Log-density of the driftless alpha=1/2 stable family with psi*(u) =
/// s sqrt(u): f_t(x) = (s t / (2 sqrt(pi))) x^{-3/2} exp(-s^2 t^2 / (4x)).
inline double log_density_stable_half(double s, double t, double x) {
    return std::log(0.5 * s * t / std::sqrt(kPi)) - 1.5 * std::log(x) -
           sq(s * t) / (4.0 * x);
}

/// Log first-passage density of the same family (Brownian reflection):
/// h_x(t) = (s / sqrt(pi x)) exp(-s^2 t^2 / (4x)).
inline double log_hj_stable_half(double s, double t, double x) {
    return std::log(s) - 0.5 * std::log(kPi * x) - sq(s * t) / (4.0 * x);
}

/// (1 - e^{-q}) / q for complex q, series-guarded near 0.
inline std::complex<double> one_minus_exp_over(std::complex<double> q) {
    if (std::abs(q) < 1e-4) {
        return 1.0 - q / 2.0 + q * q / 6.0 - q * q * q / 24.0;
    }
    return (1.0 - std::exp(-q)) / q;
}

} // namespace detail

inline HReport hypothesis_H_check(const SubordinatorSpec& m,
                                  std::vector<double> t0_candidates = {});

/// Precompute the inversion geometry for the tilted transform at (lambda, t):
/// scans the integrand envelope to fix z_max, sets the panel width from the
/// target abscissa x.
inline InversionGrid make_inversion_grid(const SubordinatorSpec& m, double lambda,
                                         double t, double x, double rel_tol = 1e-8) {
    if (!(lambda > 0.0)) throw std::domain_error("make_inversion_grid: lambda > 0 required");
    const double psi_l = psi(m, lambda);
    const double psi_star_l = psi_star(m, lambda);
    auto envelope = [&](double z) {
        const std::complex<double> w(lambda, -z);
        const std::complex<double> dpsi = detail::psi_complex_any(m, w) - psi_l;
        const double mag = std::exp(-t * dpsi.real());
        return mag * (psi_star_l + abs_psi_star_imag_axis(m, z)) / std::hypot(lambda, z) *
               (lambda / psi_star_l);
    };
    InversionGrid g;
    g.lambda = lambda;
    g.t = t;
    g.rel_tol = rel_tol;
    g.panel_width = kPi / std::max(x, 1.0);
    g.z_max = 2.0 * fourier::find_z_max(envelope);
    return g;
}

/// Exact marginal density f_t(x), as a scaled value so deep-tail points keep
/// a usable log. Closed forms for the alpha=1/2 stable family and Gamma;
/// other stable indices by tilted Fourier inversion of the characteristic
/// function. Compound Poisson marginals carry an atom at bt and are refused.
inline ScaledValue exact_density(const SubordinatorSpec& m, double t, double x) {
    if (!(t > 0.0) || !(x > 0.0))
        throw std::domain_error("exact_density: t and x must be positive");
    if (m.kind == ModelKind::CompoundPoissonExp)
        throw unsupported_model("exact_density: CP marginal has an atom at bt");

    const double x0 = x - m.drift_b * t; // driftless coordinate
    if (!(x0 > 0.0)) return scaled_from_log(-kInf);

    if (m.kind == ModelKind::Gamma) {
        const double at = m.a * t;
        const double xterm = (at == 1.0) ? 0.0 : (at - 1.0) * std::log(x0);
        const double lg = at * std::log(m.theta) + xterm - m.theta * x0 -
                          std::lgamma(at);
        return scaled_from_log(lg);
    }
    if (detail::is_stable_half_family(m)) {
        return scaled_from_log(detail::log_density_stable_half(m.s, t, x0));
    }

    // General stable index: invert the tilted characteristic function
    //   f0(x0) = e^{lam x0 - t psi0(lam)} (1/pi) Re int_0^inf e^{-iz x0}
    //              exp(-t (psi0(lam - iz) - psi0(lam))) dz
    // with the tilt pinned near the saddle so the integrand is O(1).
    SubordinatorSpec m0 = m;
    m0.drift_b = 0.0;
    const double lam = std::clamp(solve_rho(m0, t, x0).rho, 1e-3, 1e3);
    const double psi_l = psi(m0, lam);
    auto f_hat = [&](double z) {
        const std::complex<double> w(lam, -z);
        return std::exp(-t * (detail::psi_complex_any(m0, w) - psi_l));
    };
    auto envelope = [&](double z) {
        const std::complex<double> w(lam, -z);
        return std::exp(-t * (detail::psi_complex_any(m0, w).real() - psi_l));
    };
    const double z_max = 2.0 * fourier::find_z_max(envelope);
    const double pw = kPi / std::max(x0, 1.0);
    const double tilted = fourier::real_part_truncated(f_hat, x0, z_max, pw, 1e-10);
    if (!(tilted > 0.0)) {
        // Below the resolution of the truncated inversion; the true density
        // is positive but smaller than the quadrature noise floor.
        if (tilted < -1e-6)
            throw convergence_failure("exact_density: inversion lost positivity");
        ScaledValue r;
        r.underflow = true;
        return r;
    }
    return scaled_from_log(lam * x0 - t * psi_l + std::log(tilted));
}

/// Exact first-passage jump density for driftless Stable models: closed form
/// for alpha = 1/2, Fourier route otherwise (the crossing is a.s. by a jump,
/// so this is the full passage density).
inline ScaledValue exact_hJ_density(const SubordinatorSpec& m, double t, double x);

/// Quadrature oracle for the jump passage density:
///   h^J_x(t) = int_0^{x - bt} f0_t(x - bt - y) Pi(y, inf) dy,
/// with tanh-sinh absorbing the Pi singularity at y -> 0. Relative tolerance
/// 1e-8 by construction of the inner densities.
inline double convolve_hJ(const SubordinatorSpec& m, double t, double x,
                          double rel_tol = 1e-8) {
    if (m.kind == ModelKind::CompoundPoissonExp)
        throw unsupported_model("convolve_hJ: exact_density unsupported for CP");
    const double w = x - m.drift_b * t;
    if (!(w > 0.0)) throw std::domain_error("convolve_hJ: requires x > bt");
    SubordinatorSpec m0 = m;
    m0.drift_b = 0.0;
    // The node nearest w can round to w - y == 0; that sliver carries no
    // mass (the density vanishes or stays integrable there).
    auto integrand = [&](double y) {
        const double u = w - y;
        if (!(u > 0.0)) return 0.0;
        return exact_density(m0, t, u).value * tail(m, y);
    };
    return tanh_sinh(integrand, 0.0, w, rel_tol);
}

/// Fourier inversion of the tilted convolution density
///   g_t^lam(y) = (lam / psi*(lam)) e^{-lam y + t psi(lam)} h^J_y(t),
/// via its transform
///   g_hat(z) = exp(-t (psi(lam-iz) - psi(lam))) psi*(lam-iz)/(lam-iz)
///              * lam/psi*(lam).
/// Returns g at y = x and the recovered h^J_x(t). Requires the hypothesis
/// check to pass (compound Poisson fails it, per its tail behaviour).
inline InvertGResult invert_g(const SubordinatorSpec& m, double t, double x,
                              double lambda, double rel_tol = 1e-8) {
    if (!(lambda > 0.0)) throw std::domain_error("invert_g: lambda > 0 required");
    const HReport h = hypothesis_H_check(m);
    if (h.verdict != HVerdict::Pass)
        throw hypothesis_h_failed("invert_g: hypothesis (H) check failed for this model");

    InvertGResult r;
    r.grid = make_inversion_grid(m, lambda, t, x, rel_tol);
    const double psi_l = psi(m, lambda);
    const double psi_star_l = psi_star(m, lambda);
    auto g_hat = [&](double z) {
        const std::complex<double> w(lambda, -z);
        const std::complex<double> dpsi = detail::psi_complex_any(m, w) - psi_l;
        const std::complex<double> factor = detail::psi_star_complex_any(m, w) / w;
        return std::exp(-t * dpsi) * factor * (lambda / psi_star_l);
    };
    r.g_value = fourier::real_part_truncated(g_hat, x, r.grid.z_max,
                                             r.grid.panel_width, rel_tol);
    if (!(r.g_value > 0.0)) {
        if (r.g_value < -1e-6)
            throw convergence_failure("invert_g: negative g from inversion");
        r.g_value = 0.0; // below the inversion noise floor
        r.hJ.underflow = true;
        return r;
    }
    // h^J_x(t) = (psi*(lam)/lam) e^{lam x - t psi(lam)} g; at lam = rho(x/t)
    // the exponent is -tH(rho).
    r.hJ = scaled_from_log(std::log(psi_star_l / lambda) + lambda * x - t * psi_l +
                           std::log(r.g_value));
    return r;
}

inline ScaledValue exact_hJ_density(const SubordinatorSpec& m, double t, double x) {
    if (m.kind != ModelKind::Stable || m.drift_b != 0.0)
        throw unsupported_model("exact_hJ_density: driftless Stable only");
    if (detail::is_stable_half_family(m))
        return scaled_from_log(detail::log_hj_stable_half(m.s, t, x));
    const double lam = std::clamp(solve_rho(m, t, x).rho, 1e-3, 1e3);
    return invert_g(m, t, x, lam).hJ;
}

// ---------------------------------------------------------------------------
// Potential (occupation) densities u_Delta, b > 0.
// ---------------------------------------------------------------------------

namespace detail {

inline std::complex<double> psi_imag_axis(const SubordinatorSpec& m, double z) {
    return psi_complex_any(m, std::complex<double>(0.0, -z));
}

/// u_inf for CP + drift by partial fractions of 1/psi:
///   1/psi(l) = (1/b) [ (eta/zeta)/l + (1 - eta/zeta)/(l + zeta) ],
///   zeta = eta + rate/b.
inline double u_inf_cp(const SubordinatorSpec& m, double y) {
    const double zeta = m.eta + m.rate / m.drift_b;
    const double p = m.eta / zeta;
    return (p + (1.0 - p) * std::exp(-zeta * y)) / m.drift_b;
}

/// u_Delta by Fourier inversion of (1 - e^{-Delta psi(-iz)}) / psi(-iz).
/// The raw transform only decays like 1/z -- u_Delta jumps at 0, and for CP
/// also at b Delta -- so the jump parts are subtracted analytically (their
/// inverses are closed) and the remaining single-frequency tails are summed
/// with Euler acceleration:
///   piece A, frequency y:          1/psi(-iz) - jump reference,
///   piece B, frequency y - b Delta: e^{-Delta psi*(-iz)}/psi(-iz) - (CP ref).
inline double u_delta_fourier(const SubordinatorSpec& m, double delta, double y,
                              double rel_tol) {
    const double b = m.drift_b;
    const double z0 = 1.0;
    const bool cp = m.kind == ModelKind::CompoundPoissonExp;

    // Decay rate of the analytic jump part at the origin.
    const double kappa =
        cp ? m.rate / b
           : (m.kind == ModelKind::Gamma
                  ? m.theta
                  : std::pow(m.s / std::tgamma(1.0 - m.alpha), 1.0 / m.alpha));

    auto u_hat = [&](double z) -> std::complex<double> {
        return delta * one_minus_exp_over(delta * psi_imag_axis(m, z));
    };
    auto ref_hat = [&](double z) -> std::complex<double> {
        if (cp) {
            // window (1/b) e^{-(rate/b) y} on (0, b Delta)
            const std::complex<double> num =
                1.0 - std::exp(std::complex<double>(-m.rate * delta, z * b * delta));
            return num / std::complex<double>(m.rate, -b * z);
        }
        return 1.0 / (b * std::complex<double>(kappa, -z));
    };
    const double ref_closed =
        cp ? ((y < b * delta) ? std::exp(-m.rate / b * y) / b : 0.0)
           : std::exp(-kappa * y) / b;

    auto head_f = [&](double z) { return u_hat(z) - ref_hat(z); };
    double total = ref_closed + fourier::real_part_range(head_f, y, 0.0, z0, rel_tol);

    auto a_tail = [&](double z) -> std::complex<double> {
        const std::complex<double> p = 1.0 / psi_imag_axis(m, z);
        if (cp) return p - 1.0 / std::complex<double>(m.rate, -b * z);
        return p - 1.0 / (b * std::complex<double>(kappa, -z));
    };
    total += fourier::real_part_tail(a_tail, y, z0, rel_tol);

    const double wb = y - b * delta;
    auto b_tail = [&](double z) -> std::complex<double> {
        const std::complex<double> q_star =
            psi_star_complex_any(m, std::complex<double>(0.0, -z));
        std::complex<double> v = std::exp(-delta * q_star) / psi_imag_axis(m, z);
        if (cp)
            v -= std::exp(-m.rate * delta) / std::complex<double>(m.rate, -b * z);
        return v;
    };
    total -= fourier::real_part_tail(b_tail, wb, z0, rel_tol);
    return total;
}

/// u_inf for non-CP kinds via a mild tilt lam0 <= 1/y that removes the z = 0
/// singularity of 1/psi(-iz):
///   u_inf(y) = e^{lam0 y} (1/2pi) int e^{-izy} / psi(lam0 - iz) dz.
inline double u_inf_tilted(const SubordinatorSpec& m, double y, double rel_tol) {
    const double b = m.drift_b;
    const double lam0 = 1.0 / std::max(1.0, y);
    const double kappa =
        (m.kind == ModelKind::Gamma
             ? m.theta
             : std::pow(m.s / std::tgamma(1.0 - m.alpha), 1.0 / m.alpha));
    const double z0 = 1.0;
    auto rem = [&](double z) -> std::complex<double> {
        return 1.0 / psi_complex_any(m, std::complex<double>(lam0, -z)) -
               1.0 / (b * std::complex<double>(lam0 + kappa, -z));
    };
    double w = std::exp(-(lam0 + kappa) * y) / b;
    w += fourier::real_part_range(rem, y, 0.0, z0, rel_tol);
    w += fourier::real_part_tail(rem, y, z0, rel_tol);
    return std::exp(lam0 * y) * w;
}

} // namespace detail

/// Occupation density u_Delta(y) of the potential measure U_Delta, for
/// drift b > 0. Delta may be +inf. CP at Delta = inf uses the closed
/// partial-fraction form; everything else goes through the Fourier routes.
inline double potential_density(const SubordinatorSpec& m, double delta, double y,
                                double rel_tol = 1e-7) {
    if (!(m.drift_b > 0.0)) throw zero_drift("potential_density: requires b > 0");
    if (!(y > 0.0)) throw std::domain_error("potential_density: y must be positive");
    if (!(delta > 0.0)) throw std::domain_error("potential_density: Delta must be positive");
    if (delta == kInf) {
        if (m.kind == ModelKind::CompoundPoissonExp) return detail::u_inf_cp(m, y);
        return detail::u_inf_tilted(m, y, rel_tol);
    }
    return detail::u_delta_fourier(m, delta, y, rel_tol);
}

// ---------------------------------------------------------------------------
// Hypothesis (H)
// ---------------------------------------------------------------------------

inline HReport hypothesis_H_check(const SubordinatorSpec& m,
                                  std::vector<double> t0_candidates) {
    if (t0_candidates.empty()) t0_candidates = {0.5, 1.0, 2.0, 4.0, 8.0};

    auto integrand_log = [&](double t0, double z) {
        const double ex = -t0 * re_psi_star_imag_axis(m, z);
        return ex + std::log1p(abs_psi_star_imag_axis(m, z)) - std::log(z);
    };
    auto sufficient_log = [&](double t0, double z) {
        const double m2 = truncated_moment(m, 2, 1.0 / z);
        return -t0 * sq(z) * m2 + std::log(1.0 / z + tail_integral(m, 1.0 / z));
    };

    // Least-squares slope of ln I against ln z over [z_lo, z_hi].
    auto fit_slope = [&](auto&& logf, double z_lo, double z_hi, int n) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (int i = 0; i < n; ++i) {
            const double lz = std::log(z_lo) +
                              (std::log(z_hi) - std::log(z_lo)) * i / (n - 1.0);
            const double ly = logf(std::exp(lz));
            if (!std::isfinite(ly)) return -kInf; // underflow: super-polynomial
            sx += lz; sy += ly; sxx += lz * lz; sxy += lz * ly;
            ++cnt;
        }
        return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    };

    constexpr double kBand = 0.2;
    HReport best;
    best.verdict = HVerdict::Fail;
    for (double t0 : t0_candidates) {
        auto logf = [&](double z) { return integrand_log(t0, z); };
        const double slope = fit_slope(logf, 1e3, 1e6, 61);
        const double slope_near = fit_slope(logf, 1e3, 1e4, 21);
        const double slope_far = fit_slope(logf, 1e5, 1e6, 21);
        const bool superpoly =
            slope == -kInf || (slope_far < slope_near - 0.5 && slope_far < -1.0);
        const double eps = (slope == -kInf) ? kInf : -(slope + 1.0);

        HReport rep;
        rep.t0_used = t0;
        rep.decay_exponent_estimate = std::isfinite(eps) ? eps : 1e6;
        auto rlog = [&](double z) { return sufficient_log(t0, z); };
        const double rslope = fit_slope(rlog, 1e3, 1e6, 61);
        rep.sufficient_decay_exponent =
            (rslope == -kInf) ? 1e6 : -(rslope + 1.0);
        for (double z = 1.0; z <= 1.0000001e6; z *= 10.0)
            rep.integrand_samples.emplace_back(z, std::exp(std::min(700.0, logf(z))));

        if (superpoly || eps > kBand) {
            rep.verdict = HVerdict::Pass;
            return rep;
        }
        if (best.integrand_samples.empty() ||
            rep.decay_exponent_estimate > best.decay_exponent_estimate)
            best = rep;
    }
    return best;
}

} // namespace passagekit
