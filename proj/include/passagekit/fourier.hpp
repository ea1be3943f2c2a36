// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/common.hpp"
#include "passagekit/quadrature.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace passagekit {

/// Half-line Fourier-type integrals (1/pi) Re int e^{-izw} F(z) dz for
/// conjugate-symmetric F (two-sided inversion integrals of real functions).
///
/// Fast-decaying integrands go through fixed-width panels truncated at an
/// envelope-derived z_max. Slowly decaying tails (O(1/z), O(1/z^2)) are
/// summed over half-period panels and collapsed with the Euler
/// transformation of their alternating partial sums.
namespace fourier {

namespace detail {

template <typename F>
auto real_integrand(const F& f, double w) {
    return [&f, w](double z) {
        const std::complex<double> v =
            f(z) * std::exp(std::complex<double>(0.0, -z * w));
        return v.real();
    };
}

/// Euler transformation of the sequence of partial sums. Returns the deepest
/// diagonal value and the magnitude of the last collapse step.
inline std::pair<double, double> euler_collapse(std::vector<double> row) {
    double prev = row.back();
    double cur = prev;
    while (row.size() > 1) {
        for (size_t i = 0; i + 1 < row.size(); ++i)
            row[i] = 0.5 * (row[i] + row[i + 1]);
        row.pop_back();
        prev = cur;
        cur = row.back();
    }
    return {cur, std::fabs(cur - prev)};
}

} // namespace detail

/// Finite-range piece. Tolerance is anchored to the integrand magnitude, not
/// the (possibly cancelling) integral value.
template <typename F>
double real_part_range(const F& f, double w, double lo, double hi, double rel_tol) {
    auto re_f = detail::real_integrand(f, w);
    double mag = 0.0;
    for (int i = 0; i <= 16; ++i)
        mag = std::max(mag, std::fabs(re_f(lo + (hi - lo) * i / 16.0)));
    const double abs_tol = std::max(rel_tol * mag * (hi - lo), 1e-315);
    return passagekit::detail::gk_adaptive_soft(re_f, lo, hi, abs_tol, 40) / kPi;
}

/// Truncated mode: consecutive panels of width `panel_width` over
/// [0, z_max], each refined adaptively, summed in fixed order. The error
/// budget is anchored to the phase-free magnitude |F| so that alignment of
/// the sampling grid with oscillation zeros cannot zero the scale.
template <typename F>
double real_part_truncated(const F& f, double w, double z_max, double panel_width,
                           double rel_tol) {
    auto re_f = detail::real_integrand(f, w);
    const long n_panels = static_cast<long>(std::ceil(z_max / panel_width));
    if (n_panels > 2000000)
        throw convergence_failure("fourier: panel budget exceeded");

    double scale = 0.0;
    for (long k = 0; k < n_panels && k < 64; ++k)
        scale = std::max(scale, std::abs(f((k + 0.5) * panel_width)) * panel_width);
    const double abs_tol =
        std::max(rel_tol * std::max(scale, 1e-300) / static_cast<double>(n_panels),
                 1e-320);

    double total = 0.0;
    double z = 0.0;
    for (long k = 0; k < n_panels; ++k) {
        const double hi = std::min(z + panel_width, z_max);
        total += passagekit::detail::gk_adaptive(re_f, z, hi, abs_tol, 24);
        z = hi;
    }
    return total / kPi;
}

/// Accelerated tail over [z_lo, inf) for slowly decaying F. While the local
/// oscillation is slower than the dyadic range width (z below ~2 periods of
/// e^{-izw}) the integrand is integrated as an absolutely decaying function;
/// past that point half-period panels are summed and collapsed by the Euler
/// transformation. Handles w = 0 (never oscillatory) through the same prefix.
template <typename F>
double real_part_tail(const F& f, double w, double z_lo, double rel_tol,
                      int max_panels = 4000) {
    auto re_f = detail::real_integrand(f, w);
    const double aw = std::fabs(w);

    auto soft_range = [&](double lo, double hi) {
        double mag = 0.0;
        for (int i = 0; i <= 8; ++i)
            mag = std::max(mag, std::fabs(re_f(lo + (hi - lo) * i / 8.0)));
        const double abs_tol = std::max(0.1 * rel_tol * mag * (hi - lo), 1e-315);
        return passagekit::detail::gk_adaptive_soft(re_f, lo, hi, abs_tol, 30);
    };

    double total = 0.0;
    double z = z_lo;
    const double z_osc = (aw > 0.0) ? 4.0 * kPi / aw : kInf;
    if (z < z_osc) {
        int quiet = 0;
        for (int k = 0; k < 400 && z < z_osc; ++k) {
            const double hi = std::min(2.0 * z, z_osc);
            const double part = soft_range(z, hi);
            total += part;
            z = hi;
            if (std::fabs(part) <= rel_tol * std::max(std::fabs(total), 1e-300)) {
                if (++quiet >= 3) return total / kPi;
            } else {
                quiet = 0;
            }
        }
        if (z < z_osc)
            throw convergence_failure("fourier: non-oscillatory tail did not decay");
    }

    const double h = kPi / aw;
    std::vector<double> partial;
    partial.reserve(128);
    double sum = 0.0;
    double panel_scale = 0.0;
    for (int k = 0; k < max_panels; ++k) {
        const double hi = z + h;
        auto gk = passagekit::detail::gk15(re_f, z, hi);
        panel_scale = std::max(panel_scale, std::fabs(gk.integral));
        const double tol = std::max(1e-10 * panel_scale, 1e-315);
        double term = gk.integral;
        if (gk.error > tol)
            term = passagekit::detail::gk_adaptive_soft(re_f, z, hi, tol, 20);
        sum += term;
        z = hi;
        partial.push_back(sum);
        if (partial.size() >= 12 && partial.size() % 8 == 0) {
            auto [est, err] = detail::euler_collapse(partial);
            if (err <= rel_tol * std::max(std::fabs(total + est), 1e-300) ||
                err <= 1e-305)
                return (total + est) / kPi;
        }
    }
    auto [est, err] = detail::euler_collapse(partial);
    if (err <= 100.0 * rel_tol * std::max(std::fabs(total + est), 1e-300))
        return (total + est) / kPi;
    throw convergence_failure("fourier: accelerated tail did not settle");
}

/// Envelope scan: locate where |F| has decayed below `floor_ratio` times its
/// peak and stays there. Throws if that never happens within the scan range.
template <typename F>
double find_z_max(const F& abs_f, double floor_ratio = 1e-14,
                  double z_scan_max = 1e9) {
    double peak = 0.0;
    const double step = std::pow(10.0, 1.0 / 16.0);
    for (double z = 1e-3; z <= 10.0; z *= step) peak = std::max(peak, abs_f(z));
    int quiet = 0;
    for (double z = 1e-2; z <= z_scan_max; z *= step) {
        const double v = abs_f(z);
        peak = std::max(peak, v);
        if (v <= peak * floor_ratio) {
            if (++quiet >= 4) return z;
        } else {
            quiet = 0;
        }
    }
    throw convergence_failure("fourier: integrand envelope does not decay");
}

} // namespace fourier
} // namespace passagekit
