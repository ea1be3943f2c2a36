// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/common.hpp"

#include <array>
#include <cmath>
#include <functional>

namespace passagekit {

namespace detail {

// 15-point Kronrod extension of 7-point Gauss. Nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGK15Nodes = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
inline constexpr std::array<double, 8> kGK15Weights = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299785,
    0.0229353220105292,
};
// Gauss-7 weights matching nodes 0, 2, 4, 6 of the Kronrod set.
inline constexpr std::array<double, 4> kG7Weights = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

struct GKResult {
    double integral;
    double error;
};

template <typename F>
GKResult gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = kGK15Nodes[i] * h;
        const double fv = (i == 0) ? f(c) : f(c - x) + f(c + x);
        kron += kGK15Weights[i] * fv;
        if (i % 2 == 0) gauss += kG7Weights[i / 2] * fv;
    }
    kron *= h;
    gauss *= h;
    const double diff = std::fabs(kron - gauss);
    // Standard conservative error model for the embedded pair.
    const double err = (diff > 0.0) ? std::pow(200.0 * diff, 1.5) : 0.0;
    return {kron, std::min(err, diff * 200.0) + diff * 1e-3};
}

template <typename F>
double gk_adaptive_impl(const F& f, double a, double b, double abs_tol, int depth,
                        long& budget, bool soft) {
    const GKResult r = gk15(f, a, b);
    if (r.error <= abs_tol || depth <= 0 || budget <= 0) {
        if (!soft && r.error > abs_tol * 16.0)
            throw convergence_failure("adaptive quadrature: interval budget exhausted");
        return r.integral;
    }
    --budget;
    const double c = 0.5 * (a + b);
    return gk_adaptive_impl(f, a, c, 0.5 * abs_tol, depth - 1, budget, soft) +
           gk_adaptive_impl(f, c, b, 0.5 * abs_tol, depth - 1, budget, soft);
}

template <typename F>
double gk_adaptive(const F& f, double a, double b, double abs_tol, int depth,
                   long budget = 20000) {
    return gk_adaptive_impl(f, a, b, abs_tol, depth, budget, false);
}

/// Budget/depth exhaustion returns the best estimate instead of throwing;
/// used by engines whose end results are error-checked by other means.
template <typename F>
double gk_adaptive_soft(const F& f, double a, double b, double abs_tol, int depth,
                        long budget = 20000) {
    return gk_adaptive_impl(f, a, b, abs_tol, depth, budget, true);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]. The integrand must be
/// finite on the open interval; tolerance is relative to a first whole-range
/// estimate (with an absolute floor for near-zero integrals).
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_floor = 1e-300, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const auto first = detail::gk15(f, a, b);
    const double scale = std::max(std::fabs(first.integral), abs_floor);
    return detail::gk_adaptive(f, a, b, std::max(rel_tol * scale, abs_floor), max_depth);
}

/// Tanh-sinh (double-exponential) quadrature on (a, b). Designed for
/// integrands with integrable endpoint singularities; nodes cluster doubly
/// exponentially toward both ends and the endpoints themselves are never
/// evaluated.
template <typename F>
double tanh_sinh(const F& f, double a, double b, double rel_tol = 1e-10,
                 int max_level = 12) {
    const double d = 0.5 * (b - a);
    const double u_max = 6.5;

    // f evaluated via the distance to the nearer endpoint so y - a keeps full
    // precision even when the node sits 1e-280 away from it. Non-finite
    // values from overflowing (but integrable) singularities are dropped;
    // the weight decays faster than they grow.
    auto eval_pair = [&](double u) -> double {
        const double v = 0.5 * kPi * std::sinh(u);
        const double w = 0.5 * kPi * std::cosh(u) / sq(std::cosh(v));
        if (w == 0.0) return 0.0;
        // 1 - tanh(v) = 2 / (1 + e^{2v}) evaluated without cancellation
        const double delta = 2.0 * d / (1.0 + std::exp(2.0 * std::fabs(v)));
        if (delta == 0.0) return 0.0;
        if (u == 0.0) {
            const double fc = f(a + d);
            return std::isfinite(fc) ? w * fc : 0.0;
        }
        double s = 0.0;
        const double fr = f(b - delta); // node pushed toward b for v>0
        const double fl = f(a + delta); // mirror node toward a
        if (std::isfinite(fr)) s += fr;
        if (std::isfinite(fl)) s += fl;
        return w * s;
    };

    double h = 1.0;
    double sum = eval_pair(0.0);
    for (int k = 1; k * h <= u_max; ++k) sum += eval_pair(k * h);
    double prev = sum * h * d;

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (int k = 1; k * h <= u_max; k += 2) add += eval_pair(k * h);
        sum += add;
        const double cur = sum * h * d;
        if (level >= 3 &&
            std::fabs(cur - prev) <= rel_tol * std::max(std::fabs(cur), 1e-300)) {
            return cur;
        }
        prev = cur;
    }
    throw convergence_failure("tanh_sinh: level cap hit before tolerance");
}

/// Integral over [a, infinity) by dyadic ranges [a, x0], [x0, 2 x0], ...
/// Stops once several consecutive ranges contribute below tolerance.
template <typename F>
double integrate_to_inf(const F& f, double a, double x0, double rel_tol = 1e-10,
                        int max_ranges = 200) {
    double total = integrate(f, a, x0, rel_tol);
    double lo = x0;
    int quiet = 0;
    for (int k = 0; k < max_ranges; ++k) {
        const double hi = lo * 2.0;
        const double part = integrate(f, lo, hi, rel_tol);
        total += part;
        if (std::fabs(part) <= rel_tol * std::max(std::fabs(total), 1e-300)) {
            if (++quiet >= 3) return total;
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    throw convergence_failure("integrate_to_inf: range cap hit before tail decayed");
}

} // namespace passagekit
