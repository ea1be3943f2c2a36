// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/common.hpp"
#include "passagekit/levy_model.hpp"

#include <cmath>
#include <set>
#include <string>

namespace passagekit {

/// Solved tilt state at (t, x): the unique rho with psi'(rho) = x/t, the
/// exponent bundle there, and the diagnostics every estimate reports.
struct SaddlePoint {
    double t = 0.0;
    double x = 0.0;
    double x_t = 0.0;  // x / t
    double rho = 0.0;  // tilt parameter
    ExponentValues exps;
    double s_t = 0.0;  // sqrt(t) sigma(rho)
    double tH = 0.0;   // t H(rho), the exponential decay rate
    double x_rho = 0.0;

    /// Estimates carry a pre-asymptotic warning below this decay level.
    static constexpr double kPreAsymptoticTH = 3.0;
    bool pre_asymptotic() const { return tH < kPreAsymptoticTH; }
};

enum class RegimeLabel { SC0_I, SC0_II, SCinf, G, Indeterminate };

inline const char* to_string(RegimeLabel l) {
    switch (l) {
    case RegimeLabel::SC0_I: return "SC0_I";
    case RegimeLabel::SC0_II: return "SC0_II";
    case RegimeLabel::SCinf: return "SCinf";
    case RegimeLabel::G: return "G";
    case RegimeLabel::Indeterminate: return "Indeterminate";
    }
    return "?";
}

/// Heuristic regime diagnostics. The labels are finite-sample proxies for
/// asymptotic frameworks and are reported alongside the raw numbers they
/// were derived from, never consumed by the estimators themselves.
struct RegimeReport {
    std::set<RegimeLabel> labels;
    double tH = 0.0;
    double x_rho = 0.0;
    double c_t = 0.0;       // norming: t Q(c_t) = 1
    double b_t = 0.0;       // norming: t (b + int_0^{c_t} y Pi(dy))
    double sc00_ratio = 0.0; // centering quotient at y = c_t
    bool non_lattice = true;
};

/// Upper bound on the normalized third-moment functional driving the normal
/// approximation error, in the n ~ x rho block form.
struct LambdaDiagnostic {
    double lambda_bar = 0.0;
    double tH = 0.0;
};

struct NormingPair {
    double c_t = 0.0;
    double b_t = 0.0;
    /// Set when t Q never crosses 1 on the expanded bracket (finite-activity
    /// models at small t); c_t then holds the bracket edge.
    bool no_solution = false;
};

/// Solve psi'(rho) = x/t by bracketing bisection on the strictly decreasing
/// psi'. Throws out_of_regime unless b < x/t < mu, convergence_failure if 200
/// bisection steps cannot push the residual below 1e-12 max(1, x/t).
inline SaddlePoint solve_rho(const SubordinatorSpec& m, double t, double x) {
    if (!(t > 0.0) || !(x > 0.0))
        throw std::domain_error("solve_rho: t and x must be positive");
    const double x_t = x / t;
    const double mu = m.mean_mu();
    if (!(x_t > m.drift_b))
        throw out_of_regime("solve_rho: x/t <= drift b");
    if (!(x_t < mu))
        throw out_of_regime("solve_rho: x/t >= mean mu");

    auto g = [&](double u) { return psi_prime(m, u) - x_t; };

    double lo = 1.0, hi = 1.0;
    double glo = g(lo), ghi = glo;
    for (int i = 0; i < 2200 && glo < 0.0; ++i) {
        lo *= 0.25;
        glo = g(lo);
    }
    for (int i = 0; i < 2200 && ghi > 0.0; ++i) {
        hi *= 4.0;
        ghi = g(hi);
    }
    if (!(glo >= 0.0 && ghi <= 0.0))
        throw convergence_failure("solve_rho: bracket expansion failed");

    const double tol = 1e-12 * std::max(1.0, x_t);
    double mid = 0.5 * (lo + hi), gm = 0.0;
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // interval at machine resolution
        gm = g(mid);
        if (gm > 0.0) lo = mid; else hi = mid;
        if (std::fabs(gm) <= tol &&
            (hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            break;
    }
    if (std::fabs(gm) > tol)
        throw convergence_failure("solve_rho: residual above tolerance after 200 steps");

    SaddlePoint sp;
    sp.t = t;
    sp.x = x;
    sp.x_t = x_t;
    sp.rho = mid;
    sp.exps = psi_suite(m, mid);
    sp.s_t = std::sqrt(t * sp.exps.sigma2);
    sp.tH = t * sp.exps.H;
    sp.x_rho = x * mid;
    return sp;
}

/// Local density estimate anchored at (t, x_anchor) and evaluated at z:
///   f(z) ~ phi((z - x)/s_t) e^{-tH(rho)} e^{rho (z - x)} / s_t.
/// At z = x this is e^{-tH} / sqrt(2 pi t sigma^2(rho)). Computed in log
/// space; the value underflows to 0 with the sticky flag, never an error.
inline ScaledValue density_estimate(const SaddlePoint& sp, double z) {
    if (!(z > 0.0)) throw std::domain_error("density_estimate: z must be positive");
    const double d = (z - sp.x) / sp.s_t;
    const double log_v = -0.5 * d * d - std::log(kSqrt2Pi * sp.s_t) - sp.tH +
                         sp.rho * (z - sp.x);
    return scaled_from_log(log_v);
}

inline ScaledValue density_estimate(const SubordinatorSpec& m, double t,
                                    double x_anchor, double z) {
    return density_estimate(solve_rho(m, t, x_anchor), z);
}

/// Q-based norming pair: c_t solves t Q(c_t) = 1 on the non-increasing Q,
/// b_t = t (b + int_0^{c_t} y Pi(dy)).
inline NormingPair norming_pair(const SubordinatorSpec& m, double t) {
    if (!(t > 0.0)) throw std::domain_error("norming_pair: t must be positive");
    const double target = 1.0 / t;
    auto g = [&](double c) { return q_pi(m, c) - target; };

    NormingPair np;
    double lo = 1.0, hi = 1.0;
    double glo = g(lo), ghi = glo;
    while (glo < 0.0 && lo > 1e-280) {
        lo *= 0.25;
        glo = g(lo);
    }
    while (ghi > 0.0 && hi < 1e280) {
        hi *= 4.0;
        ghi = g(hi);
    }
    if (glo < 0.0) {
        // Q(0+) finite and below 1/t: no crossing (finite-activity, small t).
        np.no_solution = true;
        np.c_t = lo;
    } else if (ghi > 0.0) {
        np.no_solution = true;
        np.c_t = hi;
    } else {
        double mid = 0.5 * (lo + hi);
        for (int i = 0; i < 200; ++i) {
            mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) lo = mid; else hi = mid;
            if ((hi - lo) <= 1e-15 * hi) break;
        }
        np.c_t = mid;
    }
    np.b_t = t * (m.drift_b + truncated_moment(m, 1, np.c_t));
    return np;
}

namespace detail {

/// The centering quotient y (b + int_0^y z Pi(dz)) / int_0^y z^2 Pi(dz).
inline double sc00_quotient(const SubordinatorSpec& m, double y) {
    const double m1 = truncated_moment(m, 1, y);
    const double m2 = truncated_moment(m, 2, y);
    if (m2 == 0.0) return kInf;
    return y * (m.drift_b + m1) / m2;
}

} // namespace detail

/// Classify (t, x) against the asymptotic frameworks with documented
/// finite-sample proxies:
///   G      : x_t inside [b + d, mu - d], d = 0.05 (mu - b) (finite mu),
///            strongly non-lattice metadata, t >= 1;
///   SC0_*  : x_t near b (below the G band, or rho >= 10 when mu = inf) with
///            tH >= 10 and x rho >= 10; _I when t >= 1, _II when t < 1;
///   SCinf  : mu = inf, x_t large (rho <= 0.1), t >= 1, tH >= 10;
///   Indeterminate otherwise.
/// The raw numbers (tH, x rho, c_t, b_t, SC00 quotient) ride along so a
/// boundary case can be judged by eye instead of by the label.
inline RegimeReport classify_regime(const SubordinatorSpec& m, double t, double x) {
    const SaddlePoint sp = solve_rho(m, t, x);
    constexpr double kLargeTH = 10.0;
    constexpr double kLargeXRho = 10.0;
    constexpr double kLargeRho = 10.0;
    constexpr double kSmallRho = 0.1;

    RegimeReport r;
    r.tH = sp.tH;
    r.x_rho = sp.x_rho;
    r.non_lattice = m.non_lattice;
    const NormingPair np = norming_pair(m, t);
    r.c_t = np.c_t;
    r.b_t = np.b_t;
    r.sc00_ratio = detail::sc00_quotient(m, np.c_t);

    const double mu = m.mean_mu();
    const bool finite_mu = std::isfinite(mu);
    bool near_b = false;
    if (finite_mu) {
        const double d = 0.05 * (mu - m.drift_b);
        near_b = sp.x_t < m.drift_b + d;
        if (!near_b && sp.x_t <= mu - d && m.non_lattice && t >= 1.0)
            r.labels.insert(RegimeLabel::G);
    } else {
        near_b = sp.rho >= kLargeRho;
        if (sp.rho <= kSmallRho && t >= 1.0 && sp.tH >= kLargeTH)
            r.labels.insert(RegimeLabel::SCinf);
    }
    if (near_b && sp.tH >= kLargeTH && sp.x_rho >= kLargeXRho)
        r.labels.insert(t >= 1.0 ? RegimeLabel::SC0_I : RegimeLabel::SC0_II);
    if (r.labels.empty()) r.labels.insert(RegimeLabel::Indeterminate);
    return r;
}

/// Normal-approximation error bound in the n ~ x rho form:
///   lambda_bar = [6 t rho^{-3} Q(1/rho) + 2 t sigma^2(rho)/rho]
///                  / (t sigma^2(rho))^{3/2}.
/// Requires x rho >= 1 (at least one block).
inline LambdaDiagnostic lambda_diagnostic(const SubordinatorSpec& m, double t, double x) {
    const SaddlePoint sp = solve_rho(m, t, x);
    if (!(sp.x_rho >= 1.0))
        throw std::domain_error("lambda_diagnostic: requires x rho >= 1");
    const double rho = sp.rho;
    const double ts2 = t * sp.exps.sigma2;
    const double num = 6.0 * t * q_pi(m, 1.0 / rho) / (rho * rho * rho) +
                       2.0 * ts2 / rho;
    LambdaDiagnostic d;
    d.lambda_bar = num / (ts2 * std::sqrt(ts2));
    d.tH = sp.tH;
    return d;
}

} // namespace passagekit
