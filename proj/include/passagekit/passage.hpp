// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/common.hpp"
#include "passagekit/levy_model.hpp"
#include "passagekit/oracles.hpp"
#include "passagekit/saddle.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <string>

namespace passagekit {

enum class PassageKind { JumpDensity, JumpInterval, CreepInterval, CreepDensity };

enum class Warning { PreAsymptotic, Underflow, ZeroDrift };

inline const char* to_string(Warning w) {
    switch (w) {
    case Warning::PreAsymptotic: return "pre-asymptotic";
    case Warning::Underflow: return "underflow";
    case Warning::ZeroDrift: return "zero-drift";
    }
    return "?";
}

/// One first-passage estimate with its regime diagnostics. `value` is the
/// plain double (0 on underflow, with the warning set); `log_value` stays
/// meaningful arbitrarily deep in the tail.
struct PassageEstimate {
    PassageKind kind = PassageKind::JumpDensity;
    double value = 0.0;
    double log_value = -kInf;
    SaddlePoint sp;
    std::optional<double> delta;
    std::set<Warning> warnings;
};

/// Scaled stable-limit predictions at one (t, x, Delta).
struct StableLimitEstimate {
    double y_t = 0.0;      // x / c(t), tail-based norming t Pi(c(t),inf) = 1
    double c_t = 0.0;
    double hJ_scaled = 0.0; // limit prediction for t h^J_x(t)
    double hC_scaled = 0.0; // limit prediction for c(t) h^C_x(t, Delta)
    double alpha = 0.0;
};

namespace detail {

// log of e^{-tH} / (sqrt(2 pi t) rho sigma(rho)), the factor shared by all
// four passage estimates; keeping it shared makes the creep/jump split an
// exact algebraic identity of the implementation.
inline double log_base(const SaddlePoint& sp) {
    return -sp.tH -
           std::log(kSqrt2Pi * std::sqrt(sp.t) * sp.rho * std::sqrt(sp.exps.sigma2));
}

inline void apply_common_warnings(PassageEstimate& e) {
    if (e.sp.pre_asymptotic()) e.warnings.insert(Warning::PreAsymptotic);
}

inline PassageEstimate from_log(PassageKind kind, const SaddlePoint& sp,
                                double log_value, std::optional<double> delta) {
    PassageEstimate e;
    e.kind = kind;
    e.sp = sp;
    e.delta = delta;
    const ScaledValue v = scaled_from_log(log_value);
    e.value = v.value;
    e.log_value = v.log_value;
    if (v.underflow) e.warnings.insert(Warning::Underflow);
    apply_common_warnings(e);
    return e;
}

inline void check_delta(double delta, double delta0) {
    if (!(delta > 0.0)) throw std::domain_error("interval estimate: Delta must be > 0");
    if (!(delta <= delta0))
        throw std::domain_error("interval estimate: Delta exceeds Delta0");
}

// log((1 - e^{-Delta psi}) / psi)
inline double log_interval_factor(double delta, double psi_rho) {
    return std::log(-std::expm1(-delta * psi_rho)) - std::log(psi_rho);
}

} // namespace detail

/// Passage-time density on the jump event:
///   h^J_x(t) ~ psi*(rho) e^{-tH} / (sqrt(2 pi t) rho sigma(rho)).
inline PassageEstimate hJ_density(const SubordinatorSpec& m, double t, double x) {
    const SaddlePoint sp = solve_rho(m, t, x);
    const double lg = std::log(sp.exps.psi_star) + detail::log_base(sp);
    return detail::from_log(PassageKind::JumpDensity, sp, lg, std::nullopt);
}

/// Interval jump probability:
///   h^J_x(t, D) ~ psi*(rho) (1 - e^{-D psi(rho)}) e^{-tH}
///                   / (psi(rho) sqrt(2 pi t) rho sigma(rho)).
inline PassageEstimate hJ_interval(const SubordinatorSpec& m, double t, double x,
                                   double delta, double delta0 = 10.0) {
    detail::check_delta(delta, delta0);
    const SaddlePoint sp = solve_rho(m, t, x);
    const double lg = std::log(sp.exps.psi_star) +
                      detail::log_interval_factor(delta, sp.exps.psi) +
                      detail::log_base(sp);
    return detail::from_log(PassageKind::JumpInterval, sp, lg, delta);
}

/// Interval creep probability:
///   h^C_x(t, D) ~ b rho (1 - e^{-D psi(rho)}) e^{-tH}
///                   / (psi(rho) sqrt(2 pi t) rho sigma(rho)).
/// Zero drift cannot creep; the estimate is then 0 with a warning.
inline PassageEstimate hC_interval(const SubordinatorSpec& m, double t, double x,
                                   double delta, double delta0 = 10.0) {
    detail::check_delta(delta, delta0);
    const SaddlePoint sp = solve_rho(m, t, x);
    if (m.drift_b == 0.0) {
        PassageEstimate e = detail::from_log(PassageKind::CreepInterval, sp, -kInf, delta);
        e.warnings.erase(Warning::Underflow);
        e.warnings.insert(Warning::ZeroDrift);
        return e;
    }
    const double lg = std::log(m.drift_b * sp.rho) +
                      detail::log_interval_factor(delta, sp.exps.psi) +
                      detail::log_base(sp);
    return detail::from_log(PassageKind::CreepInterval, sp, lg, delta);
}

/// Creep density h^C_x(t) = b f_t(x), valid for x > bt.
inline PassageEstimate hC_density(const SubordinatorSpec& m, double t, double x) {
    if (!(x > m.drift_b * t))
        throw std::domain_error("hC_density: requires x > b t");
    const SaddlePoint sp = solve_rho(m, t, x);
    if (m.drift_b == 0.0) {
        PassageEstimate e = detail::from_log(PassageKind::CreepDensity, sp, -kInf, std::nullopt);
        e.warnings.erase(Warning::Underflow);
        e.warnings.insert(Warning::ZeroDrift);
        return e;
    }
    const ScaledValue f = density_estimate(sp, x);
    return detail::from_log(PassageKind::CreepDensity, sp,
                            std::log(m.drift_b) + f.log_value, std::nullopt);
}

/// Conditional creep probability given T_x = t:
///   P(creep | T_x = t) ~ b rho / psi(rho);  -> 1 as rho -> inf,
///   -> b / psi'(0+) as rho -> 0.
inline double creep_conditional(const SubordinatorSpec& m, double t, double x) {
    if (m.drift_b == 0.0) {
        solve_rho(m, t, x); // surface regime errors exactly as the other ops
        return 0.0;
    }
    const SaddlePoint sp = solve_rho(m, t, x);
    return m.drift_b * sp.rho / sp.exps.psi;
}

/// Tail-based norming for the stable limit: c(t) with t Pi(c(t), inf) = 1.
/// Distinct from the Q-based norming_pair; both coexist deliberately.
inline double tail_norming(const SubordinatorSpec& m, double t) {
    if (m.kind != ModelKind::Stable)
        throw unsupported_model("tail_norming: power tail (Stable) required");
    return std::pow(t * m.s / std::tgamma(1.0 - m.alpha), 1.0 / m.alpha);
}

/// Stable-limit predictions: with y_t = x / c(t),
///   t h^J_x(t)        = h~_{y_t}(1) + o(1),
///   c(t) h^C_x(t, D)  = b D (g~_1(y_t) + o(1)),
/// where g~, h~ are the density / passage density of the limiting stable
/// subordinator with exponent Gamma(1-alpha) u^alpha. Both are produced by
/// the oracle routines (closed form at alpha = 1/2, inversion otherwise).
inline StableLimitEstimate stable_limit(const SubordinatorSpec& m, double t, double x,
                                        double delta) {
    if (m.kind != ModelKind::Stable)
        throw unsupported_model("stable_limit: tail decays faster than any power");
    if (!(t > 0.0) || !(x > 0.0) || !(delta > 0.0))
        throw std::domain_error("stable_limit: t, x, Delta must be positive");
    StableLimitEstimate e;
    e.alpha = m.alpha;
    e.c_t = tail_norming(m, t);
    e.y_t = x / e.c_t;
    const SubordinatorSpec limit = make_stable(m.alpha, std::tgamma(1.0 - m.alpha));
    e.hJ_scaled = exact_hJ_density(limit, 1.0, e.y_t).value;
    e.hC_scaled = m.drift_b * delta * exact_density(limit, 1.0, e.y_t).value;
    return e;
}

} // namespace passagekit
