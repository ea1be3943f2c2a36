// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/common.hpp"
#include "passagekit/quadrature.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace passagekit {

enum class ModelKind { Stable, Gamma, CompoundPoissonExp };

/// A parametric subordinator: drift plus one of three closed-form Levy
/// measures.
///
///   Stable(alpha, s):          psi*(u) = s u^alpha, alpha in (0,1)
///   Gamma(a, theta):           psi*(u) = a log(1 + u/theta)
///   CompoundPoissonExp(r, eta): psi*(u) = r u / (u + eta)
///
/// All exponent-level functionals used by the estimators are exposed as
/// closed forms; the quadrature routes exist only as cross-checks.
struct SubordinatorSpec {
    ModelKind kind = ModelKind::Stable;
    double alpha = 0.5; // Stable index
    double s = 1.0;     // Stable scale, psi*(u) = s u^alpha
    double a = 1.0;     // Gamma shape rate
    double theta = 1.0; // Gamma jump decay
    double rate = 1.0;  // CP jump intensity
    double eta = 1.0;   // CP jump decay
    double drift_b = 0.0;
    bool non_lattice = true;

    /// psi'(0+) = b + int y Pi(dy); +inf for Stable.
    double mean_mu() const {
        switch (kind) {
        case ModelKind::Stable: return kInf;
        case ModelKind::Gamma: return drift_b + a / theta;
        case ModelKind::CompoundPoissonExp: return drift_b + rate / eta;
        }
        return kInf;
    }

    bool finite_activity() const { return kind == ModelKind::CompoundPoissonExp; }
};

inline SubordinatorSpec make_stable(double alpha, double s, double drift_b = 0.0) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("stable: alpha must lie in (0,1)");
    if (!(s > 0.0)) throw std::invalid_argument("stable: s must be positive");
    if (!(drift_b >= 0.0)) throw std::invalid_argument("drift b must be >= 0");
    SubordinatorSpec m;
    m.kind = ModelKind::Stable;
    m.alpha = alpha;
    m.s = s;
    m.drift_b = drift_b;
    return m;
}

/// Canonical stable-1/2 model: psi(u) = sqrt(2u), so X_t has the exact
/// density t (2 pi x^3)^{-1/2} exp(-t^2 / 2x).
inline SubordinatorSpec make_stable_half(double drift_b = 0.0) {
    return make_stable(0.5, std::sqrt(2.0), drift_b);
}

inline SubordinatorSpec make_gamma(double a, double theta, double drift_b = 0.0) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma: a must be positive");
    if (!(theta > 0.0)) throw std::invalid_argument("gamma: theta must be positive");
    if (!(drift_b >= 0.0)) throw std::invalid_argument("drift b must be >= 0");
    SubordinatorSpec m;
    m.kind = ModelKind::Gamma;
    m.a = a;
    m.theta = theta;
    m.drift_b = drift_b;
    return m;
}

inline SubordinatorSpec make_cpexp(double rate, double eta, double drift_b = 0.0) {
    if (!(rate > 0.0)) throw std::invalid_argument("cpexp: rate must be positive");
    if (!(eta > 0.0)) throw std::invalid_argument("cpexp: eta must be positive");
    if (!(drift_b >= 0.0)) throw std::invalid_argument("drift b must be >= 0");
    SubordinatorSpec m;
    m.kind = ModelKind::CompoundPoissonExp;
    m.rate = rate;
    m.eta = eta;
    m.drift_b = drift_b;
    return m;
}

/// Exponent values bundled at one argument u > 0.
struct ExponentValues {
    double u = 0.0;
    double psi = 0.0;       // b u + psi*
    double psi_star = 0.0;  // driftless part
    double psi_prime = 0.0; // b + int y e^{-uy} Pi(dy)
    double sigma2 = 0.0;    // int y^2 e^{-uy} Pi(dy)
    double H = 0.0;         // psi - u psi'
};

/// Tail functionals at one level x > 0.
struct TailRatios {
    double x = 0.0;
    double tail = 0.0; // Pi(x, inf)
    double K = 0.0;    // x^{-2} int_{(0,x)} y^2 Pi(dy)
    double Q = 0.0;    // tail + K
};

namespace detail {

/// Exponential integral E1(x) for x > 0: series for small x, modified Lentz
/// continued fraction otherwise. Good to ~1e-15 relative.
inline double expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expint_e1: x must be positive");
    constexpr double euler_gamma = 0.57721566490153286061;
    if (x <= 1.0) {
        double sum = -euler_gamma - std::log(x);
        double term = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -x / k;
            const double add = -term / k;
            sum += add;
            if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
        }
        return sum;
    }
    // E1(x) = e^{-x} * 1/(x+1 - 1/(x+3 - 4/(x+5 - 9/(...))))
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k <= 200; ++k) {
        const double an = -static_cast<double>(k) * k;
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

// gamma(k, z) = int_0^z v^{k-1} e^{-v} dv for integer k in {1,...,4}. The
// closed difference forms cancel catastrophically for small z, so switch to
// the ascending series there.
inline double lower_gamma_int(int k, double z) {
    if (k < 1 || k > 4) throw std::domain_error("lower_gamma_int: k out of range");
    if (z == kInf) {
        static constexpr double full[] = {1.0, 1.0, 2.0, 6.0};
        return full[k - 1];
    }
    if (z < 1.0) {
        // gamma(k,z) = z^k e^{-z} sum_n z^n / (k (k+1) ... (k+n))
        double term = 1.0 / k;
        double sum = term;
        for (int n = 1; n <= 60; ++n) {
            term *= z / (k + n);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::pow(z, k) * std::exp(-z) * sum;
    }
    const double e = std::exp(-z);
    switch (k) {
    case 1: return -std::expm1(-z);
    case 2: return 1.0 - e * (1.0 + z);
    case 3: return 2.0 - e * (z * z + 2.0 * z + 2.0);
    case 4: return 6.0 - e * (z * z * z + 3.0 * z * z + 6.0 * z + 6.0);
    }
    return 0.0;
}

} // namespace detail

/// Levy density of Pi with respect to Lebesgue measure (all three kinds are
/// absolutely continuous). Used by the quadrature cross-checks and the
/// simulator, not by the closed-form paths.
inline double levy_density(const SubordinatorSpec& m, double y) {
    if (!(y > 0.0)) throw std::domain_error("levy_density: y must be positive");
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * m.alpha / std::tgamma(1.0 - m.alpha) * std::pow(y, -m.alpha - 1.0);
    case ModelKind::Gamma:
        return m.a / y * std::exp(-m.theta * y);
    case ModelKind::CompoundPoissonExp:
        return m.rate * m.eta * std::exp(-m.eta * y);
    }
    return 0.0;
}

/// Tail Pi(x, inf).
inline double tail(const SubordinatorSpec& m, double x) {
    if (!(x > 0.0)) throw std::domain_error("tail: x must be positive");
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * std::pow(x, -m.alpha) / std::tgamma(1.0 - m.alpha);
    case ModelKind::Gamma:
        return m.a * detail::expint_e1(m.theta * x);
    case ModelKind::CompoundPoissonExp:
        return m.rate * std::exp(-m.eta * x);
    }
    return 0.0;
}

/// int_0^x y^k Pi(dy) for k in {1,2,3}; x may be +inf (the full moment, which
/// is +inf for Stable k=1 only when the integral diverges at infinity --
/// here k >= 1 > alpha so only the upper limit matters).
inline double truncated_moment(const SubordinatorSpec& m, int k, double x) {
    if (k < 1 || k > 3) throw std::domain_error("truncated_moment: k must be in {1,2,3}");
    if (!(x > 0.0)) throw std::domain_error("truncated_moment: x must be positive");
    switch (m.kind) {
    case ModelKind::Stable: {
        if (x == kInf) return kInf;
        const double c = m.s * m.alpha / std::tgamma(1.0 - m.alpha);
        return c * std::pow(x, k - m.alpha) / (k - m.alpha);
    }
    case ModelKind::Gamma:
        return m.a * detail::lower_gamma_int(k, m.theta * x) / std::pow(m.theta, k);
    case ModelKind::CompoundPoissonExp:
        return m.rate * detail::lower_gamma_int(k + 1, m.eta * x) / std::pow(m.eta, k);
    }
    return 0.0;
}

/// Quadrature route for the truncated moments (tanh-sinh over (0, x) with the
/// endpoint singularity of the Stable density absorbed by the node
/// clustering). Cross-check only.
inline double truncated_moment_quad(const SubordinatorSpec& m, int k, double x,
                                    double rel_tol = 1e-12) {
    if (k < 1 || k > 3) throw std::domain_error("truncated_moment_quad: bad k");
    if (!(x > 0.0) || x == kInf)
        throw std::domain_error("truncated_moment_quad: x must be finite positive");
    return tanh_sinh(
        [&](double y) { return std::pow(y, static_cast<double>(k)) * levy_density(m, y); },
        0.0, x, rel_tol);
}

inline double psi_star(const SubordinatorSpec& m, double u) {
    switch (m.kind) {
    case ModelKind::Stable: return m.s * std::pow(u, m.alpha);
    case ModelKind::Gamma: return m.a * std::log1p(u / m.theta);
    case ModelKind::CompoundPoissonExp: return m.rate * u / (u + m.eta);
    }
    return 0.0;
}

inline double psi(const SubordinatorSpec& m, double u) {
    return m.drift_b * u + psi_star(m, u);
}

inline double psi_prime(const SubordinatorSpec& m, double u) {
    switch (m.kind) {
    case ModelKind::Stable:
        return m.drift_b + m.s * m.alpha * std::pow(u, m.alpha - 1.0);
    case ModelKind::Gamma:
        return m.drift_b + m.a / (m.theta + u);
    case ModelKind::CompoundPoissonExp:
        return m.drift_b + m.rate * m.eta / sq(u + m.eta);
    }
    return 0.0;
}

/// sigma^2(u) = int y^2 e^{-uy} Pi(dy) = -psi''(u).
inline double sigma2(const SubordinatorSpec& m, double u) {
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * m.alpha * (1.0 - m.alpha) * std::pow(u, m.alpha - 2.0);
    case ModelKind::Gamma:
        return m.a / sq(m.theta + u);
    case ModelKind::CompoundPoissonExp:
        return 2.0 * m.rate * m.eta / (sq(u + m.eta) * (u + m.eta));
    }
    return 0.0;
}

/// H(u) = psi(u) - u psi'(u); nonnegative, increasing, H(0+) = 0.
inline double big_h(const SubordinatorSpec& m, double u) {
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * (1.0 - m.alpha) * std::pow(u, m.alpha);
    case ModelKind::Gamma: {
        const double v = u / m.theta;
        return m.a * (std::log1p(v) - v / (1.0 + v));
    }
    case ModelKind::CompoundPoissonExp:
        return m.rate * sq(u) / sq(u + m.eta);
    }
    return 0.0;
}

/// The full exponent bundle at u > 0.
inline ExponentValues psi_suite(const SubordinatorSpec& m, double u) {
    if (!(u > 0.0)) throw std::domain_error("psi_suite: u must be positive");
    ExponentValues e;
    e.u = u;
    e.psi_star = psi_star(m, u);
    e.psi = m.drift_b * u + e.psi_star;
    e.psi_prime = psi_prime(m, u);
    e.sigma2 = sigma2(m, u);
    e.H = big_h(m, u);
    return e;
}

namespace detail {

// gamma(k, z) / z^k, evaluated without forming z^k (stable down to denormal z).
inline double lower_gamma_ratio(int k, double z) {
    if (z < 1.0) {
        double term = 1.0 / k;
        double sum = term;
        for (int n = 1; n <= 60; ++n) {
            term *= z / (k + n);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::exp(-z) * sum;
    }
    return lower_gamma_int(k, z) / std::pow(z, k);
}

} // namespace detail

/// K_Pi(x) = x^{-2} int_{(0,x)} y^2 Pi(dy), in forms that stay finite for
/// arbitrarily small or large x.
inline double k_pi(const SubordinatorSpec& m, double x) {
    if (!(x > 0.0)) throw std::domain_error("k_pi: x must be positive");
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * m.alpha / (std::tgamma(1.0 - m.alpha) * (2.0 - m.alpha)) *
               std::pow(x, -m.alpha);
    case ModelKind::Gamma:
        return m.a * detail::lower_gamma_ratio(2, m.theta * x);
    case ModelKind::CompoundPoissonExp:
        return m.rate * m.eta * x * detail::lower_gamma_ratio(3, m.eta * x);
    }
    return 0.0;
}

/// Q_Pi(x) = tail + K, the non-increasing compactness functional.
inline double q_pi(const SubordinatorSpec& m, double x) {
    return tail(m, x) + k_pi(m, x);
}

/// Tail-ratio bundle with the identity cross-check: Q is recomputed as
/// 2 x^{-2} int_0^x y Pi(y,inf) dy by quadrature and must agree with
/// tail + K to 1e-10 relative.
inline TailRatios ratio_suite(const SubordinatorSpec& m, double x,
                              double check_tol = 1e-10) {
    if (!(x > 0.0)) throw std::domain_error("ratio_suite: x must be positive");
    TailRatios r;
    r.x = x;
    r.tail = tail(m, x);
    r.K = k_pi(m, x);
    r.Q = r.tail + r.K;
    const double q_ident =
        2.0 / sq(x) *
        tanh_sinh([&](double y) { return y * tail(m, y); }, 0.0, x, 1e-12);
    if (std::fabs(q_ident - r.Q) > check_tol * r.Q)
        throw convergence_failure("ratio_suite: Q identity cross-check failed");
    return r;
}

namespace detail {

/// psi(w) on the closed half-plane Re w >= 0, principal branches. No
/// front-door restrictions; callers enforce their own branch contracts.
inline std::complex<double> psi_complex_any(const SubordinatorSpec& m,
                                            std::complex<double> w) {
    using cd = std::complex<double>;
    switch (m.kind) {
    case ModelKind::Stable:
        return m.drift_b * w + m.s * std::exp(m.alpha * std::log(w));
    case ModelKind::Gamma:
        return m.drift_b * w + m.a * std::log(1.0 + w / m.theta);
    case ModelKind::CompoundPoissonExp:
        return m.drift_b * w + m.rate * w / (w + m.eta);
    }
    return cd(0.0, 0.0);
}

inline std::complex<double> psi_star_complex_any(const SubordinatorSpec& m,
                                                 std::complex<double> w) {
    return psi_complex_any(m, w) - m.drift_b * w;
}

} // namespace detail

/// psi(lambda - i z) on the principal branch. Re(lambda - iz) = lambda > 0
/// keeps the power/log forms away from their cuts; conjugate symmetry
/// psi(lambda - iz) = conj(psi(lambda + iz)) holds by construction.
/// lambda = 0 is allowed for Stable (limit along Re > 0) and CP, rejected
/// for Gamma.
inline std::complex<double> psi_complex(const SubordinatorSpec& m, double lambda,
                                        double z) {
    if (!(lambda >= 0.0)) throw std::domain_error("psi_complex: lambda must be >= 0");
    if (lambda == 0.0) {
        if (m.kind == ModelKind::Gamma)
            throw std::domain_error("psi_complex: Gamma requires lambda > 0");
        if (z == 0.0) return {0.0, 0.0};
    }
    return detail::psi_complex_any(m, std::complex<double>(lambda, -z));
}

/// Re psi*(-iz) = int (1 - cos(zy)) Pi(dy), closed form per kind. This is the
/// decay-driving exponent of hypothesis (H).
inline double re_psi_star_imag_axis(const SubordinatorSpec& m, double z) {
    z = std::fabs(z);
    if (z == 0.0) return 0.0;
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * std::pow(z, m.alpha) * std::cos(0.5 * kPi * m.alpha);
    case ModelKind::Gamma:
        return 0.5 * m.a * std::log1p(sq(z / m.theta));
    case ModelKind::CompoundPoissonExp:
        return m.rate * sq(z) / (sq(m.eta) + sq(z));
    }
    return 0.0;
}

/// |psi*(-iz)|, closed form per kind.
inline double abs_psi_star_imag_axis(const SubordinatorSpec& m, double z) {
    z = std::fabs(z);
    if (z == 0.0) return 0.0;
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * std::pow(z, m.alpha);
    case ModelKind::Gamma: {
        const double re = 0.5 * m.a * std::log1p(sq(z / m.theta));
        const double im = m.a * std::atan(z / m.theta);
        return std::hypot(re, im);
    }
    case ModelKind::CompoundPoissonExp:
        return m.rate * z / std::hypot(z, m.eta);
    }
    return 0.0;
}

/// int_0^u Pi(y, inf) dy, closed form per kind (finite for every
/// subordinator). Feeds the sufficient-condition integrand of the
/// integrability checker.
inline double tail_integral(const SubordinatorSpec& m, double u) {
    if (!(u > 0.0)) throw std::domain_error("tail_integral: u must be positive");
    switch (m.kind) {
    case ModelKind::Stable:
        return m.s * std::pow(u, 1.0 - m.alpha) / std::tgamma(2.0 - m.alpha);
    case ModelKind::Gamma: {
        const double z = m.theta * u;
        // int_0^z E1(v) dv = 1 - e^{-z} + z E1(z)
        return m.a / m.theta * (-std::expm1(-z) + z * detail::expint_e1(z));
    }
    case ModelKind::CompoundPoissonExp:
        return m.rate / m.eta * -std::expm1(-m.eta * u);
    }
    return 0.0;
}

} // namespace passagekit
