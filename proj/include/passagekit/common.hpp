// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace passagekit {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Requested point lies outside b < x/t < mu, where no tilt parameter exists.
class out_of_regime : public std::domain_error {
public:
    explicit out_of_regime(const std::string& what) : std::domain_error(what) {}
};

/// An iterative solver or quadrature failed to reach its tolerance.
class convergence_failure : public std::runtime_error {
public:
    explicit convergence_failure(const std::string& what) : std::runtime_error(what) {}
};

/// Operation is not defined for this model kind.
class unsupported_model : public std::domain_error {
public:
    explicit unsupported_model(const std::string& what) : std::domain_error(what) {}
};

/// Fourier inversion requested for a model whose characteristic exponent
/// fails the integrability check.
class hypothesis_h_failed : public std::domain_error {
public:
    explicit hypothesis_h_failed(const std::string& what) : std::domain_error(what) {}
};

/// Potential densities only exist when the drift is positive.
class zero_drift : public std::domain_error {
public:
    explicit zero_drift(const std::string& what) : std::domain_error(what) {}
};

/// Too many simulated paths hit the per-path event cap.
class step_cap_exceeded : public std::runtime_error {
public:
    explicit step_cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A nonnegative quantity that legitimately reaches e^{-tH} scales far below
/// the smallest normal double. `log_value` is always meaningful; `value`
/// collapses to 0 with the sticky flag set instead of erroring.
struct ScaledValue {
    double value = 0.0;
    double log_value = -kInf;
    bool underflow = false;
};

/// exp() that reports underflow instead of silently returning a denormal/0.
inline ScaledValue scaled_from_log(double log_value) {
    ScaledValue r;
    r.log_value = log_value;
    if (log_value < std::log(std::numeric_limits<double>::min())) {
        r.value = 0.0;
        r.underflow = true;
    } else {
        r.value = std::exp(log_value);
    }
    return r;
}

inline double sq(double x) { return x * x; }

/// Standard normal density.
inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

/// Standard normal CDF, accurate in both tails.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// P(a < Z <= b) for standard normal Z, stable when both points are deep in a
/// tail (uses erfc differences rather than CDF differences).
inline double norm_interval(double a, double b) {
    const double s = std::sqrt(2.0);
    if (a >= 0.0) return 0.5 * (std::erfc(a / s) - std::erfc(b / s));
    if (b <= 0.0) return 0.5 * (std::erfc(-b / s) - std::erfc(-a / s));
    return norm_cdf(b) - norm_cdf(a);
}

} // namespace passagekit
