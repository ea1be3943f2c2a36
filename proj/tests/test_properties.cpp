// SPDX-License-Identifier: MIT
//
// Randomized-model property checks: draw parameters from fixed-seed streams
// and assert the structural identities that every subordinator must satisfy.
#include <catch2/catch_amalgamated.hpp>

#include "passagekit/passage.hpp"
#include "passagekit/rng.hpp"

#include <cmath>

using namespace passagekit;
using Catch::Approx;

namespace {

SubordinatorSpec random_model(CounterRng& rng) {
    const double b = (rng.u01() < 0.5) ? 0.0 : std::exp(2.0 * rng.u01() - 1.0);
    switch (static_cast<int>(rng.u01() * 3.0)) {
    case 0: return make_stable(0.05 + 0.9 * rng.u01(), std::exp(2.0 * rng.u01() - 1.0), b);
    case 1:
        return make_gamma(std::exp(2.0 * rng.u01() - 1.0),
                          std::exp(2.0 * rng.u01() - 1.0), b);
    default:
        return make_cpexp(std::exp(2.0 * rng.u01() - 1.0),
                          std::exp(2.0 * rng.u01() - 1.0), b);
    }
}

} // namespace

TEST_CASE("exponent identities hold for random models", "[property]") {
    CounterRng rng(2024, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const SubordinatorSpec m = random_model(rng);
        const double u = std::exp(6.0 * rng.u01() - 3.0);
        const ExponentValues e = psi_suite(m, u);
        INFO("trial " << trial << " u=" << u);
        CHECK(e.psi == Approx(m.drift_b * u + e.psi_star).epsilon(1e-13));
        CHECK(u * e.psi_prime <= e.psi * (1.0 + 1e-13));
        CHECK(e.H >= 0.0);
        CHECK(e.sigma2 > 0.0);

        const double H = e.H;
        const double Q = q_pi(m, 1.0 / u);
        CHECK(H <= Q * (1.0 + 1e-12));
        CHECK(H >= Q / (2.0 * std::exp(1.0)) * (1.0 - 1e-12));
        CHECK(u * u * e.sigma2 <= 2.0 * H * (1.0 + 1e-12));
    }
}

TEST_CASE("tail functionals agree with quadrature for random models", "[property]") {
    CounterRng rng(2025, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const SubordinatorSpec m = random_model(rng);
        const double x = std::exp(3.0 * rng.u01() - 1.5);
        INFO("trial " << trial << " x=" << x);
        const TailRatios r = ratio_suite(m, x); // internal (qp) cross-check
        CHECK(r.Q == Approx(r.tail + r.K).epsilon(1e-14));
        const double k2 = truncated_moment_quad(m, 2, x);
        CHECK(r.K == Approx(k2 / (x * x)).epsilon(1e-9));
    }
}

TEST_CASE("creep split identity holds for random drifted models", "[property]") {
    CounterRng rng(2026, 0);
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 40; ++trial) {
        SubordinatorSpec m = random_model(rng);
        if (m.drift_b == 0.0) continue;
        const double mu = m.mean_mu();
        const double span = std::isfinite(mu) ? (mu - m.drift_b) : 3.0;
        const double x_t = m.drift_b + span * (0.1 + 0.8 * rng.u01());
        const double t = std::exp(3.0 * rng.u01());
        const double delta = std::exp(2.0 * rng.u01() - 1.0);
        const double x = x_t * t;
        INFO("trial " << trial << " model " << static_cast<int>(m.kind) << " t=" << t
                      << " x=" << x);
        const PassageEstimate hc = hC_interval(m, t, x, delta);
        const PassageEstimate hj = hJ_interval(m, t, x, delta);
        if (hc.value == 0.0 && hj.value == 0.0) continue; // both underflowed
        const SaddlePoint sp = solve_rho(m, t, x);
        CHECK(hc.value / (hc.value + hj.value) ==
              Approx(m.drift_b * sp.rho / sp.exps.psi).epsilon(1e-12));
        ++tested;
    }
    CHECK(tested >= 40);
}

TEST_CASE("saddle residuals for random models", "[property]") {
    CounterRng rng(2027, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const SubordinatorSpec m = random_model(rng);
        const double mu = m.mean_mu();
        const double span = std::isfinite(mu) ? (mu - m.drift_b) : 10.0;
        const double x_t = m.drift_b + span * (0.02 + 0.96 * rng.u01());
        const double t = std::exp(4.0 * rng.u01() - 2.0);
        const SaddlePoint sp = solve_rho(m, t, x_t * t);
        INFO("trial " << trial);
        CHECK(std::fabs(psi_prime(m, sp.rho) - x_t) <= 1e-12 * std::max(1.0, x_t));
        CHECK(sp.s_t * sp.rho <= std::sqrt(2.0 * sp.tH) * (1.0 + 1e-12));
    }
}
