// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "passagekit/passage.hpp"

#include <cmath>
#include <vector>

using namespace passagekit;
using Catch::Approx;

namespace {

const SubordinatorSpec kStableHalf = make_stable_half();
const SubordinatorSpec kGamma11 = make_gamma(1.0, 1.0);
const SubordinatorSpec kCp = make_cpexp(1.0, 1.0, 0.5);

// Brownian reflection oracle for the canonical stable-1/2 passage density.
double reflection_hJ(double t, double x) {
    return std::sqrt(2.0 / (kPi * x)) * std::exp(-t * t / (2.0 * x));
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1.0));
    return g;
}

} // namespace

TEST_CASE("jump passage density", "[passage]") {
    // exact for stable_half
    CHECK(hJ_density(kStableHalf, 2.0, 1.0).value ==
          Approx(reflection_hJ(2.0, 1.0)).epsilon(1e-10));
    CHECK(hJ_density(kStableHalf, 2.0, 1.0).value == Approx(0.1079819).epsilon(1e-6));
    CHECK(hJ_density(kStableHalf, 4.0, 1.0).value ==
          Approx(reflection_hJ(4.0, 1.0)).epsilon(1e-10));
    CHECK(hJ_density(kStableHalf, 4.0, 1.0).value == Approx(2.6766045e-4).epsilon(1e-6));

    // Gamma chain: psi*(1) e^{-tH} / (sqrt(2 pi t) rho sigma)
    const double tH = 10.0 * (std::log(2.0) - 0.5);
    const double want = std::log(2.0) * std::exp(-tH) /
                        (std::sqrt(2.0 * kPi * 10.0) * 1.0 * 0.5);
    const PassageEstimate g = hJ_density(kGamma11, 10.0, 5.0);
    CHECK(g.value == Approx(want).epsilon(1e-12));
    CHECK(g.warnings.count(Warning::PreAsymptotic) == 1); // tH = 1.93

    CHECK_THROWS_AS(hJ_density(kGamma11, 10.0, 15.0), out_of_regime);
}

TEST_CASE("interval jump estimate", "[passage]") {
    const PassageEstimate e = hJ_interval(kStableHalf, 2.0, 1.0, 0.5);
    const double want = 0.1079819 * (1.0 - std::exp(-1.0)) / 2.0;
    CHECK(e.value == Approx(want).epsilon(1e-5));
    CHECK(e.value ==
          Approx(hJ_density(kStableHalf, 2.0, 1.0).value * -std::expm1(-1.0) / 2.0)
              .epsilon(1e-13));
    CHECK(e.delta.value() == 0.5);

    // small-Delta limit: hJ_interval / (Delta hJ_density) -> 1, gap <= Delta psi
    for (double delta : {1e-4, 1e-3, 1e-2}) {
        const double r = hJ_interval(kStableHalf, 2.0, 1.0, delta).value /
                         (delta * hJ_density(kStableHalf, 2.0, 1.0).value);
        CHECK(std::fabs(r - 1.0) <= delta * 2.0); // psi(rho) = 2 here
    }

    // deep tail: value representable, log exact against the chain
    const PassageEstimate far = hJ_interval(kStableHalf, 20.0, 1.0, 0.1);
    const double lg_want = std::log(reflection_hJ(20.0, 1.0)) +
                           std::log(-std::expm1(-0.1 * 20.0) / 20.0);
    CHECK(far.log_value == Approx(lg_want).epsilon(1e-10));
    CHECK(far.value > 0.0);

    CHECK_THROWS_AS(hJ_interval(kStableHalf, 2.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(hJ_interval(kStableHalf, 2.0, 1.0, 11.0), std::domain_error);
    CHECK_NOTHROW(hJ_interval(kStableHalf, 2.0, 1.0, 11.0, 20.0));
}

TEST_CASE("interval creep estimate", "[passage]") {
    // CP chain at t = x = 20, Delta = 1: rho = sqrt(2) - 1
    const double rho = std::sqrt(2.0) - 1.0;
    const double psi_rho = 0.5 * rho + rho / (rho + 1.0);
    const double H = psi_rho - rho * 1.0;
    const double sigma = std::sqrt(2.0 / std::pow(rho + 1.0, 3.0));
    const double want = 0.5 * rho * -std::expm1(-psi_rho) * std::exp(-20.0 * H) /
                        (psi_rho * std::sqrt(2.0 * kPi * 20.0) * rho * sigma);
    const PassageEstimate e = hC_interval(kCp, 20.0, 20.0, 1.0);
    CHECK(e.value == Approx(want).epsilon(1e-12));
    CHECK(e.value == Approx(7.506e-3).epsilon(1e-3));

    // zero drift cannot creep
    const PassageEstimate z = hC_interval(kStableHalf, 2.0, 1.0, 0.5);
    CHECK(z.value == 0.0);
    CHECK(z.warnings.count(Warning::ZeroDrift) == 1);
}

TEST_CASE("creep split identity", "[passage]") {
    const std::vector<SubordinatorSpec> models = {
        kCp, make_stable_half(0.4), make_gamma(2.0, 1.0, 0.25)};
    for (const auto& m : models) {
        const double mu = m.mean_mu();
        const double span = std::isfinite(mu) ? (mu - m.drift_b) : 5.0;
        for (int i = 1; i <= 8; ++i) {
            const double x_t = m.drift_b + span * i / 9.5;
            const double t = 6.0, x = x_t * t;
            for (double delta : {0.2, 1.0, 5.0}) {
                const PassageEstimate hc = hC_interval(m, t, x, delta);
                const PassageEstimate hj = hJ_interval(m, t, x, delta);
                const SaddlePoint sp = solve_rho(m, t, x);
                const double split = hc.value / (hc.value + hj.value);
                CHECK(split ==
                      Approx(m.drift_b * sp.rho / sp.exps.psi).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("creep density", "[passage]") {
    const PassageEstimate e = hC_density(kCp, 20.0, 20.0);
    const double rho = std::sqrt(2.0) - 1.0;
    const double H = (0.5 * rho + rho / (rho + 1.0)) - rho;
    const double sigma2 = 2.0 / std::pow(rho + 1.0, 3.0);
    const double want = 0.5 * std::exp(-20.0 * H) / std::sqrt(2.0 * kPi * 20.0 * sigma2);
    CHECK(e.value == Approx(want).epsilon(1e-12));
    CHECK(e.value == Approx(0.0095388).epsilon(1e-4));

    const PassageEstimate z = hC_density(kStableHalf, 2.0, 1.0);
    CHECK(z.value == 0.0);
    CHECK(z.warnings.count(Warning::ZeroDrift) == 1);

    CHECK_THROWS_AS(hC_density(kCp, 20.0, 10.0), std::domain_error); // x = bt
    CHECK_THROWS_AS(hC_density(kCp, 20.0, 9.0), std::domain_error);
}

TEST_CASE("conditional creep probability", "[passage]") {
    CHECK(creep_conditional(kCp, 20.0, 20.0) ==
          Approx(std::sqrt(2.0) - 1.0).epsilon(1e-10));
    CHECK(creep_conditional(kStableHalf, 2.0, 1.0) == 0.0);

    // rho -> 0 limit: b / psi'(0+) = 0.5 / 1.5
    CHECK(creep_conditional(kCp, 1e5, 1.4999e5) == Approx(1.0 / 3.0).epsilon(1e-3));
    // rho -> infty limit: -> 1
    CHECK(creep_conditional(make_cpexp(1.0, 1.0, 0.5), 1e4, 0.500001e4) ==
          Approx(1.0).epsilon(1e-2));
    for (int i = 1; i <= 9; ++i) {
        const double v = creep_conditional(kCp, 10.0, 10.0 * (0.5 + i / 10.0));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("interval factor replacement bands", "[passage]") {
    // rho -> 0 sweep (x_t near mu): factor -> Delta with gap <= Delta psi / 2
    const double delta = 1.0;
    for (double eps : {0.1, 0.01, 0.001}) {
        const SaddlePoint sp = solve_rho(kCp, 100.0, 100.0 * (1.5 - eps));
        const double f = -std::expm1(-delta * sp.exps.psi) / sp.exps.psi;
        CHECK(std::fabs(f / delta - 1.0) <= delta * sp.exps.psi / 2.0 * (1 + 1e-12));
    }
    // rho -> infty sweep (x_t near b): factor -> 1/psi with gap <= e^{-Delta psi}
    for (double x_t : {0.1, 0.02, 0.004}) {
        const SaddlePoint sp = solve_rho(kStableHalf, 10.0, 10.0 * x_t);
        const double f = -std::expm1(-delta * sp.exps.psi) / sp.exps.psi;
        CHECK(std::fabs(f * sp.exps.psi - 1.0) <=
              std::exp(-delta * sp.exps.psi) * (1 + 1e-12));
    }
}

TEST_CASE("stable limit scaling", "[passage]") {
    const StableLimitEstimate e = stable_limit(kStableHalf, 2.0, 1.0, 0.5);
    CHECK(e.c_t == Approx(8.0 / kPi).epsilon(1e-12));
    CHECK(e.y_t == Approx(kPi / 8.0).epsilon(1e-12));
    const double want = std::pow(e.y_t, -0.5) * std::exp(-kPi / (4.0 * e.y_t));
    CHECK(e.hJ_scaled == Approx(want).epsilon(1e-10));
    CHECK(e.hJ_scaled == Approx(0.2159638).epsilon(1e-6));
    // the scaling relation is exact for the exactly stable model
    CHECK(e.hJ_scaled ==
          Approx(2.0 * hJ_density(kStableHalf, 2.0, 1.0).value).epsilon(1e-10));

    const StableLimitEstimate e2 = stable_limit(kStableHalf, 8.0, 2.0, 0.5);
    CHECK(e2.hJ_scaled ==
          Approx(8.0 * hJ_density(kStableHalf, 8.0, 2.0).value).epsilon(1e-8));

    // limit marginal density g~_1(y) = y^{-3/2} e^{-pi/(4y)} / 2 at alpha = 1/2
    const SubordinatorSpec drifted = make_stable_half(0.3);
    const StableLimitEstimate e3 = stable_limit(drifted, 2.0, 1.0, 0.5);
    const double g1 = 0.5 * std::pow(e3.y_t, -1.5) * std::exp(-kPi / (4.0 * e3.y_t));
    CHECK(e3.hC_scaled == Approx(0.3 * 0.5 * g1).epsilon(1e-10));

    CHECK_THROWS_AS(stable_limit(kGamma11, 2.0, 1.0, 0.5), unsupported_model);
    CHECK_THROWS_AS(stable_limit(kCp, 2.0, 1.0, 0.5), unsupported_model);
}

TEST_CASE("estimates nonnegative, decreasing in t past the mode", "[passage]") {
    for (double x : {0.25, 1.0, 4.0}) {
        double prev = kInf;
        for (double t : log_grid(1.1 * std::sqrt(x), 40.0 * std::sqrt(x), 12)) {
            const PassageEstimate e = hJ_density(kStableHalf, t, x);
            CHECK(e.value >= 0.0);
            CHECK(e.log_value < prev);
            prev = e.log_value;
        }
    }
}
