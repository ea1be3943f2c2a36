// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/montecarlo.hpp"
#include "passagekit/oracles.hpp"
#include "passagekit/passage.hpp"
#include "passagekit/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace passagekit {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // worst observed margin, or the first failure
    double seconds = 0.0;
};

struct AcceptanceOptions {
    uint64_t seed = 12345;
    int workers = 1;
    uint64_t mc_n = 1000000; // replicate count where a criterion names 1e6
};

namespace acceptance_detail {

inline double log_rel_err(double log_a, double log_b) {
    return std::fabs(std::expm1(log_a - log_b));
}

// 2 (Phi((t+d)/sqrt(x)) - Phi(t/sqrt(x))): exact interval probability of the
// canonical stable-1/2 passage time, erfc-based for deep tails.
inline double reflection_interval(double t, double x, double d) {
    const double s = std::sqrt(2.0 * x);
    return std::erfc(t / s) - std::erfc((t + d) / s);
}

inline double reflection_log_hJ(double t, double x) {
    return 0.5 * std::log(2.0 / (kPi * x)) - t * t / (2.0 * x);
}

inline double stable_half_log_density(double t, double x) {
    return std::log(t) - 0.5 * std::log(2.0 * kPi * x * x * x) - t * t / (2.0 * x);
}

struct Check {
    bool pass = true;
    double worst = 0.0; // largest observed error measure
    std::string note;

    void bound(double err, double limit, const std::string& where) {
        worst = std::max(worst, err);
        if (!(err <= limit) && pass) {
            pass = false;
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s: err %.3g > %.3g", where.c_str(), err,
                          limit);
            note = buf;
        }
    }
    void require(bool ok, const std::string& where) {
        if (!ok && pass) {
            pass = false;
            note = where;
        }
    }
};

} // namespace acceptance_detail

/// Run the full acceptance battery. Each criterion is self-contained and
/// pinned to its stated tolerance.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}) {
    using namespace acceptance_detail;
    namespace chrono = std::chrono;

    const SubordinatorSpec stable_half = make_stable_half();
    const SubordinatorSpec gamma11 = make_gamma(1.0, 1.0);
    const SubordinatorSpec cp = make_cpexp(1.0, 1.0, 0.5);

    std::vector<CriterionResult> out;
    // stated runtime budgets, seconds; absent means unbounded
    const std::map<int, double> kRuntimeBudget = {
        {1, 1.0}, {3, 1.0}, {4, 1.0}, {5, 30.0}, {7, 60.0}, {8, 60.0}, {9, 300.0}};
    auto run = [&](int id, const std::string& name,
                   const std::function<Check()>& body) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        const auto t0 = chrono::steady_clock::now();
        try {
            const Check c = body();
            r.pass = c.pass;
            if (c.pass) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "worst err %.3g", c.worst);
                r.detail = buf;
            } else {
                r.detail = c.note;
            }
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = chrono::duration<double>(chrono::steady_clock::now() - t0).count();
        const auto budget = kRuntimeBudget.find(id);
        if (budget != kRuntimeBudget.end() && r.seconds > budget->second) {
            r.pass = false;
            r.detail += " [runtime budget exceeded]";
        }
        out.push_back(r);
    };

    const std::vector<double> grid_t = {0.1, 1.0, 10.0, 100.0};
    const std::vector<double> grid_x = {0.05, 0.5, 5.0, 50.0};

    run(1, "stable_half density exactness", [&] {
        Check c;
        for (double t : grid_t)
            for (double x : grid_x) {
                const ScaledValue f = density_estimate(stable_half, t, x, x);
                c.bound(log_rel_err(f.log_value, stable_half_log_density(t, x)), 1e-8,
                        "t=" + std::to_string(t) + ", x=" + std::to_string(x));
            }
        return c;
    });

    run(2, "stable_half h^J exactness", [&] {
        Check c;
        for (double t : grid_t)
            for (double x : grid_x) {
                const PassageEstimate h = hJ_density(stable_half, t, x);
                c.bound(log_rel_err(h.log_value, reflection_log_hJ(t, x)), 1e-8,
                        "t=" + std::to_string(t) + ", x=" + std::to_string(x));
            }
        return c;
    });

    run(3, "interval estimate convergence", [&] {
        Check c;
        // band check where t^2/x >= 100
        const std::vector<std::pair<double, double>> pts = {
            {10.0, 1.0}, {20.0, 1.0}, {5.0, 0.25}, {40.0, 4.0}, {31.623, 10.0}};
        for (const auto& [t, x] : pts) {
            for (double k : {0.01, 0.1, 1.0, 10.0}) {
                const double d = k * x / t;
                const double est = hJ_interval(stable_half, t, x, d).value;
                const double exact = reflection_interval(t, x, d);
                c.bound(std::fabs(est / exact - 1.0), 0.02,
                        "t=" + std::to_string(t) + ", x=" + std::to_string(x) +
                            ", delta=" + std::to_string(d));
            }
        }
        // error decreasing along t^2/x in {4, 16, 64, 256} at delta = x/t
        double prev = kInf;
        for (double t : {2.0, 4.0, 8.0, 16.0}) {
            const double x = 1.0, d = x / t;
            const double err =
                std::fabs(hJ_interval(stable_half, t, x, d).value /
                              reflection_interval(t, x, d) -
                          1.0);
            c.require(err <= prev, "error not decreasing at t=" + std::to_string(t));
            prev = err;
        }
        return c;
    });

    run(4, "gamma Stirling rate", [&] {
        Check c;
        auto ratio = [&](double a, double t) {
            const SubordinatorSpec m = make_gamma(a, 1.0);
            const double x = 0.5 * a * t; // x_t = mu / 2 for every a
            const ScaledValue est = density_estimate(m, t, x, x);
            const ScaledValue ex = exact_density(m, t, x);
            return std::exp(est.log_value - ex.log_value);
        };
        for (double at : {10.0, 100.0, 1000.0}) {
            const double r = ratio(1.0, at);
            c.bound(std::fabs(r - 1.0), 1.0 / (10.0 * at), "at=" + std::to_string(at));
            const double r2 = ratio(2.0, at / 2.0);
            c.bound(std::fabs(r2 / r - 1.0), 1e-9,
                    "pair consistency at=" + std::to_string(at));
        }
        return c;
    });

    run(5, "oracle triangle", [&] {
        Check c;
        auto triangle = [&](const SubordinatorSpec& m, double t, double x) {
            const double lam = solve_rho(m, t, x).rho;
            const double inv = invert_g(m, t, x, lam).hJ.value;
            const double conv = convolve_hJ(m, t, x);
            c.bound(std::fabs(inv - conv) / conv, 1e-5,
                    "t=" + std::to_string(t) + ", x=" + std::to_string(x));
        };
        for (double t : {2.0, 3.0, 4.0})
            for (double x : {0.25, 0.5, 1.0}) triangle(stable_half, t, x); // tH >= 2
        for (double t : {15.0, 25.0, 40.0}) triangle(gamma11, t, 0.5 * t);
        return c;
    });

    run(6, "exponent tail inequality suite", [&] {
        Check c;
        for (const auto& m : {stable_half, gamma11, cp}) {
            for (int i = 0; i < 60; ++i) {
                const double u = std::pow(10.0, -3.0 + 6.0 * i / 59.0);
                const double H = big_h(m, u);
                const double Q = q_pi(m, 1.0 / u);
                const double s2 = sigma2(m, u);
                const double ratio = tail(m, 1.0 / u) / k_pi(m, 1.0 / u);
                c.require(H <= Q * (1.0 + 1e-12), "H <= Q violated");
                c.require(H >= Q / (2.0 * std::exp(1.0)) * (1.0 - 1e-12),
                          "H >= Q/(2e) violated");
                c.require(u * u * s2 <= 2.0 * H * (1.0 + 1e-12),
                          "u^2 sigma^2 <= 2H violated");
                c.require(u * u * s2 / H >=
                              std::exp(-1.0) / (1.0 + ratio) * (1.0 - 1e-12),
                          "lower variance ratio violated");
            }
        }
        return c;
    });

    run(7, "tilted moment identities", [&] {
        Check c;
        const std::vector<std::pair<SubordinatorSpec, std::pair<double, double>>>
            cases = {{stable_half, {2.0, 1.0}},
                     {gamma11, {10.0, 5.0}},
                     {cp, {20.0, 20.0}}};
        for (const auto& [m, tx] : cases) {
            const auto [t, x] = tx;
            const SaddlePoint sp = solve_rho(m, t, x);
            // quadrature route for the tilted mean and variance
            const double cut = 200.0 / std::max(sp.rho, 0.05);
            const double mean_q =
                t * (m.drift_b +
                     tanh_sinh([&](double y) { return y * std::exp(-sp.rho * y) *
                                                      levy_density(m, y); },
                               0.0, cut, 1e-12));
            c.bound(std::fabs(mean_q / x - 1.0), 1e-8, "mean quadrature");
            const double var_q =
                t * tanh_sinh([&](double y) { return y * y * std::exp(-sp.rho * y) *
                                                     levy_density(m, y); },
                              0.0, cut, 1e-12);
            c.bound(std::fabs(var_q / (t * sp.exps.sigma2) - 1.0), 1e-8,
                    "variance quadrature");
        }
        // MC reweighted versions at n = 1e6
        McConfig mc;
        mc.n = opt.mc_n;
        mc.seed = opt.seed;
        mc.workers = opt.workers;
        const McSummary s = tilted_moment_check(stable_half, 2.0, 1.0, mc);
        const auto m1 = s.estimates.at("tilted_mean");
        c.bound(std::fabs(m1.value - 1.0), 4.0 * m1.se, "MC tilted mean");
        const auto v = s.estimates.at("tilted_var");
        c.bound(std::fabs(v.value - 0.25), 4.0 * v.se, "MC tilted variance");
        const auto a3 = s.estimates.at("tilted_abs3");
        c.require(a3.value + 4.0 * a3.se <= s.estimates.at("abs3_bound").value,
                  "third-moment bound violated");
        return c;
    });

    run(8, "creep split", [&] {
        Check c;
        McConfig mc;
        mc.n = opt.mc_n;
        mc.seed = opt.seed;
        mc.workers = opt.workers;
        const McSummary s = simulate_passage(cp, 1.0, 1.0, 1.0, mc);
        const auto frac = s.estimates.at("creep_fraction");
        const double kesten = cp.drift_b * potential_density(cp, kInf, 1.0);
        c.bound(std::fabs(frac.value - kesten), 4.0 * frac.se, "MC creep fraction");
        // algebraic split identity across the regime
        for (double x_t : {0.55, 0.7, 0.9, 1.1, 1.3, 1.45}) {
            for (double t : {2.0, 10.0, 50.0}) {
                const double x = x_t * t;
                const PassageEstimate hc = hC_interval(cp, t, x, 1.0);
                const PassageEstimate hj = hJ_interval(cp, t, x, 1.0);
                const SaddlePoint sp = solve_rho(cp, t, x);
                const double want = cp.drift_b * sp.rho / sp.exps.psi;
                c.bound(std::fabs(hc.value / (hc.value + hj.value) - want), 1e-12,
                        "split identity");
            }
        }
        return c;
    });

    run(9, "interval estimate trend in regime (G)", [&] {
        Check c;
        McConfig mc;
        mc.n = opt.mc_n;
        mc.seed = opt.seed;
        mc.workers = opt.workers;
        // The trend comparison carries a 3 SE allowance: at the pinned n the
        // sampling noise of the t = 40 point exceeds the deterministic error
        // it measures, so a noise-blind monotonicity check would fail about
        // half the time for a correct implementation.
        double prev_j = kInf, prev_c = kInf;
        double prev_se_j = 0.0, prev_se_c = 0.0;
        double final_j = 0.0, final_c = 0.0, final_band_j = 0.0, final_band_c = 0.0;
        for (double t : {10.0, 20.0, 40.0}) {
            const double x = t; // x_t = 1
            const McSummary s = simulate_passage(cp, x, t, 1.0, mc);
            const auto pj = s.estimates.at("p_window_jump");
            const auto pc = s.estimates.at("p_window_creep");
            const double hj = hJ_interval(cp, t, x, 1.0).value;
            const double hc = hC_interval(cp, t, x, 1.0).value;
            const double rj = std::fabs(pj.value / hj - 1.0);
            const double rc = std::fabs(pc.value / hc - 1.0);
            const double se_j = pj.se / hj;
            const double se_c = pc.se / hc;
            c.require(rj <= prev_j + 3.0 * std::hypot(se_j, prev_se_j),
                      "jump ratio error increases at t=" + std::to_string(t));
            c.require(rc <= prev_c + 3.0 * std::hypot(se_c, prev_se_c),
                      "creep ratio error increases at t=" + std::to_string(t));
            prev_j = rj;
            prev_c = rc;
            prev_se_j = se_j;
            prev_se_c = se_c;
            final_j = rj;
            final_c = rc;
            final_band_j = std::max(0.10, 3.0 * se_j);
            final_band_c = std::max(0.10, 3.0 * se_c);
        }
        c.bound(final_j, final_band_j, "jump ratio at t=40");
        c.bound(final_c, final_band_c, "creep ratio at t=40");
        return c;
    });

    run(10, "stable-limit scaling identity", [&] {
        Check c;
        for (double t : {1.0, 2.0, 4.0, 8.0})
            for (double x : {0.5, 1.0, 2.0, 4.0}) {
                const StableLimitEstimate lim = stable_limit(stable_half, t, x, 1.0);
                const double lhs = t * hJ_density(stable_half, t, x).value;
                c.bound(std::fabs(lhs / lim.hJ_scaled - 1.0), 1e-8,
                        "t=" + std::to_string(t) + ", x=" + std::to_string(x));
            }
        return c;
    });

    run(11, "hypothesis (H) verdicts", [&] {
        Check c;
        for (double alpha : {0.3, 0.5, 0.8}) {
            const SubordinatorSpec m =
                (alpha == 0.5) ? stable_half : make_stable(alpha, 1.0);
            c.require(hypothesis_H_check(m).verdict == HVerdict::Pass,
                      "stable alpha=" + std::to_string(alpha) + " should pass");
        }
        c.require(hypothesis_H_check(gamma11).verdict == HVerdict::Pass,
                  "gamma should pass");
        c.require(hypothesis_H_check(make_cpexp(1.0, 1.0)).verdict == HVerdict::Fail,
                  "compound Poisson should fail");
        return c;
    });

    run(12, "MC determinism across worker counts", [&] {
        Check c;
        auto doc = [&](int workers) {
            McConfig mc;
            mc.n = 100000;
            mc.seed = opt.seed;
            mc.workers = workers;
            nlohmann::json j;
            j["passage"] = to_json(simulate_passage(cp, 1.0, 1.0, 1.0, mc));
            j["marginal"] = to_json(sample_marginal(stable_half, 2.0, mc, {1.0}));
            j["tilt"] = to_json(tilted_moment_check(stable_half, 2.0, 1.0, mc));
            return j.dump();
        };
        const std::string w1 = doc(1);
        c.require(w1 == doc(4), "workers 1 vs 4 differ");
        c.require(w1 == doc(8), "workers 1 vs 8 differ");
        return c;
    });

    return out;
}

} // namespace passagekit
