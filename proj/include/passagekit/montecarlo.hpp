// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/common.hpp"
#include "passagekit/levy_model.hpp"
#include "passagekit/rng.hpp"
#include "passagekit/saddle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace passagekit {

struct McConfig {
    uint64_t n = 100000;   // replicates
    uint64_t seed = 0;
    double eps = 1e-6;     // small-jump truncation (infinite-activity paths)
    uint64_t step_cap = 50000000; // events per path before the path is discarded
    int workers = 1;       // execution detail; never echoed into results
};

struct EstimateSE {
    double value = 0.0;
    double se = 0.0;
};

/// Summary of one simulation run. Replicate i always consumes the
/// counter-based stream keyed (seed, i), so identical configurations are
/// bit-identical regardless of worker count.
struct McSummary {
    uint64_t n = 0;
    uint64_t n_crossed_by_t = 0;
    uint64_t n_crossed_in_window = 0;
    uint64_t n_creep = 0;
    uint64_t n_jump = 0;
    uint64_t n_discarded = 0;
    std::map<std::string, EstimateSE> estimates;
    bool approximate_creep_flag = false;
    uint64_t seed = 0;
    double eps = 0.0;
};

namespace detail {

inline constexpr uint64_t kMcBlock = 4096;

/// Deterministic fan-out: replicates are grouped into fixed blocks, workers
/// claim blocks dynamically, partials are merged in block order afterwards.
template <typename Partial, typename Body>
std::vector<Partial> run_blocks(uint64_t n, int workers, const Body& body) {
    const uint64_t n_blocks = (n + kMcBlock - 1) / kMcBlock;
    std::vector<Partial> partials(n_blocks);
    std::atomic<uint64_t> next{0};
    auto work = [&]() {
        for (;;) {
            const uint64_t blk = next.fetch_add(1);
            if (blk >= n_blocks) return;
            const uint64_t lo = blk * kMcBlock;
            const uint64_t hi = std::min(n, lo + kMcBlock);
            for (uint64_t i = lo; i < hi; ++i) body(partials[blk], i);
        }
    };
    const int n_threads = static_cast<int>(
        std::min<uint64_t>(std::max(workers, 1), std::max<uint64_t>(n_blocks, 1)));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return partials;
}

inline EstimateSE proportion(double count, double n) {
    const double p = count / n;
    return {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / n)};
}

inline EstimateSE mean_se(double sum, double sumsq, double n) {
    const double mean = sum / n;
    const double var = std::max(sumsq / n - mean * mean, 0.0);
    return {mean, std::sqrt(var / n)};
}

/// One exact marginal draw. stable: alpha = 1/2 family only (scaled
/// Brownian hitting time); Gamma and CP exact by construction.
inline double marginal_draw(const SubordinatorSpec& m, double t, CounterRng& rng) {
    switch (m.kind) {
    case ModelKind::Stable: {
        const double z = std::fabs(rng.normal());
        return m.drift_b * t + 0.5 * m.s * m.s * t * t / (z * z);
    }
    case ModelKind::Gamma:
        return m.drift_b * t + rng.gamma(m.a * t) / m.theta;
    case ModelKind::CompoundPoissonExp: {
        double x = m.drift_b * t;
        double tau = rng.exponential(m.rate);
        while (tau <= t) {
            x += rng.exponential(m.eta);
            tau += rng.exponential(m.rate);
        }
        return x;
    }
    }
    return 0.0;
}

inline void require_marginal_sampler(const SubordinatorSpec& m) {
    if (m.kind == ModelKind::Stable && std::fabs(m.alpha - 0.5) > 1e-12)
        throw unsupported_model(
            "sample_marginal: no exact sampler for stable alpha != 1/2");
}

/// Jumps of size >= eps, sampled from the restricted Levy measure.
struct TruncatedJumps {
    const SubordinatorSpec* m = nullptr;
    double eps = 0.0;
    double rate = 0.0;    // Pi(eps, inf)
    double split = 0.0;   // Gamma mixture split point
    double mass_low = 0.0, mass_high = 0.0;

    explicit TruncatedJumps(const SubordinatorSpec& model, double eps_in)
        : m(&model), eps(eps_in) {
        if (m->finite_activity()) {
            rate = m->rate;
            return;
        }
        rate = tail(*m, eps);
        if (m->kind == ModelKind::Gamma) {
            split = std::max(eps, 1.0 / m->theta);
            mass_low = (eps < split) ? std::log(split / eps) : 0.0;
            mass_high = std::exp(-m->theta * split) / (m->theta * split);
        }
    }

    double draw(CounterRng& rng) const {
        switch (m->kind) {
        case ModelKind::CompoundPoissonExp:
            return rng.exponential(m->eta);
        case ModelKind::Stable:
            // inverse tail: P(J > y) = (y/eps)^{-alpha}
            return eps * std::pow(rng.u01(), -1.0 / m->alpha);
        case ModelKind::Gamma: {
            // density on [eps, inf) proportional to y^{-1} e^{-theta y};
            // log-uniform envelope below the split, exponential above.
            for (;;) {
                if (rng.u01() * (mass_low + mass_high) < mass_low) {
                    const double y = eps * std::exp(rng.u01() * std::log(split / eps));
                    if (rng.u01() <= std::exp(-m->theta * y)) return y;
                } else {
                    const double y = split + rng.exponential(m->theta);
                    if (rng.u01() <= split / y) return y;
                }
            }
        }
        }
        return 0.0;
    }
};

} // namespace detail

/// Exact marginal sampling of X_t with empirical CDF probes. Deterministic:
/// replicate i uses the stream keyed (cfg.seed, i).
inline McSummary sample_marginal(const SubordinatorSpec& m, double t,
                                 const McConfig& cfg,
                                 const std::vector<double>& cdf_probes = {}) {
    if (!(t > 0.0)) throw std::domain_error("sample_marginal: t must be positive");
    if (cfg.n < 1) throw std::domain_error("sample_marginal: n must be >= 1");
    detail::require_marginal_sampler(m);

    struct Partial {
        double sum = 0.0, sumsq = 0.0;
        std::vector<uint64_t> below;
    };
    auto partials = detail::run_blocks<Partial>(
        cfg.n, cfg.workers, [&](Partial& p, uint64_t i) {
            if (p.below.empty()) p.below.assign(cdf_probes.size(), 0);
            CounterRng rng(cfg.seed, i);
            const double x = detail::marginal_draw(m, t, rng);
            p.sum += x;
            p.sumsq += x * x;
            for (size_t k = 0; k < cdf_probes.size(); ++k)
                if (x <= cdf_probes[k]) ++p.below[k];
        });

    double sum = 0.0, sumsq = 0.0;
    std::vector<uint64_t> below(cdf_probes.size(), 0);
    for (const auto& p : partials) {
        sum += p.sum;
        sumsq += p.sumsq;
        for (size_t k = 0; k < p.below.size(); ++k) below[k] += p.below[k];
    }

    McSummary s;
    s.n = cfg.n;
    s.seed = cfg.seed;
    s.eps = cfg.eps;
    const double n = static_cast<double>(cfg.n);
    s.estimates["mean"] = detail::mean_se(sum, sumsq, n);
    for (size_t k = 0; k < cdf_probes.size(); ++k) {
        char key[64];
        std::snprintf(key, sizeof(key), "p_le_%g", cdf_probes[k]);
        s.estimates[key] = detail::proportion(static_cast<double>(below[k]), n);
    }
    return s;
}

/// Simulate first passage over level x: every path runs to its crossing
/// (event-capped), which yields T_x exactly for CP + drift and via
/// eps-truncation (small jumps folded into a deterministic drift) for the
/// infinite-activity kinds. Reports the survival probability at t, the
/// window probability for (t, t+Delta], and the creep/jump split.
inline McSummary simulate_passage(const SubordinatorSpec& m, double x, double t,
                                  double delta, const McConfig& cfg) {
    if (!(x > 0.0)) throw std::domain_error("simulate_passage: x must be positive");
    if (!(t >= 0.0)) throw std::domain_error("simulate_passage: t must be >= 0");
    if (!(delta > 0.0)) throw std::domain_error("simulate_passage: Delta must be positive");
    if (!(cfg.eps > 0.0)) throw std::domain_error("simulate_passage: eps must be positive");
    if (cfg.n < 1) throw std::domain_error("simulate_passage: n must be >= 1");

    const bool truncated = !m.finite_activity();
    const detail::TruncatedJumps jumps(m, cfg.eps);
    const double d_eps = truncated ? truncated_moment(m, 1, cfg.eps) : 0.0;
    const double slope = m.drift_b + d_eps;

    struct Partial {
        uint64_t crossed_by_t = 0, in_window = 0;
        uint64_t creep = 0, jump = 0;
        uint64_t creep_in_window = 0, jump_in_window = 0;
        uint64_t discarded = 0;
    };
    auto partials = detail::run_blocks<Partial>(
        cfg.n, cfg.workers, [&](Partial& p, uint64_t i) {
            CounterRng rng(cfg.seed, i);
            double pos = 0.0, tau = 0.0;
            bool creep = false, done = false;
            double T = 0.0;
            for (uint64_t step = 0; step < cfg.step_cap; ++step) {
                const double gap = rng.exponential(jumps.rate);
                if (slope > 0.0 && pos + slope * gap >= x) {
                    T = tau + (x - pos) / slope;
                    creep = m.drift_b > 0.0; // artifact drift cannot creep
                    done = true;
                    break;
                }
                tau += gap;
                pos += slope * gap;
                pos += jumps.draw(rng);
                if (pos >= x) {
                    T = tau;
                    creep = false;
                    done = true;
                    break;
                }
            }
            if (!done) {
                ++p.discarded;
                return;
            }
            if (T <= t) ++p.crossed_by_t;
            const bool window = T > t && T <= t + delta;
            if (window) ++p.in_window;
            if (creep) {
                ++p.creep;
                if (window) ++p.creep_in_window;
            } else {
                ++p.jump;
                if (window) ++p.jump_in_window;
            }
        });

    Partial tot;
    for (const auto& p : partials) {
        tot.crossed_by_t += p.crossed_by_t;
        tot.in_window += p.in_window;
        tot.creep += p.creep;
        tot.jump += p.jump;
        tot.creep_in_window += p.creep_in_window;
        tot.jump_in_window += p.jump_in_window;
        tot.discarded += p.discarded;
    }
    if (static_cast<double>(tot.discarded) > 1e-4 * static_cast<double>(cfg.n))
        throw step_cap_exceeded("simulate_passage: more than 0.01% of paths hit the event cap");

    McSummary s;
    s.n = cfg.n;
    s.seed = cfg.seed;
    s.eps = truncated ? cfg.eps : 0.0;
    s.approximate_creep_flag = truncated;
    s.n_crossed_by_t = tot.crossed_by_t;
    s.n_crossed_in_window = tot.in_window;
    s.n_creep = tot.creep;
    s.n_jump = tot.jump;
    s.n_discarded = tot.discarded;
    const double n = static_cast<double>(cfg.n - tot.discarded);
    s.estimates["p_survive_t"] =
        detail::proportion(n - static_cast<double>(tot.crossed_by_t), n);
    s.estimates["p_window"] = detail::proportion(static_cast<double>(tot.in_window), n);
    s.estimates["p_window_creep"] =
        detail::proportion(static_cast<double>(tot.creep_in_window), n);
    s.estimates["p_window_jump"] =
        detail::proportion(static_cast<double>(tot.jump_in_window), n);
    s.estimates["creep_fraction"] =
        detail::proportion(static_cast<double>(tot.creep), n);
    return s;
}

/// Importance-reweighted moment check at the saddle: weights
/// w = e^{-rho X + t psi(rho)} turn marginal samples into samples from the
/// tilted law, whose mean is x and whose variance is t sigma^2(rho). Also
/// evaluates the reweighted third absolute moment against its closed bound.
inline McSummary tilted_moment_check(const SubordinatorSpec& m, double t, double x,
                                     const McConfig& cfg) {
    detail::require_marginal_sampler(m);
    if (cfg.n < 1) throw std::domain_error("tilted_moment_check: n must be >= 1");
    const SaddlePoint sp = solve_rho(m, t, x);
    const double rho = sp.rho;
    const double tpsi = t * sp.exps.psi;

    struct Partial {
        double w = 0.0, w2 = 0.0;
        double wx = 0.0, wx2 = 0.0;
        double wv = 0.0, wv2 = 0.0; // w (X-x)^2
        double wa = 0.0, wa2 = 0.0; // w |X-x|^3
    };
    auto partials = detail::run_blocks<Partial>(
        cfg.n, cfg.workers, [&](Partial& p, uint64_t i) {
            CounterRng rng(cfg.seed, i);
            const double xi = detail::marginal_draw(m, t, rng);
            const double w = std::exp(-rho * xi + tpsi);
            const double d = xi - x;
            p.w += w;
            p.w2 += w * w;
            p.wx += w * xi;
            p.wx2 += w * xi * w * xi;
            p.wv += w * d * d;
            p.wv2 += (w * d * d) * (w * d * d);
            p.wa += w * std::fabs(d) * d * d;
            p.wa2 += (w * std::fabs(d) * d * d) * (w * std::fabs(d) * d * d);
        });

    Partial tot;
    for (const auto& p : partials) {
        tot.w += p.w;
        tot.w2 += p.w2;
        tot.wx += p.wx;
        tot.wx2 += p.wx2;
        tot.wv += p.wv;
        tot.wv2 += p.wv2;
        tot.wa += p.wa;
        tot.wa2 += p.wa2;
    }

    McSummary s;
    s.n = cfg.n;
    s.seed = cfg.seed;
    s.eps = cfg.eps;
    const double n = static_cast<double>(cfg.n);
    s.estimates["weight_mean"] = detail::mean_se(tot.w, tot.w2, n);
    s.estimates["tilted_mean"] = detail::mean_se(tot.wx, tot.wx2, n);
    s.estimates["tilted_var"] = detail::mean_se(tot.wv, tot.wv2, n);
    s.estimates["tilted_abs3"] = detail::mean_se(tot.wa, tot.wa2, n);
    // closed bound on E|Y_t - x|^3 from the truncated-moment route
    const double bound = 6.0 * t * q_pi(m, 1.0 / rho) / (rho * rho * rho) +
                         2.0 * x * t * sp.exps.sigma2;
    s.estimates["abs3_bound"] = {bound, 0.0};
    return s;
}

} // namespace passagekit
