// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>

namespace passagekit {

/// Philox4x32-10 counter-based generator. Each (seed, stream) pair owns an
/// independent 2^64-long sequence addressed by a draw counter, so replicate
/// streams are reproducible regardless of how work is scheduled.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

    uint64_t next_u64() {
        if (have_ == 0) refill();
        --have_;
        return buf_[have_];
    }

    /// Uniform on the open interval (0, 1); 53-bit resolution, never 0 or 1.
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (second value cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(u01()));
        const double a = 6.28318530717958647692 * u01();
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(u01()) / rate; }

    /// Gamma(shape, 1) by Marsaglia-Tsang, boosted below shape 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = u01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z, v;
            do {
                z = normal();
                v = 1.0 + c * z;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = u01();
            if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
            if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    static void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
        const uint64_t p = static_cast<uint64_t>(a) * b;
        hi = static_cast<uint32_t>(p >> 32);
        lo = static_cast<uint32_t>(p);
    }

    void refill() {
        uint32_t x0 = static_cast<uint32_t>(counter_);
        uint32_t x1 = static_cast<uint32_t>(counter_ >> 32);
        uint32_t x2 = static_cast<uint32_t>(stream_);
        uint32_t x3 = static_cast<uint32_t>(stream_ >> 32);
        uint32_t k0 = static_cast<uint32_t>(seed_);
        uint32_t k1 = static_cast<uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, x0, hi0, lo0);
            mulhilo(0xCD9E8D57u, x2, hi1, lo1);
            x0 = hi1 ^ x1 ^ k0;
            x1 = lo1;
            x2 = hi0 ^ x3 ^ k1;
            x3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        ++counter_;
        buf_[0] = (static_cast<uint64_t>(x1) << 32) | x0;
        buf_[1] = (static_cast<uint64_t>(x3) << 32) | x2;
        have_ = 2;
    }

    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
    uint64_t buf_[2] = {0, 0};
    int have_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace passagekit
