#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace evcharge {

/// Seeded random source with a fully specified output sequence.
///
/// The engine is std::mt19937_64, whose sequence the standard pins down. The
/// standard library distributions are implementation-defined, so the variates
/// used anywhere in the project are derived here by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    /// Standard normal via Box-Muller; the second variate is discarded.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Poisson count by Knuth's product method. Intended for the small per-step
    /// means of arrival processes; large means are split into chunks.
    std::uint32_t poisson(double mean) {
        std::uint32_t total = 0;
        while (mean > 30.0) {
            total += poisson_small(30.0);
            mean -= 30.0;
        }
        return total + poisson_small(mean);
    }

    /// Independent child stream; used to give each consumer its own sequence.
    Rng split() { return Rng(next_u64() ^ 0x9E3779B97F4A7C15ULL); }

private:
    std::uint32_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint32_t k = 0;
        double p = uniform();
        while (p > limit) {
            ++k;
            p *= uniform();
        }
        return k;
    }

    std::mt19937_64 engine_;
};

}  // namespace evcharge
