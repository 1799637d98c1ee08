#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "rscusum/errors.hpp"

// Self-contained random number generation. Everything is built on an
// explicit xoshiro256++ stream so that results are bit-identical across
// platforms and standard-library versions; std::<distribution> types are
// deliberately not used. All continuous draws are inverse-transform, so
// each sample consumes a fixed number of uniforms -- a requirement for
// common-random-number comparisons between scenarios.

namespace rscusum {

// SplitMix64, used to seed and to derive substreams.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna), period 2^256 - 1.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    // Independent stream for replication `index` under `master_seed`.
    // The index is mixed into the seed through SplitMix64 before the
    // state is expanded, so streams for different indices are unrelated.
    static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
        SplitMix64 sm(master_seed);
        std::uint64_t base = sm.next();
        return Rng(base ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Exponential with the given rate; rate 0 gives +infinity.
    double exponential(double rate) {
        double u = uniform();
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log1p(-u) / rate;
    }

    // Standard exponential, used as the inverse-transform driver for
    // event-time sampling.
    double standard_exponential() { return -std::log1p(-uniform()); }

    double normal(double mean, double sd) {
        return mean + sd * standard_normal_quantile(uniform());
    }

    // Truncated normal via inverse CDF on the restricted range; exactly
    // one uniform per draw, never rejects.
    double truncated_normal(double mean, double sd, double lo, double hi) {
        double a = standard_normal_cdf((lo - mean) / sd);
        double b = standard_normal_cdf((hi - mean) / sd);
        double u = a + (b - a) * uniform();
        double x = mean + sd * standard_normal_quantile(u);
        return std::min(std::max(x, lo), hi);
    }

    // Index draw from unnormalized nonnegative weights.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw ConfigError("categorical draw: weights sum to zero");
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    static double standard_normal_cdf(double x) {
        return 0.5 * std::erfc(-x / std::sqrt(2.0));
    }

    // Wichura's AS 241 (PPND16): double-precision inverse normal CDF.
    static double standard_normal_quantile(double p) {
        if (!(p > 0.0 && p < 1.0)) {
            if (p == 0.0) return -std::numeric_limits<double>::infinity();
            if (p == 1.0) return std::numeric_limits<double>::infinity();
            throw NumericError("normal quantile: p outside [0, 1]");
        }
        const double q = p - 0.5;
        if (std::fabs(q) <= 0.425) {
            const double r = 0.180625 - q * q;
            return q *
                   (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                         6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                       1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                     1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
                   (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                         3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                       5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                     4.2313330701600911252e1) * r + 1.0);
        }
        double r = (q < 0.0) ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        double value;
        if (r <= 5.0) {
            r -= 1.6;
            value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                          2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                        3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                      4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                    (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                          1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                        6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                      2.05319162663775882187e0) * r + 1.0);
        } else {
            r -= 5.0;
            value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                          1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                        2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                      5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                    (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                          1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                        1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                      5.99832206555887937690e-1) * r + 1.0);
        }
        return (q < 0.0) ? -value : value;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace rscusum
