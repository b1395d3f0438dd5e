#pragma once

#include <cmath>
#include <cstdint>

namespace wta {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

// xoshiro256++, seeded through splitmix64. Self-contained so that seeded
// trajectories are reproducible bit-for-bit across platforms and toolchains.
//
// Draw conventions used throughout the toolkit:
//   - per-neuron sampling consumes exactly one uniform per neuron, outputs by
//     index first, then inhibitors by index;
//   - count-compressed sampling consumes the four class binomials in the order
//     (active-fired, active-idle, inactive-fired, inactive-idle), then the
//     inhibitors by index.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    // Independent stream for one trial under a shared master seed.
    static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
        std::uint64_t sm = master_seed;
        const std::uint64_t base = detail::splitmix64(sm);
        return Rng(base ^ (0xD1342543DE82EF95ull * (trial_index + 1)));
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

    // Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Exact Binomial(count, p) sample. Small counts fall back to per-item
    // Bernoulli draws; larger counts use waiting-time (geometric skip)
    // inversion, expected cost O(count * p) uniforms.
    int binomial(int count, double p) {
        if (count <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return count;
        if (p > 0.5) return count - binomial(count, 1.0 - p);
        if (count <= 32) {
            int k = 0;
            for (int i = 0; i < count; ++i) k += bernoulli(p) ? 1 : 0;
            return k;
        }
        const double log_q = std::log1p(-p);
        double skipped = 0.0;
        int k = 0;
        while (true) {
            const double u = next_double();
            // u == 0 yields an infinite skip, which correctly terminates.
            skipped += std::floor(std::log(u) / log_q) + 1.0;
            if (!(skipped <= static_cast<double>(count))) break;
            ++k;
        }
        return k;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4] = {};
};

}  // namespace wta
