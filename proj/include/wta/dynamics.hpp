#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wta/math.hpp"
#include "wta/network.hpp"
#include "wta/rng.hpp"

namespace wta {

using BitVec = std::vector<std::uint8_t>;

inline int count_ones(const BitVec& v) {
    int s = 0;
    for (auto b : v) s += (b != 0) ? 1 : 0;
    return s;
}

// Firing state of one round: static inputs x, outputs y sampled in sub-round
// (t,2), inhibitors z sampled in sub-round (t,3) from the same round's y.
struct Configuration {
    BitVec x;
    BitVec y;
    BitVec z;
};

inline double output_potential(const NetworkSpec& spec, int x_bit, int y_prev_bit,
                               const BitVec& z_prev) {
    if (static_cast<int>(z_prev.size()) != spec.alpha) {
        throw std::invalid_argument("output_potential: z vector length must equal alpha");
    }
    double pot = x_bit * spec.w_x + y_prev_bit * spec.w_self - spec.b_out;
    for (int i = 0; i < spec.alpha; ++i) {
        if (z_prev[i]) pot += spec.w_z[i];
    }
    return pot;
}

inline double inhibitor_potential(const NetworkSpec& spec, int i, int k_firing_outputs) {
    if (i < 0 || i >= spec.alpha) {
        throw std::invalid_argument("inhibitor_potential: inhibitor index out of range");
    }
    if (k_firing_outputs < 0 || k_firing_outputs > spec.n) {
        throw std::invalid_argument("inhibitor_potential: firing count out of [0, n]");
    }
    return k_firing_outputs * spec.w_y[i] - spec.b_z[i];
}

inline double inhibitor_firing_prob(const NetworkSpec& spec, int i, int k_firing_outputs) {
    return sigmoid_prob(inhibitor_potential(spec, i, k_firing_outputs), spec.lambda);
}

// Firing probabilities of the four output classes (input on/off x fired last
// round or not) under a fixed inhibitor pattern. Outputs share parameters, so
// these four numbers fully describe sub-round (t,2).
struct ClassProbs {
    double active_fired;    // x = 1, y_prev = 1
    double active_idle;     // x = 1, y_prev = 0
    double inactive_fired;  // x = 0, y_prev = 1
    double inactive_idle;   // x = 0, y_prev = 0

    double of(int x_bit, int y_prev_bit) const {
        if (x_bit) return y_prev_bit ? active_fired : active_idle;
        return y_prev_bit ? inactive_fired : inactive_idle;
    }
};

inline ClassProbs class_firing_probs(const NetworkSpec& spec, const BitVec& z) {
    auto prob = [&](int x_bit, int y_bit) {
        return sigmoid_prob(output_potential(spec, x_bit, y_bit, z), spec.lambda);
    };
    return ClassProbs{prob(1, 1), prob(1, 0), prob(0, 1), prob(0, 0)};
}

inline void sample_inhibitors(const NetworkSpec& spec, int k_firing_outputs, Rng& rng,
                              BitVec& z_out) {
    z_out.resize(spec.alpha);
    for (int i = 0; i < spec.alpha; ++i) {
        z_out[i] = rng.bernoulli(inhibitor_firing_prob(spec, i, k_firing_outputs)) ? 1 : 0;
    }
}

// One full round. Outputs see (x, previous y, previous z); inhibitors see the
// freshly sampled y of the same round. Inputs are static.
inline Configuration step_round(const NetworkSpec& spec, const Configuration& cfg, Rng& rng) {
    if (static_cast<int>(cfg.x.size()) != spec.n || static_cast<int>(cfg.y.size()) != spec.n ||
        static_cast<int>(cfg.z.size()) != spec.alpha) {
        throw std::invalid_argument("step_round: configuration does not match spec");
    }
    Configuration next;
    next.x = cfg.x;
    next.y.resize(spec.n);
    const ClassProbs probs = class_firing_probs(spec, cfg.z);
    int k = 0;
    for (int j = 0; j < spec.n; ++j) {
        next.y[j] = rng.bernoulli(probs.of(cfg.x[j], cfg.y[j])) ? 1 : 0;
        k += next.y[j];
    }
    sample_inhibitors(spec, k, rng, next.z);
    return next;
}

// Round-zero configuration: outputs start at the given y0, inhibitors are
// sampled from ||y0|| exactly as in any later round.
inline Configuration init_round_zero(const NetworkSpec& spec, const BitVec& x, const BitVec& y0,
                                     Rng& rng) {
    if (static_cast<int>(x.size()) != spec.n || static_cast<int>(y0.size()) != spec.n) {
        throw std::invalid_argument("init_round_zero: x and y0 must have length n");
    }
    Configuration cfg;
    cfg.x = x;
    cfg.y = y0;
    sample_inhibitors(spec, count_ones(y0), rng, cfg.z);
    return cfg;
}

// Inhibitor pattern realized with overwhelming probability when exactly k
// outputs fire. Constructed networks keep every inhibitor potential at least
// 0.5 away from zero, so the pattern is the simple sign threshold.
inline BitVec whp_inhibitor_pattern(const NetworkSpec& spec, int k_firing_outputs) {
    BitVec z(spec.alpha);
    for (int i = 0; i < spec.alpha; ++i) {
        z[i] = inhibitor_potential(spec, i, k_firing_outputs) > 0.0 ? 1 : 0;
    }
    return z;
}

// Probability that a winner state (exactly one active-input output firing,
// inhibitors at their threshold pattern) fails to recur identically next
// round, as a union bound over all n + alpha neurons. n_active is ||x||.
inline double winner_recurrence_failure_bound(const NetworkSpec& spec, int n_active) {
    if (n_active < 1 || n_active > spec.n) {
        throw std::invalid_argument("winner_recurrence_failure_bound: need 1 <= n_active <= n");
    }
    const BitVec z1 = whp_inhibitor_pattern(spec, 1);
    const ClassProbs probs = class_firing_probs(spec, z1);
    double sum = 1.0 - probs.active_fired;             // winner drops out
    sum += (n_active - 1) * probs.active_idle;         // another contender joins
    sum += (spec.n - n_active) * probs.inactive_idle;  // spurious output fires
    for (int i = 0; i < spec.alpha; ++i) {
        const double p = inhibitor_firing_prob(spec, i, 1);
        sum += z1[i] ? (1.0 - p) : p;
    }
    return sum;
}

}  // namespace wta
