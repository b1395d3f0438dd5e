#pragma once

#include <stdexcept>

#include "wta/dynamics.hpp"

namespace wta {

// Winner-take-all predicate on class counts: no output without input fires,
// and the number of firing outputs is min(1, number of firing inputs).
inline bool wta_predicate_counts(int n_active_inputs, int active_fired, int inactive_fired) {
    if (inactive_fired != 0) return false;
    return active_fired == (n_active_inputs >= 1 ? 1 : 0);
}

// Exchangeability-compressed state: outputs within one (input-on, fired-last-
// round) class share a firing probability, so only the four class counts and
// the inhibitor vector matter for the round-to-round distribution.
struct CompressedState {
    int active_fired = 0;    // x = 1 outputs that fired last round
    int active_idle = 0;     // x = 1 outputs that did not
    int inactive_fired = 0;  // x = 0 outputs that fired last round
    int inactive_idle = 0;   // x = 0 outputs that did not
    BitVec z;

    int n_active() const { return active_fired + active_idle; }
    int n_inactive() const { return inactive_fired + inactive_idle; }
    int n() const { return n_active() + n_inactive(); }
    int firing() const { return active_fired + inactive_fired; }
};

inline void check_compressed(const NetworkSpec& spec, const CompressedState& s) {
    if (s.active_fired < 0 || s.active_idle < 0 || s.inactive_fired < 0 || s.inactive_idle < 0 ||
        s.n() != spec.n || static_cast<int>(s.z.size()) != spec.alpha) {
        throw std::invalid_argument("CompressedState inconsistent with spec");
    }
}

inline CompressedState compress(const NetworkSpec& spec, const Configuration& cfg) {
    CompressedState s;
    s.z = cfg.z;
    for (int j = 0; j < spec.n; ++j) {
        if (cfg.x[j]) {
            (cfg.y[j] ? s.active_fired : s.active_idle)++;
        } else {
            (cfg.y[j] ? s.inactive_fired : s.inactive_idle)++;
        }
    }
    return s;
}

// Canonical expansion: firing members sit at the lowest indices of each class.
// Any expansion consistent with the counts is distribution-equivalent.
inline Configuration expand(const NetworkSpec& spec, const CompressedState& s) {
    check_compressed(spec, s);
    Configuration cfg;
    cfg.x.assign(spec.n, 0);
    cfg.y.assign(spec.n, 0);
    cfg.z = s.z;
    const int n_act = s.n_active();
    for (int j = 0; j < n_act; ++j) cfg.x[j] = 1;
    for (int j = 0; j < s.active_fired; ++j) cfg.y[j] = 1;
    for (int j = 0; j < s.inactive_fired; ++j) cfg.y[n_act + j] = 1;
    return cfg;
}

// How many outputs of each previous-round class fire this round.
struct ClassFirings {
    int from_active_fired = 0;
    int from_active_idle = 0;
    int from_inactive_fired = 0;
    int from_inactive_idle = 0;

    int total() const {
        return from_active_fired + from_active_idle + from_inactive_fired + from_inactive_idle;
    }

    // True iff the new firing set equals the previous one as a vector: every
    // previous firer fires again and nobody joins.
    bool repeats(const CompressedState& prev) const {
        return from_active_fired == prev.active_fired && from_active_idle == 0 &&
               from_inactive_fired == prev.inactive_fired && from_inactive_idle == 0;
    }
};

// Count-level round step, distributionally identical to step_round on any
// expansion of `s`: one binomial per class, then inhibitors from the fresh
// total count.
inline CompressedState step_round_compressed(const NetworkSpec& spec, const CompressedState& s,
                                             Rng& rng, ClassFirings* firings_out = nullptr) {
    check_compressed(spec, s);
    const ClassProbs probs = class_firing_probs(spec, s.z);
    ClassFirings f;
    f.from_active_fired = rng.binomial(s.active_fired, probs.active_fired);
    f.from_active_idle = rng.binomial(s.active_idle, probs.active_idle);
    f.from_inactive_fired = rng.binomial(s.inactive_fired, probs.inactive_fired);
    f.from_inactive_idle = rng.binomial(s.inactive_idle, probs.inactive_idle);

    CompressedState next;
    next.active_fired = f.from_active_fired + f.from_active_idle;
    next.active_idle = s.n_active() - next.active_fired;
    next.inactive_fired = f.from_inactive_fired + f.from_inactive_idle;
    next.inactive_idle = s.n_inactive() - next.inactive_fired;
    sample_inhibitors(spec, next.firing(), rng, next.z);

    if (firings_out) *firings_out = f;
    return next;
}

// Round-zero compressed state from explicit x / y0 vectors.
inline CompressedState init_round_zero_compressed(const NetworkSpec& spec, const BitVec& x,
                                                  const BitVec& y0, Rng& rng) {
    if (static_cast<int>(x.size()) != spec.n || static_cast<int>(y0.size()) != spec.n) {
        throw std::invalid_argument("init_round_zero_compressed: x and y0 must have length n");
    }
    CompressedState s;
    for (int j = 0; j < spec.n; ++j) {
        if (x[j]) {
            (y0[j] ? s.active_fired : s.active_idle)++;
        } else {
            (y0[j] ? s.inactive_fired : s.inactive_idle)++;
        }
    }
    sample_inhibitors(spec, s.firing(), rng, s.z);
    return s;
}

}  // namespace wta
