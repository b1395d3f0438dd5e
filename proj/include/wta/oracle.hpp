#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wta/compressed.hpp"
#include "wta/dynamics.hpp"
#include "wta/network.hpp"

namespace wta {

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense enumeration over (Y, Z) states; inputs are a parameter. 2^22 doubles
// keeps one distribution under ~34 MB.
constexpr int kMaxOracleBits = 22;

inline void check_oracle_capacity(const NetworkSpec& spec) {
    if (spec.n + spec.alpha > kMaxOracleBits) {
        throw CapacityError("oracle capacity exceeded: n + alpha must be <= " +
                            std::to_string(kMaxOracleBits));
    }
}

// Exact per-round distribution over network states, indexed (Z << n) | Y.
// Entries below 1e-300 are flushed to zero with the lost mass tracked.
struct DistributionVector {
    int n = 0;
    int alpha = 0;
    int round = 0;
    std::vector<double> p;
    double flushed_mass = 0.0;

    double total() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }
};

namespace oracle_detail {

inline std::uint32_t bits_of(const BitVec& v) {
    std::uint32_t b = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j]) b |= (1u << j);
    }
    return b;
}

inline BitVec bitvec_of(std::uint32_t bits, int len) {
    BitVec v(len, 0);
    for (int j = 0; j < len; ++j) v[j] = (bits >> j) & 1u;
    return v;
}

// Joint firing probabilities of all inhibitor patterns given the fresh output
// count: row[Z'] = prod_i P[z'_i | k].
inline std::vector<double> inhibitor_pattern_row(const NetworkSpec& spec, int k) {
    std::vector<double> row(std::size_t{1} << spec.alpha, 1.0);
    for (int i = 0; i < spec.alpha; ++i) {
        const double q = inhibitor_firing_prob(spec, i, k);
        const std::size_t half = std::size_t{1} << i;
        for (std::size_t s = 0; s < half; ++s) {
            row[s | half] = row[s] * q;
            row[s] *= (1.0 - q);
        }
    }
    return row;
}

inline void flush_tiny(DistributionVector& d) {
    for (double& v : d.p) {
        if (v != 0.0 && v < 1e-300) {
            d.flushed_mass += v;
            v = 0.0;
        }
    }
}

}  // namespace oracle_detail

inline DistributionVector initial_distribution(const NetworkSpec& spec, const BitVec& y0) {
    check_oracle_capacity(spec);
    if (static_cast<int>(y0.size()) != spec.n) {
        throw std::invalid_argument("initial_distribution: y0 must have length n");
    }
    DistributionVector d;
    d.n = spec.n;
    d.alpha = spec.alpha;
    d.p.assign(std::size_t{1} << (spec.n + spec.alpha), 0.0);
    const std::uint32_t y0_bits = oracle_detail::bits_of(y0);
    const auto z_row = oracle_detail::inhibitor_pattern_row(spec, count_ones(y0));
    for (std::size_t z = 0; z < z_row.size(); ++z) {
        d.p[(z << spec.n) | y0_bits] = z_row[z];
    }
    return d;
}

// Exact one-round transition kernel entry: outputs factorize given the source
// state, inhibitors factorize given the fresh output count.
inline double transition_probability(const NetworkSpec& spec, const BitVec& x,
                                     std::uint32_t from_y, std::uint32_t from_z,
                                     std::uint32_t to_y, std::uint32_t to_z) {
    check_oracle_capacity(spec);
    const ClassProbs probs = class_firing_probs(spec, oracle_detail::bitvec_of(from_z, spec.alpha));
    double prob = 1.0;
    int k = 0;
    for (int j = 0; j < spec.n; ++j) {
        const double pj = probs.of((x[j] ? 1 : 0), (from_y >> j) & 1u);
        prob *= ((to_y >> j) & 1u) ? pj : (1.0 - pj);
        k += (to_y >> j) & 1u;
    }
    for (int i = 0; i < spec.alpha; ++i) {
        const double qi = inhibitor_firing_prob(spec, i, k);
        prob *= ((to_z >> i) & 1u) ? qi : (1.0 - qi);
    }
    return prob;
}

// One exact round of distribution evolution. Outputs transition independently
// given the source Z, so each Z-slice is pushed through n two-point kernels;
// the fresh inhibitor pattern depends only on the output count.
inline void propagate_in_place(const NetworkSpec& spec, const BitVec& x, DistributionVector& d) {
    check_oracle_capacity(spec);
    if (static_cast<int>(x.size()) != spec.n ||
        d.p.size() != (std::size_t{1} << (spec.n + spec.alpha))) {
        throw std::invalid_argument("propagate: distribution does not match spec");
    }
    const std::size_t ny = std::size_t{1} << spec.n;
    const std::size_t nz = std::size_t{1} << spec.alpha;

    // Output-layer marginal over Y' accumulated across source Z slices.
    std::vector<double> u(ny, 0.0);
    std::vector<double> slice(ny);
    for (std::size_t z = 0; z < nz; ++z) {
        const double* src = d.p.data() + (z << spec.n);
        double mass = 0.0;
        for (std::size_t y = 0; y < ny; ++y) mass += src[y];
        if (mass == 0.0) continue;
        std::copy(src, src + ny, slice.begin());
        const ClassProbs probs = class_firing_probs(spec, oracle_detail::bitvec_of(z, spec.alpha));
        for (int j = 0; j < spec.n; ++j) {
            const double p0 = x[j] ? probs.active_idle : probs.inactive_idle;
            const double p1 = x[j] ? probs.active_fired : probs.inactive_fired;
            const std::size_t step = std::size_t{1} << j;
            for (std::size_t base = 0; base < ny; base += 2 * step) {
                for (std::size_t off = 0; off < step; ++off) {
                    const std::size_t i0 = base + off;
                    const double a = slice[i0];
                    const double b = slice[i0 + step];
                    slice[i0] = a * (1.0 - p0) + b * (1.0 - p1);
                    slice[i0 + step] = a * p0 + b * p1;
                }
            }
        }
        for (std::size_t y = 0; y < ny; ++y) u[y] += slice[y];
    }

    // Expand the fresh inhibitor layer; its pattern distribution depends on Y'
    // only through the firing count.
    std::vector<std::vector<std::uint32_t>> by_count(spec.n + 1);
    for (std::size_t y = 0; y < ny; ++y) {
        by_count[std::popcount(static_cast<std::uint32_t>(y))].push_back(
            static_cast<std::uint32_t>(y));
    }
    std::fill(d.p.begin(), d.p.end(), 0.0);
    for (int k = 0; k <= spec.n; ++k) {
        if (by_count[k].empty()) continue;
        const auto z_row = oracle_detail::inhibitor_pattern_row(spec, k);
        for (std::uint32_t y : by_count[k]) {
            const double uy = u[y];
            if (uy == 0.0) continue;
            for (std::size_t z = 0; z < nz; ++z) {
                d.p[(z << spec.n) | y] += uy * z_row[z];
            }
        }
    }
    oracle_detail::flush_tiny(d);
    d.round++;
}

inline DistributionVector propagate(const NetworkSpec& spec, const BitVec& x,
                                    const DistributionVector& d) {
    DistributionVector next = d;
    propagate_in_place(spec, x, next);
    return next;
}

// Output vectors satisfying the winner-take-all predicate for input x.
inline std::vector<std::uint32_t> satisfying_outputs(const NetworkSpec& spec, const BitVec& x) {
    std::vector<std::uint32_t> sat;
    if (count_ones(x) == 0) {
        sat.push_back(0);
    } else {
        for (int j = 0; j < spec.n; ++j) {
            if (x[j]) sat.push_back(1u << j);
        }
    }
    return sat;
}

struct FirstSatisfactionResult {
    int horizon = 0;
    std::vector<double> cdf;  // cdf[t-1] = P[first satisfying round <= t], t = 1..horizon
    double expectation = 0.0; // censored at the horizon
    double tail_mass = 0.0;   // probability of no satisfaction within the horizon
    std::size_t state_count = 0;
};

// Law of the first round t >= 1 whose output vector satisfies the predicate,
// computed by absorbing the mass of satisfying output states after every
// round. Round zero is the given start, not a candidate.
inline FirstSatisfactionResult exact_first_satisfaction(const NetworkSpec& spec, const BitVec& x,
                                                        const BitVec& y0, int horizon) {
    if (horizon < 1) throw std::invalid_argument("exact_first_satisfaction: horizon must be >= 1");
    DistributionVector d = initial_distribution(spec, y0);
    const auto sat = satisfying_outputs(spec, x);
    const std::size_t nz = std::size_t{1} << spec.alpha;

    auto absorb = [&]() {
        double taken = 0.0;
        for (std::size_t z = 0; z < nz; ++z) {
            for (std::uint32_t y : sat) {
                double& cell = d.p[(z << spec.n) | y];
                taken += cell;
                cell = 0.0;
            }
        }
        return taken;
    };

    FirstSatisfactionResult r;
    r.horizon = horizon;
    r.state_count = d.p.size();
    double absorbed = 0.0;
    double expectation = 0.0;
    r.cdf.reserve(horizon);
    for (int t = 1; t <= horizon; ++t) {
        propagate_in_place(spec, x, d);
        const double newly = absorb();
        absorbed += newly;
        expectation += static_cast<double>(t) * newly;
        r.cdf.push_back(absorbed);
    }
    r.tail_mass = std::max(0.0, 1.0 - absorbed);
    r.expectation = expectation + static_cast<double>(horizon) * r.tail_mass;
    return r;
}

struct ExpectedSatisfactionTime {
    double expectation = 0.0;  // censored at the horizon
    double tail_mass = 0.0;
};

inline ExpectedSatisfactionTime exact_expected_satisfaction_time(const NetworkSpec& spec,
                                                                 const BitVec& x,
                                                                 const BitVec& y0, int horizon) {
    const auto r = exact_first_satisfaction(spec, x, y0, horizon);
    return {r.expectation, r.tail_mass};
}

// Monte Carlo counterpart of exact_first_satisfaction for one trial: the
// first round t in [1, horizon] satisfying the predicate, or 0 if none.
inline int sample_first_satisfaction(const NetworkSpec& spec, const BitVec& x, const BitVec& y0,
                                     Rng& rng, int horizon) {
    CompressedState state = init_round_zero_compressed(spec, x, y0, rng);
    const int n_active = state.n_active();
    for (int t = 1; t <= horizon; ++t) {
        state = step_round_compressed(spec, state, rng);
        if (wta_predicate_counts(n_active, state.active_fired, state.inactive_fired)) {
            return t;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Exact propagation in the count-compressed state space, used to validate the
// compressed sampler against the full oracle distribution (not statistically).

struct CompressedDistribution {
    int n_active = 0;
    int n_inactive = 0;
    int alpha = 0;
    // index = (z * (n_inactive + 1) + inactive_fired) * (n_active + 1) + active_fired
    std::vector<double> p;

    std::size_t index(std::size_t z, int inactive_fired, int active_fired) const {
        return (z * (n_inactive + 1) + inactive_fired) * (n_active + 1) + active_fired;
    }
};

namespace oracle_detail {

inline std::vector<double> binomial_pmf(int m, double prob) {
    std::vector<double> pmf(m + 1, 0.0);
    if (m == 0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (prob <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (prob >= 1.0) {
        pmf[m] = 1.0;
        return pmf;
    }
    // Stable for the small m used here (m <= kMaxOracleBits).
    const double q = 1.0 - prob;
    pmf[0] = std::pow(q, m);
    const double ratio = prob / q;
    for (int k = 0; k < m; ++k) {
        pmf[k + 1] = pmf[k] * ratio * static_cast<double>(m - k) / static_cast<double>(k + 1);
    }
    return pmf;
}

inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace oracle_detail

inline CompressedDistribution collapse_distribution(const NetworkSpec& spec, const BitVec& x,
                                                    const DistributionVector& d) {
    const std::uint32_t x_bits = oracle_detail::bits_of(x);
    CompressedDistribution c;
    c.n_active = count_ones(x);
    c.n_inactive = spec.n - c.n_active;
    c.alpha = spec.alpha;
    c.p.assign((std::size_t{1} << spec.alpha) * (c.n_inactive + 1) * (c.n_active + 1), 0.0);
    const std::size_t ny = std::size_t{1} << spec.n;
    for (std::size_t z = 0; z < (std::size_t{1} << spec.alpha); ++z) {
        for (std::size_t y = 0; y < ny; ++y) {
            const double v = d.p[(z << spec.n) | y];
            if (v == 0.0) continue;
            const int af = std::popcount(static_cast<std::uint32_t>(y) & x_bits);
            const int nf = std::popcount(static_cast<std::uint32_t>(y) & ~x_bits);
            c.p[c.index(z, nf, af)] += v;
        }
    }
    return c;
}

// Exact round of the count-compressed chain: the two fresh per-class firing
// counts are sums of two binomials (survivors plus joiners), then the
// inhibitor pattern follows from the fresh total count.
inline CompressedDistribution propagate_compressed(const NetworkSpec& spec,
                                                   const CompressedDistribution& c) {
    CompressedDistribution next = c;
    std::fill(next.p.begin(), next.p.end(), 0.0);
    const std::size_t nz = std::size_t{1} << c.alpha;

    // Cache fresh-inhibitor rows per total count.
    std::vector<std::vector<double>> z_rows(spec.n + 1);
    for (int k = 0; k <= spec.n; ++k) z_rows[k] = oracle_detail::inhibitor_pattern_row(spec, k);

    for (std::size_t z = 0; z < nz; ++z) {
        const ClassProbs probs = class_firing_probs(spec, oracle_detail::bitvec_of(z, c.alpha));
        for (int nf = 0; nf <= c.n_inactive; ++nf) {
            for (int af = 0; af <= c.n_active; ++af) {
                const double mass = c.p[c.index(z, nf, af)];
                if (mass == 0.0) continue;
                const auto active_dist = oracle_detail::convolve(
                    oracle_detail::binomial_pmf(af, probs.active_fired),
                    oracle_detail::binomial_pmf(c.n_active - af, probs.active_idle));
                const auto inactive_dist = oracle_detail::convolve(
                    oracle_detail::binomial_pmf(nf, probs.inactive_fired),
                    oracle_detail::binomial_pmf(c.n_inactive - nf, probs.inactive_idle));
                for (int nf2 = 0; nf2 <= c.n_inactive; ++nf2) {
                    if (inactive_dist[nf2] == 0.0) continue;
                    for (int af2 = 0; af2 <= c.n_active; ++af2) {
                        const double w = mass * inactive_dist[nf2] * active_dist[af2];
                        if (w == 0.0) continue;
                        const auto& row = z_rows[af2 + nf2];
                        for (std::size_t z2 = 0; z2 < nz; ++z2) {
                            next.p[next.index(z2, nf2, af2)] += w * row[z2];
                        }
                    }
                }
            }
        }
    }
    return next;
}

}  // namespace wta
