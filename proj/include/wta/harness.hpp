#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wta/compressed.hpp"
#include "wta/dynamics.hpp"
#include "wta/network.hpp"
#include "wta/rng.hpp"

namespace wta {

// y in f(x): every firing output has a firing input, and the number of firing
// outputs is min(1, ||x||).
inline bool wta_predicate(const BitVec& x, const BitVec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("wta_predicate: length mismatch");
    int firing = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (y[j] && !x[j]) return false;
        firing += y[j] ? 1 : 0;
    }
    const int any_input = std::any_of(x.begin(), x.end(), [](auto b) { return b != 0; }) ? 1 : 0;
    return firing == any_input;
}

constexpr int kNoWinner = -2;
// Count-compressed runs cannot name the winning output; all winners are
// exchangeable, so the result is reported as "some active output".
constexpr int kWinnerUnidentified = -1;

struct TrialResult {
    std::optional<int> converged_at;       // satisfying round followed by W identical rounds
    std::optional<int> first_satisfaction; // first satisfying round, maintenance ignored
    int winner = kNoWinner;
    int reset_count = 0;                   // rounds with no firing output after earlier activity
    bool window_verified = false;

    bool timed_out() const { return !converged_at.has_value(); }
};

inline int default_window(int n) {
    return std::max(1, static_cast<int>(std::lround(10.0 * std::log2(std::max(n, 2)))));
}

inline int default_max_rounds(int n) {
    const double l = std::log2(static_cast<double>(std::max(n, 2)));
    return std::max(default_window(n) + 1, static_cast<int>(std::lround(50.0 * l * l)));
}

// Full per-neuron trial. Convergence at round t means Y^t satisfies the
// predicate and the exact output vector repeats for the next `window` rounds.
inline TrialResult run_trial_with_rng(const NetworkSpec& spec, const BitVec& x, const BitVec& y0,
                                      Rng& rng, int max_rounds, int window) {
    if (max_rounds < window || window < 1) {
        throw std::invalid_argument("run_trial: need max_rounds >= window >= 1");
    }
    Configuration cfg = init_round_zero(spec, x, y0, rng);

    TrialResult result;
    bool any_fired = count_ones(cfg.y) > 0;
    bool candidate_sat = wta_predicate(x, cfg.y);
    int candidate_round = 0;
    int streak = 0;
    if (candidate_sat) result.first_satisfaction = 0;

    BitVec prev_y = cfg.y;
    for (int t = 1; t <= max_rounds; ++t) {
        cfg = step_round(spec, cfg, rng);
        const int k = count_ones(cfg.y);
        if (k == 0 && any_fired) result.reset_count++;
        if (k > 0) any_fired = true;

        if (cfg.y == prev_y) {
            if (candidate_sat && ++streak >= window) {
                result.converged_at = candidate_round;
                result.window_verified = true;
                break;
            }
        } else {
            prev_y = cfg.y;
            candidate_sat = wta_predicate(x, cfg.y);
            candidate_round = t;
            streak = 0;
            if (candidate_sat && !result.first_satisfaction) result.first_satisfaction = t;
        }
    }

    if (result.converged_at && count_ones(x) >= 1) {
        for (int j = 0; j < spec.n; ++j) {
            if (prev_y[j]) {
                result.winner = j;
                break;
            }
        }
    }
    return result;
}

inline TrialResult run_trial(const NetworkSpec& spec, const BitVec& x, const BitVec& y0,
                             std::uint64_t seed, int max_rounds, int window) {
    Rng rng(seed);
    return run_trial_with_rng(spec, x, y0, rng, max_rounds, window);
}

// Count-compressed trial, distributionally identical to run_trial. The
// output-vector repeat test uses per-class firing counts: the set repeats iff
// every previous firer fires again and no idle output joins.
inline TrialResult run_trial_compressed_with_rng(const NetworkSpec& spec, const BitVec& x,
                                                 const BitVec& y0, Rng& rng, int max_rounds,
                                                 int window) {
    if (max_rounds < window || window < 1) {
        throw std::invalid_argument("run_trial_compressed: need max_rounds >= window >= 1");
    }
    CompressedState state = init_round_zero_compressed(spec, x, y0, rng);
    const int n_active = state.n_active();

    TrialResult result;
    bool any_fired = state.firing() > 0;
    bool candidate_sat = wta_predicate_counts(n_active, state.active_fired, state.inactive_fired);
    int candidate_round = 0;
    int streak = 0;
    if (candidate_sat) result.first_satisfaction = 0;

    for (int t = 1; t <= max_rounds; ++t) {
        ClassFirings firings;
        const CompressedState next = step_round_compressed(spec, state, rng, &firings);
        const int k = next.firing();
        if (k == 0 && any_fired) result.reset_count++;
        if (k > 0) any_fired = true;

        if (firings.repeats(state)) {
            if (candidate_sat && ++streak >= window) {
                result.converged_at = candidate_round;
                result.window_verified = true;
                state = next;
                break;
            }
        } else {
            candidate_sat = wta_predicate_counts(n_active, next.active_fired, next.inactive_fired);
            candidate_round = t;
            streak = 0;
            if (candidate_sat && !result.first_satisfaction) result.first_satisfaction = t;
        }
        state = next;
    }

    if (result.converged_at && n_active >= 1) result.winner = kWinnerUnidentified;
    return result;
}

inline TrialResult run_trial_compressed(const NetworkSpec& spec, const BitVec& x, const BitVec& y0,
                                        std::uint64_t seed, int max_rounds, int window) {
    Rng rng(seed);
    return run_trial_compressed_with_rng(spec, x, y0, rng, max_rounds, window);
}

enum class Y0Policy { Zeros, Ones, Half, Random, Adversarial };
enum class Engine { PerNeuron, Compressed };

inline const char* to_string(Y0Policy p) {
    switch (p) {
        case Y0Policy::Zeros: return "zeros";
        case Y0Policy::Ones: return "ones";
        case Y0Policy::Half: return "half";
        case Y0Policy::Random: return "random";
        case Y0Policy::Adversarial: return "adversarial";
    }
    return "?";
}

inline Y0Policy y0_policy_from_string(const std::string& s) {
    if (s == "zeros") return Y0Policy::Zeros;
    if (s == "ones") return Y0Policy::Ones;
    if (s == "half") return Y0Policy::Half;
    if (s == "random") return Y0Policy::Random;
    if (s == "adversarial") return Y0Policy::Adversarial;
    throw std::invalid_argument("unknown y0 policy: " + s);
}

inline BitVec fixed_y0(int n, Y0Policy policy) {
    BitVec y0(n, 0);
    switch (policy) {
        case Y0Policy::Zeros: break;
        case Y0Policy::Ones: y0.assign(n, 1); break;
        case Y0Policy::Half:
            for (int j = 0; j < n / 2; ++j) y0[j] = 1;
            break;
        default:
            throw std::invalid_argument("fixed_y0: policy has no fixed vector");
    }
    return y0;
}

// Input with the requested number of firing bits, packed at the low indices.
inline BitVec make_input(int n, int firing) {
    if (firing < 0 || firing > n) throw std::invalid_argument("make_input: count out of range");
    BitVec x(n, 0);
    for (int j = 0; j < firing; ++j) x[j] = 1;
    return x;
}

inline int density_to_count(int n, double density) {
    if (!(density >= 0.0 && density <= 1.0)) {
        throw std::invalid_argument("input density must lie in [0,1]");
    }
    return std::clamp(static_cast<int>(std::lround(density * n)), 0, n);
}

// One representative input per dyadic density class: ||X_i|| = 2^i for
// i = 1..floor(log2 n).
inline std::vector<BitVec> density_class_inputs(int n) {
    if (n < 2) throw std::invalid_argument("density_class_inputs: n must be >= 2");
    std::vector<BitVec> inputs;
    for (int i = 1; (1 << i) <= n; ++i) inputs.push_back(make_input(n, 1 << i));
    return inputs;
}

// Runs `trials` independent trials. Trial i uses the stream derived from
// (seed, i); a random y0 consumes that stream first (bits by index), so every
// trial is reproducible in isolation. Parallel scheduling cannot change
// results: outputs are written by trial index and folded in order.
inline std::vector<TrialResult> run_trials(const NetworkSpec& spec, const BitVec& x,
                                           Y0Policy policy, int trials, std::uint64_t seed,
                                           int max_rounds, int window,
                                           Engine engine = Engine::Compressed, int jobs = 0) {
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (policy == Y0Policy::Adversarial) {
        throw std::invalid_argument("run_trials: adversarial policy is handled by estimators");
    }

    std::vector<TrialResult> results(trials);
    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(i));
            BitVec y0;
            if (policy == Y0Policy::Random) {
                y0.resize(spec.n);
                for (int j = 0; j < spec.n; ++j) y0[j] = rng.bernoulli(0.5) ? 1 : 0;
            } else {
                y0 = fixed_y0(spec.n, policy);
            }
            if (engine == Engine::PerNeuron) {
                results[i] = run_trial_with_rng(spec, x, y0, rng, max_rounds, window);
            } else {
                results[i] = run_trial_compressed_with_rng(spec, x, y0, rng, max_rounds, window);
            }
        }
    };

    int n_jobs = jobs;
    if (n_jobs <= 0) n_jobs = static_cast<int>(std::thread::hardware_concurrency());
    n_jobs = std::clamp(n_jobs, 1, trials);
    if (n_jobs == 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (trials + n_jobs - 1) / n_jobs;
        for (int t = 0; t < n_jobs; ++t) {
            const int begin = t * chunk;
            const int end = std::min(trials, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return results;
}

struct Aggregate {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    double q10 = 0.0, q50 = 0.0, q90 = 0.0, q99 = 0.0;
    double timeout_fraction = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    int max_rounds = 0;
    int window = 0;
    std::string y0_policy;
    std::string provenance;
};

namespace detail {

// Type-1 empirical quantile: the ceil(q*N)-th smallest value.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const auto rank = static_cast<std::size_t>(
        std::max<long long>(1, static_cast<long long>(std::ceil(q * sorted.size()))));
    return sorted[std::min(rank, sorted.size()) - 1];
}

inline Aggregate aggregate_results(const std::vector<TrialResult>& results, int max_rounds,
                                   int window, std::uint64_t seed, const NetworkSpec& spec,
                                   Y0Policy policy) {
    // Timeouts enter the mean censored at max_rounds (a downward-biased
    // censoring); timeout_fraction keeps the bias visible.
    std::vector<double> values;
    values.reserve(results.size());
    int timeouts = 0;
    for (const auto& r : results) {
        if (r.converged_at) {
            values.push_back(static_cast<double>(*r.converged_at));
        } else {
            values.push_back(static_cast<double>(max_rounds));
            ++timeouts;
        }
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    Aggregate a;
    a.mean = mean;
    a.stderr_of_mean = sd / std::sqrt(static_cast<double>(values.size()));
    a.q10 = quantile_sorted(sorted, 0.10);
    a.q50 = quantile_sorted(sorted, 0.50);
    a.q90 = quantile_sorted(sorted, 0.90);
    a.q99 = quantile_sorted(sorted, 0.99);
    a.timeout_fraction = static_cast<double>(timeouts) / results.size();
    a.trials = static_cast<int>(results.size());
    a.seed = seed;
    a.max_rounds = max_rounds;
    a.window = window;
    a.y0_policy = to_string(policy);
    a.provenance = spec.provenance;
    return a;
}

}  // namespace detail

// Expected convergence time estimate. The adversarial policy sweeps the three
// canonical starts (all-zeros, all-ones, half) and reports the worst mean;
// exchangeability makes those the extremes of the start space.
inline Aggregate estimate_expected_time(const NetworkSpec& spec, const BitVec& x, Y0Policy policy,
                                        int trials, std::uint64_t seed, int max_rounds, int window,
                                        Engine engine = Engine::Compressed, int jobs = 0) {
    if (policy == Y0Policy::Adversarial) {
        Aggregate worst;
        bool first = true;
        for (Y0Policy p : {Y0Policy::Zeros, Y0Policy::Ones, Y0Policy::Half}) {
            Aggregate a =
                estimate_expected_time(spec, x, p, trials, seed, max_rounds, window, engine, jobs);
            if (first || a.mean > worst.mean) worst = a;
            first = false;
        }
        worst.y0_policy = "adversarial";
        return worst;
    }
    const auto results = run_trials(spec, x, policy, trials, seed, max_rounds, window, engine, jobs);
    return detail::aggregate_results(results, max_rounds, window, seed, spec, policy);
}

// Empirical (1 - delta)-quantile of the convergence round; timed-out trials
// count as +infinity.
inline double estimate_hp_time(const NetworkSpec& spec, const BitVec& x, Y0Policy policy,
                               int trials, double delta, std::uint64_t seed, int max_rounds,
                               int window, Engine engine = Engine::Compressed, int jobs = 0) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("estimate_hp_time: delta must lie in (0,1)");
    }
    if (trials < 10.0 / delta) {
        throw std::invalid_argument("estimate_hp_time: need at least 10/delta trials");
    }
    if (policy == Y0Policy::Adversarial) {
        double worst = 0.0;
        for (Y0Policy p : {Y0Policy::Zeros, Y0Policy::Ones, Y0Policy::Half}) {
            worst = std::max(worst, estimate_hp_time(spec, x, p, trials, delta, seed, max_rounds,
                                                     window, engine, jobs));
        }
        return worst;
    }
    const auto results = run_trials(spec, x, policy, trials, seed, max_rounds, window, engine, jobs);
    std::vector<double> values;
    values.reserve(results.size());
    for (const auto& r : results) {
        values.push_back(r.converged_at ? static_cast<double>(*r.converged_at)
                                        : std::numeric_limits<double>::infinity());
    }
    std::sort(values.begin(), values.end());
    return detail::quantile_sorted(values, 1.0 - delta);
}

inline nlohmann::json aggregate_to_json(const Aggregate& a) {
    return nlohmann::json{
        {"mean_et", a.mean},
        {"stderr", a.stderr_of_mean},
        {"quantiles", {{"q10", a.q10}, {"q50", a.q50}, {"q90", a.q90}, {"q99", a.q99}}},
        {"timeout_fraction", a.timeout_fraction},
        {"trials", a.trials},
        {"seed", a.seed},
        {"max_rounds", a.max_rounds},
        {"window", a.window},
        {"y0_policy", a.y0_policy},
        {"provenance", a.provenance},
    };
}

inline nlohmann::json trial_to_json(const TrialResult& r) {
    nlohmann::json j;
    j["converged_at"] = r.converged_at ? nlohmann::json(*r.converged_at) : nlohmann::json();
    j["first_satisfaction"] =
        r.first_satisfaction ? nlohmann::json(*r.first_satisfaction) : nlohmann::json();
    j["winner"] = r.winner == kNoWinner ? nlohmann::json() : nlohmann::json(r.winner);
    j["reset_count"] = r.reset_count;
    j["window_verified"] = r.window_verified;
    return j;
}

}  // namespace wta
