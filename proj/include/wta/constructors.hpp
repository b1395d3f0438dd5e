#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wta/dynamics.hpp"
#include "wta/math.hpp"
#include "wta/network.hpp"

namespace wta {

// Raised when a requested prefix firing probability cannot be met with an
// inhibitory (non-positive) weight.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_num(double v) { return nlohmann::json(v).dump(); }

// Greedy prefix solver. Inhibitors join in increasing threshold order; each
// step solves for the single new weight so that the cumulative firing set
// meets its target probability exactly. Targets must therefore be
// non-increasing along the order, which mirrors the count sweep: the set of
// inhibitors firing at output count k is exactly a prefix of this order.
struct PrefixTarget {
    std::size_t index;   // position in the spec's w_z array
    double threshold;    // output count at which this inhibitor turns on
    double target_p;     // active-output firing probability once it has joined
    std::string name;    // for error messages
};

inline void solve_prefix_weights(NetworkSpec& spec, double base_potential,
                                 std::vector<PrefixTarget> targets) {
    std::stable_sort(targets.begin(), targets.end(),
                     [](const PrefixTarget& a, const PrefixTarget& b) {
                         return a.threshold < b.threshold;
                     });
    double running = base_potential;
    for (const auto& t : targets) {
        if (!(t.target_p > 0.0 && t.target_p < 1.0)) {
            throw ConstructionError("target probability " + fmt_num(t.target_p) +
                                    " outside (0,1) at " + t.name);
        }
        const double required = solve_weight_for_target(0.0, t.target_p, spec.lambda);
        double dw = required - running;
        if (dw > 0.0) {
            if (dw > 1e-12) {
                throw ConstructionError("infeasible target at " + t.name +
                                        ": meeting p = " + fmt_num(t.target_p) +
                                        " would require an excitatory weight");
            }
            dw = 0.0;  // threshold tie, the new rung adds no inhibition
        } else {
            running = required;
        }
        spec.w_z[t.index] = dw;
    }
}

}  // namespace detail

// Two inhibitors: a stability inhibitor firing whenever >= 1 output fires and
// a convergence inhibitor firing whenever >= 2 fire. With both on, surviving
// outputs keep firing with probability exactly 1/2.
inline NetworkSpec build_two_inhibitor(int n, double c1 = kDefaultC1) {
    if (n < 2) throw std::invalid_argument("build_two_inhibitor: n must be >= 2");
    NetworkSpec s;
    s.n = n;
    s.alpha = 2;
    s.lambda = lambda_for(n, c1);
    s.w_x = 3.0;
    s.w_self = 2.0;
    s.b_out = 3.0;
    s.w_y = {1.0, 1.0};
    s.b_z = {0.5, 1.5};
    s.w_z = {-1.0, -1.0};
    s.provenance = "two-inhibitor(n=" + std::to_string(n) + ",c1=" + detail::fmt_num(c1) + ")";
    validate_spec(s);
    return s;
}

// ceil(log2 n) inhibitors: the stability inhibitor plus a dyadic threshold
// ladder z_1..z_{alpha-1} with b(z_i) = 2^i - 0.5. When z_s, z_1, ..., z_i
// fire, an active output fires next round with probability 1/(1 + 2^(i-1)):
// z_1 contributes weight -1 and each later rung -lambda*ln(2), i.e. one
// factor of 2 in the sigmoid's odds.
inline NetworkSpec build_logn_inhibitor(int n, double c1 = kDefaultC1) {
    if (n < 2) throw std::invalid_argument("build_logn_inhibitor: n must be >= 2");
    NetworkSpec s;
    s.n = n;
    s.alpha = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
    s.lambda = lambda_for(n, c1);
    s.w_x = 3.0;
    s.w_self = 2.0;
    s.b_out = 3.0;
    s.w_y.assign(s.alpha, 1.0);
    s.b_z.resize(s.alpha);
    s.w_z.resize(s.alpha);
    s.b_z[0] = 0.5;
    s.w_z[0] = -1.0;
    for (int i = 1; i < s.alpha; ++i) {
        s.b_z[i] = std::exp2(static_cast<double>(i)) - 0.5;
        s.w_z[i] = (i == 1) ? -1.0 : -s.lambda * std::log(2.0);
    }
    s.provenance = "logn(n=" + std::to_string(n) + ",c1=" + detail::fmt_num(c1) + ")";
    validate_spec(s);
    return s;
}

// Single inhibitor firing whenever >= 1 output fires. Under its inhibition an
// active output survives with probability n^-(c_poly+1); with it silent every
// output with a firing input turns on. A polynomially slow but minimal
// network: the same inhibitor must serve both convergence and stability.
inline NetworkSpec build_one_inhibitor(int n, double c_poly, double c1 = kDefaultC1) {
    if (n < 2) throw std::invalid_argument("build_one_inhibitor: n must be >= 2");
    if (!(c_poly >= 1.0)) throw std::invalid_argument("build_one_inhibitor: c_poly must be >= 1");
    NetworkSpec s;
    s.n = n;
    s.alpha = 1;
    s.lambda = lambda_for(n, c1);
    s.w_x = 3.0;
    s.w_self = 2.0;
    // b_out = 2.5 leaves a +0.5 margin so an idle active-input output fires
    // w.h.p. once inhibition is gone, restarting the competition.
    s.b_out = 2.5;
    s.w_y = {1.0};
    s.b_z = {0.5};
    const double survive_p = std::pow(static_cast<double>(n), -(c_poly + 1.0));
    const double base = s.w_x + s.w_self - s.b_out;  // fired output under no inhibition
    s.w_z = {solve_weight_for_target(base, survive_p, s.lambda)};
    s.provenance = "one-inhibitor(n=" + std::to_string(n) + ",c_poly=" + detail::fmt_num(c_poly) +
                   ",c1=" + detail::fmt_num(c1) + ")";
    validate_spec(s);
    return s;
}

// theta groups of ceil((log2 n)^(1/theta)) convergence inhibitors plus the
// stability inhibitor. Group i covers density level i with thresholds
// 2^(j * d_i), d_i = (log2 n)^((i-1)/theta); once the prefix through (i, j)
// fires, active outputs survive with probability c_prob / 2^(j * d_i).
// Storage order: z_s first, then group-major (1,1)..(1,g),(2,1)..(theta,g).
inline NetworkSpec build_theta_level(int n, int theta, double c1 = kDefaultC1,
                                     double c_prob = 0.25) {
    if (n < 4) throw std::invalid_argument("build_theta_level: n must be >= 4");
    if (theta < 1) throw std::invalid_argument("build_theta_level: theta must be >= 1");
    if (!(c_prob > 0.0)) throw std::invalid_argument("build_theta_level: c_prob must be positive");

    const double L = std::log2(static_cast<double>(n));
    const int group_size = static_cast<int>(std::ceil(std::pow(L, 1.0 / theta)));

    NetworkSpec s;
    s.n = n;
    s.alpha = 1 + theta * group_size;
    s.lambda = lambda_for(n, c1);
    s.w_x = 3.0;
    s.w_self = 2.0;
    s.b_out = 3.0;
    s.w_y.assign(s.alpha, 1.0);
    s.b_z.assign(s.alpha, 0.0);
    s.w_z.assign(s.alpha, 0.0);
    s.b_z[0] = 0.5;
    s.w_z[0] = -1.0;

    std::vector<detail::PrefixTarget> targets;
    targets.reserve(s.alpha - 1);
    for (int i = 1; i <= theta; ++i) {
        const double d_i = std::pow(L, (i - 1) / static_cast<double>(theta));
        for (int j = 1; j <= group_size; ++j) {
            const double threshold = std::exp2(j * d_i);
            const std::size_t index = 1 + static_cast<std::size_t>(i - 1) * group_size + (j - 1);
            s.b_z[index] = threshold - 0.5;
            targets.push_back({index, threshold, c_prob / threshold,
                               "z_(" + std::to_string(i) + "," + std::to_string(j) + ")"});
        }
    }
    const double base = s.w_x + s.w_self + s.w_z[0] - s.b_out;  // winner under z_s alone
    detail::solve_prefix_weights(s, base, std::move(targets));

    s.provenance = "theta-level(n=" + std::to_string(n) + ",theta=" + std::to_string(theta) +
                   ",c1=" + detail::fmt_num(c1) + ",c_prob=" + detail::fmt_num(c_prob) + ")";
    validate_spec(s);
    return s;
}

// alpha inhibitors total: the two-inhibitor pair (z_s, base convergence
// inhibitor) plus alpha - 2 ladder inhibitors with thresholds 2^(d_i),
// d_i = (log2 n)^(i/(alpha-1)). Once z_s, the base and z_1..z_i fire, active
// outputs survive with probability c_prob * log2(n) / 2^(d_i), so one round
// drops the count to the next density level. alpha = 2 degenerates exactly to
// the two-inhibitor network.
inline NetworkSpec build_alpha_inhibitor(int n, int alpha, double c1 = kDefaultC1,
                                         double c_prob = 5.0) {
    if (alpha < 2) throw std::invalid_argument("build_alpha_inhibitor: alpha must be >= 2");
    if (alpha == 2) return build_two_inhibitor(n, c1);
    if (n < 4) throw std::invalid_argument("build_alpha_inhibitor: n must be >= 4");
    if (!(c_prob > 0.0)) {
        throw std::invalid_argument("build_alpha_inhibitor: c_prob must be positive");
    }

    const double L = std::log2(static_cast<double>(n));

    NetworkSpec s;
    s.n = n;
    s.alpha = alpha;
    s.lambda = lambda_for(n, c1);
    s.w_x = 3.0;
    s.w_self = 2.0;
    s.b_out = 3.0;
    s.w_y.assign(alpha, 1.0);
    s.b_z.assign(alpha, 0.0);
    s.w_z.assign(alpha, 0.0);
    s.b_z[0] = 0.5;
    s.w_z[0] = -1.0;
    s.b_z[1] = 1.5;
    s.w_z[1] = -1.0;

    std::vector<detail::PrefixTarget> targets;
    targets.reserve(alpha - 2);
    for (int i = 1; i <= alpha - 2; ++i) {
        const double d_i = std::pow(L, i / static_cast<double>(alpha - 1));
        const double threshold = std::exp2(d_i);
        const std::size_t index = 1 + static_cast<std::size_t>(i);
        s.b_z[index] = threshold - 0.5;
        targets.push_back({index, threshold, c_prob * L / threshold, "z_" + std::to_string(i)});
    }
    const double base = s.w_x + s.w_self + s.w_z[0] + s.w_z[1] - s.b_out;  // = 0, p = 1/2
    detail::solve_prefix_weights(s, base, std::move(targets));

    s.provenance = "alpha(n=" + std::to_string(n) + ",alpha=" + std::to_string(alpha) +
                   ",c1=" + detail::fmt_num(c1) + ",c_prob=" + detail::fmt_num(c_prob) + ")";
    validate_spec(s);
    return s;
}

// Active-fired output probability as a function of last-round output count,
// with inhibitors at their threshold pattern. Non-increasing in k for every
// network built here; the tail of the competition reads directly off it.
inline std::vector<double> active_survival_by_count(const NetworkSpec& spec) {
    std::vector<double> probs;
    probs.reserve(spec.n);
    for (int k = 1; k <= spec.n; ++k) {
        probs.push_back(class_firing_probs(spec, whp_inhibitor_pattern(spec, k)).active_fired);
    }
    return probs;
}

}  // namespace wta
