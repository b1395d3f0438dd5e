#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wta/classify.hpp"
#include "wta/constructors.hpp"

using Catch::Approx;

namespace {

std::vector<wta::NetworkSpec> all_wta_solving_networks(int n) {
    return {
        wta::build_two_inhibitor(n),
        wta::build_logn_inhibitor(n),
        wta::build_theta_level(n, 2, wta::kDefaultC1, 1.0),
        wta::build_alpha_inhibitor(n, 3, wta::kDefaultC1, 0.05),
    };
}

// Active-output probability once exactly the inhibitors in `firing` are on.
double prefix_probability(const wta::NetworkSpec& spec, const std::vector<int>& firing) {
    wta::BitVec z(spec.alpha, 0);
    for (int i : firing) z[i] = 1;
    return wta::class_firing_probs(spec, z).active_fired;
}

}  // namespace

TEST_CASE("two-inhibitor network carries the canonical parameters") {
    const auto s = wta::build_two_inhibitor(256, 20.0);
    REQUIRE(s.alpha == 2);
    REQUIRE(s.w_x == 3.0);
    REQUIRE(s.w_self == 2.0);
    REQUIRE(s.b_out == 3.0);
    REQUIRE(s.w_y == std::vector<double>{1.0, 1.0});
    REQUIRE(s.b_z == std::vector<double>{0.5, 1.5});
    REQUIRE(s.w_z == std::vector<double>{-1.0, -1.0});
    REQUIRE(s.lambda == 1.0 / 160.0);

    // Both inhibitors firing puts a surviving output at potential exactly 0.
    REQUIRE(wta::output_potential(s, 1, 1, {1, 1}) == 0.0);
    REQUIRE(prefix_probability(s, {0, 1}) == 0.5);

    REQUIRE_THROWS_AS(wta::build_two_inhibitor(1), std::invalid_argument);
}

TEST_CASE("two-inhibitor spec survives a JSON round trip unchanged") {
    const auto s = wta::build_two_inhibitor(4096);
    REQUIRE(wta::spec_from_json(nlohmann::json::parse(wta::spec_to_string(s))) == s);
}

TEST_CASE("logn ladder yields survival probability 1/(1 + 2^(i-1)) exactly") {
    const auto s = wta::build_logn_inhibitor(256);
    REQUIRE(s.alpha == 8);
    std::vector<int> firing = {0};  // z_s
    for (int i = 1; i < s.alpha; ++i) {
        firing.push_back(i);
        const double p = prefix_probability(s, firing);
        REQUIRE(p == Approx(1.0 / (1.0 + std::exp2(i - 1))).epsilon(1e-12));
    }
    // i = 1 is the two-inhibitor halving step.
    REQUIRE(prefix_probability(s, {0, 1}) == 0.5);
}

TEST_CASE("logn thresholds partition the count axis dyadically") {
    const auto s = wta::build_logn_inhibitor(256);
    for (int k = 1; k <= s.n; ++k) {
        const int level = static_cast<int>(std::floor(std::log2(static_cast<double>(k))));
        for (int i = 1; i < s.alpha; ++i) {
            const double pot = wta::inhibitor_potential(s, i, k);
            if (i <= level) {
                REQUIRE(pot >= 0.5);
            } else {
                REQUIRE(pot <= -0.5);
            }
        }
        REQUIRE(wta::inhibitor_potential(s, 0, k) >= 0.5);  // z_s on whenever k >= 1
    }
}

TEST_CASE("theta-level prefixes meet their target probabilities") {
    for (int n : {256, 4096}) {
        for (int theta : {1, 2, 3}) {
            for (double c_prob : {0.25, 1.0}) {
                const auto s = wta::build_theta_level(n, theta, wta::kDefaultC1, c_prob);
                const double L = std::log2(static_cast<double>(n));
                const int g = static_cast<int>(std::ceil(std::pow(L, 1.0 / theta)));
                REQUIRE(s.alpha == 1 + theta * g);

                // Re-derive the ladder and walk it in threshold order.
                struct Rung {
                    int index;
                    double threshold;
                };
                std::vector<Rung> rungs;
                for (int i = 1; i <= theta; ++i) {
                    const double d = std::pow(L, (i - 1) / static_cast<double>(theta));
                    for (int j = 1; j <= g; ++j) {
                        rungs.push_back({1 + (i - 1) * g + (j - 1), std::exp2(j * d)});
                    }
                }
                std::stable_sort(rungs.begin(), rungs.end(),
                                 [](const Rung& a, const Rung& b) {
                                     return a.threshold < b.threshold;
                                 });
                std::vector<int> firing = {0};
                for (const auto& rung : rungs) {
                    firing.push_back(rung.index);
                    REQUIRE(s.b_z[rung.index] == rung.threshold - 0.5);
                    REQUIRE(prefix_probability(s, firing) ==
                            Approx(c_prob / rung.threshold).epsilon(1e-9));
                }
                for (double w : s.w_z) REQUIRE(w <= 0.0);
            }
        }
    }
}

TEST_CASE("theta = 1 reproduces the logn threshold ladder") {
    const auto theta1 = wta::build_theta_level(256, 1);
    const auto logn = wta::build_logn_inhibitor(256);
    // Same dyadic biases where both ladders have a rung; theta-1 carries one
    // extra rung at density n itself.
    REQUIRE(theta1.alpha == logn.alpha + 1);
    for (int i = 1; i < logn.alpha; ++i) {
        REQUIRE(theta1.b_z[i] == logn.b_z[i]);
    }
    REQUIRE(theta1.b_z[theta1.alpha - 1] == 256.0 - 0.5);
}

TEST_CASE("alpha = 2 degenerates to the two-inhibitor network exactly") {
    REQUIRE(wta::build_alpha_inhibitor(4096, 2) == wta::build_two_inhibitor(4096));
}

TEST_CASE("alpha ladder prefixes meet c_prob * log2(n) / 2^(d_i)") {
    struct Case {
        int n;
        int alpha;
        double c_prob;
    };
    for (const auto& c : {Case{4096, 3, 0.05}, Case{4096, 4, 0.05}, Case{4096, 5, 0.05},
                          Case{256, 3, 0.25}}) {
        const auto s = wta::build_alpha_inhibitor(c.n, c.alpha, wta::kDefaultC1, c.c_prob);
        const double L = std::log2(static_cast<double>(c.n));
        std::vector<int> firing = {0, 1};
        REQUIRE(prefix_probability(s, firing) == 0.5);
        for (int i = 1; i <= c.alpha - 2; ++i) {
            const double d = std::pow(L, i / static_cast<double>(c.alpha - 1));
            REQUIRE(s.b_z[1 + i] == std::exp2(d) - 0.5);
            firing.push_back(1 + i);
            REQUIRE(prefix_probability(s, firing) ==
                    Approx(c.c_prob * L / std::exp2(d)).epsilon(1e-9));
        }
    }
}

TEST_CASE("alpha = 3 at n = 4096 puts its rung at density 2^sqrt(12)") {
    const auto s = wta::build_alpha_inhibitor(4096, 3, wta::kDefaultC1, 0.05);
    REQUIRE(s.alpha == 3);
    REQUIRE(s.b_z[2] == std::exp2(std::sqrt(12.0)) - 0.5);
}

TEST_CASE("infeasible prefix targets raise a construction error naming the rung") {
    // Default c_prob = 5 asks for survival probability 5*12/2^sqrt(12) > 1 at
    // this size.
    REQUIRE_THROWS_AS(wta::build_alpha_inhibitor(4096, 3), wta::ConstructionError);
    REQUIRE_THROWS_WITH(wta::build_alpha_inhibitor(4096, 3),
                        Catch::Matchers::ContainsSubstring("z_1"));

    REQUIRE_THROWS_AS(wta::build_theta_level(256, 2, wta::kDefaultC1, 2.5),
                      wta::ConstructionError);
    REQUIRE_THROWS_WITH(wta::build_theta_level(256, 2, wta::kDefaultC1, 2.5),
                        Catch::Matchers::ContainsSubstring("z_(1,1)"));
}

TEST_CASE("one-inhibitor network hits its survival and restart probabilities") {
    for (int n : {4, 16, 256}) {
        for (double c_poly : {1.0, 2.0}) {
            const auto s = wta::build_one_inhibitor(n, c_poly);
            const double target = std::pow(static_cast<double>(n), -(c_poly + 1.0));
            const auto inhibited = wta::class_firing_probs(s, {1});
            REQUIRE(inhibited.active_fired == Approx(target).epsilon(1e-9));

            // Inhibitor gone: any output with a firing input restarts w.h.p.
            const auto free = wta::class_firing_probs(s, {0});
            REQUIRE(free.active_idle >=
                    1.0 - std::pow(static_cast<double>(n), -wta::kNoiseConstant));
        }
    }
    REQUIRE_THROWS_AS(wta::build_one_inhibitor(4, 0.5), std::invalid_argument);
}

TEST_CASE("every constructor output passes the validator") {
    for (int n : {16, 256, 4096}) {
        REQUIRE_NOTHROW(wta::validate_spec(wta::build_two_inhibitor(n)));
        REQUIRE_NOTHROW(wta::validate_spec(wta::build_logn_inhibitor(n)));
        REQUIRE_NOTHROW(wta::validate_spec(wta::build_one_inhibitor(n, 1.0)));
        REQUIRE_NOTHROW(wta::validate_spec(wta::build_theta_level(n, 2)));
        REQUIRE_NOTHROW(
            wta::validate_spec(wta::build_alpha_inhibitor(n, 3, wta::kDefaultC1, 0.05)));
    }
}

TEST_CASE("convergence thresholds are sharp across the whole count axis") {
    // For every inhibitor with turn-on point tau = b_z + 0.5: firing w.h.p.
    // for k >= tau, silent w.h.p. for k <= tau - 1, exhaustively over k.
    for (int n : {16, 256, 4096}) {
        std::vector<wta::NetworkSpec> nets = all_wta_solving_networks(n);
        nets.push_back(wta::build_one_inhibitor(n, 1.0));
        const double tail = std::pow(static_cast<double>(n), -wta::kNoiseConstant);
        for (const auto& spec : nets) {
            for (int i = 0; i < spec.alpha; ++i) {
                const double tau = spec.b_z[i] + 0.5;
                for (int k = 0; k <= n; ++k) {
                    const double p = wta::inhibitor_firing_prob(spec, i, k);
                    if (k >= tau) {
                        REQUIRE(p >= 1.0 - tail);
                    } else if (k <= tau - 1.0) {
                        REQUIRE(p <= tail);
                    }
                }
            }
        }
    }
}

TEST_CASE("winner states are fixed points up to a vanishing failure probability") {
    for (int n : {16, 256}) {
        for (const auto& spec : all_wta_solving_networks(n)) {
            const double bound =
                (spec.alpha + n) / std::pow(static_cast<double>(n), wta::kNoiseConstant);
            REQUIRE(wta::winner_recurrence_failure_bound(spec, n) <= bound);
            REQUIRE(wta::winner_recurrence_failure_bound(spec, n / 2) <= bound);
        }
    }
}

TEST_CASE("survival probability is non-increasing in the firing count") {
    for (int n : {16, 256, 4096}) {
        std::vector<wta::NetworkSpec> nets = all_wta_solving_networks(n);
        nets.push_back(wta::build_one_inhibitor(n, 1.0));
        for (const auto& spec : nets) {
            const auto table = wta::active_survival_by_count(spec);
            for (std::size_t k = 1; k < table.size(); ++k) {
                REQUIRE(table[k] <= table[k - 1] + 1e-15);
            }
        }
    }
}

TEST_CASE("provenance names the constructor and its arguments") {
    REQUIRE(wta::build_two_inhibitor(256).provenance == "two-inhibitor(n=256,c1=20.0)");
    REQUIRE(wta::build_logn_inhibitor(64).provenance == "logn(n=64,c1=20.0)");
    REQUIRE(wta::build_theta_level(256, 2).provenance ==
            "theta-level(n=256,theta=2,c1=20.0,c_prob=0.25)");
    REQUIRE(wta::build_alpha_inhibitor(256, 3, wta::kDefaultC1, 0.25).provenance ==
            "alpha(n=256,alpha=3,c1=20.0,c_prob=0.25)");
    REQUIRE(wta::build_one_inhibitor(4, 1.0).provenance == "one-inhibitor(n=4,c_poly=1.0,c1=20.0)");
}
