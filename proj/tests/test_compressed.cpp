#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wta/compressed.hpp"
#include "wta/constructors.hpp"

using Catch::Approx;

namespace {

// Wilson-Hilferty approximation of the chi-squared quantile; z for 0.999.
double chi2_critical_999(int df) {
    const double z = 3.0902323061678136;
    const double t = 2.0 / (9.0 * df);
    const double c = 1.0 - t + z * std::sqrt(t);
    return df * c * c * c;
}

}  // namespace

TEST_CASE("compress and expand are inverse on class counts") {
    const auto spec = wta::build_two_inhibitor(16);
    wta::CompressedState s;
    s.active_fired = 3;
    s.active_idle = 5;
    s.inactive_fired = 2;
    s.inactive_idle = 6;
    s.z = {1, 0};
    const auto cfg = wta::expand(spec, s);
    REQUIRE(wta::count_ones(cfg.x) == 8);
    REQUIRE(wta::count_ones(cfg.y) == 5);
    const auto back = wta::compress(spec, cfg);
    REQUIRE(back.active_fired == s.active_fired);
    REQUIRE(back.active_idle == s.active_idle);
    REQUIRE(back.inactive_fired == s.inactive_fired);
    REQUIRE(back.inactive_idle == s.inactive_idle);
    REQUIRE(back.z == s.z);
}

TEST_CASE("wta_predicate_counts mirrors the vector predicate") {
    REQUIRE(wta::wta_predicate_counts(3, 1, 0));
    REQUIRE_FALSE(wta::wta_predicate_counts(3, 2, 0));
    REQUIRE_FALSE(wta::wta_predicate_counts(3, 1, 1));
    REQUIRE(wta::wta_predicate_counts(0, 0, 0));
    REQUIRE_FALSE(wta::wta_predicate_counts(0, 0, 1));
}

TEST_CASE("ClassFirings::repeats detects exact vector repetition") {
    wta::CompressedState prev;
    prev.active_fired = 4;
    prev.active_idle = 4;
    wta::ClassFirings f;
    f.from_active_fired = 4;
    REQUIRE(f.repeats(prev));
    f.from_active_idle = 1;  // a newcomer joins: different vector even if counts drop elsewhere
    REQUIRE_FALSE(f.repeats(prev));
    f.from_active_idle = 0;
    f.from_active_fired = 3;  // one firer dropped out
    REQUIRE_FALSE(f.repeats(prev));
}

TEST_CASE("quiet compressed state stays quiet") {
    const auto spec = wta::build_two_inhibitor(64);
    wta::Rng rng(11);
    wta::CompressedState s;
    s.inactive_idle = 64;  // no firing inputs anywhere
    s.z = {0, 0};
    for (int t = 0; t < 100; ++t) {
        s = wta::step_round_compressed(spec, s, rng);
        REQUIRE(s.firing() == 0);
        REQUIRE(wta::count_ones(s.z) == 0);
    }
}

TEST_CASE("compressed and per-neuron stepping agree in distribution") {
    // 1e5 steps each from matched states; chi-squared on the next firing
    // count at significance 0.001.
    const auto spec = wta::build_two_inhibitor(16);

    wta::CompressedState cs;
    cs.active_fired = 8;
    cs.active_idle = 8;
    cs.z = {1, 1};
    const auto cfg = wta::expand(spec, cs);

    const int samples = 100000;
    std::vector<int> count_a(spec.n + 1, 0);  // compressed
    std::vector<int> count_b(spec.n + 1, 0);  // per-neuron
    wta::Rng rng_a(314), rng_b(159);
    for (int i = 0; i < samples; ++i) {
        count_a[wta::step_round_compressed(spec, cs, rng_a).firing()]++;
        count_b[wta::count_ones(wta::step_round(spec, cfg, rng_b).y)]++;
    }

    // Pool sparse buckets so expected cells stay >= 5.
    std::vector<std::pair<int, int>> buckets;
    int acc_a = 0, acc_b = 0;
    for (int k = 0; k <= spec.n; ++k) {
        acc_a += count_a[k];
        acc_b += count_b[k];
        if (acc_a + acc_b >= 20) {
            buckets.emplace_back(acc_a, acc_b);
            acc_a = acc_b = 0;
        }
    }
    if (acc_a + acc_b > 0) {
        if (buckets.empty()) {
            buckets.emplace_back(acc_a, acc_b);
        } else {
            buckets.back().first += acc_a;
            buckets.back().second += acc_b;
        }
    }
    REQUIRE(buckets.size() >= 5);

    double stat = 0.0;
    for (const auto& [a, b] : buckets) {
        const double expected = (a + b) / 2.0;
        stat += (a - expected) * (a - expected) / expected;
        stat += (b - expected) * (b - expected) / expected;
    }
    REQUIRE(stat < chi2_critical_999(static_cast<int>(buckets.size()) - 1));
}

TEST_CASE("compressed step matches the exact binomial law of its classes") {
    // Next active-fired count from (8 firing, 8 idle, both inhibitors on) is
    // Binomial(8, 1/2): idle outputs are suppressed. Chi-squared against the
    // exact pmf.
    const auto spec = wta::build_two_inhibitor(16);
    wta::CompressedState cs;
    cs.active_fired = 8;
    cs.active_idle = 8;
    cs.z = {1, 1};
    REQUIRE(wta::class_firing_probs(spec, cs.z).active_fired == 0.5);

    const int samples = 100000;
    std::vector<int> observed(9, 0);
    wta::Rng rng(2718);
    for (int i = 0; i < samples; ++i) {
        const auto next = wta::step_round_compressed(spec, cs, rng);
        REQUIRE(next.firing() <= 8);
        observed[next.active_fired]++;
    }
    double stat = 0.0;
    for (int k = 0; k <= 8; ++k) {
        double pmf = 1.0;
        for (int i = 0; i < k; ++i) pmf = pmf * (8 - i) / (i + 1);
        pmf /= 256.0;
        const double expected = samples * pmf;
        stat += (observed[k] - expected) * (observed[k] - expected) / expected;
    }
    REQUIRE(stat < chi2_critical_999(8));
}

TEST_CASE("waiting-time binomial sampling matches the exact law") {
    // The count > 32 path uses geometric skips; chi-squared against the exact
    // pmf, plus a moment check on a large draw.
    wta::Rng rng(424242);

    const int m = 100;
    const double p = 0.3;
    const int samples = 100000;
    std::vector<int> observed(m + 1, 0);
    for (int i = 0; i < samples; ++i) observed[rng.binomial(m, p)]++;

    std::vector<double> pmf(m + 1, 0.0);
    pmf[0] = std::pow(1.0 - p, m);
    for (int k = 0; k < m; ++k) {
        pmf[k + 1] = pmf[k] * (p / (1.0 - p)) * (m - k) / (k + 1);
    }
    // Pool the tails so expected counts stay >= 5.
    double stat = 0.0;
    int df = -1;
    double obs_acc = 0.0, exp_acc = 0.0;
    for (int k = 0; k <= m; ++k) {
        obs_acc += observed[k];
        exp_acc += samples * pmf[k];
        if (exp_acc >= 5.0 && (k == m || samples * pmf[k + 1] >= 5.0 || exp_acc >= 20.0)) {
            stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
            obs_acc = exp_acc = 0.0;
            ++df;
        }
    }
    if (exp_acc > 0.0) {
        stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / std::max(exp_acc, 1e-9);
        ++df;
    }
    REQUIRE(df >= 10);
    REQUIRE(stat < chi2_critical_999(df));

    // Symmetry path (p > 1/2) and a big draw: mean within 5 sigma.
    const int big = 4096;
    const double q = 0.75;
    double total = 0.0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) total += rng.binomial(big, q);
    const double mean = total / reps;
    const double se = std::sqrt(big * q * (1.0 - q) / reps);
    REQUIRE(std::abs(mean - big * q) <= 5.0 * se);

    // Degenerate edges are exact.
    REQUIRE(rng.binomial(50, 0.0) == 0);
    REQUIRE(rng.binomial(50, 1.0) == 50);
    REQUIRE(rng.binomial(0, 0.5) == 0);
}

TEST_CASE("init_round_zero_compressed classifies the start exactly") {
    const auto spec = wta::build_two_inhibitor(8);
    wta::Rng rng(1);
    wta::BitVec x = {1, 1, 1, 1, 1, 0, 0, 0};
    wta::BitVec y0 = {1, 0, 1, 0, 0, 1, 1, 0};
    const auto s = wta::init_round_zero_compressed(spec, x, y0, rng);
    REQUIRE(s.active_fired == 2);
    REQUIRE(s.active_idle == 3);
    REQUIRE(s.inactive_fired == 2);
    REQUIRE(s.inactive_idle == 1);
    REQUIRE(s.z == wta::BitVec{1, 1});  // four firing outputs
}
