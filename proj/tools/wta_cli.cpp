// Command-line front end: build the WTA network variants, run seeded trial
// batches, sweep parameter grids to CSV, classify inhibitors, and cross-check
// the Monte Carlo path against the exact oracle on small instances.
//
// Exit codes: 0 success, 1 failed oracle-compare verdict, 2 usage/validation.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wta/classify.hpp"
#include "wta/constructors.hpp"
#include "wta/harness.hpp"
#include "wta/network.hpp"
#include "wta/oracle.hpp"
#include "wta/sweep.hpp"

namespace {

constexpr double kDkwConfidence = 0.999;

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    out << text;
}

int effective_jobs(int jobs_flag) {
    if (const char* env = std::getenv("WTA_JOBS")) {
        const int env_jobs = std::atoi(env);
        if (env_jobs > 0) return env_jobs;
    }
    return jobs_flag;
}

struct BuildArgs {
    std::string variant;
    int n = 0;
    double c1 = wta::kDefaultC1;
    int theta = 2;
    int alpha = 2;
    double c_poly = 1.0;
    double c_prob = -1.0;  // constructor default when unset
    std::string out;
};

int cmd_build(const BuildArgs& args) {
    const wta::NetworkSpec spec = wta::build_variant(args.variant, args.n,
                                                     args.variant == "theta-level" ? args.theta
                                                                                   : args.alpha,
                                                     args.c1, args.c_prob, args.c_poly);
    write_output(wta::spec_to_string(spec), args.out);
    return 0;
}

struct SimulateArgs {
    std::string spec_path;
    double x_density = 1.0;
    std::string y0 = "ones";
    int trials = 10000;
    std::uint64_t seed = 1;
    int max_rounds = 0;
    int window = 0;
    double delta = 0.0;
    std::string engine = "compressed";
    int jobs = 0;
    bool per_trial = false;
    std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
    const wta::NetworkSpec spec = wta::load_spec(args.spec_path);
    const int max_rounds = args.max_rounds > 0 ? args.max_rounds : wta::default_max_rounds(spec.n);
    const int window = args.window > 0 ? args.window : wta::default_window(spec.n);
    const wta::BitVec x =
        wta::make_input(spec.n, wta::density_to_count(spec.n, args.x_density));
    const wta::Y0Policy policy = wta::y0_policy_from_string(args.y0);
    const wta::Engine engine =
        args.engine == "per-neuron" ? wta::Engine::PerNeuron : wta::Engine::Compressed;
    const int jobs = effective_jobs(args.jobs);

    const wta::Aggregate agg = wta::estimate_expected_time(spec, x, policy, args.trials, args.seed,
                                                           max_rounds, window, engine, jobs);
    nlohmann::json j = wta::aggregate_to_json(agg);
    j["n"] = spec.n;
    j["x_density"] = args.x_density;
    j["engine"] = args.engine;
    if (args.delta > 0.0) {
        const double hp = wta::estimate_hp_time(spec, x, policy, args.trials, args.delta,
                                                args.seed, max_rounds, window, engine, jobs);
        j["hp"] = {{"delta", args.delta},
                   {"hp_time", std::isfinite(hp) ? nlohmann::json(hp) : nlohmann::json()}};
    }
    if (args.per_trial && policy != wta::Y0Policy::Adversarial) {
        const auto results = wta::run_trials(spec, x, policy, args.trials, args.seed, max_rounds,
                                             window, engine, jobs);
        nlohmann::json detail = nlohmann::json::array();
        for (const auto& r : results) detail.push_back(wta::trial_to_json(r));
        j["trials_detail"] = std::move(detail);
    }
    write_output(j.dump(2) + "\n", args.out);
    return 0;
}

struct ClassifyArgs {
    std::string spec_path;
    double c = 4.0;
    std::string out;
};

int cmd_classify(const ClassifyArgs& args) {
    const wta::NetworkSpec spec = wta::load_spec(args.spec_path);
    const auto classification = wta::classify_inhibitors(spec, args.c);
    nlohmann::json j = wta::classification_to_json(classification);
    j["n"] = spec.n;
    j["alpha"] = spec.alpha;
    j["provenance"] = spec.provenance;
    write_output(j.dump(2) + "\n", args.out);
    return 0;
}

struct OracleCompareArgs {
    std::string spec_path;
    std::string sim_spec_path;  // defaults to spec_path; a differing spec is a power check
    double x_density = 1.0;
    std::string y0 = "ones";
    int horizon = 50;
    int trials = 100000;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out;
};

int cmd_oracle_compare(const OracleCompareArgs& args) {
    const wta::NetworkSpec spec = wta::load_spec(args.spec_path);
    const wta::NetworkSpec sim_spec =
        args.sim_spec_path.empty() ? spec : wta::load_spec(args.sim_spec_path);
    wta::check_oracle_capacity(spec);
    const wta::BitVec x =
        wta::make_input(spec.n, wta::density_to_count(spec.n, args.x_density));
    const wta::BitVec y0 = wta::fixed_y0(spec.n, wta::y0_policy_from_string(args.y0));

    const auto exact = wta::exact_first_satisfaction(spec, x, y0, args.horizon);

    // Empirical first-satisfaction CDF over the same horizon.
    std::vector<double> empirical(args.horizon, 0.0);
    {
        std::vector<int> counts(args.horizon + 1, 0);
        for (int i = 0; i < args.trials; ++i) {
            wta::Rng rng = wta::Rng::for_trial(args.seed, static_cast<std::uint64_t>(i));
            counts[wta::sample_first_satisfaction(sim_spec, x, y0, rng, args.horizon)]++;
        }
        double cum = 0.0;
        for (int t = 1; t <= args.horizon; ++t) {
            cum += counts[t];
            empirical[t - 1] = cum / static_cast<double>(args.trials);
        }
    }

    double sup_distance = 0.0;
    for (int t = 1; t <= args.horizon; ++t) {
        sup_distance = std::max(sup_distance, std::abs(empirical[t - 1] - exact.cdf[t - 1]));
    }
    const double band = std::sqrt(std::log(2.0 / (1.0 - kDkwConfidence)) / (2.0 * args.trials));
    const bool pass = sup_distance <= band;

    nlohmann::json j{
        {"verdict", pass ? "pass" : "fail"},
        {"sup_distance", sup_distance},
        {"band", band},
        {"confidence", kDkwConfidence},
        {"trials", args.trials},
        {"seed", args.seed},
        {"horizon", args.horizon},
        {"empirical_cdf", empirical},
        {"oracle",
         {{"horizon", exact.horizon},
          {"cdf", exact.cdf},
          {"expectation", exact.expectation},
          {"tail_mass", exact.tail_mass},
          {"state_count", exact.state_count}}},
    };
    const int n_active = wta::count_ones(x);
    j["winner_hold_per_round"] =
        n_active >= 1
            ? nlohmann::json(1.0 - wta::winner_recurrence_failure_bound(spec, n_active))
            : nlohmann::json();
    write_output(j.dump(2) + "\n", args.out);
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic winner-take-all spiking network toolkit"};
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "Construct a network and emit its JSON spec");
    build
        ->add_option("variant", build_args.variant,
                     "one of: one-inhibitor, two-inhibitor, logn, theta-level, alpha")
        ->required()
        ->check(CLI::IsMember({"one-inhibitor", "two-inhibitor", "logn", "theta-level", "alpha"}));
    build->add_option("--n", build_args.n, "number of inputs/outputs")->required();
    build->add_option("--c1", build_args.c1, "temperature constant, lambda = 1/(c1 log2 n)");
    build->add_option("--theta", build_args.theta, "level count (theta-level variant)");
    build->add_option("--alpha", build_args.alpha, "inhibitor count (alpha variant)");
    build->add_option("--c-poly", build_args.c_poly, "polynomial exponent (one-inhibitor variant)");
    build->add_option("--c-prob", build_args.c_prob,
                      "prefix probability constant (theta-level/alpha variants)");
    build->add_option("--out", build_args.out, "write spec JSON here instead of stdout");

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Estimate convergence time by Monte Carlo");
    simulate->add_option("spec", sim_args.spec_path, "network spec JSON path")->required();
    simulate->add_option("--x-density", sim_args.x_density, "fraction of firing inputs")
        ->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--y0", sim_args.y0, "zeros|ones|half|random|adversarial");
    simulate->add_option("--trials", sim_args.trials)->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_args.seed, "64-bit master seed");
    simulate->add_option("--max-rounds", sim_args.max_rounds, "0 = 50 log2(n)^2");
    simulate->add_option("--window", sim_args.window, "stability window W, 0 = 10 log2(n)");
    simulate->add_option("--delta", sim_args.delta,
                         "also report the empirical (1-delta)-quantile convergence time");
    simulate->add_option("--engine", sim_args.engine, "compressed|per-neuron")
        ->check(CLI::IsMember({"compressed", "per-neuron"}));
    simulate->add_option("--jobs", sim_args.jobs, "worker threads (WTA_JOBS overrides)");
    simulate->add_flag("--per-trial", sim_args.per_trial, "include per-trial records");
    simulate->add_option("--out", sim_args.out);

    std::string plan_path;
    auto* sweep = app.add_subcommand("sweep", "Run a Cartesian sweep plan to CSV (resumable)");
    sweep->add_option("plan", plan_path, "sweep plan JSON path")->required();

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "Label inhibitors as S/C/R with k(z) ranges");
    classify->add_option("spec", classify_args.spec_path)->required();
    classify->add_option("--c", classify_args.c, "classification constant (>= 4)");
    classify->add_option("--out", classify_args.out);

    OracleCompareArgs oc_args;
    auto* oracle_compare = app.add_subcommand(
        "oracle-compare", "Check Monte Carlo first-satisfaction CDF against the exact oracle");
    oracle_compare->add_option("spec", oc_args.spec_path)->required();
    oracle_compare->add_option("--sim-spec", oc_args.sim_spec_path,
                               "simulate this spec instead (sensitivity/power check)");
    oracle_compare->add_option("--x-density", oc_args.x_density)->check(CLI::Range(0.0, 1.0));
    oracle_compare->add_option("--y0", oc_args.y0, "zeros|ones|half");
    oracle_compare->add_option("--horizon", oc_args.horizon)->check(CLI::PositiveNumber);
    oracle_compare->add_option("--trials", oc_args.trials)->check(CLI::PositiveNumber);
    oracle_compare->add_option("--seed", oc_args.seed);
    oracle_compare->add_option("--jobs", oc_args.jobs);
    oracle_compare->add_option("--out", oc_args.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 2;
    }

    try {
        if (*build) return cmd_build(build_args);
        if (*simulate) return cmd_simulate(sim_args);
        if (*sweep) {
            auto plan = wta::load_sweep_plan(plan_path);
            plan.jobs = effective_jobs(plan.jobs);
            const auto outcome = wta::run_sweep(plan);
            std::cout << "wrote " << outcome.rows << " rows (" << outcome.reused
                      << " reused) to " << plan.out_path << "\n";
            return 0;
        }
        if (*classify) return cmd_classify(classify_args);
        if (*oracle_compare) return cmd_oracle_compare(oc_args);
    } catch (const wta::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
