#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wta/constructors.hpp"
#include "wta/harness.hpp"

namespace wta {

inline const char* kSweepCsvHeader =
    "variant,n,alpha,theta,input_density,y0_policy,trials,mean_et,stderr,q99,"
    "timeout_fraction,row_checksum";

// Cartesian sweep over network sizes, ladder depths, input densities and
// start policies. Rows already present in the output file (with a valid
// checksum) are kept as-is, so an interrupted sweep resumes where it stopped.
struct SweepPlan {
    std::string variant;
    std::vector<int> n_values;
    std::vector<int> levels;  // alpha for "alpha", theta for "theta-level"; single 0 otherwise
    std::vector<double> input_densities;
    std::vector<Y0Policy> y0_policies;
    int trials = 0;
    std::uint64_t seed = 0;
    int max_rounds = 0;  // 0 = 50 * log2(n)^2
    int window = 0;      // 0 = 10 * log2(n)
    double c1 = kDefaultC1;
    double c_prob = -1.0;  // < 0 = constructor default
    double c_poly = 1.0;
    int jobs = 0;
    std::string out_path;
};

inline SweepPlan load_sweep_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("sweep plan: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sweep plan: parse error: ") + e.what());
    }

    SweepPlan plan;
    try {
        plan.variant = j.at("variant").get<std::string>();
        plan.n_values = j.at("n").get<std::vector<int>>();
        plan.input_densities = j.at("input_density").get<std::vector<double>>();
        for (const auto& s : j.at("y0_policy").get<std::vector<std::string>>()) {
            plan.y0_policies.push_back(y0_policy_from_string(s));
        }
        plan.trials = j.at("trials").get<int>();
        plan.seed = j.at("seed").get<std::uint64_t>();
        plan.out_path = j.at("out").get<std::string>();
        if (j.contains("alpha")) plan.levels = j.at("alpha").get<std::vector<int>>();
        if (j.contains("theta")) plan.levels = j.at("theta").get<std::vector<int>>();
        if (j.contains("max_rounds")) plan.max_rounds = j.at("max_rounds").get<int>();
        if (j.contains("window")) plan.window = j.at("window").get<int>();
        if (j.contains("c1")) plan.c1 = j.at("c1").get<double>();
        if (j.contains("c_prob")) plan.c_prob = j.at("c_prob").get<double>();
        if (j.contains("c_poly")) plan.c_poly = j.at("c_poly").get<double>();
        if (j.contains("jobs")) plan.jobs = j.at("jobs").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sweep plan: missing field: ") + e.what());
    }

    if (plan.variant == "alpha" || plan.variant == "theta-level") {
        if (plan.levels.empty()) {
            throw std::invalid_argument("sweep plan: variant " + plan.variant +
                                        " needs an alpha/theta axis");
        }
    } else {
        plan.levels = {0};
    }
    if (plan.n_values.empty() || plan.input_densities.empty() || plan.y0_policies.empty()) {
        throw std::invalid_argument("sweep plan: empty axis");
    }
    if (plan.trials < 1) throw std::invalid_argument("sweep plan: trials must be >= 1");
    return plan;
}

inline NetworkSpec build_variant(const std::string& variant, int n, int level, double c1,
                                 double c_prob, double c_poly) {
    if (variant == "two-inhibitor") return build_two_inhibitor(n, c1);
    if (variant == "logn") return build_logn_inhibitor(n, c1);
    if (variant == "one-inhibitor") return build_one_inhibitor(n, c_poly, c1);
    if (variant == "theta-level") {
        return c_prob > 0.0 ? build_theta_level(n, level, c1, c_prob)
                            : build_theta_level(n, level, c1);
    }
    if (variant == "alpha") {
        return c_prob > 0.0 ? build_alpha_inhibitor(n, level, c1, c_prob)
                            : build_alpha_inhibitor(n, level, c1);
    }
    throw std::invalid_argument("unknown variant: " + variant);
}

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string checksum_hex(std::string_view s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s)));
    return buf;
}

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

struct SweepCell {
    int n = 0;
    int level = 0;
    double density = 0.0;
    Y0Policy policy = Y0Policy::Ones;
};

inline std::string sweep_cell_key(const SweepPlan& plan, const SweepCell& cell, int alpha_actual) {
    std::ostringstream key;
    key << plan.variant << ',' << cell.n << ',' << alpha_actual << ','
        << (plan.variant == "theta-level" ? std::to_string(cell.level) : std::string()) << ','
        << detail::fmt_double(cell.density) << ',' << to_string(cell.policy) << ',' << plan.trials;
    return key.str();
}

struct SweepOutcome {
    int rows = 0;
    int reused = 0;
};

// Runs the plan, merging with any rows already present in the output file.
// Each row carries an FNV-1a checksum of its payload; rows that fail the
// check (truncated writes) are recomputed.
inline SweepOutcome run_sweep(const SweepPlan& plan) {
    const std::string tmp_path = plan.out_path + ".tmp";

    // Collect valid rows from a previous run (including an interrupted one's
    // temp file), keyed by the cell columns.
    std::map<std::string, std::string> existing;
    auto harvest = [&existing](const std::string& path) {
        std::ifstream in(path);
        std::string line;
        bool first = true;
        while (in && std::getline(in, line)) {
            if (first) {
                first = false;
                continue;  // header
            }
            const auto cut = line.rfind(',');
            if (cut == std::string::npos) continue;
            const std::string payload = line.substr(0, cut);
            if (detail::checksum_hex(payload) != line.substr(cut + 1)) continue;
            // Key = the cell columns (everything before mean_et).
            int commas = 0;
            std::size_t key_end = std::string::npos;
            for (std::size_t i = 0; i < payload.size(); ++i) {
                if (payload[i] == ',' && ++commas == 7) {
                    key_end = i;
                    break;
                }
            }
            if (key_end == std::string::npos) continue;
            existing.emplace(payload.substr(0, key_end), line);
        }
    };
    harvest(plan.out_path);
    harvest(tmp_path);

    std::vector<SweepCell> cells;
    for (int n : plan.n_values) {
        for (int level : plan.levels) {
            for (double density : plan.input_densities) {
                for (Y0Policy policy : plan.y0_policies) {
                    cells.push_back({n, level, density, policy});
                }
            }
        }
    }

    std::ofstream out(tmp_path);
    if (!out) throw std::runtime_error("sweep: cannot open " + tmp_path);
    out << kSweepCsvHeader << '\n';

    SweepOutcome outcome;
    for (const auto& cell : cells) {
        const NetworkSpec spec =
            build_variant(plan.variant, cell.n, cell.level, plan.c1, plan.c_prob, plan.c_poly);
        const std::string key = sweep_cell_key(plan, cell, spec.alpha);
        if (auto it = existing.find(key); it != existing.end()) {
            out << it->second << '\n';
            outcome.rows++;
            outcome.reused++;
            continue;
        }
        const int max_rounds = plan.max_rounds > 0 ? plan.max_rounds : default_max_rounds(cell.n);
        const int window = plan.window > 0 ? plan.window : default_window(cell.n);
        const BitVec x = make_input(cell.n, density_to_count(cell.n, cell.density));
        const Aggregate agg =
            estimate_expected_time(spec, x, cell.policy, plan.trials, plan.seed, max_rounds,
                                   window, Engine::Compressed, plan.jobs);
        std::ostringstream row;
        row << key << ',' << detail::fmt_double(agg.mean) << ','
            << detail::fmt_double(agg.stderr_of_mean) << ',' << detail::fmt_double(agg.q99) << ','
            << detail::fmt_double(agg.timeout_fraction);
        out << row.str() << ',' << detail::checksum_hex(row.str()) << '\n';
        out.flush();
        outcome.rows++;
    }
    out.close();
    std::remove(plan.out_path.c_str());
    if (std::rename(tmp_path.c_str(), plan.out_path.c_str()) != 0) {
        throw std::runtime_error("sweep: cannot move results into place at " + plan.out_path);
    }
    return outcome;
}

}  // namespace wta
