#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace wta {

// Temperature convention: lambda = 1 / (c1 * log2 n). The default c1 keeps
// potential gaps of +-0.5 within 1/n^10 of a deterministic outcome for every
// size used here.
constexpr double kDefaultC1 = 20.0;

// Quiet-network floor: output and inhibitor biases must be at least
// kNoiseConstant * lambda * log2 n, so an unstimulated neuron fires with
// probability at most n^-kNoiseConstant.
constexpr double kNoiseConstant = 10.0;

constexpr double kMaxWeightMagnitude = 1e6;

inline double lambda_for(int n, double c1 = kDefaultC1) {
    if (n < 2) throw std::invalid_argument("lambda_for: n must be >= 2");
    if (!(c1 > 0.0)) throw std::invalid_argument("lambda_for: c1 must be positive");
    return 1.0 / (c1 * std::log2(static_cast<double>(n)));
}

// Immutable description of a basic WTA network: n inputs wired one-to-one to
// n outputs (weight w_x), output self-loops (w_self), and alpha inhibitors,
// each receiving weight w_y[i] from every output and projecting w_z[i] back
// onto every output. All outputs share parameters.
struct NetworkSpec {
    int n = 0;
    int alpha = 0;
    double lambda = 0.0;
    double w_x = 0.0;
    double w_self = 0.0;
    double b_out = 0.0;
    std::vector<double> w_z;
    std::vector<double> w_y;
    std::vector<double> b_z;
    std::string provenance;

    bool operator==(const NetworkSpec&) const = default;
};

inline void validate_spec(const NetworkSpec& s, double noise_c = kNoiseConstant) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("NetworkSpec: " + msg); };

    if (s.n < 1) fail("n must be positive");
    if (s.alpha < 0) fail("alpha must be non-negative");
    if (static_cast<int>(s.w_z.size()) != s.alpha) fail("w_z length must equal alpha");
    if (static_cast<int>(s.w_y.size()) != s.alpha) fail("w_y length must equal alpha");
    if (static_cast<int>(s.b_z.size()) != s.alpha) fail("b_z length must equal alpha");
    if (!std::isfinite(s.lambda) || s.lambda <= 0.0) fail("lambda must be positive and finite");
    if (!std::isfinite(s.w_x) || s.w_x <= 0.0) fail("w_x must be positive");
    if (!std::isfinite(s.w_self) || s.w_self <= 0.0) fail("w_self must be positive");
    if (!std::isfinite(s.b_out)) fail("b_out must be finite");

    auto check_magnitude = [&](double v, const char* name) {
        if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
        if (std::abs(v) > kMaxWeightMagnitude) {
            fail(std::string(name) + " exceeds the 1e6 magnitude bound");
        }
    };
    check_magnitude(s.w_x, "w_x");
    check_magnitude(s.w_self, "w_self");
    check_magnitude(s.b_out, "b_out");

    for (int i = 0; i < s.alpha; ++i) {
        check_magnitude(s.w_z[i], "w_z");
        check_magnitude(s.w_y[i], "w_y");
        check_magnitude(s.b_z[i], "b_z");
        if (s.w_z[i] > 0.0) fail("w_z entries must be <= 0 (inhibitory)");
        if (s.w_y[i] < 0.0) fail("w_y entries must be >= 0 (excitatory)");
    }

    // Quiet-network floor. log2(1) = 0 makes the bound vacuous at n = 1.
    const double floor = noise_c * s.lambda * std::log2(static_cast<double>(s.n));
    if (s.b_out < floor) fail("b_out below the quiet-network bias floor");
    for (int i = 0; i < s.alpha; ++i) {
        if (s.b_z[i] < floor) fail("b_z[" + std::to_string(i) + "] below the quiet-network bias floor");
    }
}

inline nlohmann::json spec_to_json(const NetworkSpec& s) {
    return nlohmann::json{
        {"n", s.n},
        {"alpha", s.alpha},
        {"lambda", s.lambda},
        {"w_x", s.w_x},
        {"w_self", s.w_self},
        {"b_out", s.b_out},
        {"w_z", s.w_z},
        {"w_y", s.w_y},
        {"b_z", s.b_z},
        {"provenance", s.provenance},
    };
}

inline NetworkSpec spec_from_json(const nlohmann::json& j) {
    NetworkSpec s;
    try {
        s.n = j.at("n").get<int>();
        s.alpha = j.at("alpha").get<int>();
        s.lambda = j.at("lambda").get<double>();
        s.w_x = j.at("w_x").get<double>();
        s.w_self = j.at("w_self").get<double>();
        s.b_out = j.at("b_out").get<double>();
        s.w_z = j.at("w_z").get<std::vector<double>>();
        s.w_y = j.at("w_y").get<std::vector<double>>();
        s.b_z = j.at("b_z").get<std::vector<double>>();
        s.provenance = j.at("provenance").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("NetworkSpec: malformed JSON: ") + e.what());
    }
    validate_spec(s);
    return s;
}

inline std::string spec_to_string(const NetworkSpec& s) { return spec_to_json(s).dump(2) + "\n"; }

inline void save_spec(const NetworkSpec& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_spec: cannot open " + path);
    out << spec_to_string(s);
}

inline NetworkSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_spec: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("load_spec: parse error: ") + e.what());
    }
    return spec_from_json(j);
}

}  // namespace wta
