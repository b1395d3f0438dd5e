#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wta/dynamics.hpp"
#include "wta/network.hpp"

namespace wta {

// Inhibitor taxonomy, evaluated analytically from the potentials:
//   S  - fires with probability >= 1/log2(n)^(3c) when one output fires
//        (keeps a converged winner in place);
//   C  - not S, but fires with probability >= 1/log2(n)^c when all n outputs
//        fire (drives the firing count down);
//   R  - the rest; never influential on the relevant time scale.
// For each C-inhibitor, k(z) is the smallest count at which its firing
// probability reaches 1/log2(n)^c; outside the critical range
// [k(z)/2, 2 k(z)] it behaves as a near-deterministic threshold gate.
struct InhibitorClassification {
    enum class Label { S, C, R };

    std::vector<Label> labels;
    std::map<int, int> k_of_z;                                // C-inhibitors only
    std::map<int, std::pair<double, double>> critical_range;  // [k/2, 2k]
    double c_used = 0.0;
    // True when 1/log2(n)^(3c) < 1/n: at this size the S band sits below the
    // sigmoid's w.h.p. saturation scale, so the band boundaries lose their
    // asymptotic meaning. Classification is still computed literally.
    bool degenerate_regime = false;
};

inline const char* to_string(InhibitorClassification::Label l) {
    switch (l) {
        case InhibitorClassification::Label::S: return "S";
        case InhibitorClassification::Label::C: return "C";
        case InhibitorClassification::Label::R: return "R";
    }
    return "?";
}

inline InhibitorClassification classify_inhibitors(const NetworkSpec& spec, double c = 4.0) {
    if (!(c >= 4.0)) throw std::invalid_argument("classify_inhibitors: need c >= 4");

    const double log2n = std::log2(static_cast<double>(spec.n));
    const double s_threshold = 1.0 / std::pow(log2n, 3.0 * c);
    const double c_threshold = 1.0 / std::pow(log2n, c);

    InhibitorClassification out;
    out.c_used = c;
    out.degenerate_regime = s_threshold < 1.0 / static_cast<double>(spec.n);
    out.labels.resize(spec.alpha);

    for (int i = 0; i < spec.alpha; ++i) {
        const double p1 = inhibitor_firing_prob(spec, i, 1);
        if (p1 >= s_threshold) {
            out.labels[i] = InhibitorClassification::Label::S;
            continue;
        }
        const double pn = inhibitor_firing_prob(spec, i, spec.n);
        if (pn < c_threshold) {
            out.labels[i] = InhibitorClassification::Label::R;
            continue;
        }
        out.labels[i] = InhibitorClassification::Label::C;
        // Smallest count reaching the C band; firing probability is monotone
        // in the count (w_y >= 0), so binary search.
        int lo = 1, hi = spec.n;
        while (lo < hi) {
            const int mid = lo + (hi - lo) / 2;
            if (inhibitor_firing_prob(spec, i, mid) >= c_threshold) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        out.k_of_z[i] = lo;
        out.critical_range[i] = {lo / 2.0, 2.0 * lo};
    }
    return out;
}

inline nlohmann::json classification_to_json(const InhibitorClassification& c) {
    nlohmann::json labels = nlohmann::json::array();
    for (auto l : c.labels) labels.push_back(to_string(l));
    nlohmann::json k_of_z = nlohmann::json::object();
    for (const auto& [i, k] : c.k_of_z) k_of_z[std::to_string(i)] = k;
    nlohmann::json ranges = nlohmann::json::object();
    for (const auto& [i, r] : c.critical_range) {
        ranges[std::to_string(i)] = nlohmann::json::array({r.first, r.second});
    }
    return nlohmann::json{
        {"labels", labels},
        {"k_of_z", k_of_z},
        {"critical_range", ranges},
        {"c_used", c.c_used},
        {"degenerate_regime", c.degenerate_regime},
    };
}

}  // namespace wta
