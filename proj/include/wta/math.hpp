#pragma once

#include <cmath>
#include <stdexcept>

namespace wta {

// Firing probability of a unit with membrane potential `pot` at temperature
// `lambda`: 1 / (1 + exp(-pot / lambda)).
//
// Evaluated branch-wise so that |pot|/lambda far beyond the exp() range
// saturates cleanly to 0 or 1 instead of producing inf/NaN.
inline double sigmoid_prob(double pot, double lambda) {
    if (!std::isfinite(pot)) {
        throw std::invalid_argument("sigmoid_prob: potential must be finite");
    }
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw std::invalid_argument("sigmoid_prob: lambda must be positive and finite");
    }
    const double a = pot / lambda;
    if (a <= 0.0) {
        return 1.0 / (1.0 + std::exp(-a));  // exp(-a) -> +inf gives exactly 0
    }
    return 1.0 - 1.0 / (1.0 + std::exp(a));
}

// Weight increment dw such that a unit sitting at `existing_potential` fires
// with probability exactly `target_p` once dw is added:
//
//   dw = lambda * logit(target_p) - existing_potential
//
// Closed form, no iteration. logit is computed as log(p) - log1p(-p) to keep
// full precision near both ends of (0,1).
inline double solve_weight_for_target(double existing_potential, double target_p,
                                      double lambda) {
    if (!(target_p > 0.0 && target_p < 1.0)) {
        throw std::invalid_argument(
            "solve_weight_for_target: target probability must lie strictly in (0,1)");
    }
    if (!std::isfinite(existing_potential)) {
        throw std::invalid_argument("solve_weight_for_target: potential must be finite");
    }
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw std::invalid_argument("solve_weight_for_target: lambda must be positive");
    }
    const double logit = std::log(target_p) - std::log1p(-target_p);
    return lambda * logit - existing_potential;
}

}  // namespace wta
