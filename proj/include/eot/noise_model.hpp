#pragma once

// On-resonance added-noise budgets for a doubly-parametric transducer.
//
// Ideal forms assume lossless, sideband-resolved cavities with perfect mode
// matching. Lossy forms add Stokes gain, cavity extraction ratios, mode
// matching, the efficiency cap and lock-beam backaction on the mechanics.
//
// Every evaluator returns an itemized NoiseBudget (motional, electromagnetic,
// correlation) whose total is the signed sum. Any non-finite term raises
// NonFiniteTerm naming the term.

#include "eot/core.hpp"

#include <stdexcept>
#include <string>

namespace eot {

enum class NoiseModelKind { IdealUp, IdealDown, IdealDownCombined, LossyDown, LossyUp };

std::string to_string(NoiseModelKind k);
NoiseModelKind parse_model_kind(const std::string& text, Direction d);
Direction direction_of(NoiseModelKind k);

class NonFiniteTerm : public std::runtime_error {
public:
    explicit NonFiniteTerm(const std::string& term)
        : std::runtime_error("non-finite value in noise term '" + term + "'"), term_(term) {}
    const std::string& term() const { return term_; }

private:
    std::string term_;
};

/// Circuit occupancy n_bar_e = a_e Gamma_e + b_e. Throws when the linear model
/// goes negative for this Gamma_e.
double n_bar_e(const NoiseEnvironment& env, AngularRate gamma_e);

NoiseBudget n_add_up_ideal(const DeviceParams& params, const OperatingPoint& op,
                           const NoiseEnvironment& env);
NoiseBudget n_add_down_ideal(const DeviceParams& params, const OperatingPoint& op,
                             const NoiseEnvironment& env);

/// Downconversion with Gamma_T taken as Gamma_e + Gamma_o so the last three
/// terms collapse. gamma_m of `params` is ignored by construction.
NoiseBudget n_add_down_combined(const DeviceParams& params, const OperatingPoint& op,
                                const NoiseEnvironment& env);

NoiseBudget n_add_down_lossy(const DeviceParams& params, const OperatingPoint& op,
                             const NoiseEnvironment& env);

/// Motional term only; the optical occupancy is taken as negligible.
NoiseBudget n_add_up_lossy(const DeviceParams& params, const OperatingPoint& op,
                           const NoiseEnvironment& env);

NoiseBudget evaluate(NoiseModelKind kind, const DeviceParams& params, const OperatingPoint& op,
                     const NoiseEnvironment& env);

}  // namespace eot
