#pragma once

// Noise-optimal pump operating points and throughput / added-noise tradeoff
// sweeps. All searches run on log-transformed rates.

#include "eot/core.hpp"
#include "eot/noise_model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace eot {

enum class SweepVariable { GammaE, GammaO, Both };

SweepVariable parse_sweep_variable(const std::string& text);

struct SweepSpec {
    SweepVariable variable = SweepVariable::GammaE;
    AngularRate low;          ///< range of the swept rate (Gamma_e for Both)
    AngularRate high;
    AngularRate low_o;        ///< Gamma_o range, Both only
    AngularRate high_o;
    std::size_t n_samples = 2;
    AngularRate fixed_gamma_e;
    AngularRate fixed_gamma_o;
    double duty = 1.0;
    NoiseModelKind model = NoiseModelKind::LossyUp;
};

struct TradeoffPoint {
    OperatingPoint op;
    double efficiency = 0.0;
    double throughput_hz = 0.0;
    double n_add_total = 0.0;
    NoiseBudget budget;
    std::optional<std::string> error;  ///< set when the model failed at this point
};

/// Log-spaced samples (n_samples == 1 evaluates `low` only). Both sweeps a
/// Gamma_e x Gamma_o grid, Gamma_e varying fastest. Model failures are
/// recorded per point.
std::vector<TradeoffPoint> sweep(const SweepSpec& spec, const DeviceParams& params,
                                 const NoiseEnvironment& env);

/// Evaluates one point the same way sweep() does.
TradeoffPoint evaluate_point(NoiseModelKind model, const DeviceParams& params,
                             const NoiseEnvironment& env, const OperatingPoint& op);

struct SearchOptions {
    AngularRate gamma_low = AngularRate::from_hz(10.0);
    AngularRate gamma_high = AngularRate::from_hz(1e7);
    double ratio_low = 1e-3;
    double ratio_high = 1e3;
    std::size_t coarse_samples = 64;
    double rel_tol = 1e-6;
};

enum class OptimumKind { Interior, LowerBoundary, UpperBoundary, Flat };

std::string to_string(OptimumKind k);

struct OptimizeResult {
    OperatingPoint op;
    NoiseBudget budget;
    OptimumKind gamma_kind = OptimumKind::Interior;  ///< Gamma_e (up) or Gamma_o (down)
    OptimumKind ratio_kind = OptimumKind::Interior;  ///< Gamma_e / Gamma_o, down only
    int evaluations = 0;
};

/// Minimizes upconversion added noise over Gamma_e with Gamma_o fixed.
OptimizeResult optimize_up(const DeviceParams& params, const NoiseEnvironment& env,
                           AngularRate gamma_o_fixed,
                           NoiseModelKind model = NoiseModelKind::LossyUp,
                           const SearchOptions& options = {});

/// Minimizes downconversion added noise over Gamma_o (outer) and the ratio
/// Gamma_e / Gamma_o (inner).
OptimizeResult optimize_down(const DeviceParams& params, const NoiseEnvironment& env,
                             NoiseModelKind model = NoiseModelKind::LossyDown,
                             const SearchOptions& options = {});

struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
    OptimumKind kind = OptimumKind::Interior;
    int evaluations = 0;
};

/// Coarse scan over [lo, hi] followed by golden-section refinement to an
/// absolute bracket width `tol`. Ties resolve to the smallest x.
template <class F>
ScalarMinimum minimize_scalar(const F& f, double lo, double hi, std::size_t coarse, double tol);

}  // namespace eot

#include "eot/detail/golden_section.hpp"
