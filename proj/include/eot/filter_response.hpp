#pragma once

// Time-domain behaviour of a Lorentzian output filter with brick-wall
// notches, for fast single-photon pulses sent every t_rep.
//
// The amplitude transfer function is (Gamma_T / 2) / (Gamma_T / 2 + i omega),
// whose power response is a Lorentzian of FWHM Gamma_T. Notches zero it
// inside each band. The time response comes from an inverse DFT and is
// normalized so the un-notched filter transmits unit energy.

#include "eot/spectra.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace eot {

struct FilterSpec {
    double linewidth_hz = 1.0;  ///< Gamma_T / 2pi, FWHM of the power Lorentzian
    double center_hz = 0.0;
    ExclusionBands notches;     ///< absolute frequencies in Hz
};

struct DftSettings {
    double span_hz = 0.0;            ///< 0 selects 1e4 * linewidth
    std::size_t n_points = 1u << 22;
};

class FilterResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ImpulseResponse {
    double dt = 0.0;
    /// |h(t)|^2 dt per sample in natural (FFT) order: index k is t = k dt for
    /// k < n / 2 and t = (k - n) dt above.
    std::vector<double> energy;
    double total_energy = 0.0;      ///< sum of `energy`
    double frequency_energy = 0.0;  ///< same quantity accumulated on the frequency grid

    double time_at(std::size_t k) const;
};

/// Builds the notched transfer function on `settings.n_points` frequency bins
/// spanning `settings.span_hz`, and inverse-transforms it. Throws
/// FilterResolutionError when the span is below 50 linewidths, n_points is
/// not a power of two >= 2^14, a notch covers fewer than 16 bins, or the
/// un-notched exponential has not decayed within half the time window.
ImpulseResponse impulse_response(const FilterSpec& spec, const DftSettings& settings = {});

/// Energy transmitted through the notched filter relative to the un-notched
/// one, from the frequency grid alone (no transform).
double notch_transmission(const FilterSpec& spec, const DftSettings& settings = {});

struct FilterReport {
    double eta_notch = 0.0;
    double eta_temporal = 0.0;
    double eta_total = 0.0;
    double tail_noise_photons = 0.0;  ///< sum over all prior pulses
    double tail_noise_one_pulse = 0.0;  ///< contribution of the previous pulse only
    double pre_window_energy = 0.0;   ///< notched energy at t < 0 (acausal ringing)
    double t_rep_s = 0.0;
};

FilterReport analyze_filter(const FilterSpec& spec, double t_rep_s, const DftSettings& settings = {});

/// Preset notch layout: bands at +5.0 kHz and -9.0 kHz from the center with
/// widths 1.2 kHz and 0.8 kHz, every width scaled by `width_scale`.
ExclusionBands preset_notches(double center_hz, double width_scale);

struct PresetTuning {
    FilterSpec spec;
    double width_scale = 1.0;
};

/// Preset filter with Gamma_T / 2pi = 21.7 kHz and the notch widths rescaled
/// (one scalar, bisection) until the notch transmission hits `target_eta_notch`.
PresetTuning tune_preset(double target_eta_notch = 0.94, const DftSettings& settings = {});

}  // namespace eot
