#pragma once

// Frequency-dependent efficiency, output noise and input-referred noise
// spectra on uniform grids, plus Lorentzian fitting with excluded bands.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eot {

class FrequencyGrid {
public:
    FrequencyGrid(double start_hz, double stop_hz, std::size_t n_points);

    double start_hz() const { return start_; }
    double stop_hz() const { return stop_; }
    std::size_t size() const { return n_; }
    double spacing() const { return (stop_ - start_) / static_cast<double>(n_ - 1); }
    double at(std::size_t i) const;

    bool operator==(const FrequencyGrid&) const = default;

private:
    double start_;
    double stop_;
    std::size_t n_;
};

enum class SpectrumKind { Efficiency, OutputNoise, InputReferredNoise };

struct Spectrum {
    FrequencyGrid grid;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::OutputNoise;

    Spectrum(FrequencyGrid g, std::vector<double> v, SpectrumKind k);
    double peak() const;
};

/// Sorted, merged list of [low, high] intervals in Hz.
class ExclusionBands {
public:
    ExclusionBands() = default;
    explicit ExclusionBands(std::vector<std::pair<double, double>> bands);

    /// Parses "low:high".
    static std::pair<double, double> parse_band(const std::string& text);

    bool contains(double f_hz) const;
    bool empty() const { return bands_.empty(); }
    const std::vector<std::pair<double, double>>& bands() const { return bands_; }

private:
    std::vector<std::pair<double, double>> bands_;
};

/// floor + peak_height / (1 + (2 (f - center) / fwhm)^2)
struct LorentzianFit {
    double center_hz = 0.0;
    double fwhm_hz = 1.0;
    double peak_height = 0.0;
    double floor = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;

    double operator()(double f_hz) const;
};

/// eta(f) = eta_peak / (1 + ((f - f_c) / B)^2). `bandwidth_hz` is the
/// half width at half maximum of the efficiency Lorentzian.
Spectrum efficiency_lineshape(double eta_peak, double bandwidth_hz, const FrequencyGrid& grid,
                              double center_hz);

struct InputReferred {
    Spectrum spectrum;
    std::vector<bool> masked;  ///< true where efficiency fell below the threshold
    std::size_t masked_count = 0;
};

/// N_add(f) = N_out(f) / eta(f). Points with eta below `threshold` are masked
/// and hold 0. The default threshold is 1e-3 of the efficiency peak.
InputReferred input_refer(const Spectrum& output_noise, const Spectrum& efficiency,
                          std::optional<double> threshold = std::nullopt);

struct LorentzComponent {
    double center_hz = 0.0;
    double fwhm_hz = 1.0;
    double height = 0.0;  ///< peak height; use from_area() for area-specified components
    double sign = 1.0;

    static LorentzComponent from_area(double center_hz, double fwhm_hz, double area, double sign = 1.0);
    double area() const;
};

struct SynthResult {
    Spectrum spectrum;
    std::size_t clamped_points = 0;  ///< points raised to zero
};

/// Sum of signed Lorentzian components on a constant floor, clamped at zero.
SynthResult synth_output_noise(const std::vector<LorentzComponent>& components, double floor,
                               const FrequencyGrid& grid);

struct FitOptions {
    double gradient_tolerance = 1e-9;
    int max_iterations = 500;
};

/// Damped least-squares fit of floor + Lorentzian to the points outside
/// `exclude`. Without `init` the start point comes from the data peak and its
/// half-height crossings. Non-convergence is reported through `converged`.
LorentzianFit fit_lorentzian(const Spectrum& spectrum, const ExclusionBands& exclude,
                             std::optional<LorentzianFit> init = std::nullopt,
                             const FitOptions& options = {});

/// Efficiency-weighted mean of n_add over the unexcluded points, trapezoidal rule.
double averaged_added_noise(const Spectrum& n_add, const Spectrum& efficiency,
                            const ExclusionBands& exclude);

}  // namespace eot
