#pragma once

// Domain types shared by every model in the library.
//
// Rates (loss, coupling, resonance) are stored internally as angular
// frequencies in rad/s. Conversion to and from ordinary frequency (Hz) only
// happens at the boundary: config loading, CLI flags and CSV output.

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace eot {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angular frequency in rad/s.
class AngularRate {
public:
    constexpr AngularRate() = default;
    constexpr explicit AngularRate(double rad_per_s) : value_(rad_per_s) {}

    static constexpr AngularRate from_hz(double hz) { return AngularRate(kTwoPi * hz); }

    constexpr double value() const { return value_; }
    constexpr double hz() const { return value_ / kTwoPi; }

    constexpr AngularRate operator+(AngularRate o) const { return AngularRate(value_ + o.value_); }
    constexpr AngularRate operator-(AngularRate o) const { return AngularRate(value_ - o.value_); }
    constexpr AngularRate operator*(double s) const { return AngularRate(value_ * s); }
    constexpr double operator/(AngularRate o) const { return value_ / o.value_; }
    constexpr auto operator<=>(const AngularRate&) const = default;

private:
    double value_ = 0.0;
};

enum class Direction { Up, Down };

std::string to_string(Direction d);
Direction parse_direction(const std::string& text);

/// Fixed physical parameters of one transducer.
struct DeviceParams {
    AngularRate omega_m;      ///< mechanical resonance
    AngularRate gamma_m;      ///< intrinsic mechanical loss
    AngularRate kappa_e;      ///< microwave total linewidth
    AngularRate kappa_e_ext;  ///< microwave external coupling
    AngularRate kappa_o;      ///< optical total linewidth
    AngularRate kappa_o_ext;  ///< optical external coupling
    double eta_max = 1.0;     ///< peak efficiency cap
    double eps_mode = 1.0;    ///< optical mode-matching factor of the lossy model
    double eps_pl = 1.0;      ///< pump / local-oscillator mode matching
    double eps_cl = 1.0;      ///< cavity / local-oscillator mode matching
    double eps_e = 1.0;       ///< microwave-side extraction factor (lossy upconversion)
    double gain_e = 1.0;      ///< Stokes-sideband gain, electromechanical
    double gain_o = 1.0;      ///< Stokes-sideband gain, optomechanical
    double n_min_e = 0.0;     ///< electromechanical backaction limit
    double n_min_o = 0.0;     ///< optomechanical backaction limit

    double gain() const { return gain_e * gain_o; }
    double kappa_e_ratio() const { return kappa_e_ext / kappa_e; }
    double kappa_o_ratio() const { return kappa_o_ext / kappa_o; }
};

/// Sideband-resolution parameter (kappa / 4 omega_m)^2.
double sideband_parameter(AngularRate kappa, AngularRate omega_m);
/// Default backaction limit: (kappa / 4 omega_m)^2.
double default_backaction_limit(AngularRate kappa, AngularRate omega_m);
/// Default Stokes gain: 1 / (1 - (kappa / 4 omega_m)^2). Throws if the
/// cavity is not sideband resolved (kappa >= 4 omega_m).
double default_sideband_gain(AngularRate kappa, AngularRate omega_m);

/// Tunable pump-enhanced coupling rates and duty cycle.
struct OperatingPoint {
    AngularRate gamma_e;
    AngularRate gamma_o;
    double duty = 1.0;
};

/// Bath and technical-noise occupancies. The mechanical and lock-beam terms
/// are only ever calibrated as products with their rates, so they are kept
/// as single composite rates.
struct NoiseEnvironment {
    AngularRate n_th_gamma_m;
    AngularRate n_lock_gamma_lock;
    double a_e = 0.0;  ///< slope of n_bar_e vs gamma_e, seconds
    double b_e = 0.0;  ///< intercept, photons
    double n_bar_o = 0.0;

    /// Builds a_e from the tabulated convention a_e * 2pi in 1/Hz.
    static double a_e_from_2pi_per_hz(double a_e_2pi) { return a_e_2pi / kTwoPi; }
    double a_e_2pi_per_hz() const { return a_e * kTwoPi; }
};

struct NoiseBudget {
    double motional = 0.0;
    double electromagnetic = 0.0;
    double correlation = 0.0;  ///< subtracted magnitude
    double total = 0.0;
    Direction direction = Direction::Up;

    /// Negative totals come from inconsistent inputs; they are reported, not clamped.
    bool physical() const { return total >= 0.0; }
};

NoiseBudget make_budget(Direction d, double motional, double electromagnetic, double correlation);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_device(const DeviceParams& params);
ValidationReport validate_environment(const NoiseEnvironment& env);
ValidationReport validate_operating_point(const OperatingPoint& op);

/// Gamma_T = Gamma_e + Gamma_o + gamma_m.
AngularRate total_damping(const DeviceParams& params, const OperatingPoint& op);

/// Transduction bandwidth B = Gamma_T / 2pi, in Hz.
double bandwidth_hz(const DeviceParams& params, const OperatingPoint& op);

/// Efficiency-bandwidth-duty-cycle product, Hz.
double throughput(double eta, double bandwidth_hz, double duty);

/// Apparent efficiency A * eta_M * 4 Gamma_e Gamma_o / Gamma_T^2.
double apparent_efficiency(const DeviceParams& params, const OperatingPoint& op);

}  // namespace eot
