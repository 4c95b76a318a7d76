#pragma once

// Circuit-occupancy fits and the microwave readout-efficiency calibration.

#include "eot/core.hpp"

#include <array>
#include <string>
#include <vector>

namespace eot {

enum class ReadoutMethod { Microwave, Optomechanical };

std::string to_string(ReadoutMethod m);
ReadoutMethod parse_readout_method(const std::string& text);

struct OccupancyRecord {
    AngularRate gamma_e;
    double n_bar_e = 0.0;
    double sigma = 1.0;  ///< 1-sigma uncertainty, required
    ReadoutMethod method = ReadoutMethod::Microwave;
};

enum class Weighting { InverseVariance, Unweighted };

struct OccupancyFit {
    double a_e = 0.0;  ///< slope in seconds (per rad/s)
    double b_e = 0.0;
    /// Covariance of (a_e, b_e), row-major. Under Unweighted this is the
    /// unit-variance covariance (X^T X)^-1.
    std::array<double, 4> covariance{};
    double chi_squared = 0.0;
    std::size_t n_records = 0;

    double a_e_sigma() const;
    double b_e_sigma() const;
    double a_e_2pi_per_hz() const { return a_e * kTwoPi; }
    double a_e_2pi_per_hz_sigma() const { return a_e_sigma() * kTwoPi; }
};

/// Weighted least-squares line n_bar_e = a_e Gamma_e + b_e (weights 1/sigma^2).
/// Needs two or more records with at least two distinct Gamma_e.
OccupancyFit fit_occupancy(const std::vector<OccupancyRecord>& records,
                           Weighting weighting = Weighting::InverseVariance);

/// Microwave intracavity photon number n_circ = Gamma_e kappa_e / (4 g_e^2).
double intracavity_photons(AngularRate gamma_e, AngularRate g_e, AngularRate kappa_e);
/// Inverse of intracavity_photons.
AngularRate gamma_e_from_photons(double n_circ, AngularRate g_e, AngularRate kappa_e);

struct ReadoutCalInput {
    double xi_o = 1.0;
    double eps_cl = 1.0;
    double ratio_det = 1.0;            ///< N_det,e(omega_s) / N_det,o(omega_s)
    double kappa_e_over_ext = 1.0;     ///< kappa_e / kappa_e,ext
    double kappa_o_ext_over_total = 1.0;  ///< kappa_o,ext / kappa_o
    double gamma_o_over_e = 1.0;       ///< Gamma_o / Gamma_e
    double gain_o_over_e = 1.0;        ///< A_o / A_e
    double stiff_mode_hz = 1.275e6;    ///< label only
};

/// Product of the seven calibration factors.
double xi_e(const ReadoutCalInput& input);

}  // namespace eot
