#pragma once

// Two-way assisted quantum-capacity upper bound of the thermal-loss channel
// seen by a transducer, per frequency and integrated over a Lorentzian
// efficiency profile.
//
// Units: the integrated capacity is in qubits/s. The efficiency profile is
// eta(f) = eta / (1 + (f / B)^2) over ordinary detuning f in Hz, so the
// integral runs over f and B is the half width at half maximum in Hz. With
// this convention the small-efficiency limit is exactly pi * Theta / ln 2 *
// (1 - N + N ln N) with Theta = eta * B * D in Hz.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eot {

struct ChannelSpec {
    double eta = 0.0;
    double n_add = 0.0;
    double bandwidth_hz = 1.0;
    double duty = 1.0;

    double throughput() const { return eta * bandwidth_hz * duty; }
    bool quantum_enabled() const { return n_add < 1.0; }
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-frequency bound c_ub(eta, N_add) in qubits per channel use.
/// eta must lie in [0, 1); N_add >= 1 gives 0.
double cap_ub_point(double eta, double n_add);

/// Closed-form integral of c_ub over the Lorentzian profile, qubits/s.
/// Returns 0 for N_add >= 1 or eta == 0. At eta == 1 the analytic limit
/// (2 pi Theta / ln 2) (1 - sqrt(N_add))^2 is used.
double cap_integrated_closed(const ChannelSpec& spec);

/// Same integral by adaptive Gauss-Kronrod quadrature of cap_ub_point. The
/// profile is truncated where eta(f) < 1e-8 eta and the remaining tail is
/// added in its linear-response form. `n_points` (>= 64) sets the initial
/// number of panels.
double cap_integrated_quadrature(const ChannelSpec& spec, std::size_t n_points = 64);

/// Small-efficiency approximation (pi Theta / ln 2)(1 - N + N ln N).
/// Returns 0 for N_add >= 1.
double cap_small_eta(double n_add, double throughput_hz);

enum class ContourForm { SmallEta, ClosedFixedEta };

struct ContourGrid {
    double throughput_min_hz = 1e-2;
    double throughput_max_hz = 1e6;
    double n_add_min = 1e-3;
    double n_add_max = 0.999;
    std::size_t n_add_samples = 200;
    ContourForm form = ContourForm::SmallEta;
    double eta = 0.0;   ///< fixed efficiency for ClosedFixedEta
    double duty = 1.0;  ///< fixed duty for ClosedFixedEta
};

struct ContourLine {
    double level = 0.0;
    std::vector<std::pair<double, double>> points;  ///< (throughput_hz, n_add), n_add ascending
};

/// Capacity as a function of throughput and N_add under the grid's form.
double capacity_at(const ContourGrid& grid, double throughput_hz, double n_add);

/// Iso-capacity polylines in the (throughput, N_add) plane. A level with no
/// crossing inside the grid yields an empty line.
std::vector<ContourLine> capacity_contours(const std::vector<double>& levels,
                                           const ContourGrid& grid);

}  // namespace eot
