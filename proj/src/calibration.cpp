#include "eot/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eot {

std::string to_string(ReadoutMethod m) {
    return m == ReadoutMethod::Microwave ? "microwave" : "optomechanical";
}

ReadoutMethod parse_readout_method(const std::string& text) {
    if (text == "microwave") return ReadoutMethod::Microwave;
    if (text == "optomechanical") return ReadoutMethod::Optomechanical;
    throw std::invalid_argument("unknown readout method '" + text + "'");
}

double OccupancyFit::a_e_sigma() const { return std::sqrt(covariance[0]); }
double OccupancyFit::b_e_sigma() const { return std::sqrt(covariance[3]); }

OccupancyFit fit_occupancy(const std::vector<OccupancyRecord>& records, Weighting weighting) {
    if (records.size() < 2) throw std::invalid_argument("occupancy fit needs at least 2 records");

    // Center the abscissa so the normal equations stay well conditioned.
    double sw = 0.0, swx = 0.0;
    for (const auto& r : records) {
        if (weighting == Weighting::InverseVariance && !(r.sigma > 0.0))
            throw std::invalid_argument("occupancy record sigma must be positive");
        const double w = weighting == Weighting::Unweighted ? 1.0 : 1.0 / (r.sigma * r.sigma);
        sw += w;
        swx += w * r.gamma_e.value();
    }
    const double xbar = swx / sw;

    double sxx = 0.0, sxy = 0.0, sy = 0.0;
    for (const auto& r : records) {
        const double w = weighting == Weighting::Unweighted ? 1.0 : 1.0 / (r.sigma * r.sigma);
        const double dx = r.gamma_e.value() - xbar;
        sxx += w * dx * dx;
        sxy += w * dx * r.n_bar_e;
        sy += w * r.n_bar_e;
    }
    double xscale = 0.0;
    for (const auto& r : records) xscale = std::max(xscale, std::abs(r.gamma_e.value()));
    if (!(sxx > 1e-24 * sw * xscale * xscale))
        throw std::invalid_argument("occupancy fit is rank deficient (all gamma_e equal)");

    OccupancyFit fit;
    fit.n_records = records.size();
    fit.a_e = sxy / sxx;
    const double intercept_centered = sy / sw;
    fit.b_e = intercept_centered - fit.a_e * xbar;

    // Covariance of (a, b) from the centered parametrization.
    const double var_a = 1.0 / sxx;
    const double var_c = 1.0 / sw;
    fit.covariance = {var_a, -xbar * var_a, -xbar * var_a, var_c + xbar * xbar * var_a};

    for (const auto& r : records) {
        const double w = weighting == Weighting::Unweighted ? 1.0 : 1.0 / (r.sigma * r.sigma);
        const double res = r.n_bar_e - (fit.a_e * r.gamma_e.value() + fit.b_e);
        fit.chi_squared += w * res * res;
    }
    return fit;
}

double intracavity_photons(AngularRate gamma_e, AngularRate g_e, AngularRate kappa_e) {
    if (!(g_e.value() > 0.0)) throw std::invalid_argument("g_e must be positive");
    if (!(kappa_e.value() > 0.0)) throw std::invalid_argument("kappa_e must be positive");
    return gamma_e.value() * kappa_e.value() / (4.0 * g_e.value() * g_e.value());
}

AngularRate gamma_e_from_photons(double n_circ, AngularRate g_e, AngularRate kappa_e) {
    if (!(g_e.value() > 0.0)) throw std::invalid_argument("g_e must be positive");
    if (!(kappa_e.value() > 0.0)) throw std::invalid_argument("kappa_e must be positive");
    return AngularRate(4.0 * g_e.value() * g_e.value() * n_circ / kappa_e.value());
}

double xi_e(const ReadoutCalInput& in) {
    const double factors[] = {in.xi_o,          in.eps_cl,          in.ratio_det,
                              in.kappa_e_over_ext, in.kappa_o_ext_over_total, in.gamma_o_over_e,
                              in.gain_o_over_e};
    if (in.xi_o > 1.0 || in.eps_cl > 1.0)
        throw std::invalid_argument("xi_e: xi_o and eps_cl are efficiencies and cannot exceed 1");
    double product = 1.0;
    for (double f : factors) {
        if (!(f > 0.0) || !std::isfinite(f))
            throw std::invalid_argument("xi_e: every calibration factor must be positive and finite");
        product *= f;
    }
    if (!std::isfinite(product)) throw std::domain_error("xi_e: product is not finite");
    return product;
}

}  // namespace eot
