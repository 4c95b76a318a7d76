#include "eot/core.hpp"

#include <cmath>

namespace eot {

std::string to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

Direction parse_direction(const std::string& text) {
    if (text == "up" || text == "Up") return Direction::Up;
    if (text == "down" || text == "Down") return Direction::Down;
    throw std::invalid_argument("unknown direction '" + text + "' (expected up or down)");
}

double sideband_parameter(AngularRate kappa, AngularRate omega_m) {
    if (omega_m.value() <= 0.0) throw std::invalid_argument("omega_m must be positive");
    const double r = kappa / (omega_m * 4.0);
    return r * r;
}

double default_backaction_limit(AngularRate kappa, AngularRate omega_m) {
    return sideband_parameter(kappa, omega_m);
}

double default_sideband_gain(AngularRate kappa, AngularRate omega_m) {
    const double s = sideband_parameter(kappa, omega_m);
    if (s >= 1.0) throw std::invalid_argument("cavity not sideband resolved: kappa >= 4 omega_m");
    return 1.0 / (1.0 - s);
}

NoiseBudget make_budget(Direction d, double motional, double electromagnetic, double correlation) {
    NoiseBudget b;
    b.direction = d;
    b.motional = motional;
    b.electromagnetic = electromagnetic;
    b.correlation = correlation;
    b.total = motional + electromagnetic - correlation;
    return b;
}

namespace {

void check_unit_interval(std::vector<std::string>& out, const char* name, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        out.push_back(std::string(name) + " outside [0, 1]");
}

void check_rate(std::vector<std::string>& out, const char* name, AngularRate r) {
    if (!std::isfinite(r.value()))
        out.push_back(std::string(name) + " is not finite");
    else if (r.value() < 0.0)
        out.push_back(std::string(name) + " is negative");
}

}  // namespace

ValidationReport validate_device(const DeviceParams& p) {
    ValidationReport rep;
    auto& v = rep.violations;
    check_rate(v, "omega_m", p.omega_m);
    if (std::isfinite(p.omega_m.value()) && p.omega_m.value() <= 0.0)
        v.push_back("omega_m must be positive");
    check_rate(v, "gamma_m", p.gamma_m);
    check_rate(v, "kappa_e", p.kappa_e);
    check_rate(v, "kappa_e_ext", p.kappa_e_ext);
    check_rate(v, "kappa_o", p.kappa_o);
    check_rate(v, "kappa_o_ext", p.kappa_o_ext);
    if (p.kappa_e_ext > p.kappa_e) v.push_back("kappa_e: external exceeds total linewidth");
    if (p.kappa_o_ext > p.kappa_o) v.push_back("kappa_o: external exceeds total linewidth");
    check_unit_interval(v, "eta_max", p.eta_max);
    check_unit_interval(v, "eps_mode", p.eps_mode);
    check_unit_interval(v, "eps_pl", p.eps_pl);
    check_unit_interval(v, "eps_cl", p.eps_cl);
    check_unit_interval(v, "eps_e", p.eps_e);
    if (!std::isfinite(p.gain_e) || p.gain_e < 1.0) v.push_back("gain_e: gain below unity");
    if (!std::isfinite(p.gain_o) || p.gain_o < 1.0) v.push_back("gain_o: gain below unity");
    if (!std::isfinite(p.n_min_e) || p.n_min_e < 0.0) v.push_back("n_min_e is negative or not finite");
    if (!std::isfinite(p.n_min_o) || p.n_min_o < 0.0) v.push_back("n_min_o is negative or not finite");
    return rep;
}

ValidationReport validate_environment(const NoiseEnvironment& env) {
    ValidationReport rep;
    auto& v = rep.violations;
    check_rate(v, "n_th_gamma_m", env.n_th_gamma_m);
    check_rate(v, "n_lock_gamma_lock", env.n_lock_gamma_lock);
    if (!std::isfinite(env.a_e)) v.push_back("a_e is not finite");
    if (!std::isfinite(env.b_e) || env.b_e < 0.0) v.push_back("b_e: occupancy intercept negative");
    if (!std::isfinite(env.n_bar_o) || env.n_bar_o < 0.0) v.push_back("n_bar_o is negative or not finite");
    return rep;
}

ValidationReport validate_operating_point(const OperatingPoint& op) {
    ValidationReport rep;
    auto& v = rep.violations;
    if (!(op.gamma_e.value() > 0.0) || !std::isfinite(op.gamma_e.value()))
        v.push_back("gamma_e must be positive");
    if (!(op.gamma_o.value() > 0.0) || !std::isfinite(op.gamma_o.value()))
        v.push_back("gamma_o must be positive");
    if (!(op.duty > 0.0 && op.duty <= 1.0)) v.push_back("duty cycle outside (0, 1]");
    return rep;
}

AngularRate total_damping(const DeviceParams& params, const OperatingPoint& op) {
    return op.gamma_e + op.gamma_o + params.gamma_m;
}

double bandwidth_hz(const DeviceParams& params, const OperatingPoint& op) {
    return total_damping(params, op).hz();
}

double throughput(double eta, double bandwidth_hz, double duty) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("throughput: eta outside [0, 1]");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        throw std::invalid_argument("throughput: bandwidth must be positive");
    if (!(duty > 0.0 && duty <= 1.0)) throw std::invalid_argument("throughput: duty outside (0, 1]");
    return eta * bandwidth_hz * duty;
}

double apparent_efficiency(const DeviceParams& params, const OperatingPoint& op) {
    const double gt = total_damping(params, op).value();
    const double ge = op.gamma_e.value();
    const double go = op.gamma_o.value();
    return params.gain() * params.eta_max * 4.0 * ge * go / (gt * gt);
}

}  // namespace eot
