#include "eot/noise_model.hpp"

#include <cmath>

namespace eot {

std::string to_string(NoiseModelKind k) {
    switch (k) {
        case NoiseModelKind::IdealUp: return "ideal-up";
        case NoiseModelKind::IdealDown: return "ideal-down";
        case NoiseModelKind::IdealDownCombined: return "combined-down";
        case NoiseModelKind::LossyDown: return "lossy-down";
        case NoiseModelKind::LossyUp: return "lossy-up";
    }
    return "unknown";
}

NoiseModelKind parse_model_kind(const std::string& text, Direction d) {
    if (text == "ideal") return d == Direction::Up ? NoiseModelKind::IdealUp : NoiseModelKind::IdealDown;
    if (text == "lossy") return d == Direction::Up ? NoiseModelKind::LossyUp : NoiseModelKind::LossyDown;
    if (text == "combined") {
        if (d == Direction::Up) throw std::invalid_argument("combined model exists for downconversion only");
        return NoiseModelKind::IdealDownCombined;
    }
    throw std::invalid_argument("unknown noise model '" + text + "' (expected ideal, combined or lossy)");
}

Direction direction_of(NoiseModelKind k) {
    return (k == NoiseModelKind::IdealUp || k == NoiseModelKind::LossyUp) ? Direction::Up
                                                                          : Direction::Down;
}

namespace {

double finite(double v, const char* term) {
    if (!std::isfinite(v)) throw NonFiniteTerm(term);
    return v;
}

void require_positive(AngularRate r, const char* name) {
    if (!(r.value() > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

double n_bar_e(const NoiseEnvironment& env, AngularRate gamma_e) {
    const double n = env.a_e * gamma_e.value() + env.b_e;
    if (n < 0.0) throw std::domain_error("circuit occupancy model negative at this gamma_e");
    return finite(n, "n_bar_e");
}

NoiseBudget n_add_up_ideal(const DeviceParams& params, const OperatingPoint& op,
                           const NoiseEnvironment& env) {
    require_positive(op.gamma_e, "gamma_e");
    require_positive(op.gamma_o, "gamma_o");
    const double ge = op.gamma_e.value();
    const double go = op.gamma_o.value();
    const double gt = total_damping(params, op).value();
    const double n_em = n_bar_e(env, op.gamma_e) + params.n_min_e;
    const double n_om = env.n_bar_o + params.n_min_o;

    const double motional =
        finite(env.n_th_gamma_m.value() / ge + n_em + n_om * go / ge, "motional");
    const double em = finite(env.n_bar_o * gt * gt / (ge * go), "electromagnetic");
    const double corr = finite(2.0 * env.n_bar_o * gt / ge, "correlation");
    return make_budget(Direction::Up, motional, em, corr);
}

NoiseBudget n_add_down_ideal(const DeviceParams& params, const OperatingPoint& op,
                             const NoiseEnvironment& env) {
    require_positive(op.gamma_e, "gamma_e");
    require_positive(op.gamma_o, "gamma_o");
    const double ge = op.gamma_e.value();
    const double go = op.gamma_o.value();
    const double gt = total_damping(params, op).value();
    const double ne = n_bar_e(env, op.gamma_e);
    const double n_em = ne + params.n_min_e;
    const double n_om = env.n_bar_o + params.n_min_o;

    const double motional =
        finite(env.n_th_gamma_m.value() / go + n_om + n_em * ge / go, "motional");
    const double em = finite(ne * gt * gt / (go * ge), "electromagnetic");
    const double corr = finite(2.0 * ne * gt / go, "correlation");
    return make_budget(Direction::Down, motional, em, corr);
}

NoiseBudget n_add_down_combined(const DeviceParams& params, const OperatingPoint& op,
                                const NoiseEnvironment& env) {
    require_positive(op.gamma_e, "gamma_e");
    require_positive(op.gamma_o, "gamma_o");
    const double ge = op.gamma_e.value();
    const double go = op.gamma_o.value();
    const double ne = n_bar_e(env, op.gamma_e);
    const double n_om = env.n_bar_o + params.n_min_o;

    // The backaction term stays with the motion; the circuit occupancy is
    // what survives of the electromagnetic and correlation terms.
    const double motional = finite(
        env.n_th_gamma_m.value() / go + n_om + params.n_min_e * ge / go, "motional");
    const double em = finite(ne * go / ge, "electromagnetic");
    return make_budget(Direction::Down, motional, em, 0.0);
}

NoiseBudget n_add_down_lossy(const DeviceParams& params, const OperatingPoint& op,
                             const NoiseEnvironment& env) {
    require_positive(op.gamma_e, "gamma_e");
    require_positive(op.gamma_o, "gamma_o");
    require_positive(params.gain_o, "gain_o");
    require_positive(params.gain_e, "gain_e");
    require_positive(params.eps_mode, "eps_mode");
    require_positive(params.eta_max, "eta_max");
    require_positive(params.kappa_o, "kappa_o");
    require_positive(params.kappa_e, "kappa_e");
    require_positive(params.kappa_o_ext, "kappa_o_ext");

    const double ge = op.gamma_e.value();
    const double go = op.gamma_o.value();
    const double gt = total_damping(params, op).value();
    const double ne = n_bar_e(env, op.gamma_e);
    const double n_em = ne + params.n_min_e;
    const double n_om = env.n_bar_o + params.n_min_o;

    // Optical-port extraction: A_o * eps * (kappa_o,ext / kappa_o) * Gamma_o.
    const double extraction = params.gain_o * params.eps_mode * params.kappa_o_ratio() * go;

    const double bath = env.n_th_gamma_m.value() + env.n_lock_gamma_lock.value() + n_om * go +
                        n_em * ge;
    const double motional = finite(bath / extraction, "motional");
    const double em = finite(ne * params.kappa_e_ratio() * gt * gt /
                                 (params.gain() * params.eta_max * ge * go),
                             "electromagnetic");
    const double corr =
        finite(2.0 * ne * gt / (extraction * std::sqrt(params.gain_e)), "correlation");
    return make_budget(Direction::Down, motional, em, corr);
}

NoiseBudget n_add_up_lossy(const DeviceParams& params, const OperatingPoint& op,
                           const NoiseEnvironment& env) {
    require_positive(op.gamma_e, "gamma_e");
    require_positive(op.gamma_o, "gamma_o");
    require_positive(params.gain_e, "gain_e");
    require_positive(params.eps_e, "eps_e");
    require_positive(params.kappa_e, "kappa_e");
    require_positive(params.kappa_e_ext, "kappa_e_ext");

    const double ge = op.gamma_e.value();
    const double go = op.gamma_o.value();
    const double n_em = n_bar_e(env, op.gamma_e) + params.n_min_e;
    const double n_om = env.n_bar_o + params.n_min_o;

    const double extraction = params.gain_e * params.eps_e * params.kappa_e_ratio() * ge;
    const double bath = env.n_th_gamma_m.value() + env.n_lock_gamma_lock.value() + n_em * ge +
                        n_om * go;
    return make_budget(Direction::Up, finite(bath / extraction, "motional"), 0.0, 0.0);
}

NoiseBudget evaluate(NoiseModelKind kind, const DeviceParams& params, const OperatingPoint& op,
                     const NoiseEnvironment& env) {
    switch (kind) {
        case NoiseModelKind::IdealUp: return n_add_up_ideal(params, op, env);
        case NoiseModelKind::IdealDown: return n_add_down_ideal(params, op, env);
        case NoiseModelKind::IdealDownCombined: return n_add_down_combined(params, op, env);
        case NoiseModelKind::LossyDown: return n_add_down_lossy(params, op, env);
        case NoiseModelKind::LossyUp: return n_add_up_lossy(params, op, env);
    }
    throw std::invalid_argument("unknown noise model kind");
}

}  // namespace eot
