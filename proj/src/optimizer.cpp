#include "eot/optimizer.hpp"

#include <cmath>
#include <limits>

namespace eot {

SweepVariable parse_sweep_variable(const std::string& text) {
    if (text == "gamma-e" || text == "gamma_e") return SweepVariable::GammaE;
    if (text == "gamma-o" || text == "gamma_o") return SweepVariable::GammaO;
    if (text == "both") return SweepVariable::Both;
    throw std::invalid_argument("unknown sweep variable '" + text + "' (gamma-e, gamma-o, both)");
}

std::string to_string(OptimumKind k) {
    switch (k) {
        case OptimumKind::Interior: return "interior";
        case OptimumKind::LowerBoundary: return "lower-boundary";
        case OptimumKind::UpperBoundary: return "upper-boundary";
        case OptimumKind::Flat: return "flat";
    }
    return "unknown";
}

TradeoffPoint evaluate_point(NoiseModelKind model, const DeviceParams& params,
                             const NoiseEnvironment& env, const OperatingPoint& op) {
    TradeoffPoint pt;
    pt.op = op;
    try {
        pt.budget = evaluate(model, params, op, env);
        pt.n_add_total = pt.budget.total;
        pt.efficiency = apparent_efficiency(params, op);
        pt.throughput_hz = throughput(pt.efficiency, bandwidth_hz(params, op), op.duty);
    } catch (const std::exception& e) {
        pt.error = e.what();
    }
    return pt;
}

namespace {

std::vector<double> log_samples(AngularRate low, AngularRate high, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sweep needs at least one sample");
    if (!(low.value() > 0.0)) throw std::invalid_argument("sweep range must be positive");
    if (n == 1) return {low.value()};
    if (!(high > low)) throw std::invalid_argument("sweep range needs low < high");
    std::vector<double> out(n);
    const double a = std::log(low.value());
    const double b = std::log(high.value());
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = low.value();
    out.back() = high.value();
    return out;
}

}  // namespace

std::vector<TradeoffPoint> sweep(const SweepSpec& spec, const DeviceParams& params,
                                 const NoiseEnvironment& env) {
    std::vector<TradeoffPoint> out;
    auto eval = [&](double ge, double go) {
        OperatingPoint op{AngularRate(ge), AngularRate(go), spec.duty};
        out.push_back(evaluate_point(spec.model, params, env, op));
    };
    switch (spec.variable) {
        case SweepVariable::GammaE:
            for (double ge : log_samples(spec.low, spec.high, spec.n_samples))
                eval(ge, spec.fixed_gamma_o.value());
            break;
        case SweepVariable::GammaO:
            for (double go : log_samples(spec.low, spec.high, spec.n_samples))
                eval(spec.fixed_gamma_e.value(), go);
            break;
        case SweepVariable::Both: {
            const auto ges = log_samples(spec.low, spec.high, spec.n_samples);
            const auto gos = log_samples(spec.low_o, spec.high_o, spec.n_samples);
            for (double go : gos)
                for (double ge : ges) eval(ge, go);
            break;
        }
    }
    return out;
}

namespace {

double objective(NoiseModelKind model, const DeviceParams& params, const NoiseEnvironment& env,
                 double gamma_e, double gamma_o) {
    try {
        const NoiseBudget b =
            evaluate(model, params, OperatingPoint{AngularRate(gamma_e), AngularRate(gamma_o), 1.0}, env);
        return b.total;
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

void check_options(const SearchOptions& o) {
    if (!(o.gamma_low.value() > 0.0 && o.gamma_high > o.gamma_low))
        throw std::invalid_argument("gamma search range must be positive and increasing");
    if (!(o.ratio_low > 0.0 && o.ratio_high > o.ratio_low))
        throw std::invalid_argument("ratio search range must be positive and increasing");
}

}  // namespace

OptimizeResult optimize_up(const DeviceParams& params, const NoiseEnvironment& env,
                           AngularRate gamma_o_fixed, NoiseModelKind model,
                           const SearchOptions& options) {
    check_options(options);
    if (direction_of(model) != Direction::Up)
        throw std::invalid_argument("optimize_up needs an upconversion model");
    const double go = gamma_o_fixed.value();
    auto f = [&](double log_ge) { return objective(model, params, env, std::exp(log_ge), go); };
    const ScalarMinimum m = minimize_scalar(f, std::log(options.gamma_low.value()),
                                            std::log(options.gamma_high.value()),
                                            options.coarse_samples, options.rel_tol);
    OptimizeResult r;
    r.op = OperatingPoint{AngularRate(std::exp(m.x)), gamma_o_fixed, 1.0};
    r.budget = evaluate(model, params, r.op, env);
    r.gamma_kind = m.kind;
    r.ratio_kind = OptimumKind::Interior;
    r.evaluations = m.evaluations;
    return r;
}

OptimizeResult optimize_down(const DeviceParams& params, const NoiseEnvironment& env,
                             NoiseModelKind model, const SearchOptions& options) {
    check_options(options);
    if (direction_of(model) != Direction::Down)
        throw std::invalid_argument("optimize_down needs a downconversion model");
    const double log_r_lo = std::log(options.ratio_low);
    const double log_r_hi = std::log(options.ratio_high);

    int evaluations = 0;
    auto inner = [&](double log_go) {
        const double go = std::exp(log_go);
        auto g = [&](double log_r) { return objective(model, params, env, go * std::exp(log_r), go); };
        ScalarMinimum m = minimize_scalar(g, log_r_lo, log_r_hi, options.coarse_samples, options.rel_tol);
        evaluations += m.evaluations;
        return m;
    };
    auto outer_f = [&](double log_go) { return inner(log_go).value; };
    const ScalarMinimum outer = minimize_scalar(outer_f, std::log(options.gamma_low.value()),
                                                std::log(options.gamma_high.value()),
                                                options.coarse_samples, options.rel_tol);
    const ScalarMinimum ratio = inner(outer.x);

    OptimizeResult r;
    const double go = std::exp(outer.x);
    r.op = OperatingPoint{AngularRate(go * std::exp(ratio.x)), AngularRate(go), 1.0};
    r.budget = evaluate(model, params, r.op, env);
    r.gamma_kind = outer.kind;
    r.ratio_kind = ratio.kind;
    r.evaluations = evaluations;
    return r;
}

}  // namespace eot
