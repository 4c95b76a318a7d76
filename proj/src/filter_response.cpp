#include "eot/filter_response.hpp"

#include "eot/core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

namespace eot {

namespace {

constexpr double kPresetLinewidthHz = 21.7e3;

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

struct FftwPlan {
    fftw_plan plan = nullptr;
    explicit FftwPlan(fftw_plan p) : plan(p) {}
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    ~FftwPlan() {
        if (plan) fftw_destroy_plan(plan);
    }
};

struct Grid {
    double span = 0.0;
    double df = 0.0;
    std::size_t n = 0;

    double offset(std::size_t k) const {
        const auto ki = static_cast<double>(k);
        return k < n / 2 ? ki * df : (ki - static_cast<double>(n)) * df;
    }
};

Grid make_grid(const FilterSpec& spec, const DftSettings& settings) {
    if (!(spec.linewidth_hz > 0.0)) throw std::invalid_argument("filter linewidth must be positive");
    Grid g;
    g.n = settings.n_points;
    g.span = settings.span_hz > 0.0 ? settings.span_hz : 1e4 * spec.linewidth_hz;
    g.df = g.span / static_cast<double>(g.n);
    return g;
}

void check_resolution(const FilterSpec& spec, const Grid& g) {
    if (g.n < (1u << 14) || (g.n & (g.n - 1)) != 0)
        throw FilterResolutionError("n_points must be a power of two >= 2^14");
    if (g.span < 50.0 * spec.linewidth_hz)
        throw FilterResolutionError("DFT span must be at least 50 linewidths");
    for (const auto& [lo, hi] : spec.notches.bands())
        if ((hi - lo) / g.df < 16.0)
            throw FilterResolutionError("notch resolved by fewer than 16 frequency bins");
    // Un-notched energy density decays as exp(-Gamma_T t); require it to be
    // negligible before the periodic time window wraps.
    const double gamma_t = kTwoPi * spec.linewidth_hz;
    const double half_window = 0.5 / g.df;
    if (gamma_t * half_window < 25.0)
        throw FilterResolutionError("time window too short for the filter decay; raise n_points");
}

// Fraction of the bin [f - df/2, f + df/2] that lies outside every notch.
double pass_fraction(const ExclusionBands& notches, double f, double df) {
    double blocked = 0.0;
    const double a = f - 0.5 * df;
    const double b = f + 0.5 * df;
    for (const auto& [lo, hi] : notches.bands()) {
        const double overlap = std::min(b, hi) - std::max(a, lo);
        if (overlap > 0.0) blocked += overlap;
    }
    return std::clamp(1.0 - blocked / df, 0.0, 1.0);
}

std::complex<double> transfer(double gamma_t, double offset_hz) {
    const double half = 0.5 * gamma_t;
    return half / std::complex<double>(half, kTwoPi * offset_hz);
}

}  // namespace

double ImpulseResponse::time_at(std::size_t k) const {
    const std::size_t n = energy.size();
    const auto ki = static_cast<double>(k);
    return k < n / 2 ? ki * dt : (ki - static_cast<double>(n)) * dt;
}

double notch_transmission(const FilterSpec& spec, const DftSettings& settings) {
    const Grid g = make_grid(spec, settings);
    const double gamma_t = kTwoPi * spec.linewidth_hz;
    double full = 0.0;
    double passed = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) {
        const double f = g.offset(k);
        const double p = std::norm(transfer(gamma_t, f));
        full += p;
        passed += p * pass_fraction(spec.notches, spec.center_hz + f, g.df);
    }
    return passed / full;
}

ImpulseResponse impulse_response(const FilterSpec& spec, const DftSettings& settings) {
    const Grid g = make_grid(spec, settings);
    check_resolution(spec, g);
    const double gamma_t = kTwoPi * spec.linewidth_hz;

    FftwBuffer buf(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * g.n)));
    if (!buf) throw std::bad_alloc();
    FftwPlan plan(fftw_plan_dft_1d(static_cast<int>(g.n), buf.get(), buf.get(), FFTW_BACKWARD,
                                   FFTW_ESTIMATE));

    double unnotched = 0.0;
    double notched = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) {
        const double f = g.offset(k);
        const std::complex<double> h = transfer(gamma_t, f);
        const double w = pass_fraction(spec.notches, spec.center_hz + f, g.df);
        // Partially covered bins keep the uncovered share of their energy.
        const std::complex<double> hn = h * std::sqrt(w);
        buf[k][0] = hn.real() * g.df;
        buf[k][1] = hn.imag() * g.df;
        unnotched += std::norm(h) * g.df;
        notched += std::norm(hn) * g.df;
    }
    fftw_execute(plan.plan);

    ImpulseResponse out;
    out.dt = 1.0 / g.span;
    out.energy.resize(g.n);
    double total = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) {
        const double e = (buf[k][0] * buf[k][0] + buf[k][1] * buf[k][1]) * out.dt / unnotched;
        out.energy[k] = e;
        total += e;
    }
    out.total_energy = total;
    out.frequency_energy = notched / unnotched;
    return out;
}

FilterReport analyze_filter(const FilterSpec& spec, double t_rep_s, const DftSettings& settings) {
    if (!(t_rep_s > 0.0)) throw std::invalid_argument("t_rep must be positive");
    const ImpulseResponse ir = impulse_response(spec, settings);

    double in_window = 0.0;
    double tail = 0.0;
    double one_pulse = 0.0;
    double pre = 0.0;
    for (std::size_t k = 0; k < ir.energy.size(); ++k) {
        const double t = ir.time_at(k);
        const double e = ir.energy[k];
        if (t < 0.0)
            pre += e;
        else if (t < t_rep_s)
            in_window += e;
        else {
            tail += e;
            if (t < 2.0 * t_rep_s) one_pulse += e;
        }
    }

    FilterReport r;
    r.t_rep_s = t_rep_s;
    r.eta_notch = ir.total_energy;
    r.eta_temporal = ir.total_energy > 0.0 ? in_window / ir.total_energy : 0.0;
    r.eta_total = r.eta_notch * r.eta_temporal;
    r.tail_noise_photons = tail;
    r.tail_noise_one_pulse = one_pulse;
    r.pre_window_energy = pre;
    return r;
}

ExclusionBands preset_notches(double center_hz, double width_scale) {
    if (!(width_scale > 0.0)) return {};
    const double upper = 1.2e3 * width_scale;
    const double lower = 0.8e3 * width_scale;
    return ExclusionBands({{center_hz + 5.0e3 - upper / 2, center_hz + 5.0e3 + upper / 2},
                           {center_hz - 9.0e3 - lower / 2, center_hz - 9.0e3 + lower / 2}});
}

PresetTuning tune_preset(double target_eta_notch, const DftSettings& settings) {
    if (!(target_eta_notch > 0.0 && target_eta_notch < 1.0))
        throw std::invalid_argument("target notch transmission must lie in (0, 1)");
    FilterSpec spec;
    spec.linewidth_hz = kPresetLinewidthHz;
    auto transmission = [&](double scale) {
        spec.notches = preset_notches(spec.center_hz, scale);
        return notch_transmission(spec, settings);
    };

    double lo = 0.0;
    double hi = 1.0;
    while (transmission(hi) > target_eta_notch) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e3) throw std::invalid_argument("notch transmission target unreachable");
    }
    for (int i = 0; i < 60 && hi - lo > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (transmission(mid) > target_eta_notch)
            lo = mid;
        else
            hi = mid;
    }
    PresetTuning out;
    out.width_scale = 0.5 * (lo + hi);
    spec.notches = preset_notches(spec.center_hz, out.width_scale);
    out.spec = spec;
    return out;
}

}  // namespace eot
