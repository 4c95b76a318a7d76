#include "eot/spectra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eot {

FrequencyGrid::FrequencyGrid(double start_hz, double stop_hz, std::size_t n_points)
    : start_(start_hz), stop_(stop_hz), n_(n_points) {
    if (n_points < 2) throw std::invalid_argument("frequency grid needs at least 2 points");
    if (!(stop_hz > start_hz) || !std::isfinite(start_hz) || !std::isfinite(stop_hz))
        throw std::invalid_argument("frequency grid must be strictly increasing");
}

double FrequencyGrid::at(std::size_t i) const {
    if (i + 1 == n_) return stop_;
    return start_ + spacing() * static_cast<double>(i);
}

Spectrum::Spectrum(FrequencyGrid g, std::vector<double> v, SpectrumKind k)
    : grid(g), values(std::move(v)), kind(k) {
    if (values.size() != grid.size()) throw std::invalid_argument("spectrum size does not match grid");
    for (double x : values)
        if (!std::isfinite(x)) throw std::invalid_argument("spectrum values must be finite");
}

double Spectrum::peak() const { return *std::max_element(values.begin(), values.end()); }

ExclusionBands::ExclusionBands(std::vector<std::pair<double, double>> bands) {
    for (const auto& [lo, hi] : bands)
        if (!(lo < hi)) throw std::invalid_argument("exclusion band needs low < high");
    std::sort(bands.begin(), bands.end());
    for (const auto& b : bands) {
        if (!bands_.empty() && b.first <= bands_.back().second)
            bands_.back().second = std::max(bands_.back().second, b.second);
        else
            bands_.push_back(b);
    }
}

std::pair<double, double> ExclusionBands::parse_band(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("band '" + text + "' is not low:high");
    try {
        std::size_t used = 0;
        const std::string lo_s = text.substr(0, colon);
        const std::string hi_s = text.substr(colon + 1);
        const double lo = std::stod(lo_s, &used);
        if (used != lo_s.size()) throw std::invalid_argument("");
        const double hi = std::stod(hi_s, &used);
        if (used != hi_s.size()) throw std::invalid_argument("");
        if (!(lo < hi)) throw std::invalid_argument("");
        return {lo, hi};
    } catch (const std::exception&) {
        throw std::invalid_argument("band '" + text + "' is not low:high with low < high");
    }
}

bool ExclusionBands::contains(double f) const {
    for (const auto& [lo, hi] : bands_)
        if (f >= lo && f <= hi) return true;
    return false;
}

double LorentzianFit::operator()(double f) const {
    const double u = 2.0 * (f - center_hz) / fwhm_hz;
    return floor + peak_height / (1.0 + u * u);
}

Spectrum efficiency_lineshape(double eta_peak, double bandwidth_hz, const FrequencyGrid& grid,
                              double center_hz) {
    if (eta_peak < 0.0) throw std::invalid_argument("eta_peak must be nonnegative");
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = (grid.at(i) - center_hz) / bandwidth_hz;
        v[i] = eta_peak / (1.0 + x * x);
    }
    return Spectrum(grid, std::move(v), SpectrumKind::Efficiency);
}

InputReferred input_refer(const Spectrum& output_noise, const Spectrum& efficiency,
                          std::optional<double> threshold) {
    if (!(output_noise.grid == efficiency.grid))
        throw std::invalid_argument("input_refer: grids differ");
    const double cut = threshold.value_or(1e-3 * efficiency.peak());
    const std::size_t n = output_noise.values.size();
    std::vector<double> v(n, 0.0);
    std::vector<bool> masked(n, false);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = efficiency.values[i];
        if (!(eta > 0.0) || eta < cut) {
            masked[i] = true;
            ++count;
            continue;
        }
        v[i] = output_noise.values[i] / eta;
    }
    if (count == n) throw std::invalid_argument("input_refer: every point is masked");
    return {Spectrum(output_noise.grid, std::move(v), SpectrumKind::InputReferredNoise),
            std::move(masked), count};
}

LorentzComponent LorentzComponent::from_area(double center_hz, double fwhm_hz, double area,
                                             double sign) {
    // Area of h / (1 + (2x / w)^2) over the real line is h * pi * w / 2.
    return {center_hz, fwhm_hz, 2.0 * area / (std::numbers::pi * fwhm_hz), sign};
}

double LorentzComponent::area() const { return height * std::numbers::pi * fwhm_hz / 2.0; }

SynthResult synth_output_noise(const std::vector<LorentzComponent>& components, double floor,
                               const FrequencyGrid& grid) {
    for (const auto& c : components)
        if (!(c.fwhm_hz > 0.0)) throw std::invalid_argument("component width must be positive");
    std::vector<double> v(grid.size(), floor);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = grid.at(i);
        for (const auto& c : components) {
            const double u = 2.0 * (f - c.center_hz) / c.fwhm_hz;
            v[i] += c.sign * c.height / (1.0 + u * u);
        }
    }
    std::size_t clamped = 0;
    for (double& x : v) {
        if (x < 0.0) {
            x = 0.0;
            ++clamped;
        }
    }
    return {Spectrum(grid, std::move(v), SpectrumKind::OutputNoise), clamped};
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Parameter order: center, fwhm, height, floor.
LorentzianFit to_fit(const Vec4& p) {
    LorentzianFit f;
    f.center_hz = p[0];
    f.fwhm_hz = std::abs(p[1]);
    f.peak_height = p[2];
    f.floor = p[3];
    return f;
}

LorentzianFit initial_guess(const std::vector<double>& x, const std::vector<double>& y) {
    const auto peak_it = std::max_element(y.begin(), y.end());
    const auto peak = static_cast<std::size_t>(peak_it - y.begin());
    const double floor = *std::min_element(y.begin(), y.end());
    const double height = *peak_it - floor;
    const double half = floor + 0.5 * height;

    auto crossing = [&](std::size_t i, std::size_t j) {
        // linear interpolation between a point above and one below half height
        const double t = (y[i] - half) / (y[i] - y[j]);
        return x[i] + t * (x[j] - x[i]);
    };
    double left = x.front();
    double right = x.back();
    for (std::size_t i = peak; i > 0; --i)
        if (y[i - 1] <= half) {
            left = crossing(i, i - 1);
            break;
        }
    for (std::size_t i = peak; i + 1 < y.size(); ++i)
        if (y[i + 1] <= half) {
            right = crossing(i, i + 1);
            break;
        }
    LorentzianFit g;
    g.center_hz = x[peak];
    g.fwhm_hz = std::max(right - left, 1e-6 * (x.back() - x.front()));
    g.peak_height = height;
    g.floor = floor;
    return g;
}

struct Linearization {
    Mat4 jtj = Mat4::Zero();
    Vec4 jtr = Vec4::Zero();
    double cost = 0.0;
};

Linearization linearize(const Vec4& p, const std::vector<double>& x, const std::vector<double>& y) {
    Linearization lin;
    const double c = p[0], w = p[1], h = p[2], fl = p[3];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = 2.0 * (x[i] - c) / w;
        const double den = 1.0 + u * u;
        const double l = 1.0 / den;
        const double r = fl + h * l - y[i];
        Vec4 j;
        j[0] = 4.0 * h * u / (w * den * den);
        j[1] = 2.0 * h * u * u / (w * den * den);
        j[2] = l;
        j[3] = 1.0;
        lin.jtj.noalias() += j * j.transpose();
        lin.jtr.noalias() += j * r;
        lin.cost += r * r;
    }
    return lin;
}

double cost_at(const Vec4& p, const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = 2.0 * (x[i] - p[0]) / p[1];
        const double r = p[3] + p[2] / (1.0 + u * u) - y[i];
        s += r * r;
    }
    return s;
}

}  // namespace

LorentzianFit fit_lorentzian(const Spectrum& spectrum, const ExclusionBands& exclude,
                             std::optional<LorentzianFit> init, const FitOptions& options) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
        const double f = spectrum.grid.at(i);
        if (exclude.contains(f)) continue;
        x.push_back(f);
        y.push_back(spectrum.values[i]);
    }
    if (x.size() < 8) throw std::invalid_argument("fit_lorentzian: fewer than 8 unexcluded points");

    const LorentzianFit start = init.value_or(initial_guess(x, y));
    Vec4 p(start.center_hz, start.fwhm_hz, start.peak_height, start.floor);
    if (!(p[1] > 0.0)) throw std::invalid_argument("fit_lorentzian: initial width must be positive");

    double data_norm = 0.0;
    for (double v : y) data_norm += v * v;
    data_norm = std::sqrt(data_norm);
    if (data_norm == 0.0) data_norm = 1.0;

    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    Linearization lin = linearize(p, x, y);
    for (; iter < options.max_iterations; ++iter) {
        // Gradient of each parameter, scaled by its column norm so the test is
        // independent of parameter units.
        double grad = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double col = std::sqrt(lin.jtj(k, k));
            if (col > 0.0) grad = std::max(grad, std::abs(lin.jtr[k]) / col);
        }
        if (grad <= options.gradient_tolerance * data_norm) {
            converged = true;
            break;
        }

        bool stepped = false;
        bool stalled = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Mat4 a = lin.jtj;
            for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(lin.jtj(k, k), 1e-300);
            const Vec4 delta = a.ldlt().solve(-lin.jtr);
            Vec4 trial = p + delta;
            trial[1] = std::abs(trial[1]);
            if (!(trial[1] > 0.0) || !trial.allFinite()) {
                lambda *= 4.0;
                continue;
            }
            const double c = cost_at(trial, x, y);
            if (c < lin.cost) {
                const bool tiny = (delta.array().abs() <=
                                   1e-15 * (p.array().abs() + 1e-300)).all();
                p = trial;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                stalled = tiny;
                break;
            }
            lambda *= 4.0;
        }
        if (!stepped || stalled) {
            // No descent available at machine precision: the iterate is a
            // numerical stationary point.
            lin = linearize(p, x, y);
            converged = true;
            ++iter;
            break;
        }
        lin = linearize(p, x, y);
    }

    LorentzianFit out = to_fit(p);
    out.residual_norm = std::sqrt(cost_at(p, x, y));
    out.iterations = iter;
    out.converged = converged;
    return out;
}

double averaged_added_noise(const Spectrum& n_add, const Spectrum& efficiency,
                            const ExclusionBands& exclude) {
    if (!(n_add.grid == efficiency.grid)) throw std::invalid_argument("averaged_added_noise: grids differ");
    const std::size_t n = n_add.values.size();
    std::vector<bool> kept(n);
    for (std::size_t i = 0; i < n; ++i) kept[i] = !exclude.contains(n_add.grid.at(i));

    // Trapezoids only over segments with both ends kept, so an excluded run
    // does not leak half a panel onto its neighbours.
    double num = 0.0;
    double den = 0.0;
    const auto& w = efficiency.values;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!kept[i] || !kept[i + 1]) continue;
        const double h = n_add.grid.at(i + 1) - n_add.grid.at(i);
        num += 0.5 * h * (n_add.values[i] * w[i] + n_add.values[i + 1] * w[i + 1]);
        den += 0.5 * h * (w[i] + w[i + 1]);
    }
    if (!(den > 0.0)) throw std::invalid_argument("averaged_added_noise: zero total weight");
    return num / den;
}

}  // namespace eot
