#include "eot/capacity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

namespace eot {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;
constexpr double kTinyNoise = 1e-300;

void check_eta(double eta) {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in [0, 1)");
}

void check_n_add(double n_add) {
    if (!(n_add >= 0.0) || !std::isfinite(n_add)) throw std::invalid_argument("n_add must be >= 0");
}

// 1 - N + N ln N, with its N -> 0 limit.
double small_eta_shape(double n_add) {
    if (n_add < kTinyNoise) return 1.0;
    return 1.0 - n_add + n_add * std::log(n_add);
}

}  // namespace

double cap_ub_point(double eta, double n_add) {
    check_eta(eta);
    check_n_add(n_add);
    if (eta == 0.0 || n_add >= 1.0) return 0.0;
    // a = 1 - eta (1 - N), written without cancellation for eta near 1.
    const double a = (1.0 - eta) + eta * n_add;
    const double a_log2_a = a * std::log1p(-eta * (1.0 - n_add)) / kLn2;
    const double n_log2_n = n_add < kTinyNoise ? 0.0 : n_add * std::log2(n_add);
    const double c = (eta * n_log2_n - a_log2_a) / (1.0 - eta);
    return c;
}

double cap_integrated_closed(const ChannelSpec& spec) {
    const double eta = spec.eta;
    const double n = spec.n_add;
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
    check_n_add(n);
    if (!(spec.bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(spec.duty > 0.0 && spec.duty <= 1.0)) throw std::invalid_argument("duty outside (0, 1]");
    if (n >= 1.0 || eta == 0.0) return 0.0;

    const double scale = 2.0 * kPi * spec.bandwidth_hz * spec.duty / kLn2;
    const double root_n = std::sqrt(n);
    if (eta == 1.0) {
        // eta -> 1 limit of the bracket below.
        const double d = 1.0 - root_n;
        return scale * d * d;
    }

    const double q = std::sqrt(1.0 - eta);
    const double s = std::sqrt((1.0 - eta) + eta * n);
    const double one_minus_s = eta * (1.0 - n) / (1.0 + s);

    double log_term = 0.0;
    if (n >= kTinyNoise) {
        // ln( sqrt(N)(1 + q) / (q + s) ), evaluated as log1p of the ratio's
        // excess over 1 whenever that excess is small.
        const double u = (1.0 - eta) * (1.0 - n) / (s + root_n);  // s - sqrt(N)
        const double excess = (q * (root_n - 1.0) - u) / (q + s);
        const double log_ratio = std::abs(excess) < 0.5
                                     ? std::log1p(excess)
                                     : 0.5 * std::log(n) + std::log1p(q) - std::log(q + s);
        log_term = eta * n / q * log_ratio;
    }
    return scale * (one_minus_s + log_term);
}

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double sum = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

double cap_integrated_quadrature(const ChannelSpec& spec, std::size_t n_points) {
    if (n_points < 64) throw std::invalid_argument("quadrature needs n_points >= 64");
    check_eta(spec.eta);
    check_n_add(spec.n_add);
    if (!(spec.bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(spec.duty > 0.0 && spec.duty <= 1.0)) throw std::invalid_argument("duty outside (0, 1]");
    if (spec.eta == 0.0 || spec.n_add >= 1.0) return 0.0;

    const double eta = spec.eta;
    const double n = spec.n_add;

    // Detuning x = f / B, mapped to x = tan(theta) so the Lorentzian becomes
    // eta cos^2(theta) and dx = dtheta / cos^2(theta). Symmetric in x.
    constexpr double kCutoff = 1e-8;
    const double x_max = std::sqrt(1.0 / kCutoff - 1.0);
    const double theta_max = std::atan(x_max);
    auto integrand = [&](double theta) {
        const double c2 = std::cos(theta) * std::cos(theta);
        return cap_ub_point(eta * c2, n) / c2;
    };

    std::priority_queue<Panel> panels;
    double total = 0.0;
    double error = 0.0;
    const double width = theta_max / static_cast<double>(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double a = width * static_cast<double>(i);
        const double b = i + 1 == n_points ? theta_max : a + width;
        Panel p = gk15(integrand, a, b);
        total += p.value;
        error += p.error;
        panels.push(p);
    }

    constexpr double kRelTol = 1e-13;
    constexpr std::size_t kMaxPanels = 200000;
    while (error > kRelTol * std::abs(total)) {
        if (panels.size() >= kMaxPanels)
            throw QuadratureError("capacity quadrature did not converge");
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = gk15(integrand, worst.a, mid);
        const Panel right = gk15(integrand, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Beyond the cutoff c_ub is linear in the local efficiency.
    const double tail = eta * small_eta_shape(n) / kLn2 * (kPi / 2.0 - theta_max);
    return spec.bandwidth_hz * spec.duty * 2.0 * (total + tail);
}

double cap_small_eta(double n_add, double throughput_hz) {
    check_n_add(n_add);
    if (n_add >= 1.0) return 0.0;
    return kPi * throughput_hz / kLn2 * small_eta_shape(n_add);
}

double capacity_at(const ContourGrid& grid, double throughput_hz, double n_add) {
    if (grid.form == ContourForm::SmallEta) return cap_small_eta(n_add, throughput_hz);
    ChannelSpec spec;
    spec.eta = grid.eta;
    spec.n_add = n_add;
    spec.duty = grid.duty;
    spec.bandwidth_hz = throughput_hz / (grid.eta * grid.duty);
    return cap_integrated_closed(spec);
}

std::vector<ContourLine> capacity_contours(const std::vector<double>& levels,
                                           const ContourGrid& grid) {
    if (!(grid.throughput_min_hz > 0.0 && grid.throughput_max_hz > grid.throughput_min_hz))
        throw std::invalid_argument("contour throughput range must be positive and increasing");
    if (!(grid.n_add_min > 0.0 && grid.n_add_max < 1.0 && grid.n_add_min < grid.n_add_max))
        throw std::invalid_argument("contour n_add range must lie inside (0, 1)");
    if (grid.n_add_samples < 2) throw std::invalid_argument("contour needs >= 2 n_add samples");
    if (grid.form == ContourForm::ClosedFixedEta && !(grid.eta > 0.0 && grid.eta < 1.0))
        throw std::invalid_argument("closed-form contours need a fixed eta in (0, 1)");

    std::vector<ContourLine> out;
    const double lo = std::log(grid.throughput_min_hz);
    const double hi = std::log(grid.throughput_max_hz);
    for (double level : levels) {
        if (!(level > 0.0)) throw std::invalid_argument("contour levels must be positive");
        ContourLine line;
        line.level = level;
        for (std::size_t i = 0; i < grid.n_add_samples; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(grid.n_add_samples - 1);
            const double n = grid.n_add_min + t * (grid.n_add_max - grid.n_add_min);
            // Capacity is increasing in throughput along each row.
            if (capacity_at(grid, std::exp(lo), n) > level) continue;
            if (capacity_at(grid, std::exp(hi), n) < level) continue;
            double a = lo;
            double b = hi;
            for (int k = 0; k < 200 && b - a > 1e-13; ++k) {
                const double m = 0.5 * (a + b);
                if (capacity_at(grid, std::exp(m), n) < level)
                    a = m;
                else
                    b = m;
            }
            line.points.emplace_back(std::exp(0.5 * (a + b)), n);
        }
        out.push_back(std::move(line));
    }
    return out;
}

}  // namespace eot
