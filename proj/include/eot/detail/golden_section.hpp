#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace eot {

template <class F>
ScalarMinimum minimize_scalar(const F& f, double lo, double hi, std::size_t coarse, double tol) {
    if (!(hi > lo)) throw std::invalid_argument("search bracket must satisfy lo < hi");
    if (coarse < 3) coarse = 3;

    ScalarMinimum out;
    std::vector<double> xs(coarse);
    std::vector<double> fs(coarse);
    std::size_t best = 0;
    double fmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < coarse; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(coarse - 1);
        fs[i] = f(xs[i]);
        ++out.evaluations;
        if (fs[i] < fs[best]) best = i;
        fmax = std::max(fmax, fs[i]);
    }

    const double fmin = fs[best];
    if (fmax - fmin <= 1e-12 * std::max(std::abs(fmin), 1e-300)) {
        out.x = lo;
        out.value = fs[0];
        out.kind = OptimumKind::Flat;
        return out;
    }

    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[best + 1 == coarse ? best : best + 1];

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    out.evaluations += 2;
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++out.evaluations;
    }
    out.x = 0.5 * (a + b);
    out.value = f(out.x);
    ++out.evaluations;

    // Keep a coarse grid point if refinement did not beat it (boundary minima).
    if (fmin < out.value) {
        out.x = xs[best];
        out.value = fmin;
    }
    const double edge = 2.0 * tol;
    if (out.x - lo <= edge)
        out.kind = OptimumKind::LowerBoundary;
    else if (hi - out.x <= edge)
        out.kind = OptimumKind::UpperBoundary;
    else
        out.kind = OptimumKind::Interior;
    return out;
}

}  // namespace eot
