#include <catch2/catch_amalgamated.hpp>

#include "eot/spectra.hpp"

#include <cmath>

using namespace eot;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Spectrum lorentz(const FrequencyGrid& g, double center, double fwhm, double height, double floor) {
    LorentzianFit l;
    l.center_hz = center;
    l.fwhm_hz = fwhm;
    l.peak_height = height;
    l.floor = floor;
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = l(g.at(i));
    return Spectrum(g, v, SpectrumKind::OutputNoise);
}

}  // namespace

TEST_CASE("frequency grid") {
    const FrequencyGrid g(-100.0, 100.0, 5);
    CHECK(g.spacing() == 50.0);
    CHECK(g.at(4) == 100.0);
    CHECK_THROWS_AS(FrequencyGrid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(1.0, 0.0, 3), std::invalid_argument);
}

TEST_CASE("spectrum rejects non-finite values") {
    const FrequencyGrid g(0.0, 1.0, 2);
    CHECK_THROWS_AS(Spectrum(g, {0.0, NAN}, SpectrumKind::OutputNoise), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum(g, {0.0}, SpectrumKind::OutputNoise), std::invalid_argument);
}

TEST_CASE("exclusion bands merge and parse") {
    const ExclusionBands b({{10.0, 20.0}, {-5.0, 0.0}, {15.0, 30.0}});
    REQUIRE(b.bands().size() == 2);
    CHECK(b.bands()[0] == std::pair{-5.0, 0.0});
    CHECK(b.bands()[1] == std::pair{10.0, 30.0});
    CHECK(b.contains(25.0));
    CHECK_FALSE(b.contains(5.0));
    CHECK(ExclusionBands::parse_band("-9400:-8600") == std::pair{-9400.0, -8600.0});
    CHECK_THROWS_AS(ExclusionBands::parse_band("5"), std::invalid_argument);
    CHECK_THROWS_AS(ExclusionBands::parse_band("5:1"), std::invalid_argument);
    CHECK_THROWS_AS(ExclusionBands::parse_band("a:b"), std::invalid_argument);
}

TEST_CASE("efficiency lineshape uses the half width") {
    const FrequencyGrid g(-22000.0, 22000.0, 3);
    const Spectrum s = efficiency_lineshape(0.4, 22000.0, g, 0.0);
    CHECK(s.values[1] == 0.4);
    CHECK_THAT(s.values[0], WithinRel(0.2, 1e-15));
    CHECK_THAT(s.values[2], WithinRel(0.2, 1e-15));
}

TEST_CASE("input referral of proportional lineshapes is flat") {
    const FrequencyGrid g(-2e5, 2e5, 401);
    const Spectrum eta = efficiency_lineshape(0.4, 11000.0, g, 0.0);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = 2.6 * eta.values[i];
    const InputReferred r = input_refer(Spectrum(g, out, SpectrumKind::OutputNoise), eta);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!r.masked[i]) CHECK_THAT(r.spectrum.values[i], WithinRel(2.6, 1e-14));
    // 1e-3 of the peak is crossed at |f| = B sqrt(999) ~ 347.7 kHz, outside the grid.
    CHECK(r.masked_count == 0);

    const InputReferred tight = input_refer(Spectrum(g, out, SpectrumKind::OutputNoise), eta, 0.1);
    CHECK(tight.masked_count > 0);
    CHECK_THROWS_AS(input_refer(Spectrum(g, out, SpectrumKind::OutputNoise), eta, 1.0),
                    std::invalid_argument);
    const FrequencyGrid other(-2e5, 2e5, 400);
    CHECK_THROWS_AS(input_refer(lorentz(other, 0, 1, 1, 0), eta), std::invalid_argument);
}

TEST_CASE("synthesized components") {
    const FrequencyGrid g(-1000.0, 1000.0, 2001);
    const auto c = LorentzComponent::from_area(0.0, 100.0, 5.0);
    CHECK_THAT(c.area(), WithinRel(5.0, 1e-15));
    // Squashing dip: floor 1, negative component of depth 0.6.
    const SynthResult dip = synth_output_noise({{0.0, 50.0, 0.6, -1.0}}, 1.0, g);
    CHECK_THAT(dip.spectrum.values[1000], WithinRel(0.4, 1e-14));
    CHECK(dip.clamped_points == 0);
    const SynthResult deep = synth_output_noise({{0.0, 50.0, 2.0, -1.0}}, 1.0, g);
    CHECK(deep.clamped_points > 0);
    CHECK(deep.spectrum.values[1000] == 0.0);
    const SynthResult two = synth_output_noise({{0.0, 50.0, 1.0, 1.0}, {100.0, 80.0, 0.5, 1.0}}, 0.0, g);
    CHECK_THAT(two.spectrum.values[1100], WithinRel(1.0 / (1.0 + 16.0) + 0.5, 1e-14));
}

TEST_CASE("lorentzian fit recovers noiseless parameters") {
    const FrequencyGrid g(-60000.0, 60000.0, 601);
    const Spectrum s = lorentz(g, 1200.0, 22000.0, 3.0, 0.15);
    const LorentzianFit f = fit_lorentzian(s, {});
    CHECK(f.converged);
    CHECK_THAT(f.center_hz, WithinRel(1200.0, 1e-6));
    CHECK_THAT(f.fwhm_hz, WithinRel(22000.0, 1e-6));
    CHECK_THAT(f.peak_height, WithinRel(3.0, 1e-6));
    CHECK_THAT(f.floor, WithinRel(0.15, 1e-6));
}

TEST_CASE("exclusion bands shield the fit from a narrow spike") {
    const FrequencyGrid g(-60000.0, 60000.0, 601);
    Spectrum s = lorentz(g, 0.0, 22000.0, 3.0, 0.15);
    // Spike confined to the grid points in [4600, 5400] Hz.
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.at(i) >= 4600.0 && g.at(i) <= 5400.0) s.values[i] += 4.0;
    const ExclusionBands band({{4500.0, 5500.0}});
    const LorentzianFit excluded = fit_lorentzian(s, band);
    CHECK(excluded.converged);
    CHECK_THAT(excluded.center_hz + 1.0, WithinRel(1.0, 1e-6));
    CHECK_THAT(excluded.fwhm_hz, WithinRel(22000.0, 1e-6));
    CHECK_THAT(excluded.peak_height, WithinRel(3.0, 1e-6));
    const LorentzianFit included = fit_lorentzian(s, {});
    CHECK(included.residual_norm > excluded.residual_norm);
}

TEST_CASE("fit needs enough points") {
    const FrequencyGrid g(0.0, 7.0, 8);
    const Spectrum s = lorentz(g, 3.5, 2.0, 1.0, 0.0);
    CHECK_NOTHROW(fit_lorentzian(s, {}));
    CHECK_THROWS_AS(fit_lorentzian(s, ExclusionBands({{0.0, 0.5}})), std::invalid_argument);
}

TEST_CASE("averaged added noise") {
    const FrequencyGrid g(-50000.0, 50000.0, 1001);
    const Spectrum eta = efficiency_lineshape(0.4, 11000.0, g, 0.0);
    std::vector<double> flat(g.size(), 2.6);
    CHECK_THAT(averaged_added_noise(Spectrum(g, flat, SpectrumKind::InputReferredNoise), eta, {}),
               WithinRel(2.6, 1e-14));

    std::vector<double> spiked = flat;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.at(i) - 5000.0) <= 200.0) spiked[i] = 40.0;
    const ExclusionBands band({{4700.0, 5300.0}});
    CHECK_THAT(averaged_added_noise(Spectrum(g, spiked, SpectrumKind::InputReferredNoise), eta, band),
               WithinRel(2.6, 1e-14));

    // Symmetric n_add, half the band excluded.
    std::vector<double> sym(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) sym[i] = 1.0 + std::pow(g.at(i) / 1e4, 2);
    const Spectrum ns(g, sym, SpectrumKind::InputReferredNoise);
    const double full = averaged_added_noise(ns, eta, {});
    CHECK_THAT(averaged_added_noise(ns, eta, ExclusionBands({{-60000.0, -1e-9}})), WithinRel(full, 1e-3));

    // Weights normalize out.
    std::vector<double> scaled = eta.values;
    for (double& x : scaled) x *= 7.0;
    CHECK_THAT(averaged_added_noise(ns, Spectrum(g, scaled, SpectrumKind::Efficiency), {}),
               WithinRel(full, 1e-14));
    CHECK_THROWS_AS(averaged_added_noise(ns, eta, ExclusionBands({{-1e6, 1e6}})), std::invalid_argument);
}

TEST_CASE("trapezoid weighted mean converges at second order") {
    auto err = [](std::size_t n) {
        const FrequencyGrid g(-3.0, 3.0, n);
        std::vector<double> w(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = std::exp(-g.at(i) * g.at(i));
            v[i] = std::cos(g.at(i));
        }
        const double got = averaged_added_noise(Spectrum(g, v, SpectrumKind::InputReferredNoise),
                                                Spectrum(g, w, SpectrumKind::Efficiency), {});
        // Exact ratio on [-3, 3] from independent high-precision integration.
        return std::abs(got - 0.77883984535616609);
    };
    const double e1 = err(41);
    const double e2 = err(161);
    CHECK(e1 / e2 >= 3.9);
}
