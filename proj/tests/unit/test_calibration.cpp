#include <catch2/catch_amalgamated.hpp>

#include "eot/calibration.hpp"

#include <random>

using namespace eot;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<OccupancyRecord> synthetic(double a_2pi_per_hz, double b, ReadoutMethod m) {
    std::vector<OccupancyRecord> out;
    const double a = NoiseEnvironment::a_e_from_2pi_per_hz(a_2pi_per_hz);
    for (double khz : {2.0, 5.0, 8.0, 11.0, 15.0, 20.0}) {
        const AngularRate g = AngularRate::from_hz(khz * 1e3);
        out.push_back({g, a * g.value() + b, 0.05, m});
    }
    return out;
}

}  // namespace

TEST_CASE("noiseless occupancy data round trip") {
    const auto f = fit_occupancy(synthetic(1.05e-5, 0.17, ReadoutMethod::Microwave));
    CHECK_THAT(f.a_e_2pi_per_hz(), WithinRel(1.05e-5, 1e-10));
    CHECK_THAT(f.b_e, WithinRel(0.17, 1e-10));
    CHECK_THAT(f.chi_squared, WithinAbs(0.0, 1e-18));
    CHECK(f.n_records == 6);
}

TEST_CASE("two records give the interpolating line") {
    const std::vector<OccupancyRecord> two = {{AngularRate(1.0), 1.0, 1.0, ReadoutMethod::Microwave},
                                              {AngularRate(3.0), 2.0, 1.0, ReadoutMethod::Microwave}};
    const auto f = fit_occupancy(two);
    CHECK_THAT(f.a_e, WithinRel(0.5, 1e-14));
    CHECK_THAT(f.b_e, WithinRel(0.5, 1e-14));
}

TEST_CASE("slope ratio between devices is about two orders of magnitude") {
    const auto now = fit_occupancy(synthetic(1.05e-5, 0.17, ReadoutMethod::Microwave));
    const auto prior = fit_occupancy(synthetic(9.44e-4, 0.093, ReadoutMethod::Microwave));
    CHECK_THAT(prior.a_e / now.a_e, WithinRel(9.44e-4 / 1.05e-5, 1e-9));
    CHECK_THAT(prior.a_e / now.a_e, WithinRel(89.9, 1e-2));
}

TEST_CASE("weighted residuals are orthogonal to the design columns") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto recs = synthetic(1.3e-5, 0.7, ReadoutMethod::Optomechanical);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        recs[i].sigma = 0.02 * (1.0 + i);
        recs[i].n_bar_e += recs[i].sigma * noise(rng);
    }
    const auto f = fit_occupancy(recs);
    double s1 = 0.0, sx = 0.0, scale1 = 0.0, scalex = 0.0;
    for (const auto& r : recs) {
        const double w = 1.0 / (r.sigma * r.sigma);
        const double res = r.n_bar_e - (f.a_e * r.gamma_e.value() + f.b_e);
        s1 += w * res;
        sx += w * res * r.gamma_e.value();
        scale1 += w * std::abs(r.n_bar_e);
        scalex += w * std::abs(r.n_bar_e * r.gamma_e.value());
    }
    CHECK(std::abs(s1) <= 1e-8 * scale1);
    CHECK(std::abs(sx) <= 1e-8 * scalex);
}

TEST_CASE("covariance matches the textbook weighted formula") {
    const auto recs = synthetic(1.3e-5, 0.7, ReadoutMethod::Optomechanical);
    double S = 0, Sx = 0, Sxx = 0;
    for (const auto& r : recs) {
        const double w = 1.0 / (r.sigma * r.sigma);
        S += w;
        Sx += w * r.gamma_e.value();
        Sxx += w * r.gamma_e.value() * r.gamma_e.value();
    }
    const double det = S * Sxx - Sx * Sx;
    const auto f = fit_occupancy(recs);
    CHECK_THAT(f.covariance[0], WithinRel(S / det, 1e-9));
    CHECK_THAT(f.covariance[3], WithinRel(Sxx / det, 1e-9));
    CHECK_THAT(f.covariance[1], WithinRel(-Sx / det, 1e-9));
    CHECK(f.covariance[1] == f.covariance[2]);
}

TEST_CASE("reported uncertainties cover the truth") {
    std::mt19937_64 rng(20240901);
    std::normal_distribution<double> noise(0.0, 1.0);
    int a_in = 0, b_in = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        auto recs = synthetic(1.05e-5, 0.17, ReadoutMethod::Microwave);
        for (auto& r : recs) r.n_bar_e += r.sigma * noise(rng);
        const auto f = fit_occupancy(recs);
        if (std::abs(f.a_e_2pi_per_hz() - 1.05e-5) <= 2.0 * f.a_e_2pi_per_hz_sigma()) ++a_in;
        if (std::abs(f.b_e - 0.17) <= 2.0 * f.b_e_sigma()) ++b_in;
    }
    CHECK(a_in >= 900);
    CHECK(b_in >= 900);
}

TEST_CASE("occupancy fit errors") {
    std::vector<OccupancyRecord> same = {{AngularRate(2.0), 1.0, 1.0, ReadoutMethod::Microwave},
                                         {AngularRate(2.0), 1.5, 1.0, ReadoutMethod::Microwave},
                                         {AngularRate(2.0), 1.2, 1.0, ReadoutMethod::Microwave}};
    CHECK_THROWS_AS(fit_occupancy(same), std::invalid_argument);
    CHECK_THROWS_AS(fit_occupancy({same[0]}), std::invalid_argument);
    same[1].gamma_e = AngularRate(3.0);
    same[1].sigma = 0.0;
    CHECK_THROWS_AS(fit_occupancy(same), std::invalid_argument);
    CHECK_NOTHROW(fit_occupancy(same, Weighting::Unweighted));
}

TEST_CASE("readout method names") {
    CHECK(parse_readout_method("microwave") == ReadoutMethod::Microwave);
    CHECK(to_string(ReadoutMethod::Optomechanical) == "optomechanical");
    CHECK_THROWS_AS(parse_readout_method("thermal"), std::invalid_argument);
}

TEST_CASE("intracavity photon conversion") {
    const AngularRate g = AngularRate::from_hz(10.0);
    const AngularRate k = AngularRate::from_hz(4e5);
    const AngularRate one(4.0 * g.value() * g.value() / k.value());
    CHECK_THAT(intracavity_photons(one, g, k), WithinRel(1.0, 1e-15));
    CHECK_THAT(intracavity_photons(one, g * 2.0, k), WithinRel(0.25, 1e-15));
    const AngularRate ge = AngularRate::from_hz(11000.0);
    CHECK_THAT(gamma_e_from_photons(intracavity_photons(ge, g, k), g, k).value(), WithinRel(ge.value(), 1e-15));
    CHECK_THROWS_AS(intracavity_photons(ge, AngularRate(0.0), k), std::invalid_argument);
}

TEST_CASE("readout efficiency product") {
    ReadoutCalInput in;
    in.xi_o = 0.4;
    CHECK_THAT(xi_e(in), WithinRel(0.4, 1e-15));

    // A consistent factor set landing on 0.010.
    in.eps_cl = 0.8;
    in.ratio_det = 0.05;
    in.kappa_e_over_ext = 1.25;
    in.kappa_o_ext_over_total = 0.5;
    CHECK_THAT(xi_e(in), WithinRel(0.010, 1e-14));

    const double base = xi_e(in);
    in.ratio_det *= 3.0;
    CHECK_THAT(xi_e(in), WithinRel(3.0 * base, 1e-14));
    in.gain_o_over_e = 1.1;
    in.gamma_o_over_e = 0.9;
    CHECK_THAT(xi_e(in), WithinRel(3.0 * base * 1.1 * 0.9, 1e-14));

    in.kappa_o_ext_over_total = 0.0;
    CHECK_THROWS_AS(xi_e(in), std::invalid_argument);
    in.kappa_o_ext_over_total = 0.5;
    in.xi_o = 1.5;
    CHECK_THROWS_AS(xi_e(in), std::invalid_argument);
}
