#include <catch2/catch_amalgamated.hpp>

#include "eot/core.hpp"

using namespace eot;
using Catch::Matchers::WithinRel;

TEST_CASE("angular rate converts at the boundary only") {
    const AngularRate r = AngularRate::from_hz(11000.0);
    CHECK_THAT(r.value(), WithinRel(69115.03837897544, 1e-15));
    CHECK_THAT(r.hz(), WithinRel(11000.0, 1e-15));
    CHECK((r + r).value() == 2.0 * r.value());
    CHECK(r / AngularRate::from_hz(22000.0) == 0.5);
}

TEST_CASE("direction round trip") {
    CHECK(parse_direction("up") == Direction::Up);
    CHECK(parse_direction(to_string(Direction::Down)) == Direction::Down);
    CHECK_THROWS_AS(parse_direction("sideways"), std::invalid_argument);
}

TEST_CASE("sideband defaults") {
    const AngularRate wm = AngularRate::from_hz(1.27e6);
    const AngularRate k = AngularRate::from_hz(1.27e6);  // kappa = omega_m
    CHECK_THAT(sideband_parameter(k, wm), WithinRel(1.0 / 16.0, 1e-15));
    CHECK_THAT(default_backaction_limit(k, wm), WithinRel(0.0625, 1e-15));
    CHECK_THAT(default_sideband_gain(k, wm), WithinRel(16.0 / 15.0, 1e-15));
    CHECK_THROWS_AS(default_sideband_gain(wm * 4.0, wm), std::invalid_argument);
}

TEST_CASE("throughput is eta B D") {
    CHECK_THAT(throughput(0.025, 360000.0, 0.015), WithinRel(135.0, 1e-12));
    CHECK_THAT(throughput(0.47, 3500.0, 1.0), WithinRel(1645.0, 1e-12));
    CHECK_THROWS_AS(throughput(1.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(throughput(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(throughput(0.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("bandwidth and apparent efficiency") {
    DeviceParams p;
    p.gamma_m = AngularRate::from_hz(0.0);
    p.eta_max = 0.5;
    OperatingPoint op{AngularRate::from_hz(11000.0), AngularRate::from_hz(11000.0), 1.0};
    CHECK_THAT(bandwidth_hz(p, op), WithinRel(22000.0, 1e-14));
    // Matched rates and no intrinsic loss give the full cap.
    CHECK_THAT(apparent_efficiency(p, op), WithinRel(0.5, 1e-14));
    p.gain_e = 1.25;
    CHECK_THAT(apparent_efficiency(p, op), WithinRel(0.625, 1e-14));
    op.gamma_o = AngularRate::from_hz(33000.0);
    CHECK_THAT(apparent_efficiency(p, op), WithinRel(1.25 * 0.5 * 0.75, 1e-14));
}

TEST_CASE("budget total is signed sum") {
    const NoiseBudget b = make_budget(Direction::Down, 1.0, 2.0, 3.5);
    CHECK(b.total == -0.5);
    CHECK_FALSE(b.physical());
}

TEST_CASE("device validation names the offending field") {
    DeviceParams p;
    p.omega_m = AngularRate::from_hz(1e6);
    p.kappa_e = AngularRate::from_hz(1e5);
    p.kappa_e_ext = AngularRate::from_hz(2e5);
    p.kappa_o = AngularRate::from_hz(1e5);
    p.kappa_o_ext = AngularRate::from_hz(1e5);
    p.gain_o = 0.9;
    const ValidationReport r = validate_device(p);
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0].find("external exceeds total") != std::string::npos);
    CHECK(r.violations[1].find("gain below unity") != std::string::npos);

    p.kappa_e_ext = p.kappa_e;
    p.gain_o = 1.0;
    CHECK(validate_device(p).ok());
    p.eps_mode = 1.1;
    CHECK_FALSE(validate_device(p).ok());
}

TEST_CASE("operating point and environment validation") {
    CHECK_FALSE(validate_operating_point({AngularRate(0.0), AngularRate(1.0), 1.0}).ok());
    CHECK_FALSE(validate_operating_point({AngularRate(1.0), AngularRate(1.0), 1.5}).ok());
    CHECK(validate_operating_point({AngularRate(1.0), AngularRate(1.0), 1.0}).ok());
    NoiseEnvironment env;
    env.b_e = -0.1;
    CHECK_FALSE(validate_environment(env).ok());
}

TEST_CASE("occupancy slope convention") {
    const double a = NoiseEnvironment::a_e_from_2pi_per_hz(1.3e-5);
    NoiseEnvironment env;
    env.a_e = a;
    CHECK_THAT(env.a_e_2pi_per_hz(), WithinRel(1.3e-5, 1e-15));
    // a_e Gamma_e with Gamma_e = 2pi * 11 kHz equals 1.3e-5 * 11000.
    CHECK_THAT(a * AngularRate::from_hz(11000.0).value(), WithinRel(0.143, 1e-13));
}
