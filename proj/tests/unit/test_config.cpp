#include <catch2/catch_amalgamated.hpp>

#include "eot/config.hpp"

using namespace eot;
using Catch::Matchers::WithinRel;

namespace {

const char* kMinimal = R"(
device:
  omega_m_hz: 1.0e6
  gamma_m_hz: 5
  kappa_e_hz: 1.0e6
  kappa_e_ext_hz: 5.0e5
  kappa_o_hz: 2.0e6
  kappa_o_ext_hz: 2.0e6
noise:
  n_th_gamma_m_hz: 100
  a_e_2pi_per_hz: 2.0e-5
  b_e: 0.3
operating_points:
  - name: a
    gamma_e_hz: 1000
    gamma_o_hz: 2000
)";

}  // namespace

TEST_CASE("bundled config loads and validates") {
    const Config c = load_config(resolve_config_path("bundled"));
    CHECK_THAT(c.device.omega_m.hz(), WithinRel(1.27e6, 1e-15));
    CHECK_THAT(c.n_th_gamma_m.hz(), WithinRel(4150.0, 1e-15));
    CHECK_THAT(c.n_lock_gamma_lock.hz(), WithinRel(380.0, 1e-15));
    CHECK_THAT(c.environment(Direction::Up).a_e_2pi_per_hz(), WithinRel(1.3e-5, 1e-15));
    CHECK(c.environment(Direction::Up).b_e == 0.7);
    CHECK_THAT(c.environment(Direction::Down).a_e_2pi_per_hz(), WithinRel(1.05e-5, 1e-15));
    CHECK(c.environment(Direction::Down).b_e == 0.17);
    REQUIRE(c.operating_points.size() == 1);
    CHECK_THAT(c.point("measured").op.gamma_o.hz(), WithinRel(11000.0, 1e-15));
    CHECK(c.reported.at("throughput_headline_hz") == 7000.0);
    CHECK(c.reported.at("throughput_eta_b_hz") == 8800.0);
    CHECK(validate_device(c.device).ok());
}

TEST_CASE("sideband defaults fill omitted gains and backaction limits") {
    const Config c = parse_config(kMinimal);
    // kappa_e / 4 omega_m = 0.25
    CHECK_THAT(c.device.n_min_e, WithinRel(0.0625, 1e-15));
    CHECK_THAT(c.device.gain_e, WithinRel(1.0 / (1.0 - 0.0625), 1e-15));
    CHECK_THAT(c.device.n_min_o, WithinRel(0.25, 1e-15));
    CHECK_THAT(c.device.kappa_e_ratio(), WithinRel(0.5, 1e-15));
    CHECK(c.device.eps_e == 1.0);
    CHECK(c.n_lock_gamma_lock.value() == 0.0);
    // A single occupancy line serves both directions.
    CHECK(c.occupancy_up.b_e == c.occupancy_down.b_e);
}

TEST_CASE("explicit values override the defaults") {
    std::string text = kMinimal;
    text.insert(text.find("noise:"), "  gain_e: 1.5\n  n_min_o: 0.01\n");
    const Config c = parse_config(text);
    CHECK(c.device.gain_e == 1.5);
    CHECK(c.device.n_min_o == 0.01);
}

TEST_CASE("config errors are specific") {
    auto message = [](const std::string& text) -> std::string {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.what();
        }
        return "";
    };
    std::string typo = kMinimal;
    typo.replace(typo.find("gamma_m_hz"), 10, "gamma_mhz");
    CHECK(message(typo).find("unknown key 'gamma_mhz'") != std::string::npos);

    std::string missing = kMinimal;
    missing.erase(missing.find("  b_e: 0.3\n"), 11);
    CHECK(message(missing).find("'b_e'") != std::string::npos);

    std::string nan = kMinimal;
    nan.replace(nan.find("100"), 3, "abc");
    CHECK(message(nan).find("n_th_gamma_m_hz: not a number") != std::string::npos);

    std::string unresolved = kMinimal;
    unresolved.replace(unresolved.find("kappa_o_hz: 2.0e6"), 17, "kappa_o_hz: 5.0e6");
    CHECK(message(unresolved).find("sideband") != std::string::npos);

    CHECK(message("device: [1, 2]").find("expected a mapping") != std::string::npos);
    CHECK(message("{").find("YAML") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/dev.yaml"), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal).point("zzz"), ConfigError);
}
