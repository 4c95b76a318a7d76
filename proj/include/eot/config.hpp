#pragma once

// YAML device configuration. Every rate-valued key ends in `_hz` and is given
// in ordinary frequency; conversion to angular rates happens here. The schema
// is documented in docs/config.md.

#include "eot/core.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eot {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OccupancyModel {
    double a_e_2pi_per_hz = 0.0;
    double b_e = 0.0;
    std::string source;  ///< free-text provenance, e.g. the readout method
};

struct NamedOperatingPoint {
    std::string name;
    OperatingPoint op;
};

struct Config {
    DeviceParams device;
    AngularRate n_th_gamma_m;
    AngularRate n_lock_gamma_lock;
    double n_bar_o = 0.0;
    OccupancyModel occupancy_up;
    OccupancyModel occupancy_down;
    std::vector<NamedOperatingPoint> operating_points;
    /// Scalar figures quoted for the device, carried verbatim for comparison.
    std::map<std::string, double> reported;
    std::vector<std::string> notes;

    /// Noise environment with the occupancy fit chosen for `d`.
    NoiseEnvironment environment(Direction d) const;
    const NamedOperatingPoint& point(const std::string& name) const;
};

/// Parses YAML text. Unknown keys and missing required keys raise ConfigError.
Config parse_config(const std::string& yaml_text);
Config load_config(const std::filesystem::path& path);

/// Resolves "bundled" to the shipped device config, else returns `path`.
std::filesystem::path resolve_config_path(const std::string& path);

}  // namespace eot
