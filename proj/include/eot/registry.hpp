#pragma once

// Published-device registry and figure-data bundles for throughput vs added
// noise comparisons.

#include "eot/capacity.hpp"
#include "eot/core.hpp"
#include "eot/noise_model.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace eot {

struct DeviceRecord {
    std::string label;
    Direction direction = Direction::Up;
    double n_add = 0.0;
    double eta = 0.0;
    double bandwidth_hz = 0.0;
    double duty = 1.0;
    std::string source;
    std::string notes;

    double throughput_hz() const { return throughput(eta, bandwidth_hz, duty); }
};

inline const std::vector<std::string> kRegistryHeader = {
    "label", "direction", "n_add", "eta", "bandwidth_hz", "duty", "source", "notes"};

struct Registry {
    std::vector<DeviceRecord> records;
    std::vector<std::string> duplicates;  ///< "label (direction)" seen more than once
};

/// Parses registry CSV. Malformed rows raise csv::ParseError carrying the line.
Registry read_registry(std::istream& in);
Registry load_registry(const std::filesystem::path& path);

/// Bundled registry: published rows plus any user-populated external
/// upconversion points shipped alongside it.
Registry load_bundled_registry();
std::filesystem::path bundled_registry_path();
std::filesystem::path bundled_external_path();

void write_registry(std::ostream& out, const std::vector<DeviceRecord>& records);

struct ScatterPoint {
    double throughput_hz = 0.0;
    double n_add = 0.0;
    std::string label;
    Direction direction = Direction::Up;
};

struct LivePoint {
    std::string label;
    OperatingPoint op;
};

struct ModelInputs {
    DeviceParams params;
    NoiseEnvironment env;
    std::vector<LivePoint> points;
    std::optional<NoiseModelKind> model;  ///< default: lossy for the requested direction
};

struct FigureBundle {
    Direction direction = Direction::Up;
    std::vector<ScatterPoint> scatter;
    std::vector<ContourLine> contours;
};

/// Scatter of the records in `direction` plus points evaluated live from
/// `model` (if given), and iso-capacity contours for `levels`.
FigureBundle emit_comparison(const std::vector<DeviceRecord>& records, Direction direction,
                             const std::vector<double>& levels, const ContourGrid& grid,
                             const std::optional<ModelInputs>& model = std::nullopt);

void write_scatter_csv(std::ostream& out, const FigureBundle& bundle);
void write_contours_csv(std::ostream& out, const std::vector<ContourLine>& contours);

}  // namespace eot
