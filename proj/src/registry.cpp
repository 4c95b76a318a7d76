#include "eot/registry.hpp"

#include "eot/csv.hpp"
#include "eot/format.hpp"

#include <fstream>
#include <set>

namespace eot {

namespace {

DeviceRecord parse_record(const std::vector<std::string>& f, std::size_t line) {
    DeviceRecord r;
    r.label = f[0];
    if (r.label.empty()) throw csv::ParseError(line, "empty label");
    try {
        r.direction = parse_direction(f[1]);
    } catch (const std::invalid_argument& e) {
        throw csv::ParseError(line, e.what());
    }
    r.n_add = csv::parse_double(f[2], line, "n_add");
    r.eta = csv::parse_double(f[3], line, "eta");
    r.bandwidth_hz = csv::parse_double(f[4], line, "bandwidth_hz");
    r.duty = csv::parse_double(f[5], line, "duty");
    r.source = f[6];
    r.notes = f[7];
    if (r.n_add < 0.0) throw csv::ParseError(line, "n_add must be nonnegative");
    if (!(r.eta > 0.0 && r.eta <= 1.0)) throw csv::ParseError(line, "eta must lie in (0, 1]");
    if (!(r.bandwidth_hz > 0.0)) throw csv::ParseError(line, "bandwidth_hz must be positive");
    if (!(r.duty > 0.0 && r.duty <= 1.0)) throw csv::ParseError(line, "duty must lie in (0, 1]");
    return r;
}

void append(Registry& into, std::set<std::string>& seen, Registry&& from) {
    for (auto& r : from.records) {
        const std::string key = r.label + " (" + to_string(r.direction) + ")";
        if (!seen.insert(key).second) into.duplicates.push_back(key);
        into.records.push_back(std::move(r));
    }
}

}  // namespace

Registry read_registry(std::istream& in) {
    const csv::Table t = csv::read(in, kRegistryHeader);
    Registry reg;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        DeviceRecord r = parse_record(t.rows[i], t.line_numbers[i]);
        const std::string key = r.label + " (" + to_string(r.direction) + ")";
        if (!seen.insert(key).second) reg.duplicates.push_back(key);
        reg.records.push_back(std::move(r));
    }
    return reg;
}

Registry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open registry '" + path.string() + "'");
    try {
        return read_registry(in);
    } catch (const csv::ParseError& e) {
        throw csv::ParseError(e.line(), path.string() + ": " + e.what());
    }
}

std::filesystem::path bundled_registry_path() {
    return std::filesystem::path(EOT_DATA_DIR) / "registry" / "published.csv";
}

std::filesystem::path bundled_external_path() {
    return std::filesystem::path(EOT_DATA_DIR) / "registry" / "external_upconversion.csv";
}

Registry load_bundled_registry() {
    Registry reg;
    std::set<std::string> seen;
    append(reg, seen, load_registry(bundled_registry_path()));
    if (std::filesystem::exists(bundled_external_path()))
        append(reg, seen, load_registry(bundled_external_path()));
    return reg;
}

void write_registry(std::ostream& out, const std::vector<DeviceRecord>& records) {
    csv::write_row(out, kRegistryHeader);
    for (const auto& r : records)
        csv::write_row(out, {r.label, to_string(r.direction), format_double(r.n_add),
                             format_double(r.eta), format_double(r.bandwidth_hz),
                             format_double(r.duty), r.source, r.notes});
}

FigureBundle emit_comparison(const std::vector<DeviceRecord>& records, Direction direction,
                             const std::vector<double>& levels, const ContourGrid& grid,
                             const std::optional<ModelInputs>& model) {
    if (records.empty()) throw std::invalid_argument("registry is empty");
    FigureBundle b;
    b.direction = direction;
    for (const auto& r : records) {
        if (r.direction != direction) continue;
        b.scatter.push_back({r.throughput_hz(), r.n_add, r.label, r.direction});
    }
    if (model) {
        const NoiseModelKind kind = model->model.value_or(
            direction == Direction::Up ? NoiseModelKind::LossyUp : NoiseModelKind::LossyDown);
        if (direction_of(kind) != direction)
            throw std::invalid_argument("live model direction does not match the bundle direction");
        for (const auto& p : model->points) {
            const NoiseBudget nb = evaluate(kind, model->params, p.op, model->env);
            const double eta = apparent_efficiency(model->params, p.op);
            const double theta = throughput(eta, bandwidth_hz(model->params, p.op), p.op.duty);
            b.scatter.push_back({theta, nb.total, p.label, direction});
        }
    }
    if (!levels.empty()) b.contours = capacity_contours(levels, grid);
    return b;
}

void write_scatter_csv(std::ostream& out, const FigureBundle& bundle) {
    csv::write_row(out, {"throughput_hz", "n_add", "label", "direction"});
    for (const auto& p : bundle.scatter)
        csv::write_row(out, {format_double(p.throughput_hz), format_double(p.n_add), p.label,
                             to_string(p.direction)});
}

void write_contours_csv(std::ostream& out, const std::vector<ContourLine>& contours) {
    csv::write_row(out, {"level", "x_throughput_hz", "y_n_add"});
    for (const auto& line : contours)
        for (const auto& [x, y] : line.points)
            csv::write_row(out, {format_double(line.level), format_double(x), format_double(y)});
}

}  // namespace eot
