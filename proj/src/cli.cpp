#include "eot/cli.hpp"

#include "eot/calibration.hpp"
#include "eot/capacity.hpp"
#include "eot/config.hpp"
#include "eot/core.hpp"
#include "eot/csv.hpp"
#include "eot/filter_response.hpp"
#include "eot/format.hpp"
#include "eot/noise_model.hpp"
#include "eot/optimizer.hpp"
#include "eot/registry.hpp"
#include "eot/spectra.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>

namespace eot::cli {

namespace {

using csv::write_row;
using F = std::string (*)(double);
constexpr F fmt = &format_double;

/// Raised for input that parses but fails a domain check.
class ValidationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes to `--out` when given, else to the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

const std::map<std::string, Direction> kDirections = {{"up", Direction::Up},
                                                      {"down", Direction::Down}};

void require_ok(const ValidationReport& r, const std::string& what) {
    if (r.ok()) return;
    std::string msg = what + " failed validation:";
    for (const auto& v : r.violations) msg += "\n  " + v;
    throw ValidationFailure(msg);
}

std::vector<std::string> budget_fields(const NoiseBudget& b) {
    return {fmt(b.motional), fmt(b.electromagnetic), fmt(b.correlation), fmt(b.total)};
}

struct ConfigOptions {
    std::string config = "bundled";
    std::string direction = "up";
    std::string model = "lossy";

    void add(CLI::App* sc) {
        sc->add_option("--config", config, "YAML device config, or 'bundled'")->capture_default_str();
        sc->add_option("--direction", direction, "up or down")
            ->check(CLI::IsMember({"up", "down"}))
            ->capture_default_str();
        sc->add_option("--model", model, "ideal, combined (down only) or lossy")
            ->check(CLI::IsMember({"ideal", "combined", "lossy"}))
            ->capture_default_str();
    }
    Config load() const {
        Config c = load_config(resolve_config_path(config));
        require_ok(validate_device(c.device), "device");
        require_ok(validate_environment(c.environment(Direction::Up)), "noise (up)");
        require_ok(validate_environment(c.environment(Direction::Down)), "noise (down)");
        return c;
    }
    Direction dir() const { return kDirections.at(direction); }
    NoiseModelKind kind() const { return parse_model_kind(model, dir()); }
};

/// Operating point from explicit rates, a named config point, or the first
/// config point.
OperatingPoint pick_point(const Config& c, const std::optional<std::string>& name,
                          const std::optional<double>& ge_hz, const std::optional<double>& go_hz,
                          const std::optional<double>& duty) {
    OperatingPoint op;
    if (name)
        op = c.point(*name).op;
    else if (!c.operating_points.empty())
        op = c.operating_points.front().op;
    else if (!ge_hz || !go_hz)
        throw ValidationFailure("config has no operating points; pass --gamma-e-hz and --gamma-o-hz");
    if (ge_hz) op.gamma_e = AngularRate::from_hz(*ge_hz);
    if (go_hz) op.gamma_o = AngularRate::from_hz(*go_hz);
    if (duty) op.duty = *duty;
    require_ok(validate_operating_point(op), "operating point");
    return op;
}

// ---------------------------------------------------------------- noise

void add_noise(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        ConfigOptions cfg;
        std::optional<std::string> point;
        std::optional<double> ge, go, duty;
        bool all = false;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("noise", "Itemized added-noise budget at one or more operating points");
    o->cfg.add(sc);
    sc->add_option("--point", o->point, "Named operating point from the config");
    sc->add_option("--gamma-e-hz", o->ge, "Gamma_e / 2pi, Hz (overrides the config point)");
    sc->add_option("--gamma-o-hz", o->go, "Gamma_o / 2pi, Hz (overrides the config point)");
    sc->add_option("--duty", o->duty, "Duty cycle in (0, 1]");
    sc->add_flag("--all-points", o->all, "Evaluate every operating point in the config");
    sc->add_option("--out", o->out, "Write CSV here instead of stdout");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            const Config c = o->cfg.load();
            const NoiseModelKind kind = o->cfg.kind();
            const NoiseEnvironment env = c.environment(o->cfg.dir());
            std::vector<std::pair<std::string, OperatingPoint>> points;
            if (o->all) {
                for (const auto& p : c.operating_points) points.emplace_back(p.name, p.op);
            } else {
                const OperatingPoint op = pick_point(c, o->point, o->ge, o->go, o->duty);
                const bool explicit_rates = o->ge || o->go;
                points.emplace_back(explicit_rates ? std::string("custom")
                                    : o->point ? *o->point
                                    : c.operating_points.front().name,
                                    op);
            }
            Sink sink(o->out, out);
            write_row(*sink, {"point", "direction", "model", "gamma_e_hz", "gamma_o_hz", "efficiency",
                              "throughput_hz", "n_add_motional", "n_add_em", "n_add_corr",
                              "n_add_total"});
            for (const auto& [name, op] : points) {
                const TradeoffPoint tp = evaluate_point(kind, c.device, env, op);
                if (tp.error) throw ValidationFailure(name + ": " + *tp.error);
                std::vector<std::string> row = {name, o->cfg.direction, to_string(kind),
                                                fmt(op.gamma_e.hz()), fmt(op.gamma_o.hz()),
                                                fmt(tp.efficiency), fmt(tp.throughput_hz)};
                for (auto& f : budget_fields(tp.budget)) row.push_back(f);
                write_row(*sink, row);
            }
        };
    });
}

// ---------------------------------------------------------------- sweep

void add_sweep(CLI::App& app, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    struct Opts {
        ConfigOptions cfg;
        std::string variable = "gamma-e";
        double low = 1e3, high = 1e5;
        std::optional<double> low_o, high_o;
        std::size_t samples = 50;
        std::optional<std::string> point;
        std::optional<double> ge, go, duty;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("sweep", "Throughput vs added-noise tradeoff over pump rates");
    o->cfg.add(sc);
    sc->add_option("--variable", o->variable, "gamma-e, gamma-o or both")
        ->check(CLI::IsMember({"gamma-e", "gamma-o", "both"}))
        ->capture_default_str();
    sc->add_option("--low-hz", o->low, "Lower end of the swept rate / 2pi, Hz")->capture_default_str();
    sc->add_option("--high-hz", o->high, "Upper end of the swept rate / 2pi, Hz")->capture_default_str();
    sc->add_option("--low-o-hz", o->low_o, "Gamma_o lower end for --variable both (default --low-hz)");
    sc->add_option("--high-o-hz", o->high_o, "Gamma_o upper end for --variable both (default --high-hz)");
    sc->add_option("--samples", o->samples, "Log-spaced samples per axis")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sc->add_option("--point", o->point, "Config operating point supplying the fixed rate");
    sc->add_option("--gamma-e-hz", o->ge, "Fixed Gamma_e / 2pi, Hz");
    sc->add_option("--gamma-o-hz", o->go, "Fixed Gamma_o / 2pi, Hz");
    sc->add_option("--duty", o->duty, "Duty cycle in (0, 1]");
    sc->add_option("--out", o->out, "Write CSV here instead of stdout");
    sc->callback([o, &action, &out, &err] {
        action = [o, &out, &err] {
            const Config c = o->cfg.load();
            const OperatingPoint fixed = pick_point(c, o->point, o->ge, o->go, o->duty);
            SweepSpec s;
            s.variable = parse_sweep_variable(o->variable);
            s.low = AngularRate::from_hz(o->low);
            s.high = AngularRate::from_hz(o->high);
            s.low_o = AngularRate::from_hz(o->low_o.value_or(o->low));
            s.high_o = AngularRate::from_hz(o->high_o.value_or(o->high));
            s.n_samples = o->samples;
            s.fixed_gamma_e = fixed.gamma_e;
            s.fixed_gamma_o = fixed.gamma_o;
            s.duty = fixed.duty;
            s.model = o->cfg.kind();
            const auto points = sweep(s, c.device, c.environment(o->cfg.dir()));
            Sink sink(o->out, out);
            write_row(*sink, {"gamma_e_hz", "gamma_o_hz", "throughput_hz", "n_add_total",
                              "n_add_motional", "n_add_em", "n_add_corr"});
            std::size_t failures = 0;
            for (const auto& p : points) {
                if (p.error) {
                    ++failures;
                    const std::string nan = "nan";
                    write_row(*sink, {fmt(p.op.gamma_e.hz()), fmt(p.op.gamma_o.hz()),
                                      fmt(p.throughput_hz), nan, nan, nan, nan});
                    continue;
                }
                write_row(*sink, {fmt(p.op.gamma_e.hz()), fmt(p.op.gamma_o.hz()), fmt(p.throughput_hz),
                                  fmt(p.budget.total), fmt(p.budget.motional),
                                  fmt(p.budget.electromagnetic), fmt(p.budget.correlation)});
            }
            if (failures) err << "warning: model failed at " << failures << " of " << points.size() << " points\n";
        };
    });
}

// ---------------------------------------------------------------- optimize

void add_optimize(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        ConfigOptions cfg;
        std::optional<std::string> point;
        std::optional<double> go;
        double gamma_low = 10.0, gamma_high = 1e7;
        double ratio_low = 1e-3, ratio_high = 1e3;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("optimize", "Noise-optimal pump rates");
    o->cfg.add(sc);
    sc->add_option("--point", o->point, "Config point supplying the fixed Gamma_o (up)");
    sc->add_option("--gamma-o-hz", o->go, "Fixed Gamma_o / 2pi for upconversion, Hz");
    sc->add_option("--gamma-low-hz", o->gamma_low, "Search range lower bound / 2pi, Hz")->capture_default_str();
    sc->add_option("--gamma-high-hz", o->gamma_high, "Search range upper bound / 2pi, Hz")->capture_default_str();
    sc->add_option("--ratio-low", o->ratio_low, "Lower bound on Gamma_e / Gamma_o (down)")->capture_default_str();
    sc->add_option("--ratio-high", o->ratio_high, "Upper bound on Gamma_e / Gamma_o (down)")->capture_default_str();
    sc->add_option("--out", o->out, "Write CSV here instead of stdout");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            const Config c = o->cfg.load();
            SearchOptions so;
            so.gamma_low = AngularRate::from_hz(o->gamma_low);
            so.gamma_high = AngularRate::from_hz(o->gamma_high);
            so.ratio_low = o->ratio_low;
            so.ratio_high = o->ratio_high;
            const NoiseEnvironment env = c.environment(o->cfg.dir());
            OptimizeResult r;
            if (o->cfg.dir() == Direction::Up) {
                const OperatingPoint base = pick_point(c, o->point, std::nullopt, o->go, std::nullopt);
                r = optimize_up(c.device, env, base.gamma_o, o->cfg.kind(), so);
            } else {
                r = optimize_down(c.device, env, o->cfg.kind(), so);
            }
            Sink sink(o->out, out);
            write_row(*sink, {"direction", "model", "gamma_e_hz", "gamma_o_hz", "n_add_motional",
                              "n_add_em", "n_add_corr", "n_add_total", "gamma_optimum", "ratio_optimum",
                              "evaluations"});
            std::vector<std::string> row = {o->cfg.direction, to_string(o->cfg.kind()),
                                            fmt(r.op.gamma_e.hz()), fmt(r.op.gamma_o.hz())};
            for (auto& f : budget_fields(r.budget)) row.push_back(f);
            row.push_back(to_string(r.gamma_kind));
            row.push_back(o->cfg.dir() == Direction::Up ? "n/a" : to_string(r.ratio_kind));
            row.push_back(std::to_string(r.evaluations));
            write_row(*sink, row);
        };
    });
}

// ---------------------------------------------------------------- capacity

void add_capacity(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        std::string table = "point";
        double eta = 0.5, n_add = 0.0, bandwidth = 1.0, duty = 1.0;
        std::size_t eta_samples = 20, n_add_samples = 20;
        double theta_min = 1e-2, theta_max = 1e6;
        std::string form = "small-eta";
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("capacity", "Capacity upper bound: one channel or tabulated grids");
    sc->add_option("--table", o->table,
                   "point: one channel; ub: c_ub over (eta, N_add); integrated: C_ub over (throughput, N_add)")
        ->check(CLI::IsMember({"point", "ub", "integrated"}))
        ->capture_default_str();
    sc->add_option("--eta", o->eta, "Peak efficiency (point; fixed eta for --form closed)")->capture_default_str();
    sc->add_option("--n-add", o->n_add, "Input-referred added noise (point)")->capture_default_str();
    sc->add_option("--bandwidth-hz", o->bandwidth, "Lorentzian half width B, Hz (point)")->capture_default_str();
    sc->add_option("--duty", o->duty, "Duty cycle")->capture_default_str();
    sc->add_option("--eta-samples", o->eta_samples, "Rows in eta for --table ub")->capture_default_str();
    sc->add_option("--n-add-samples", o->n_add_samples, "Samples in N_add for grids")->capture_default_str();
    sc->add_option("--throughput-min-hz", o->theta_min, "Grid lower throughput, Hz")->capture_default_str();
    sc->add_option("--throughput-max-hz", o->theta_max, "Grid upper throughput, Hz")->capture_default_str();
    sc->add_option("--form", o->form, "small-eta or closed (fixed --eta) for --table integrated")
        ->check(CLI::IsMember({"small-eta", "closed"}))
        ->capture_default_str();
    sc->add_option("--out", o->out, "Write CSV here instead of stdout");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            Sink sink(o->out, out);
            if (o->table == "point") {
                const ChannelSpec s{o->eta, o->n_add, o->bandwidth, o->duty};
                if (!(s.eta >= 0.0 && s.eta <= 1.0) || s.n_add < 0.0 || !(s.bandwidth_hz > 0.0) ||
                    !(s.duty > 0.0 && s.duty <= 1.0))
                    throw ValidationFailure("need 0 <= eta <= 1, n_add >= 0, bandwidth > 0, 0 < duty <= 1");
                const std::string peak = s.eta < 1.0 ? fmt(cap_ub_point(s.eta, s.n_add)) : "inf";
                const std::string quad = s.eta < 1.0 ? fmt(cap_integrated_quadrature(s)) : "nan";
                write_row(*sink, {"eta", "n_add", "bandwidth_hz", "duty", "throughput_hz", "c_ub_peak",
                                  "c_ub_closed", "c_ub_quadrature", "c_ub_small_eta"});
                write_row(*sink, {fmt(s.eta), fmt(s.n_add), fmt(s.bandwidth_hz), fmt(s.duty),
                                  fmt(s.throughput()), peak, fmt(cap_integrated_closed(s)), quad,
                                  fmt(cap_small_eta(s.n_add, s.throughput()))});
                return;
            }
            if (o->n_add_samples < 2) throw ValidationFailure("--n-add-samples must be at least 2");
            auto n_at = [&](std::size_t j) {
                return 0.999 * static_cast<double>(j) / static_cast<double>(o->n_add_samples - 1);
            };
            if (o->table == "ub") {
                if (o->eta_samples < 2) throw ValidationFailure("--eta-samples must be at least 2");
                write_row(*sink, {"eta", "n_add", "c_ub"});
                for (std::size_t i = 0; i < o->eta_samples; ++i) {
                    const double eta = 0.999 * static_cast<double>(i) / static_cast<double>(o->eta_samples - 1);
                    for (std::size_t j = 0; j < o->n_add_samples; ++j)
                        write_row(*sink, {fmt(eta), fmt(n_at(j)), fmt(cap_ub_point(eta, n_at(j)))});
                }
                return;
            }
            if (!(o->theta_min > 0.0 && o->theta_max > o->theta_min))
                throw ValidationFailure("need 0 < --throughput-min-hz < --throughput-max-hz");
            ContourGrid g;
            g.form = o->form == "closed" ? ContourForm::ClosedFixedEta : ContourForm::SmallEta;
            g.eta = o->eta;
            g.duty = o->duty;
            const std::size_t nt = 25;
            write_row(*sink, {"throughput_hz", "n_add", "c_ub"});
            for (std::size_t i = 0; i < nt; ++i) {
                const double t = o->theta_min *
                                 std::pow(o->theta_max / o->theta_min, static_cast<double>(i) / (nt - 1));
                for (std::size_t j = 0; j < o->n_add_samples; ++j)
                    write_row(*sink, {fmt(t), fmt(n_at(j)), fmt(capacity_at(g, t, n_at(j)))});
            }
        };
    });
}

// ---------------------------------------------------------------- contours

std::vector<double> default_levels() { return {1.0, 10.0, 100.0, 1e3, 1e4}; }

void add_contours(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        std::vector<double> levels = default_levels();
        std::string form = "small-eta";
        double eta = 0.5, duty = 1.0;
        double theta_min = 1e-2, theta_max = 1e6;
        std::size_t samples = 200;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("contours", "Iso-capacity polylines in the (throughput, N_add) plane");
    sc->add_option("--levels", o->levels, "Capacity levels, qubits/s (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    sc->add_option("--form", o->form, "small-eta or closed (fixed --eta)")
        ->check(CLI::IsMember({"small-eta", "closed"}))
        ->capture_default_str();
    sc->add_option("--eta", o->eta, "Fixed efficiency for --form closed")->capture_default_str();
    sc->add_option("--duty", o->duty, "Fixed duty cycle for --form closed")->capture_default_str();
    sc->add_option("--throughput-min-hz", o->theta_min, "Grid lower throughput, Hz")->capture_default_str();
    sc->add_option("--throughput-max-hz", o->theta_max, "Grid upper throughput, Hz")->capture_default_str();
    sc->add_option("--samples", o->samples, "N_add samples per contour")->capture_default_str();
    sc->add_option("--out", o->out, "Write CSV here instead of stdout");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            ContourGrid g;
            g.form = o->form == "closed" ? ContourForm::ClosedFixedEta : ContourForm::SmallEta;
            g.eta = o->eta;
            g.duty = o->duty;
            g.throughput_min_hz = o->theta_min;
            g.throughput_max_hz = o->theta_max;
            g.n_add_samples = o->samples;
            Sink sink(o->out, out);
            write_contours_csv(*sink, capacity_contours(o->levels, g));
        };
    });
}

// ---------------------------------------------------------------- filter-analysis

void add_filter(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        double linewidth = 21.7e3;
        double center = 0.0;
        double t_rep_multiplier = 3.0;
        std::vector<std::string> notches;
        std::string preset;
        double target = 0.94;
        std::size_t n_points = std::size_t{1} << 22;
        double span = 0.0;
        std::string trace;
        std::size_t trace_points = 2000;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("filter-analysis",
                                  "Notch and time-window efficiency of a Lorentzian output filter");
    auto* lw = sc->add_option("--linewidth-hz", o->linewidth, "Gamma_T / 2pi (FWHM), Hz")->capture_default_str();
    sc->add_option("--center-hz", o->center, "Filter center; notch bands are absolute")->capture_default_str();
    sc->add_option("--t-rep-multiplier", o->t_rep_multiplier, "Pulse period in units of 1 / Gamma_T")
        ->capture_default_str();
    sc->add_option("--notch", o->notches, "Brick-wall notch low_hz:high_hz (repeatable)");
    sc->add_option("--preset", o->preset, "'device': the two measured-filter notches, tuned to --target-eta-notch")
        ->check(CLI::IsMember({"device"}));
    sc->add_option("--target-eta-notch", o->target, "Notch transmission the preset is tuned to")
        ->capture_default_str();
    sc->add_option("--n-points", o->n_points, "DFT length (power of two)")->capture_default_str();
    sc->add_option("--span-hz", o->span, "DFT frequency span; 0 selects 1e4 linewidths")->capture_default_str();
    sc->add_option("--trace", o->trace, "Also write the t_s,energy_density trace to this file");
    sc->add_option("--trace-points", o->trace_points, "Maximum rows in the trace")->capture_default_str();
    sc->add_option("--out", o->out, "Write the report here instead of stdout");
    sc->callback([o, &action, &out, lw] {
        action = [o, &out, lw] {
            DftSettings ds;
            ds.n_points = o->n_points;
            ds.span_hz = o->span;
            FilterSpec spec;
            double scale = 0.0;
            if (!o->preset.empty()) {
                if (!o->notches.empty()) throw ValidationFailure("--preset and --notch are exclusive");
                if (lw->count() > 0 || o->center != 0.0)
                    throw ValidationFailure("--preset fixes the linewidth and center");
                const PresetTuning t = tune_preset(o->target, ds);
                spec = t.spec;
                scale = t.width_scale;
            } else {
                spec.linewidth_hz = o->linewidth;
                spec.center_hz = o->center;
                std::vector<std::pair<double, double>> bands;
                for (const auto& n : o->notches) bands.push_back(ExclusionBands::parse_band(n));
                spec.notches = ExclusionBands(bands);
            }
            if (!(spec.linewidth_hz > 0.0) || !(o->t_rep_multiplier > 0.0))
                throw ValidationFailure("linewidth and t_rep multiplier must be positive");
            const double t_rep = o->t_rep_multiplier / (kTwoPi * spec.linewidth_hz);
            const FilterReport r = analyze_filter(spec, t_rep, ds);

            Sink sink(o->out, out);
            std::ostream& os = *sink;
            os << "# linewidth_hz        " << fmt(spec.linewidth_hz) << '\n'
               << "# notches             " << spec.notches.bands().size() << '\n';
            for (const auto& [lo, hi] : spec.notches.bands())
                os << "#   " << fmt(lo) << " .. " << fmt(hi) << " Hz\n";
            if (!o->preset.empty()) os << "# notch width scale   " << fmt(scale) << '\n';
            os << "# t_rep_s             " << fmt(r.t_rep_s) << '\n'
               << "# eta_notch           " << fmt(r.eta_notch) << '\n'
               << "# eta_temporal        " << fmt(r.eta_temporal) << '\n'
               << "# eta_total           " << fmt(r.eta_total) << '\n'
               << "# tail_noise_photons  " << fmt(r.tail_noise_photons) << '\n'
               << "# tail_one_pulse      " << fmt(r.tail_noise_one_pulse) << '\n'
               << "# pre_window_energy   " << fmt(r.pre_window_energy) << '\n';
            write_row(os, {"linewidth_hz", "t_rep_s", "eta_notch", "eta_temporal", "eta_total",
                           "tail_noise_photons", "tail_noise_one_pulse", "pre_window_energy"});
            write_row(os, {fmt(spec.linewidth_hz), fmt(r.t_rep_s), fmt(r.eta_notch), fmt(r.eta_temporal),
                           fmt(r.eta_total), fmt(r.tail_noise_photons), fmt(r.tail_noise_one_pulse),
                           fmt(r.pre_window_energy)});

            if (!o->trace.empty()) {
                const ImpulseResponse ir = impulse_response(spec, ds);
                const std::size_t n = ir.energy.size();
                // Window [-t_rep, 5 t_rep] in time order, decimated by block sums.
                std::vector<std::size_t> idx;
                for (std::size_t k = n / 2; k < n; ++k)
                    if (ir.time_at(k) >= -t_rep) idx.push_back(k);
                for (std::size_t k = 0; k < n / 2; ++k)
                    if (ir.time_at(k) <= 5.0 * t_rep) idx.push_back(k);
                const std::size_t stride =
                    std::max<std::size_t>(1, (idx.size() + o->trace_points - 1) / std::max<std::size_t>(1, o->trace_points));
                std::ofstream tf(o->trace, std::ios::binary);
                if (!tf) throw std::runtime_error("cannot open '" + o->trace + "' for writing");
                write_row(tf, {"t_s", "energy_density"});
                for (std::size_t i = 0; i + stride <= idx.size(); i += stride) {
                    double e = 0.0;
                    for (std::size_t j = i; j < i + stride; ++j) e += ir.energy[idx[j]];
                    write_row(tf, {fmt(ir.time_at(idx[i])), fmt(e / (stride * ir.dt))});
                }
            }
        };
    });
}

// ---------------------------------------------------------------- fit-occupancy

std::vector<OccupancyRecord> read_occupancy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    const csv::Table t = csv::read(in, {"gamma_e_hz", "n_bar_e", "sigma", "method"});
    std::vector<OccupancyRecord> recs;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const std::size_t line = t.line_numbers[i];
        OccupancyRecord rec;
        rec.gamma_e = AngularRate::from_hz(csv::parse_double(r[0], line, "gamma_e_hz"));
        rec.n_bar_e = csv::parse_double(r[1], line, "n_bar_e");
        rec.sigma = csv::parse_double(r[2], line, "sigma");
        if (!(rec.sigma > 0.0)) throw csv::ParseError(line, "sigma must be positive");
        try {
            rec.method = parse_readout_method(r[3]);
        } catch (const std::invalid_argument& e) {
            throw csv::ParseError(line, e.what());
        }
        recs.push_back(rec);
    }
    return recs;
}

void add_fit_occupancy(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        std::string input;
        std::string method;
        bool unweighted = false;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("fit-occupancy", "Linear fit n_bar_e = a_e Gamma_e + b_e per readout method");
    sc->add_option("--input", o->input, "CSV with header gamma_e_hz,n_bar_e,sigma,method")->required();
    sc->add_option("--method", o->method, "Fit only this readout method")
        ->check(CLI::IsMember({"microwave", "optomechanical"}));
    sc->add_flag("--unweighted", o->unweighted, "Ignore sigma and fit with unit weights");
    sc->add_option("--out", o->out, "Write the report here instead of stdout");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            const auto recs = read_occupancy(o->input);
            std::vector<ReadoutMethod> methods;
            if (!o->method.empty())
                methods.push_back(parse_readout_method(o->method));
            else
                methods = {ReadoutMethod::Microwave, ReadoutMethod::Optomechanical};
            Sink sink(o->out, out);
            *sink << "# a_e is reported as a_e * 2pi in 1/Hz (slope against Gamma_e / 2pi)\n";
            write_row(*sink, {"method", "n_records", "a_e_2pi_per_hz", "a_e_2pi_per_hz_sigma", "b_e",
                              "b_e_sigma", "covariance_ab_2pi_per_hz", "chi_squared", "weighting"});
            std::size_t fitted = 0;
            for (const ReadoutMethod m : methods) {
                std::vector<OccupancyRecord> sub;
                std::copy_if(recs.begin(), recs.end(), std::back_inserter(sub),
                             [m](const OccupancyRecord& r) { return r.method == m; });
                if (sub.empty()) continue;
                const OccupancyFit f =
                    fit_occupancy(sub, o->unweighted ? Weighting::Unweighted : Weighting::InverseVariance);
                write_row(*sink, {to_string(m), std::to_string(f.n_records), fmt(f.a_e_2pi_per_hz()),
                                  fmt(f.a_e_2pi_per_hz_sigma()), fmt(f.b_e), fmt(f.b_e_sigma()),
                                  fmt(f.covariance[1] * kTwoPi), fmt(f.chi_squared),
                                  o->unweighted ? "unweighted" : "inverse-variance"});
                ++fitted;
            }
            if (!fitted) throw ValidationFailure("no records for the requested readout method");
        };
    });
}

// ---------------------------------------------------------------- xi-e

void add_xi_e(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        ReadoutCalInput in;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("xi-e", "Microwave readout efficiency from the calibration factors");
    sc->add_option("--xi-o", o->in.xi_o, "Optical detection efficiency")->required();
    sc->add_option("--eps-cl", o->in.eps_cl, "Cavity / local-oscillator mode matching")->capture_default_str();
    sc->add_option("--ratio-det", o->in.ratio_det, "N_det,e / N_det,o at the stiff mode")->required();
    sc->add_option("--kappa-e-over-ext", o->in.kappa_e_over_ext, "kappa_e / kappa_e,ext")->capture_default_str();
    sc->add_option("--kappa-o-ext-over-total", o->in.kappa_o_ext_over_total, "kappa_o,ext / kappa_o")
        ->capture_default_str();
    sc->add_option("--gamma-o-over-e", o->in.gamma_o_over_e, "Gamma_o / Gamma_e")->capture_default_str();
    sc->add_option("--gain-o-over-e", o->in.gain_o_over_e, "A_o / A_e")->capture_default_str();
    sc->add_option("--stiff-mode-hz", o->in.stiff_mode_hz, "Stiff-mode frequency (label only)")
        ->capture_default_str();
    sc->add_option("--out", o->out, "Write CSV here instead of stdout");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            const ReadoutCalInput& in = o->in;
            const double x = xi_e(in);
            Sink sink(o->out, out);
            write_row(*sink, {"xi_o", "eps_cl", "ratio_det", "kappa_e_over_ext", "kappa_o_ext_over_total",
                              "gamma_o_over_e", "gain_o_over_e", "stiff_mode_hz", "xi_e"});
            write_row(*sink, {fmt(in.xi_o), fmt(in.eps_cl), fmt(in.ratio_det), fmt(in.kappa_e_over_ext),
                              fmt(in.kappa_o_ext_over_total), fmt(in.gamma_o_over_e), fmt(in.gain_o_over_e),
                              fmt(in.stiff_mode_hz), fmt(x)});
        };
    });
}

// ---------------------------------------------------------------- compare

Registry load_registry_arg(const std::string& path) {
    return path == "bundled" ? load_bundled_registry() : load_registry(path);
}

void add_compare(CLI::App& app, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    struct Opts {
        std::string registry = "bundled";
        std::string direction = "up";
        std::string config = "bundled";
        std::string model = "lossy";
        std::vector<double> levels;
        std::string contours_out;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("compare", "Registry scatter plus live model points and capacity contours");
    sc->add_option("--registry", o->registry, "Registry CSV, or 'bundled'")->capture_default_str();
    sc->add_option("--direction", o->direction, "up or down")
        ->check(CLI::IsMember({"up", "down"}))
        ->capture_default_str();
    sc->add_option("--config", o->config, "Config for live points; 'bundled', a path, or 'none'")
        ->capture_default_str();
    sc->add_option("--model", o->model, "Noise model for live points")
        ->check(CLI::IsMember({"ideal", "combined", "lossy"}))
        ->capture_default_str();
    sc->add_option("--levels", o->levels, "Contour levels, qubits/s (comma separated)")->delimiter(',');
    sc->add_option("--contours-out", o->contours_out, "Write contour CSV here (default: after the scatter)");
    sc->add_option("--out", o->out, "Write the scatter CSV here instead of stdout");
    sc->callback([o, &action, &out, &err] {
        action = [o, &out, &err] {
            const Registry reg = load_registry_arg(o->registry);
            for (const auto& d : reg.duplicates) err << "warning: duplicate registry entry " << d << '\n';
            const Direction dir = kDirections.at(o->direction);
            std::optional<ModelInputs> live;
            if (o->config != "none") {
                const Config c = load_config(resolve_config_path(o->config));
                ModelInputs mi;
                mi.params = c.device;
                mi.env = c.environment(dir);
                mi.model = parse_model_kind(o->model, dir);
                for (const auto& p : c.operating_points)
                    mi.points.push_back({"this work (" + o->model + " model, " + p.name + ")", p.op});
                live = mi;
            }
            const FigureBundle b = emit_comparison(reg.records, dir, o->levels, ContourGrid{}, live);
            Sink sink(o->out, out);
            write_scatter_csv(*sink, b);
            if (!o->levels.empty()) {
                if (o->contours_out.empty()) {
                    *sink << '\n';
                    write_contours_csv(*sink, b.contours);
                } else {
                    Sink cs(o->contours_out, out);
                    write_contours_csv(*cs, b.contours);
                }
            }
        };
    });
}

// ---------------------------------------------------------------- validate

void add_validate(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        std::vector<std::string> configs;
        std::vector<std::string> registries;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("validate", "Check configs and registries; exit 1 on any violation");
    sc->add_option("--config", o->configs, "Config to check (repeatable; 'bundled' allowed)");
    sc->add_option("--registry", o->registries, "Registry to check (repeatable; 'bundled' allowed)");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            auto configs = o->configs;
            auto registries = o->registries;
            if (configs.empty() && registries.empty()) {
                configs = {"bundled"};
                registries = {"bundled"};
            }
            std::vector<std::string> problems;
            for (const auto& path : configs) {
                try {
                    const Config c = load_config(resolve_config_path(path));
                    auto collect = [&](const ValidationReport& r, const std::string& what) {
                        for (const auto& v : r.violations) problems.push_back(path + ": " + what + ": " + v);
                    };
                    collect(validate_device(c.device), "device");
                    collect(validate_environment(c.environment(Direction::Up)), "noise (up)");
                    collect(validate_environment(c.environment(Direction::Down)), "noise (down)");
                    for (const auto& p : c.operating_points)
                        collect(validate_operating_point(p.op), "operating point " + p.name);
                    out << "config " << path << ": " << c.operating_points.size() << " operating points\n";
                } catch (const std::exception& e) {
                    problems.push_back(path + ": " + e.what());
                }
            }
            for (const auto& path : registries) {
                try {
                    const Registry reg = load_registry_arg(path);
                    for (const auto& d : reg.duplicates) problems.push_back(path + ": duplicate entry " + d);
                    out << "registry " << path << ": " << reg.records.size() << " records\n";
                } catch (const std::exception& e) {
                    problems.push_back(path + ": " + e.what());
                }
            }
            if (!problems.empty()) {
                std::string msg = std::to_string(problems.size()) + " problem(s):";
                for (const auto& p : problems) msg += "\n  " + p;
                throw ValidationFailure(msg);
            }
            out << "ok\n";
        };
    });
}

// ---------------------------------------------------------------- fit-spectrum

Spectrum read_spectrum(const std::string& path, SpectrumKind kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    const csv::Table t = csv::read(in, {"freq_hz", "value"});
    if (t.rows.size() < 2) throw ValidationFailure(path + ": need at least two rows");
    std::vector<double> f, v;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        f.push_back(csv::parse_double(t.rows[i][0], t.line_numbers[i], "freq_hz"));
        v.push_back(csv::parse_double(t.rows[i][1], t.line_numbers[i], "value"));
    }
    const FrequencyGrid g(f.front(), f.back(), f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i] - g.at(i)) > 1e-6 * g.spacing())
            throw csv::ParseError(t.line_numbers[i], "frequencies must be uniformly spaced and ascending");
    return Spectrum(g, v, kind);
}

void add_fit_spectrum(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    struct Opts {
        std::string input;
        std::string efficiency;
        std::vector<std::string> exclude;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sc = app.add_subcommand("fit-spectrum", "Lorentzian fit of a noise spectrum with excluded bands");
    sc->add_option("--input", o->input, "Spectrum CSV with header freq_hz,value")->required();
    sc->add_option("--efficiency", o->efficiency,
                   "Efficiency spectrum on the same grid; input-refers the noise and reports its average");
    sc->add_option("--exclude", o->exclude, "Excluded band low_hz:high_hz (repeatable)");
    sc->add_option("--out", o->out, "Write CSV here instead of stdout");
    sc->callback([o, &action, &out] {
        action = [o, &out] {
            std::vector<std::pair<double, double>> bands;
            for (const auto& b : o->exclude) bands.push_back(ExclusionBands::parse_band(b));
            const ExclusionBands ex(bands);
            Spectrum s = read_spectrum(o->input, SpectrumKind::OutputNoise);
            std::optional<Spectrum> eff;
            if (!o->efficiency.empty()) {
                eff = read_spectrum(o->efficiency, SpectrumKind::Efficiency);
                s = input_refer(s, *eff).spectrum;
            }
            const LorentzianFit fit = fit_lorentzian(s, ex);
            Sink sink(o->out, out);
            std::vector<std::string> head = {"center_hz", "fwhm_hz", "peak_height", "floor", "peak_value",
                                             "residual_norm", "iterations", "converged"};
            std::vector<std::string> row = {fmt(fit.center_hz), fmt(fit.fwhm_hz), fmt(fit.peak_height),
                                            fmt(fit.floor), fmt(fit(fit.center_hz)), fmt(fit.residual_norm),
                                            std::to_string(fit.iterations), fit.converged ? "true" : "false"};
            if (eff) {
                head.push_back("n_add_averaged");
                row.push_back(fmt(averaged_added_noise(s, *eff, ex)));
            }
            write_row(*sink, head);
            write_row(*sink, row);
        };
    });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transducer noise, throughput and capacity toolkit", "eot"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::function<void()> action;
    add_noise(app, action, out);
    add_sweep(app, action, out, err);
    add_optimize(app, action, out);
    add_capacity(app, action, out);
    add_contours(app, action, out);
    add_filter(app, action, out);
    add_fit_occupancy(app, action, out);
    add_fit_spectrum(app, action, out);
    add_xi_e(app, action, out);
    add_compare(app, action, out, err);
    add_validate(app, action, out);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    if (!action) {
        err << app.help();
        return kExitUsage;
    }
    try {
        action();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace eot::cli
