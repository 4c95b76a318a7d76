#include "eot/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace eot {

namespace {

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double get_number(const YAML::Node& node, const std::string& where, const std::string& key) {
    const YAML::Node v = node[key];
    if (!v) throw ConfigError(where + ": missing required key '" + key + "'");
    double x = 0.0;
    try {
        x = v.as<double>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + "." + key + ": not a number");
    }
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": not finite");
    return x;
}

std::optional<double> get_optional(const YAML::Node& node, const std::string& where,
                                   const std::string& key) {
    if (!node[key]) return std::nullopt;
    return get_number(node, where, key);
}

OccupancyModel parse_occupancy(const YAML::Node& node, const std::string& where) {
    check_keys(node, where, {"a_e_2pi_per_hz", "b_e", "source"});
    OccupancyModel m;
    m.a_e_2pi_per_hz = get_number(node, where, "a_e_2pi_per_hz");
    m.b_e = get_number(node, where, "b_e");
    if (node["source"]) m.source = node["source"].as<std::string>();
    return m;
}

}  // namespace

NoiseEnvironment Config::environment(Direction d) const {
    const OccupancyModel& occ = d == Direction::Up ? occupancy_up : occupancy_down;
    NoiseEnvironment env;
    env.n_th_gamma_m = n_th_gamma_m;
    env.n_lock_gamma_lock = n_lock_gamma_lock;
    env.a_e = NoiseEnvironment::a_e_from_2pi_per_hz(occ.a_e_2pi_per_hz);
    env.b_e = occ.b_e;
    env.n_bar_o = n_bar_o;
    return env;
}

const NamedOperatingPoint& Config::point(const std::string& name) const {
    for (const auto& p : operating_points)
        if (p.name == name) return p;
    throw ConfigError("no operating point named '" + name + "'");
}

Config parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("YAML: ") + e.what());
    }
    check_keys(root, "config", {"device", "noise", "operating_points", "reported", "notes"});

    Config c;
    const YAML::Node dev = root["device"];
    if (!dev) throw ConfigError("config: missing section 'device'");
    check_keys(dev, "device",
               {"omega_m_hz", "gamma_m_hz", "kappa_e_hz", "kappa_e_ext_hz", "kappa_o_hz",
                "kappa_o_ext_hz", "eta_max", "eps_mode", "eps_pl", "eps_cl", "eps_e", "gain_e",
                "gain_o", "n_min_e", "n_min_o"});
    DeviceParams& p = c.device;
    p.omega_m = AngularRate::from_hz(get_number(dev, "device", "omega_m_hz"));
    p.gamma_m = AngularRate::from_hz(get_number(dev, "device", "gamma_m_hz"));
    p.kappa_e = AngularRate::from_hz(get_number(dev, "device", "kappa_e_hz"));
    p.kappa_e_ext = AngularRate::from_hz(get_number(dev, "device", "kappa_e_ext_hz"));
    p.kappa_o = AngularRate::from_hz(get_number(dev, "device", "kappa_o_hz"));
    p.kappa_o_ext = AngularRate::from_hz(get_number(dev, "device", "kappa_o_ext_hz"));
    p.eta_max = get_optional(dev, "device", "eta_max").value_or(1.0);
    p.eps_mode = get_optional(dev, "device", "eps_mode").value_or(1.0);
    p.eps_pl = get_optional(dev, "device", "eps_pl").value_or(1.0);
    p.eps_cl = get_optional(dev, "device", "eps_cl").value_or(1.0);
    p.eps_e = get_optional(dev, "device", "eps_e").value_or(1.0);
    try {
        p.gain_e = get_optional(dev, "device", "gain_e")
                       .value_or(default_sideband_gain(p.kappa_e, p.omega_m));
        p.gain_o = get_optional(dev, "device", "gain_o")
                       .value_or(default_sideband_gain(p.kappa_o, p.omega_m));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("device: ") + e.what());
    }
    p.n_min_e = get_optional(dev, "device", "n_min_e")
                    .value_or(default_backaction_limit(p.kappa_e, p.omega_m));
    p.n_min_o = get_optional(dev, "device", "n_min_o")
                    .value_or(default_backaction_limit(p.kappa_o, p.omega_m));

    const YAML::Node noise = root["noise"];
    if (!noise) throw ConfigError("config: missing section 'noise'");
    check_keys(noise, "noise",
               {"n_th_gamma_m_hz", "n_lock_gamma_lock_hz", "n_bar_o", "a_e_2pi_per_hz", "b_e",
                "occupancy"});
    c.n_th_gamma_m = AngularRate::from_hz(get_number(noise, "noise", "n_th_gamma_m_hz"));
    c.n_lock_gamma_lock =
        AngularRate::from_hz(get_optional(noise, "noise", "n_lock_gamma_lock_hz").value_or(0.0));
    c.n_bar_o = get_optional(noise, "noise", "n_bar_o").value_or(0.0);
    if (const YAML::Node occ = noise["occupancy"]) {
        if (noise["a_e_2pi_per_hz"] || noise["b_e"])
            throw ConfigError("noise: give either a_e_2pi_per_hz/b_e or occupancy, not both");
        check_keys(occ, "noise.occupancy", {"up", "down"});
        if (!occ["up"] || !occ["down"])
            throw ConfigError("noise.occupancy: both 'up' and 'down' are required");
        c.occupancy_up = parse_occupancy(occ["up"], "noise.occupancy.up");
        c.occupancy_down = parse_occupancy(occ["down"], "noise.occupancy.down");
    } else {
        c.occupancy_up.a_e_2pi_per_hz = get_number(noise, "noise", "a_e_2pi_per_hz");
        c.occupancy_up.b_e = get_number(noise, "noise", "b_e");
        c.occupancy_down = c.occupancy_up;
    }

    if (const YAML::Node ops = root["operating_points"]) {
        if (!ops.IsSequence()) throw ConfigError("operating_points: expected a list");
        std::set<std::string> names;
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const std::string where = "operating_points[" + std::to_string(i) + "]";
            check_keys(ops[i], where, {"name", "gamma_e_hz", "gamma_o_hz", "duty"});
            NamedOperatingPoint np;
            np.name = ops[i]["name"] ? ops[i]["name"].as<std::string>() : "point" + std::to_string(i);
            if (!names.insert(np.name).second)
                throw ConfigError(where + ": duplicate name '" + np.name + "'");
            np.op.gamma_e = AngularRate::from_hz(get_number(ops[i], where, "gamma_e_hz"));
            np.op.gamma_o = AngularRate::from_hz(get_number(ops[i], where, "gamma_o_hz"));
            np.op.duty = get_optional(ops[i], where, "duty").value_or(1.0);
            c.operating_points.push_back(np);
        }
    }

    if (const YAML::Node rep = root["reported"]) {
        if (!rep.IsMap()) throw ConfigError("reported: expected a mapping");
        for (const auto& kv : rep)
            c.reported[kv.first.as<std::string>()] = get_number(rep, "reported", kv.first.as<std::string>());
    }
    if (const YAML::Node notes = root["notes"]) {
        if (!notes.IsSequence()) throw ConfigError("notes: expected a list of strings");
        for (const auto& n : notes) c.notes.push_back(n.as<std::string>());
    }
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::filesystem::path resolve_config_path(const std::string& path) {
    if (path == "bundled") return std::filesystem::path(EOT_CONFIG_DIR) / "this_work.yaml";
    return path;
}

}  // namespace eot
