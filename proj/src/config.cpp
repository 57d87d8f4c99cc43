#include "hcf/config.hpp"

#include "hcf/presets.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hcf {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> put;
};

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw ConfigError("config field '" + where + "': malformed number '" + v + "'");
    }
}

long parse_long(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        long d = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw ConfigError("config field '" + where + "': malformed integer '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config field '" + where + "': expected true/false, got '" + v + "'");
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        {"preset", "name", [](const RunConfig& c) { return c.preset_name; },
         [](RunConfig& c, const std::string& v) { c.preset_name = v; }},
        {"preset", "amplitude", [](const RunConfig& c) { return fmt_double(c.amplitude); },
         [](RunConfig& c, const std::string& v) { c.amplitude = parse_double(v, "preset.amplitude"); }},
        {"preset", "modes", [](const RunConfig& c) { return std::to_string(c.modes); },
         [](RunConfig& c, const std::string& v) { c.modes = static_cast<int>(parse_long(v, "preset.modes")); }},
        {"preset", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
         [](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(parse_long(v, "preset.seed")); }},

        {"grid", "n", [](const RunConfig& c) { return std::to_string(c.n); },
         [](RunConfig& c, const std::string& v) { c.n = static_cast<int>(parse_long(v, "grid.n")); }},
        {"grid", "resolution", [](const RunConfig& c) { return std::to_string(c.resolution); },
         [](RunConfig& c, const std::string& v) { c.resolution = static_cast<int>(parse_long(v, "grid.resolution")); }},
        {"grid", "mode", [](const RunConfig& c) { return c.mode; },
         [](RunConfig& c, const std::string& v) { c.mode = v; }},
        {"grid", "period", [](const RunConfig& c) { return fmt_double(c.period); },
         [](RunConfig& c, const std::string& v) { c.period = parse_double(v, "grid.period"); }},

        {"flow", "t_end", [](const RunConfig& c) { return fmt_double(c.t_end); },
         [](RunConfig& c, const std::string& v) { c.t_end = parse_double(v, "flow.t_end"); }},
        {"flow", "c1", [](const RunConfig& c) { return fmt_double(c.c1); },
         [](RunConfig& c, const std::string& v) { c.c1 = parse_double(v, "flow.c1"); }},
        {"flow", "safety", [](const RunConfig& c) { return fmt_double(c.safety); },
         [](RunConfig& c, const std::string& v) { c.safety = parse_double(v, "flow.safety"); }},
        {"flow", "min_dt", [](const RunConfig& c) { return fmt_double(c.min_dt); },
         [](RunConfig& c, const std::string& v) { c.min_dt = parse_double(v, "flow.min_dt"); }},
        {"flow", "max_dt", [](const RunConfig& c) { return fmt_double(c.max_dt); },
         [](RunConfig& c, const std::string& v) { c.max_dt = parse_double(v, "flow.max_dt"); }},
        {"flow", "record_every", [](const RunConfig& c) { return std::to_string(c.record_every); },
         [](RunConfig& c, const std::string& v) { c.record_every = static_cast<int>(parse_long(v, "flow.record_every")); }},
        {"flow", "snapshot_every", [](const RunConfig& c) { return std::to_string(c.snapshot_every); },
         [](RunConfig& c, const std::string& v) { c.snapshot_every = static_cast<int>(parse_long(v, "flow.snapshot_every")); }},
        {"flow", "checkpoint_every", [](const RunConfig& c) { return std::to_string(c.checkpoint_every); },
         [](RunConfig& c, const std::string& v) { c.checkpoint_every = static_cast<int>(parse_long(v, "flow.checkpoint_every")); }},
        {"flow", "max_steps", [](const RunConfig& c) { return std::to_string(c.max_steps); },
         [](RunConfig& c, const std::string& v) { c.max_steps = parse_long(v, "flow.max_steps"); }},

        {"monitors", "enabled", [](const RunConfig& c) { return std::string(c.monitors_enabled ? "true" : "false"); },
         [](RunConfig& c, const std::string& v) { c.monitors_enabled = parse_bool(v, "monitors.enabled"); }},
        {"monitors", "every", [](const RunConfig& c) { return std::to_string(c.monitors_every); },
         [](RunConfig& c, const std::string& v) { c.monitors_every = static_cast<int>(parse_long(v, "monitors.every")); }},
        {"monitors", "stride", [](const RunConfig& c) { return std::to_string(c.stride); },
         [](RunConfig& c, const std::string& v) { c.stride = static_cast<std::size_t>(parse_long(v, "monitors.stride")); }},
        {"monitors", "epsilon", [](const RunConfig& c) { return fmt_double(c.epsilon); },
         [](RunConfig& c, const std::string& v) { c.epsilon = parse_double(v, "monitors.epsilon"); }},
        {"monitors", "K", [](const RunConfig& c) { return fmt_double(c.K); },
         [](RunConfig& c, const std::string& v) { c.K = parse_double(v, "monitors.K"); }},
        {"monitors", "pinch_samples", [](const RunConfig& c) { return std::to_string(c.pinch_samples); },
         [](RunConfig& c, const std::string& v) { c.pinch_samples = parse_long(v, "monitors.pinch_samples"); }},
        {"monitors", "griffiths_restarts", [](const RunConfig& c) { return std::to_string(c.griffiths_restarts); },
         [](RunConfig& c, const std::string& v) { c.griffiths_restarts = static_cast<int>(parse_long(v, "monitors.griffiths_restarts")); }},
        {"monitors", "tolerance", [](const RunConfig& c) { return fmt_double(c.tolerance); },
         [](RunConfig& c, const std::string& v) { c.tolerance = parse_double(v, "monitors.tolerance"); }},

        {"heat", "enabled", [](const RunConfig& c) { return std::string(c.heat_enabled ? "true" : "false"); },
         [](RunConfig& c, const std::string& v) { c.heat_enabled = parse_bool(v, "heat.enabled"); }},
        {"heat", "k", [](const RunConfig& c) { return fmt_double(c.heat_k); },
         [](RunConfig& c, const std::string& v) { c.heat_k = parse_double(v, "heat.k"); }},
        {"heat", "B", [](const RunConfig& c) { return fmt_double(c.heat_B); },
         [](RunConfig& c, const std::string& v) { c.heat_B = parse_double(v, "heat.B"); }},
        {"heat", "eps", [](const RunConfig& c) { return fmt_double(c.heat_eps); },
         [](RunConfig& c, const std::string& v) { c.heat_eps = parse_double(v, "heat.eps"); }},
        {"heat", "bump_power", [](const RunConfig& c) { return std::to_string(c.bump_power); },
         [](RunConfig& c, const std::string& v) { c.bump_power = static_cast<int>(parse_long(v, "heat.bump_power")); }},
        {"heat", "bump_amplitude", [](const RunConfig& c) { return fmt_double(c.bump_amplitude); },
         [](RunConfig& c, const std::string& v) { c.bump_amplitude = parse_double(v, "heat.bump_amplitude"); }},

        {"check", "tolerance", [](const RunConfig& c) { return fmt_double(c.check_tolerance); },
         [](RunConfig& c, const std::string& v) { c.check_tolerance = parse_double(v, "check.tolerance"); }},
        {"check", "t_star", [](const RunConfig& c) { return fmt_double(c.t_star); },
         [](RunConfig& c, const std::string& v) { c.t_star = parse_double(v, "check.t_star"); }},
        {"check", "deltas",
         [](const RunConfig& c) {
             std::string s;
             for (std::size_t i = 0; i < c.deltas.size(); ++i)
                 s += (i ? "," : "") + fmt_double(c.deltas[i]);
             return s;
         },
         [](RunConfig& c, const std::string& v) {
             c.deltas.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ','))
                 c.deltas.push_back(parse_double(trim(item), "check.deltas"));
             if (c.deltas.empty()) throw ConfigError("config field 'check.deltas': empty list");
         }},

        {"output", "dir", [](const RunConfig& c) { return c.output_dir; },
         [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
        {"output", "formats", [](const RunConfig& c) { return c.formats; },
         [](RunConfig& c, const std::string& v) { c.formats = v; }},
    };
    return f;
}

}  // namespace

std::string RunConfig::dump() const {
    std::string out;
    std::string current;
    for (const auto& f : fields()) {
        if (f.section != current) {
            if (!out.empty()) out += "\n";
            out += "[" + f.section + "]\n";
            current = f.section;
        }
        out += f.key + " = " + f.get(*this) + "\n";
    }
    return out;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void RunConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "': expected section.key=value");
    const std::string lhs = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto dot = lhs.find('.');
    if (dot == std::string::npos)
        throw ConfigError("override '" + assignment + "': expected section.key=value");
    const std::string section = lhs.substr(0, dot);
    const std::string key = lhs.substr(dot + 1);
    for (const auto& f : fields())
        if (f.section == section && f.key == key) {
            f.put(*this, value);
            return;
        }
    throw ConfigError("unknown config field '" + section + "." + key + "'");
}

void RunConfig::validate() const {
    if (n < 1 || n > 3) throw ConfigError("grid.n: complex dimension must be in [1, 3]");
    if (resolution < 8 || !is_pow2(resolution))
        throw ConfigError("grid.resolution: must be a power of two >= 8 on every axis (got " +
                          std::to_string(resolution) + ")");
    if (mode != "spectral" && mode != "fd4")
        throw ConfigError("grid.mode: expected 'spectral' or 'fd4'");
    if (!(period > 0.0)) throw ConfigError("grid.period: must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("flow.t_end: must be nonnegative");
    if (!(safety > 0.0 && safety < 1.0)) throw ConfigError("flow.safety: must lie in (0, 1)");
    if (!(c1 > 0.0)) throw ConfigError("flow.c1: must be positive");
    if (epsilon < 0.0) throw ConfigError("monitors.epsilon: must be nonnegative");
    if (preset_name != "synthetic_injection") {
        bool known = false;
        for (const auto& p : preset_names()) known = known || p == preset_name;
        if (!known)
            throw ConfigError("preset.name: unknown preset '" + preset_name + "'");
    }
}

GridPtr RunConfig::make_grid_from_config() const {
    return make_grid(n, resolution,
                     mode == "fd4" ? DerivativeMode::CentralDifference4 : DerivativeMode::Spectral,
                     period);
}

FlowOptions RunConfig::flow_options() const {
    FlowOptions opt;
    opt.t_end = t_end;
    opt.controller.c1 = c1;
    opt.controller.safety = safety;
    opt.controller.min_dt = min_dt;
    opt.controller.max_dt = max_dt;
    opt.record_every = record_every;
    opt.snapshot_every = snapshot_every;
    opt.max_steps = max_steps;
    opt.seed = seed;
    opt.monitors.conditions_enabled = monitors_enabled;
    opt.monitors.condition_every = monitors_every;
    opt.monitors.condition_stride = stride;
    opt.monitors.epsilon = epsilon;
    opt.monitors.K = K;
    opt.monitors.pinch_samples = pinch_samples;
    opt.monitors.griffiths.restarts = griffiths_restarts;
    opt.monitors.tolerance = tolerance;
    opt.heat.enabled = heat_enabled;
    opt.heat.k = heat_k;
    opt.heat.B = heat_B;
    opt.heat.eps = heat_eps;
    opt.heat.bump_power = bump_power;
    opt.heat.bump_amplitude = bump_amplitude;
    return opt;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& f : fields())
            if (f.section == section && f.key == key) {
                try {
                    f.put(cfg, value);
                } catch (const ConfigError&) {
                    throw;
                } catch (...) {
                    throw ConfigError("line " + std::to_string(lineno) + ": bad value for " +
                                      section + "." + key);
                }
                found = true;
                break;
            }
        if (!found)
            throw ConfigError("line " + std::to_string(lineno) + ": unknown config field '" +
                              section + "." + key + "'");
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace hcf
