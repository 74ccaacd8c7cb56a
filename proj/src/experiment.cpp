#include "memnet/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <system_error>

namespace memnet {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
}

std::string join(std::string_view prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

void require_object(const json& j, std::string_view where) {
    if (!j.is_object()) config_fail(where.empty() ? "config" : std::string(where), "expected an object");
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    require_object(j, where);
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) config_fail(join(where, key), "unknown key");
    }
}

double number_field(const json& obj, std::string_view where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) config_fail(join(where, key), "expected a number");
    return v.get<double>();
}

long long integer_field(const json& obj, std::string_view where, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) config_fail(join(where, key), "expected an integer");
    return v.get<long long>();
}

Node parse_node(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        config_fail(field, "expected [row, col]");
    }
    return Node{v[0].get<int>(), v[1].get<int>()};
}

json node_json(const Node& n) { return json::array({n.row, n.col}); }

bool inside(const GridSize& g, const Node& n) { return n.row >= 0 && n.row < g.rows && n.col >= 0 && n.col < g.cols; }

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "': " +
                      (ec ? ec.message() : std::string("not a directory")));
    }
}

std::string unit_label(const Lattice& l, UnitId id) {
    const auto horizontal = static_cast<UnitId>(l.rows()) * (l.cols() - 1);
    if (id < horizontal) {
        return "h" + std::to_string(id / (l.cols() - 1)) + "_" + std::to_string(id % (l.cols() - 1));
    }
    const auto v = id - horizontal;
    return "v" + std::to_string(v / l.cols()) + "_" + std::to_string(v % l.cols());
}

template <typename UnitValue>
std::string unit_matrix(const Lattice& l, UnitValue value) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::string out;
    const int rows = 2 * l.rows() - 1;
    const int cols = 2 * l.cols() - 1;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            double v = 0.0;
            const int r = i / 2;
            const int c = j / 2;
            if (i % 2 == 0 && j % 2 == 0) {
                v = l.is_live({r, c}) ? 0.0 : nan;
            } else if (i % 2 == 0) {
                const auto s = l.slot_of(l.unit_id_between({r, c}, {r, c + 1}));
                v = s < 0 ? nan : value(static_cast<std::size_t>(s));
            } else if (j % 2 == 0) {
                const auto s = l.slot_of(l.unit_id_between({r, c}, {r + 1, c}));
                v = s < 0 ? nan : value(static_cast<std::size_t>(s));
            }
            if (j > 0) out += ' ';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

std::string entropy_csv(const EntropySeries& e) {
    std::string out = "t_seconds,t_normalized,entropy\n";
    for (const auto& s : e.samples) {
        out += format_number(s.t) + "," + format_number(s.t_normalized) + "," + format_number(s.sigma) + "\n";
    }
    return out;
}

std::string manifest_text(const Manifest& m, const ExperimentConfig& c, const std::vector<std::string>& extra) {
    std::string out = "# memnet run manifest\n";
    out += "schema_version " + std::to_string(m.schema_version) + "\n";
    out += "config_hash " + m.config_hash + "\n";
    out += "config " + dump_config(c) + "\n";
    for (const auto& line : extra) out += line + "\n";
    for (const auto& f : m.files) {
        out += "artifact " + f.name + " " + std::to_string(f.rows);
        if (f.cols > 0) out += " " + std::to_string(f.cols);
        out += "\n";
    }
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    if (std::isnan(v)) return "nan";
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ExperimentConfig parse_config(const json& j) {
    check_keys(j, "", {"grid", "device", "source", "sink", "pulse", "damage", "heal", "entropy_cut", "sweep",
                       "outputs"});
    ExperimentConfig c;

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, "grid", {"rows", "cols"});
        const auto rows = integer_field(g, "grid", "rows", c.grid.rows);
        const auto cols = integer_field(g, "grid", "cols", c.grid.cols);
        if (rows < 2 || rows > 100000) config_fail("grid.rows", "must be at least 2");
        if (cols < 2 || cols > 100000) config_fail("grid.cols", "must be at least 2");
        c.grid = {static_cast<int>(rows), static_cast<int>(cols)};
    }

    if (j.contains("device")) {
        const auto& d = j.at("device");
        check_keys(d, "device", {"r_on", "r_off", "gamma", "i_threshold"});
        c.device.r_on = number_field(d, "device", "r_on", c.device.r_on);
        c.device.r_off = number_field(d, "device", "r_off", c.device.r_off);
        c.device.gamma = number_field(d, "device", "gamma", c.device.gamma);
        c.device.i_threshold = number_field(d, "device", "i_threshold", c.device.i_threshold);
    }
    try {
        c.device.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const int mid = (c.grid.rows - 1) / 2;
    c.source = j.contains("source") ? parse_node(j.at("source"), "source") : Node{mid, 0};
    c.sink = j.contains("sink") ? parse_node(j.at("sink"), "sink") : Node{mid, c.grid.cols - 1};
    if (!inside(c.grid, c.source)) config_fail("source", "outside the grid");
    if (!inside(c.grid, c.sink)) config_fail("sink", "outside the grid");
    if (c.source == c.sink) config_fail("sink", "must differ from source");

    if (j.contains("pulse")) {
        const auto& p = j.at("pulse");
        check_keys(p, "pulse", {"amplitude", "dt", "max_time", "record_every", "drive"});
        c.pulse.amplitude = number_field(p, "pulse", "amplitude", c.pulse.amplitude);
        c.pulse.dt = number_field(p, "pulse", "dt", c.pulse.dt);
        c.pulse.max_time = number_field(p, "pulse", "max_time", c.pulse.max_time);
        const auto every = integer_field(p, "pulse", "record_every", static_cast<long long>(c.pulse.record_every));
        if (every < 1) config_fail("pulse.record_every", "must be at least 1");
        c.pulse.record_every = static_cast<std::size_t>(every);
        if (p.contains("drive")) {
            const auto& d = p.at("drive");
            if (!d.is_string()) config_fail("pulse.drive", "expected \"differential\" or \"grounded\"");
            const auto s = d.get<std::string>();
            if (s == "differential") c.pulse.drive = Drive::Differential;
            else if (s == "grounded") c.pulse.drive = Drive::Grounded;
            else config_fail("pulse.drive", "expected \"differential\" or \"grounded\"");
        }
    }
    try {
        c.pulse.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (j.contains("damage")) {
        const auto& d = j.at("damage");
        if (!d.is_array()) config_fail("damage", "expected a list of [row, col]");
        for (std::size_t k = 0; k < d.size(); ++k) {
            const auto field = "damage[" + std::to_string(k) + "]";
            const auto n = parse_node(d[k], field);
            if (!inside(c.grid, n)) config_fail(field, "outside the grid");
            if (n == c.source || n == c.sink) config_fail(field, "cannot remove a terminal");
            c.damage.push_back(n);
        }
    }

    if (j.contains("heal")) {
        const auto& h = j.at("heal");
        check_keys(h, "heal", {"amplitude"});
        c.heal_amplitude = number_field(h, "heal", "amplitude", c.heal_amplitude);
    }
    if (!std::isfinite(c.heal_amplitude) || c.heal_amplitude == 0.0) {
        config_fail("heal.amplitude", "must be finite and non-zero");
    }

    c.entropy_cut = static_cast<int>(integer_field(j, "", "entropy_cut", (c.grid.cols - 1) / 2));
    if (c.entropy_cut < 0 || c.entropy_cut > c.grid.cols - 2) {
        config_fail("entropy_cut", "must lie in [0, cols - 2]");
    }

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (!s.is_array()) config_fail("sweep", "expected a list of {r_on, amplitude}");
        c.sweep.clear();
        for (std::size_t k = 0; k < s.size(); ++k) {
            const auto field = "sweep[" + std::to_string(k) + "]";
            check_keys(s[k], field, {"r_on", "amplitude"});
            if (!s[k].contains("r_on") || !s[k].contains("amplitude")) config_fail(field, "needs r_on and amplitude");
            MemoryContentPoint point{number_field(s[k], field, "r_on", 0.0), number_field(s[k], field, "amplitude", 0.0)};
            if (!(point.r_on > 0.0 && point.r_on < c.device.r_off)) config_fail(field + ".r_on", "must lie in (0, r_off)");
            if (!std::isfinite(point.amplitude) || point.amplitude == 0.0) {
                config_fail(field + ".amplitude", "must be finite and non-zero");
            }
            c.sweep.push_back(point);
        }
    }

    if (j.contains("outputs")) {
        if (!j.at("outputs").is_string()) config_fail("outputs", "expected a directory path");
        c.outputs = j.at("outputs").get<std::string>();
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error in '" + path.string() + "': " + e.what());
    }
    return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["grid"] = {{"rows", c.grid.rows}, {"cols", c.grid.cols}};
    j["device"] = {{"r_on", c.device.r_on},
                   {"r_off", c.device.r_off},
                   {"gamma", c.device.gamma},
                   {"i_threshold", c.device.i_threshold}};
    j["source"] = node_json(c.source);
    j["sink"] = node_json(c.sink);
    j["pulse"] = {{"amplitude", c.pulse.amplitude},
                  {"dt", c.pulse.dt},
                  {"max_time", c.pulse.max_time},
                  {"record_every", c.pulse.record_every},
                  {"drive", to_string(c.pulse.drive)}};
    j["damage"] = json::array();
    for (const auto& n : c.damage) j["damage"].push_back(node_json(n));
    j["heal"] = {{"amplitude", c.heal_amplitude}};
    j["entropy_cut"] = c.entropy_cut;
    j["sweep"] = json::array();
    for (const auto& p : c.sweep) j["sweep"].push_back({{"r_on", p.r_on}, {"amplitude", p.amplitude}});
    j["outputs"] = c.outputs;
    return j;
}

std::string dump_config(const ExperimentConfig& c) { return config_to_json(c).dump(); }

std::string config_hash(const ExperimentConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(dump_config(c))));
    return buf;
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override: expected key=value, got '" + std::string(assignment) + "'");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override: malformed key '" + key + "'");
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError("override: '" + key + "' descends into a non-object");
            *node = json::object();
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

std::string_view preset_name(Preset p) {
    switch (p) {
        case Preset::Fig2: return "fig2";
        case Preset::Fig3a: return "fig3a";
        case Preset::Fig3b: return "fig3b";
        case Preset::Fig4: return "fig4";
        case Preset::Fig5: return "fig5";
    }
    return "unknown";
}

json preset_document(Preset p) {
    json j = json::object();
    j["outputs"] = "out/" + std::string(preset_name(p));
    switch (p) {
        case Preset::Fig2:
        case Preset::Fig3a:
        case Preset::Fig3b: break;
        case Preset::Fig4:
            j["device"] = {{"r_on", 160.0}};
            j["pulse"] = {{"amplitude", 15.25}};
            break;
        case Preset::Fig5:
            // Two nodes on the solution row plus one above it: the detour
            // below costs two extra units, the one above at least four.
            j["damage"] = json::array({json::array({4, 5}), json::array({5, 5}), json::array({5, 6})});
            break;
    }
    return j;
}

ExperimentConfig preset_config(Preset p) { return parse_config(preset_document(p)); }

Lattice make_lattice(const ExperimentConfig& c) {
    Lattice l = Lattice::build_grid(c.grid.rows, c.grid.cols, c.device, c.device.r_off);
    l.set_terminals(c.source, c.sink);
    return l.initialize_network(InitTarget::Off);
}

RunArtifacts run_from(const Lattice& start, const ExperimentConfig& c, double amplitude, std::string label) {
    const auto t0 = std::chrono::steady_clock::now();
    PulseSpec pulse = c.pulse;
    pulse.amplitude = amplitude;
    RunOptions opts;
    opts.entropy_cut = c.entropy_cut;
    for (auto id : source_row_units(start)) {
        if (start.find_unit(id) != nullptr) opts.watch.push_back(id);
    }
    auto run = run_pulse(start, pulse, opts);

    RunArtifacts a;
    a.label = std::move(label);
    a.initial_lattice = start;
    a.entropy = entropy_series(run, start.params(), amplitude, c.entropy_cut);
    a.switching = switching_rate_series(run.trace, start, opts.watch);
    a.readout = read_state(run.final_lattice);
    a.path = extract_path(run.final_lattice, a.readout);
    a.steady = run.steady;
    a.steps = run.steps;
    a.sim_time = run.time;
    a.initial_solve = std::move(run.initial_solve);
    a.final_solve = std::move(run.final_solve);
    a.final_lattice = std::move(run.final_lattice);
    a.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return a;
}

RunArtifacts run_fig2(const ExperimentConfig& c) { return run_from(make_lattice(c), c, c.pulse.amplitude, "fig2"); }

std::pair<RunArtifacts, RunArtifacts> run_fig5(const ExperimentConfig& c) {
    auto solution = run_from(make_lattice(c), c, c.pulse.amplitude, "solution");
    Lattice damaged = solution.final_lattice.remove_nodes(c.damage);
    auto healed = run_from(damaged, c, c.heal_amplitude, "healed");
    return {std::move(solution), std::move(healed)};
}

std::vector<SweepEntry> run_fig3b(const ExperimentConfig& c) {
    return sweep_memory_content(make_lattice(c), c.pulse, c.entropy_cut, c.sweep);
}

std::string resistance_map(const Lattice& l) {
    return unit_matrix(l, [&](std::size_t s) { return unit_resistance(l.units()[s]); });
}

std::string current_map(const Lattice& l, const SolveResult& sr) {
    return unit_matrix(l, [&](std::size_t s) { return sr.unit_current(s); });
}

Manifest emit_outputs(const RunArtifacts& a, const ExperimentConfig& c, const std::filesystem::path& dir) {
    ensure_directory(dir);
    Manifest m;
    m.config_hash = config_hash(c);
    const auto map_rows = static_cast<std::size_t>(2 * a.initial_lattice.rows() - 1);
    const auto map_cols = static_cast<std::size_t>(2 * a.initial_lattice.cols() - 1);

    write_file(dir / "resistance_initial.txt", resistance_map(a.initial_lattice));
    m.files.push_back({"resistance_initial.txt", map_rows, map_cols});
    write_file(dir / "resistance_final.txt", resistance_map(a.final_lattice));
    m.files.push_back({"resistance_final.txt", map_rows, map_cols});
    write_file(dir / "current_initial.txt", current_map(a.initial_lattice, a.initial_solve));
    m.files.push_back({"current_initial.txt", map_rows, map_cols});
    write_file(dir / "current_final.txt", current_map(a.final_lattice, a.final_solve));
    m.files.push_back({"current_final.txt", map_rows, map_cols});

    write_file(dir / "entropy.csv", entropy_csv(a.entropy));
    m.files.push_back({"entropy.csv", a.entropy.samples.size(), 0});

    std::string rates = "t_seconds,t_normalized";
    for (auto id : a.switching.units) rates += "," + unit_label(a.initial_lattice, id);
    rates += "\n";
    for (std::size_t k = 0; k < a.switching.t.size(); ++k) {
        rates += format_number(a.switching.t[k]) + "," + format_number(a.switching.t_normalized[k]);
        for (const auto& series : a.switching.rates) rates += "," + format_number(series[k]);
        rates += "\n";
    }
    write_file(dir / "switching_rate.csv", rates);
    m.files.push_back({"switching_rate.csv", a.switching.t.size(), 0});

    std::vector<std::string> extra;
    extra.push_back("label " + a.label);
    extra.push_back(std::string("steady ") + (a.steady ? "true" : "false"));
    extra.push_back("steps " + std::to_string(a.steps));
    extra.push_back("sim_time_s " + format_number(a.sim_time));
    extra.push_back("wall_time_s " + format_number(a.wall_time));
    extra.push_back("on_units " + std::to_string(a.path.on_units.size()));
    extra.push_back("path_length " + std::to_string(a.path.path_length));
    extra.push_back("extra_on_count " + std::to_string(a.path.extra_on_count));
    std::string path = "path";
    if (a.path.path) {
        for (const auto& n : *a.path.path) path += " " + to_string(n);
    } else {
        path += " none";
    }
    extra.push_back(path);
    write_file(dir / "manifest.txt", manifest_text(m, c, extra));
    return m;
}

Manifest emit_sweep_outputs(const std::vector<SweepEntry>& sweep, const ExperimentConfig& c,
                            const std::filesystem::path& dir) {
    ensure_directory(dir);
    Manifest m;
    m.config_hash = config_hash(c);
    std::vector<std::string> extra;
    for (const auto& e : sweep) {
        const auto ratio = format_number(c.device.r_off / e.point.r_on);
        if (!e.series) {
            extra.push_back("error ratio_" + ratio + " " + e.error);
            continue;
        }
        const auto name = "entropy_ratio_" + ratio + ".csv";
        write_file(dir / name, entropy_csv(*e.series));
        m.files.push_back({name, e.series->samples.size(), 0});
        const auto& s = e.series->samples;
        extra.push_back("series ratio_" + ratio + " amplitude " + format_number(e.point.amplitude) + " steady " +
                        (e.series->steady ? "true" : "false") + " sigma_initial " +
                        format_number(s.empty() ? 0.0 : s.front().sigma) + " sigma_final " +
                        format_number(s.empty() ? 0.0 : s.back().sigma));
    }
    write_file(dir / "manifest.txt", manifest_text(m, c, extra));
    return m;
}

}  // namespace memnet
