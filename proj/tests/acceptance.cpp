// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "memnet/experiment.hpp"
#include "memnet/observables.hpp"
#include "oracles.hpp"

using namespace memnet;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return format_number(v); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Worst KCL imbalance over non-terminal nodes relative to the total current,
// and worst spread of net current over every vertical cut.
struct CircuitCheck {
    double kcl = 0.0;
    double cut = 0.0;
    std::size_t solves = 0;

    void add(const Lattice& l, const SolveResult& sr) {
        std::vector<double> net(l.node_count(), 0.0);
        for (std::size_t s = 0; s < l.unit_count(); ++s) {
            const auto& u = l.units()[s];
            net[l.index(u.a)] += sr.unit_current(s);
            net[l.index(u.b)] -= sr.unit_current(s);
        }
        const double scale = std::fabs(sr.total_current);
        for (std::size_t i = 0; i < net.size(); ++i) {
            const auto n = l.node_at(i);
            if (n == l.source() || n == l.sink() || l.is_removed(n)) continue;
            kcl = std::max(kcl, std::fabs(net[i]) / scale);
        }
        for (int j = 0; j + 1 < l.cols(); ++j) {
            const auto c = cross_section_currents(sr, l, j);
            const double total = std::accumulate(c.begin(), c.end(), 0.0);
            cut = std::max(cut, std::fabs(total - sr.total_current) / scale);
        }
        ++solves;
    }
};

RunResult checked_run(const Lattice& l, const PulseSpec& pulse, CircuitCheck& check) {
    RunOptions opts;
    opts.record_resistances = false;
    opts.on_sample = [&](double, const SolveResult& sr) { check.add(l, sr); };
    return run_pulse(l, pulse, opts);
}

bool same_unit_map(const Lattice& a, const Lattice& b) {
    if (a.unit_count() != b.unit_count()) return false;
    for (std::size_t s = 0; s < a.unit_count(); ++s) {
        const double ra = unit_resistance(a.units()[s]);
        const double rb = unit_resistance(b.units()[s]);
        if (std::memcmp(&ra, &rb, sizeof ra) != 0) return false;
    }
    return true;
}

// Shortest node path from source to sink over live nodes restricted to rows
// accepted by the predicate; 0 when none exists.
std::size_t restricted_distance(const Lattice& l, const std::function<bool(int)>& row_ok) {
    std::vector<int> dist(l.node_count(), -1);
    std::deque<std::size_t> q{l.index(l.source())};
    dist[q.front()] = 0;
    while (!q.empty()) {
        const auto k = q.front();
        q.pop_front();
        for (const auto& u : l.units()) {
            const auto a = l.index(u.a), b = l.index(u.b);
            const auto next = a == k ? b : (b == k ? a : l.node_count());
            if (next == l.node_count() || dist[next] >= 0 || !row_ok(l.node_at(next).row)) continue;
            dist[next] = dist[k] + 1;
            q.push_back(next);
        }
    }
    const int d = dist[l.index(l.sink())];
    return d < 0 ? 0 : static_cast<std::size_t>(d);
}

void criterion1and2(const ExperimentConfig& c, const RunArtifacts& a, double wall) {
    const auto& p = a.path;
    bool on_row = p.has_path();
    if (p.path) {
        for (const auto& n : *p.path) on_row = on_row && n.row == c.source.row;
    }
    const double extra_frac = static_cast<double>(p.extra_on_count) / static_cast<double>(a.final_lattice.unit_count());
    report(1, a.steady && p.has_path() && p.path_length == 10 && on_row && extra_frac <= 0.05 && wall < 10.0,
           "steady=" + std::string(a.steady ? "yes" : "no") + " path_length=" + std::to_string(p.path_length) +
               " on_source_row=" + (on_row ? "yes" : "no") + " extra_on/units=" + fmt(extra_frac) +
               " wall=" + fmt(std::round(wall * 100) / 100) + "s");

    const auto& sw = a.switching;
    const std::size_t n = sw.units.size();
    std::vector<double> peak(n);
    for (std::size_t w = 0; w < n; ++w) peak[w] = sw.peak_time(w);
    bool unimodal = n == 10;
    for (std::size_t k = 0; k + 1 < n / 2; ++k) unimodal = unimodal && peak[k] <= peak[k + 1];
    for (std::size_t k = n / 2; k + 1 < n; ++k) unimodal = unimodal && peak[k] >= peak[k + 1];
    const bool ends_first = n == 10 && std::max(peak[0], peak[9]) < std::min(peak[4], peak[5]);
    std::string times;
    for (double t : peak) times += (times.empty() ? "" : ",") + fmt(std::round(t * 1e5) / 1e2);
    report(2, unimodal && ends_first, "peak |dR/dt| times along the row [ms] = " + times);
}

void criterion3(const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sweep = run_fig3b(c);
    const double wall = seconds_since(t0);
    bool ok = sweep.size() == 4;
    std::string detail;
    std::vector<double> finals;
    for (const auto& e : sweep) {
        const double ratio = c.device.r_off / e.point.r_on;
        if (!e.series || e.series->samples.size() < 2) {
            ok = false;
            detail += " ratio " + fmt(ratio) + ": " + (e.error.empty() ? "no samples" : e.error);
            continue;
        }
        const auto& s = e.series->samples;
        const double first = s.front().sigma, last = s.back().sigma;
        // An increase episode is a maximal run of rising sample intervals.
        int increases = 0;
        bool rising = false;
        for (std::size_t k = 1; k < s.size(); ++k) {
            const bool up = s[k].sigma > s[k - 1].sigma + 1e-6;
            if (up && !rising) ++increases;
            rising = up;
        }
        const int allowed = ratio == 10.0 ? 1 : (ratio == 20.0 ? 0 : 1 << 30);
        ok = ok && last < first && increases <= allowed;
        finals.push_back(last);
        detail += " ratio " + fmt(ratio) + ": " + fmt(first) + "->" + fmt(last) + " (increase episodes " +
                  std::to_string(increases) + ")";
    }
    // Sweep order is decreasing memory content, so final entropy must rise.
    for (std::size_t k = 1; k < finals.size(); ++k) ok = ok && finals[k] > finals[k - 1];
    ok = ok && wall < 60.0;
    report(3, ok, "entropy" + detail + "; wall=" + fmt(std::round(wall * 100) / 100) + "s");
}

void criterion4(const ExperimentConfig& c, CircuitCheck& check) {
    const auto a = run_fig2(c);
    check.add(a.final_lattice, a.final_solve);
    report(4, a.path.extra_on_count > a.path.path_length,
           "ratio 1.25: on_units=" + std::to_string(a.path.on_units.size()) +
               " path_length=" + std::to_string(a.path.path_length) +
               " extra_on=" + std::to_string(a.path.extra_on_count));
}

void criterion5(const ExperimentConfig& c, CircuitCheck& check) {
    const auto [solution, healed] = run_fig5(c);
    check.add(healed.final_lattice, healed.final_solve);
    const auto& p = healed.path;
    const int row = c.source.row;
    bool ok = solution.path.path_length == 10 && p.has_path();
    std::string detail = "damage";
    for (const auto& n : c.damage) detail += " " + to_string(n);
    if (solution.path.path) {
        const auto& orig = *solution.path.path;
        ok = ok && std::any_of(c.damage.begin(), c.damage.end(),
                               [&](const Node& n) { return std::find(orig.begin(), orig.end(), n) != orig.end(); });
    }
    if (p.path) {
        int depth = 0, side = 0;
        for (const auto& n : *p.path) {
            ok = ok && std::find(c.damage.begin(), c.damage.end(), n) == c.damage.end();
            const int off = n.row - row;
            if (off != 0) {
                ok = ok && (side == 0 || (off > 0) == (side > 0));
                side = off > 0 ? 1 : -1;
                depth = std::max(depth, std::abs(off));
            }
        }
        const auto& damaged = healed.initial_lattice;
        const auto below = restricted_distance(damaged, [&](int r) { return r >= row; });
        const auto above = restricted_distance(damaged, [&](int r) { return r <= row; });
        const auto cheaper = below == 0 ? above : (above == 0 ? below : std::min(below, above));
        const auto chosen = side > 0 ? below : above;
        ok = ok && depth > 0 && chosen == cheaper && p.path_length == chosen &&
             p.path_length == 10 + 2 * static_cast<std::size_t>(depth);
        detail += "; healed path_length=" + std::to_string(p.path_length) + " depth=" + std::to_string(depth) +
                  " side=" + (side > 0 ? "below" : "above") + " (shortest below=" + std::to_string(below) +
                  " above=" + std::to_string(above) + ")";
    } else {
        detail += "; no healed path";
    }
    report(5, ok, detail);
}

void criterion6(const CircuitCheck& check) {
    const auto p = default_device_params();
    std::mt19937_64 rng(20150);
    double worst = 0.0;
    std::size_t cases = 0;
    for (int rows = 2; rows <= 3; ++rows) {
        for (int cols = 2; cols <= 3; ++cols) {
            for (int trial = 0; trial < 500; ++trial) {
                auto l = oracle::randomize(build_grid(rows, cols, p, p.r_off), rng, trial % 4 == 3, true);
                const double vs = std::uniform_real_distribution<double>(-20.0, 20.0)(rng);
                const double vk = std::uniform_real_distribution<double>(-20.0, 20.0)(rng);
                SolveResult sr;
                try {
                    sr = solve_potentials(l, vs, vk);
                } catch (const NoCircuitError&) {
                    continue;
                }
                const auto ref = oracle::dense_potentials(l, vs, vk);
                const double scale = std::max(std::fabs(vs), std::fabs(vk));
                for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::fabs(sr.potentials[i] - ref[i]) / scale);
                ++cases;
            }
        }
    }
    report(6, worst <= 1e-10 && check.kcl <= 1e-9 && check.cut <= 1e-9 && cases > 1000,
           "dense oracle max rel err=" + fmt(worst) + " over " + std::to_string(cases) +
               " lattices; 11x11 KCL max rel=" + fmt(check.kcl) + " cut spread max rel=" + fmt(check.cut) + " over " +
               std::to_string(check.solves) + " solves");
}

void criterion7() {
    const auto p = default_device_params();
    bool ok = true;
    const double step = device_step({200.0, Orientation::Forward}, -0.03, 1e-6, p).x;
    ok = ok && std::fabs(step - 199.98) <= 1e-12;
    ok = ok && device_step({150.0, Orientation::Forward}, 0.005, 1e-6, p).x == 150.0;
    ok = ok && device_step({200.0, Orientation::Forward}, 0.03, 1e-6, p).x == 200.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xs(p.r_on, p.r_off), is(-1.0, 1.0), sub(-0.999999, 0.999999);
    for (int k = 0; k < 100000; ++k) {
        const double x = xs(rng), i = is(rng);
        const auto f = device_step({x, Orientation::Forward}, i, 1e-4, p);
        const auto r = device_step({x, Orientation::Reverse}, -i, 1e-4, p);
        ok = ok && f.x == r.x && f.x >= p.r_on && f.x <= p.r_off;
        ok = ok && device_step({x, Orientation::Forward}, sub(rng) * p.i_threshold, 1e-3, p).x == x;
    }
    report(7, ok, "device step 200 -> " + fmt(step) + " (|err|=" + fmt(std::fabs(step - 199.98)) +
                      "); deadzone, clamp and antisymmetry over 1e5 random draws");
}

void criterion8(const ExperimentConfig& c, const RunArtifacts& fig2, const RunResult& pos, const RunResult& neg,
                const RunResult& half) {
    const bool flip = same_unit_map(pos.final_lattice, neg.final_lattice);
    const auto a = read_state(pos.final_lattice);
    const auto b = read_state(half.final_lattice);
    std::size_t class_diff = 0;
    for (std::size_t k = 0; k < a.size(); ++k) class_diff += a[k].cls != b[k].cls;

    const auto base = fs::temp_directory_path() / "memnet_acceptance";
    fs::remove_all(base);
    emit_outputs(fig2, c, base / "a");
    emit_outputs(run_fig2(c), c, base / "b");
    bool bytes = true;
    for (const char* f : {"resistance_initial.txt", "resistance_final.txt", "current_initial.txt", "current_final.txt",
                          "entropy.csv", "switching_rate.csv"}) {
        bytes = bytes && slurp(base / "a" / f) == slurp(base / "b" / f) && !slurp(base / "a" / f).empty();
    }
    fs::remove_all(base);
    report(8, flip && class_diff == 0 && bytes && half.steady,
           std::string("sign flip bit-identical=") + (flip ? "yes" : "no") +
               "; dt/2 class changes=" + std::to_string(class_diff) + " of " + std::to_string(a.size()) +
               "; repeat outputs byte-identical=" + (bytes ? "yes" : "no"));
}

}  // namespace

int main() {
    const auto fig2_cfg = preset_config(Preset::Fig2);
    const auto t0 = std::chrono::steady_clock::now();
    const auto fig2 = run_fig2(fig2_cfg);
    criterion1and2(fig2_cfg, fig2, seconds_since(t0));

    criterion3(preset_config(Preset::Fig3b));

    CircuitCheck check;
    criterion4(preset_config(Preset::Fig4), check);
    criterion5(preset_config(Preset::Fig5), check);

    const auto lattice = make_lattice(fig2_cfg);
    PulseSpec pulse = fig2_cfg.pulse;
    const auto pos = checked_run(lattice, pulse, check);
    pulse.amplitude = -pulse.amplitude;
    const auto neg = checked_run(lattice, pulse, check);
    pulse = fig2_cfg.pulse;
    pulse.dt /= 2.0;
    pulse.record_every *= 2;
    const auto half = checked_run(lattice, pulse, check);
    check.add(fig2.final_lattice, fig2.final_solve);

    criterion6(check);
    criterion7();
    criterion8(fig2_cfg, fig2, pos, neg, half);

    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
