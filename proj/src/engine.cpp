#include "memnet/engine.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace memnet {

const char* to_string(Drive d) { return d == Drive::Differential ? "differential" : "grounded"; }

void PulseSpec::validate() const {
    if (!std::isfinite(amplitude) || amplitude == 0.0) {
        throw std::invalid_argument("pulse.amplitude: must be finite and non-zero");
    }
    if (!std::isfinite(dt) || dt <= 0.0) throw std::invalid_argument("pulse.dt: must be positive");
    if (!std::isfinite(max_time) || max_time < dt) throw std::invalid_argument("pulse.max_time: must be at least dt");
    if (record_every == 0) throw std::invalid_argument("pulse.record_every: must be at least 1");
}

int default_entropy_cut(const Lattice& l) { return (l.cols() - 1) / 2; }

namespace {

struct DevicePlanes {
    std::vector<double> x_fwd, x_rev, closed_fwd, closed_rev;
    std::vector<std::size_t> node_a, node_b;

    explicit DevicePlanes(const Lattice& l) {
        const auto n = l.unit_count();
        x_fwd.resize(n);
        x_rev.resize(n);
        closed_fwd.resize(n);
        closed_rev.resize(n);
        node_a.resize(n);
        node_b.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            const auto& u = l.units()[s];
            x_fwd[s] = u.forward.x;
            x_rev[s] = u.reverse.x;
            closed_fwd[s] = u.switch_closed[0] ? 1.0 : 0.0;
            closed_rev[s] = u.switch_closed[1] ? 1.0 : 0.0;
            node_a[s] = l.index(u.a);
            node_b[s] = l.index(u.b);
        }
    }

    void write_back(Lattice& l) const {
        auto units = l.units();
        for (std::size_t s = 0; s < units.size(); ++s) {
            units[s].forward.x = x_fwd[s];
            units[s].reverse.x = x_rev[s];
        }
    }
};

double resistance_of(double g) { return g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity(); }

}  // namespace

RunResult run_pulse(const Lattice& l, const PulseSpec& pulse, const RunOptions& options) {
    pulse.validate();
    const int cut = options.entropy_cut.value_or(default_entropy_cut(l));
    if (cut < 0 || cut >= l.cols() - 1) {
        throw std::invalid_argument("entropy_cut: boundary " + std::to_string(cut) + " outside grid");
    }
    const auto& k = options.kernels ? *options.kernels : kernels::active_kernels();
    const auto& p = l.params();
    const kernels::StepCoeffs coeffs{p.gamma, p.i_threshold, pulse.dt, p.r_on, p.r_off};

    NodalSolver solver(l);
    DevicePlanes planes(l);
    const auto n_units = l.unit_count();
    const auto source = l.index(l.source());
    const double v_source = pulse.source_potential();
    const double v_sink = pulse.sink_potential();

    std::vector<std::ptrdiff_t> cut_slots;
    for (int r = 0; r < l.rows(); ++r) cut_slots.push_back(l.slot_of(l.unit_id_between({r, cut}, {r, cut + 1})));
    std::vector<std::ptrdiff_t> watch_slots;
    for (auto id : options.watch) watch_slots.push_back(l.slot_of(id));

    std::vector<double> g(n_units), dv(n_units), i_fwd(n_units), i_rev(n_units), phi(l.node_count());
    std::vector<double> cut_currents(cut_slots.size());
    std::vector<double> watch_before(watch_slots.size());

    auto unit_current = [&](std::size_t s) {
        // Unit frame: forward current plus the negated own-frame reverse current.
        return i_fwd[s] - i_rev[s];
    };
    auto total_current = [&] {
        double total = 0.0;
        for (std::size_t s = 0; s < n_units; ++s) {
            if (planes.node_a[s] == source) total += unit_current(s);
            if (planes.node_b[s] == source) total -= unit_current(s);
        }
        return total;
    };
    auto snapshot = [&](std::size_t step) {
        TraceRecord rec;
        rec.step = step;
        rec.t = static_cast<double>(step) * pulse.dt;
        for (std::size_t r = 0; r < cut_slots.size(); ++r) {
            cut_currents[r] = cut_slots[r] < 0 ? 0.0 : unit_current(static_cast<std::size_t>(cut_slots[r]));
        }
        try {
            rec.entropy = entropy(cut_currents);
        } catch (const UndefinedEntropyError&) {
            rec.entropy.reset();
        }
        rec.total_current = total_current();
        if (options.record_resistances) {
            rec.unit_resistances.resize(n_units);
            for (std::size_t s = 0; s < n_units; ++s) rec.unit_resistances[s] = resistance_of(g[s]);
        }
        rec.watch_rates.assign(watch_slots.size(), 0.0);
        return rec;
    };
    auto full_solve = [&] {
        SolveResult sr;
        sr.potentials = phi;
        sr.residual = solver.last_residual();
        sr.device_currents.resize(n_units);
        for (std::size_t s = 0; s < n_units; ++s) sr.device_currents[s] = {i_fwd[s], -i_rev[s]};
        sr.total_current = total_current();
        return sr;
    };
    auto solve_state = [&] {
        k.unit_conductance(planes.x_fwd, planes.x_rev, planes.closed_fwd, planes.closed_rev, g);
        solver.solve(g, v_source, v_sink, phi);
        for (std::size_t s = 0; s < n_units; ++s) dv[s] = phi[planes.node_a[s]] - phi[planes.node_b[s]];
        k.device_currents(dv, planes.x_fwd, planes.x_rev, planes.closed_fwd, planes.closed_rev, i_fwd, i_rev);
    };
    auto watched_resistance = [&](std::ptrdiff_t slot) {
        if (slot < 0) return 0.0;
        const auto s = static_cast<std::size_t>(slot);
        return resistance_of(planes.closed_fwd[s] / planes.x_fwd[s] + planes.closed_rev[s] / planes.x_rev[s]);
    };

    // Integer step budget; the small slack absorbs max_time / dt rounding.
    const auto max_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(pulse.max_time / pulse.dt - 1e-9)));
    RunResult out{l, {}, false, 0, 0.0, {}, {}};
    std::size_t step = 0;
    for (;;) {
        solve_state();
        const bool sample = step % pulse.record_every == 0;
        if (step == 0) out.initial_solve = full_solve();
        if (sample) {
            out.trace.push_back(snapshot(step));
            if (options.on_sample) options.on_sample(out.trace.back().t, full_solve());
            for (std::size_t w = 0; w < watch_slots.size(); ++w) watch_before[w] = watched_resistance(watch_slots[w]);
        }
        bool changed = k.step_devices(planes.x_fwd, i_fwd, coeffs);
        changed = k.step_devices(planes.x_rev, i_rev, coeffs) || changed;
        if (sample) {
            auto& rates = out.trace.back().watch_rates;
            for (std::size_t w = 0; w < watch_slots.size(); ++w) {
                rates[w] = std::fabs(watched_resistance(watch_slots[w]) - watch_before[w]) / pulse.dt;
            }
        }
        ++step;
        if (!changed) {
            out.steady = true;
            break;
        }
        if (step >= max_steps) break;
    }

    planes.write_back(out.final_lattice);
    solve_state();
    out.trace.push_back(snapshot(step));
    out.final_solve = full_solve();
    if (options.on_sample) options.on_sample(out.trace.back().t, out.final_solve);
    out.steps = step;
    out.time = static_cast<double>(step) * pulse.dt;
    for (auto& rec : out.trace) rec.t_normalized = rec.t / out.time;
    return out;
}

bool steady_state(const Lattice& prev, const Lattice& next) {
    if (prev.rows() != next.rows() || prev.cols() != next.cols() || prev.unit_count() != next.unit_count()) {
        throw std::invalid_argument("steady_state: lattices differ in topology");
    }
    for (std::size_t s = 0; s < prev.unit_count(); ++s) {
        const auto& a = prev.units()[s];
        const auto& b = next.units()[s];
        if (a.id != b.id) throw std::invalid_argument("steady_state: lattices differ in topology");
        if (a.forward.x != b.forward.x || a.reverse.x != b.reverse.x) return false;
    }
    return true;
}

std::vector<UnitReading> read_state(const Lattice& l) {
    std::vector<UnitReading> out;
    out.reserve(l.unit_count());
    const double boundary = classification_boundary(l.params());
    for (const auto& u : l.units()) {
        const double r = unit_resistance(u);
        UnitClass cls;
        try {
            cls = classify_unit(r, l.params());
        } catch (const std::out_of_range&) {
            cls = r < boundary ? UnitClass::On : UnitClass::Off;
        }
        out.push_back({u.id, r, cls});
    }
    return out;
}

}  // namespace memnet
