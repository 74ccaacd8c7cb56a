#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "memnet/kernels.hpp"
#include "memnet/kirchhoff.hpp"
#include "memnet/lattice.hpp"
#include "memnet/observables.hpp"

namespace memnet {

// How the pulse amplitude V maps onto terminal potentials.
//   Differential: source at +V, sink at -V (2V across the network).
//   Grounded:     source at V, sink at 0.
enum class Drive { Differential, Grounded };

[[nodiscard]] const char* to_string(Drive d);

struct PulseSpec {
    double amplitude = 6.0;
    double dt = 1e-6;
    double max_time = 1.0;
    std::size_t record_every = 100;
    Drive drive = Drive::Differential;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    [[nodiscard]] double source_potential() const { return amplitude; }
    [[nodiscard]] double sink_potential() const { return drive == Drive::Differential ? -amplitude : 0.0; }

    friend bool operator==(const PulseSpec&, const PulseSpec&) = default;
};

struct TraceRecord {
    std::size_t step = 0;
    double t = 0.0;             // seconds
    double t_normalized = 0.0;  // t / run length
    std::optional<double> entropy;
    double total_current = 0.0;
    std::vector<double> unit_resistances;  // by unit slot, empty if not recorded
    std::vector<double> watch_rates;       // |dR/dt| over this step, per watched unit
};

struct RunOptions {
    // Column boundary of the entropy cut; defaults to floor((cols - 1) / 2).
    std::optional<int> entropy_cut;
    std::vector<UnitId> watch;
    bool record_resistances = true;
    // Called at every sampled step with the full solve of the sampled state.
    std::function<void(double t, const SolveResult&)> on_sample;
    // Null selects the runtime-detected kernels.
    const kernels::KernelSet* kernels = nullptr;
};

struct RunResult {
    Lattice final_lattice;
    std::vector<TraceRecord> trace;
    bool steady = false;
    std::size_t steps = 0;
    double time = 0.0;
    SolveResult initial_solve;
    SolveResult final_solve;
};

// Default entropy cut for a grid: the central vertical boundary.
[[nodiscard]] int default_entropy_cut(const Lattice& l);

// Alternates a nodal solve with a synchronous Euler step of every device until
// no device state changes (steady) or max_time is reached. Throws
// NoCircuitError if the terminals are disconnected and SolverError on a failed
// or non-finite solve.
[[nodiscard]] RunResult run_pulse(const Lattice& l, const PulseSpec& pulse, const RunOptions& options = {});

// True iff no device memristance differs. Throws std::invalid_argument when
// the two lattices do not share a topology.
[[nodiscard]] bool steady_state(const Lattice& prev, const Lattice& next);

struct UnitReading {
    UnitId id = 0;
    double resistance = 0.0;
    UnitClass cls = UnitClass::Off;
};

// Non-destructive readout, ordered by unit id. Resistances outside the
// classify_unit range are classified against the same boundary.
[[nodiscard]] std::vector<UnitReading> read_state(const Lattice& l);

}  // namespace memnet
