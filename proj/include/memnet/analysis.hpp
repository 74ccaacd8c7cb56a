#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memnet/engine.hpp"
#include "memnet/lattice.hpp"
#include "memnet/observables.hpp"

namespace memnet {

struct EntropySample {
    double t = 0.0;
    double t_normalized = 0.0;
    double sigma = 0.0;
};

struct EntropySeries {
    double ratio = 0.0;  // r_off / r_on
    double amplitude = 0.0;
    int cut = 0;
    std::vector<EntropySample> samples;
    bool steady = false;
};

// Samples with undefined entropy are skipped.
[[nodiscard]] EntropySeries entropy_series(const RunResult& run, const DeviceParams& p, double amplitude, int cut);

struct PathReport {
    std::vector<UnitId> on_units;
    std::optional<std::vector<Node>> path;  // source ... sink
    std::size_t path_length = 0;            // units on the path
    std::size_t extra_on_count = 0;         // ON units not on the path

    [[nodiscard]] bool has_path() const { return path.has_value(); }
};

// Breadth-first search from the source over ON units; the returned path is a
// shortest ON path (ties broken by unit id order).
[[nodiscard]] PathReport extract_path(const Lattice& l, std::span<const UnitReading> readings);

// Structural check: simple, consecutive nodes joined by present ON units,
// endpoints equal the terminals.
[[nodiscard]] bool path_is_valid(const Lattice& l, std::span<const UnitReading> readings,
                                 std::span<const Node> path);

struct SwitchingRateSeries {
    std::vector<UnitId> units;
    std::vector<double> t;             // interval midpoints, seconds
    std::vector<double> t_normalized;  // midpoints over run length
    std::vector<std::vector<double>> rates;  // rates[w][k] = |dR/dt| of unit w over interval k

    // Time of the largest rate for watched unit w (first occurrence).
    [[nodiscard]] double peak_time(std::size_t w) const;
};

// Finite differences |dR/dt| between consecutive resistance snapshots.
// Throws std::invalid_argument with fewer than two snapshots or for a unit
// that is not present in the lattice.
[[nodiscard]] SwitchingRateSeries switching_rate_series(std::span<const TraceRecord> trace, const Lattice& l,
                                                        std::span<const UnitId> watch);

// Horizontal units along the source row between source and sink columns.
[[nodiscard]] std::vector<UnitId> source_row_units(const Lattice& l);

struct MemoryContentPoint {
    double r_on = 10.0;
    double amplitude = 6.0;

    friend bool operator==(const MemoryContentPoint&, const MemoryContentPoint&) = default;
};

struct SweepEntry {
    MemoryContentPoint point;
    std::optional<EntropySeries> series;
    std::string error;  // set when the run failed
};

// One run per point on a fresh all-OFF copy of base (device r_on replaced).
// Runs execute concurrently; failures are reported per entry.
[[nodiscard]] std::vector<SweepEntry> sweep_memory_content(const Lattice& base, const PulseSpec& pulse,
                                                           std::optional<int> cut,
                                                           std::span<const MemoryContentPoint> points);

}  // namespace memnet
