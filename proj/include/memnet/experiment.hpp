#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "memnet/analysis.hpp"
#include "memnet/engine.hpp"
#include "memnet/lattice.hpp"

namespace memnet {

// Invalid or unparsable configuration; the message names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File-system failure; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSize {
    int rows = 11;
    int cols = 11;
    friend bool operator==(const GridSize&, const GridSize&) = default;
};

// Fully resolved experiment description. Every field carries a value after
// loading; defaults are the parameter set shared by all presets.
struct ExperimentConfig {
    GridSize grid;
    DeviceParams device = default_device_params();
    Node source{5, 0};
    Node sink{5, 10};
    PulseSpec pulse;
    std::vector<Node> damage;
    double heal_amplitude = 7.0;
    int entropy_cut = 5;
    // Memory content 20, 10, 4, 1.25 at r_off = 200 ohm.
    std::vector<MemoryContentPoint> sweep{{10.0, 6.0}, {20.0, 6.75}, {50.0, 10.0}, {160.0, 15.25}};
    std::string outputs = "out";

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline constexpr int kSchemaVersion = 1;

// JSON text -> validated config. Unknown keys and constraint violations throw
// ConfigError naming the field.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& j);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& c);
[[nodiscard]] std::string dump_config(const ExperimentConfig& c);  // compact, deterministic
[[nodiscard]] std::string config_hash(const ExperimentConfig& c);   // 16 hex digits

// Applies "a.b.c=value" onto a JSON document; value is parsed as JSON when
// possible, otherwise taken as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

enum class Preset { Fig2, Fig3a, Fig3b, Fig4, Fig5 };

[[nodiscard]] std::string_view preset_name(Preset p);
// Partial JSON applied on top of the defaults for a preset.
[[nodiscard]] nlohmann::json preset_document(Preset p);
[[nodiscard]] ExperimentConfig preset_config(Preset p);

// Builds the all-OFF lattice with the configured terminals.
[[nodiscard]] Lattice make_lattice(const ExperimentConfig& c);

struct RunArtifacts {
    std::string label;
    Lattice initial_lattice;
    Lattice final_lattice;
    SolveResult initial_solve;
    SolveResult final_solve;
    EntropySeries entropy;
    SwitchingRateSeries switching;
    PathReport path;
    std::vector<UnitReading> readout;
    bool steady = false;
    std::size_t steps = 0;
    double sim_time = 0.0;
    double wall_time = 0.0;
};

// Initialize OFF -> pulse -> read.
[[nodiscard]] RunArtifacts run_fig2(const ExperimentConfig& c);
// Pulses an existing lattice (states kept) and reads it out.
[[nodiscard]] RunArtifacts run_from(const Lattice& start, const ExperimentConfig& c, double amplitude,
                                    std::string label);
// Phase 1 is a fig2 run; phase 2 removes the damage nodes from the final
// lattice and pulses again at heal_amplitude.
[[nodiscard]] std::pair<RunArtifacts, RunArtifacts> run_fig5(const ExperimentConfig& c);
[[nodiscard]] std::vector<SweepEntry> run_fig3b(const ExperimentConfig& c);

struct ManifestEntry {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;  // 0 for series (rows = sample count)
};

struct Manifest {
    int schema_version = kSchemaVersion;
    std::string config_hash;
    std::vector<ManifestEntry> files;
};

// Unit maps are (2*rows-1) x (2*cols-1) matrices: even/even cells are nodes
// (0), even/odd horizontal units, odd/even vertical units, odd/odd 0; absent
// units are nan. Resistance in ohm, current in ampere (a->b, i.e. rightward
// or downward).
[[nodiscard]] std::string resistance_map(const Lattice& l);
[[nodiscard]] std::string current_map(const Lattice& l, const SolveResult& sr);

// Writes the six data files plus manifest.txt. Throws IoError naming the path.
Manifest emit_outputs(const RunArtifacts& a, const ExperimentConfig& c, const std::filesystem::path& dir);
Manifest emit_sweep_outputs(const std::vector<SweepEntry>& sweep, const ExperimentConfig& c,
                            const std::filesystem::path& dir);

// Locale-independent shortest round-trip formatting.
[[nodiscard]] std::string format_number(double v);

}  // namespace memnet
