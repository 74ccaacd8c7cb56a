// memnet: run memristive-network experiments and write their data files.
//
//   memnet fig2  [--config FILE] [--out DIR] [--override key=value]...
//   memnet fig3a | fig3b | fig4 | fig5   (same flags)
//   memnet run   --config FILE [--out DIR] [--override key=value]...
//
// Exit codes: 0 success, 1 configuration error, 2 simulation error, 3 I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "memnet/experiment.hpp"
#include "memnet/kernels.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kSimulationError = 2, kIoError = 3 };

struct CommonFlags {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw memnet::ConfigError("config: cannot read '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw memnet::ConfigError("config: parse error in '" + path + "': " + e.what());
    }
}

memnet::ExperimentConfig resolve(nlohmann::json doc, const CommonFlags& flags) {
    if (!flags.config.empty()) doc.merge_patch(read_json(flags.config));
    for (const auto& o : flags.overrides) memnet::apply_override(doc, o);
    if (!flags.out.empty()) doc["outputs"] = flags.out;
    return memnet::parse_config(doc);
}

void report(const memnet::RunArtifacts& a, const std::filesystem::path& dir) {
    std::cout << a.label << ": steady=" << (a.steady ? "true" : "false") << " steps=" << a.steps
              << " t=" << memnet::format_number(a.sim_time) << "s on_units=" << a.path.on_units.size();
    if (a.path.path) {
        std::cout << " path_length=" << a.path.path_length << " extra_on=" << a.path.extra_on_count;
    } else {
        std::cout << " path=none";
    }
    std::cout << " -> " << dir.string() << "\n";
}

int run_preset(std::optional<memnet::Preset> preset, const CommonFlags& flags) {
    nlohmann::json doc = preset ? memnet::preset_document(*preset) : nlohmann::json::object();
    const auto cfg = resolve(std::move(doc), flags);
    const std::filesystem::path out = cfg.outputs;
    const bool damage_run = preset ? *preset == memnet::Preset::Fig5 : !cfg.damage.empty();

    if (preset && *preset == memnet::Preset::Fig3b) {
        const auto sweep = memnet::run_fig3b(cfg);
        memnet::emit_sweep_outputs(sweep, cfg, out);
        int failures = 0;
        for (const auto& e : sweep) {
            const double ratio = cfg.device.r_off / e.point.r_on;
            if (!e.series) {
                std::cerr << "ratio " << ratio << ": " << e.error << "\n";
                ++failures;
                continue;
            }
            const auto& s = e.series->samples;
            std::cout << "ratio " << ratio << ": V=" << e.point.amplitude << " sigma " << s.front().sigma << " -> "
                      << s.back().sigma << "\n";
        }
        return failures == 0 ? kOk : kSimulationError;
    }
    if (damage_run) {
        auto [solution, healed] = memnet::run_fig5(cfg);
        memnet::emit_outputs(solution, cfg, out / "solution");
        memnet::emit_outputs(healed, cfg, out / "healed");
        report(solution, out / "solution");
        report(healed, out / "healed");
        return kOk;
    }
    const auto artifacts = memnet::run_fig2(cfg);
    memnet::emit_outputs(artifacts, cfg, out);
    report(artifacts, out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective dynamics of threshold memristive lattice networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "memnet 0.1.0");
    bool show_isa = false;
    app.add_flag("--isa", show_isa, "Print the selected kernel instruction set");

    CommonFlags flags;
    std::optional<memnet::Preset> chosen;
    bool generic = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", flags.config, "JSON experiment configuration");
        if (config_required) opt->required();
        sub->add_option("--out", flags.out, "Output directory (overrides config 'outputs')");
        sub->add_option("--override", flags.overrides, "key.path=value applied after the config file");
    };

    auto* run = app.add_subcommand("run", "Run a generic configuration (damage list triggers a heal phase)");
    add_common(run, true);
    run->callback([&] { generic = true; });

    const std::pair<const char*, memnet::Preset> presets[] = {
        {"fig2", memnet::Preset::Fig2},   {"fig3a", memnet::Preset::Fig3a}, {"fig3b", memnet::Preset::Fig3b},
        {"fig4", memnet::Preset::Fig4},   {"fig5", memnet::Preset::Fig5},
    };
    const char* descriptions[] = {
        "Shortest path on the 11x11 lattice",
        "Switching dynamics along the solution row",
        "Entropy versus memory content sweep",
        "Low memory content (r_off / r_on = 1.25)",
        "Damage and heal the solution path",
    };
    for (std::size_t k = 0; k < std::size(presets); ++k) {
        auto* sub = app.add_subcommand(presets[k].first, descriptions[k]);
        add_common(sub, false);
        const auto preset = presets[k].second;
        sub->callback([&chosen, preset] { chosen = preset; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    if (show_isa) std::cerr << "kernels: " << memnet::kernels::isa_name(memnet::kernels::active_kernels().isa) << "\n";

    try {
        return run_preset(generic ? std::nullopt : chosen, flags);
    } catch (const memnet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const memnet::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kSimulationError;
    }
}
