#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sirmpc/mpc.hpp"
#include "sirmpc/single_interval.hpp"

namespace sirmpc {

enum class ScenarioKind {
    kUncontrolled,
    kSingleInterval,
    kOptimalInterval,
    kMpc,
    kPhasePortrait,
    kSInfinitySweep,
};

std::string_view to_string(ScenarioKind kind);

/// Grid request for the final-size sweep: s0 ranges over
/// [s0_min, s0_max] in `s0_count` equally spaced values, one row per i0
/// value; grid points leaving the simplex (s0 + i0 > 1) are skipped.
struct SweepSpec {
    double s0_min = 0.01;
    double s0_max = 0.99;
    int s0_count = 99;
    std::vector<double> i0_values = {1e-3, 1e-2, 1e-1};
};

/// A fully resolved scenario: everything run_scenario needs to produce
/// its output files. Instances come from parse_config or preset.
struct ScenarioConfig {
    ScenarioConfig(ScenarioKind kind, std::string name, ModelParams params)
        : kind(kind), name(std::move(name)), params(params)
    {
    }

    ScenarioKind kind;
    /// Output file stem.
    std::string name;
    ModelParams params;
    SamplingConfig sampling;
    double t_end = 0.0;
    double qss_threshold = kDefaultQssThreshold;

    /// kind == kUncontrolled: constant input level.
    double u0 = 0.0;

    /// kind == kSingleInterval.
    std::optional<SingleInterval> interval;

    /// kind == kOptimalInterval and kMpc: time at which measures begin.
    double control_start = 2.0;
    /// kind == kOptimalInterval: post-release horizon and settling cap.
    double tail = 40.0;
    double max_hold = 400.0;

    /// kind == kMpc.
    MpcConfig mpc;

    /// kind == kPhasePortrait.
    std::vector<EpidemicState> starts;

    /// kind == kSInfinitySweep.
    SweepSpec sweep;
};

/// Parses the flat key = value scenario format. Unknown keys, duplicate
/// keys, keys that do not apply to the chosen kind, and malformed values
/// raise ConfigError with the 1-based line number. `name` becomes the
/// output file stem.
ScenarioConfig parse_config(std::istream& in, const std::string& name);
ScenarioConfig parse_config_file(const std::filesystem::path& path);

/// Bundled scenario presets (fig1_portrait, fig2_sweep, fig3_blue,
/// fig3_red, fig3_opt, fig4_unconstrained, fig4_ipp015, fig4_ipp010,
/// fig4_ipp005).
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// One uncontrolled dense trajectory per start state.
std::vector<Trajectory> phase_portrait(const ModelParams& params,
                                       const std::vector<EpidemicState>& starts,
                                       const SamplingConfig& cfg, double t_end);

struct SweepPoint {
    double i0;
    double s0;
    double s_inf;
};

/// Tabulates s_infinity at r0 over the sweep grid.
std::vector<SweepPoint> s_infinity_sweep(const ModelParams& params, const SweepSpec& spec);

/// Runs the scenario and writes its output files (trajectory CSV and
/// events summary, or the sweep/portrait grid) into out_dir. Output is
/// deterministic: identical configs produce byte-identical files.
/// Returns the paths written.
std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& config,
                                                const std::filesystem::path& out_dir);

/// Round-trip decimal formatting (17 significant digits) used by all
/// output files.
std::string format_double(double value);

} // namespace sirmpc
