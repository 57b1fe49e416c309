#include "sirmpc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "sirmpc/errors.hpp"

namespace sirmpc {

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string_view to_string(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::kUncontrolled:
        return "uncontrolled";
    case ScenarioKind::kSingleInterval:
        return "single-interval";
    case ScenarioKind::kOptimalInterval:
        return "optimal-interval";
    case ScenarioKind::kMpc:
        return "mpc";
    case ScenarioKind::kPhasePortrait:
        return "phase-portrait";
    case ScenarioKind::kSInfinitySweep:
        return "s-infinity-sweep";
    }
    return "unknown";
}

namespace {

std::string trim(std::string_view text)
{
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r");
    return std::string(text.substr(begin, end - begin + 1));
}

double parse_number(const std::string& text, int line)
{
    const std::string value = trim(text);
    if (value.empty()) {
        throw ConfigError("empty numeric value", line);
    }
    char* end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || !std::isfinite(parsed)) {
        throw ConfigError("malformed number '" + value + "'", line);
    }
    return parsed;
}

std::vector<double> parse_number_list(const std::string& text, int line)
{
    std::vector<double> values;
    std::string item;
    std::istringstream stream(text);
    while (std::getline(stream, item, ',')) {
        values.push_back(parse_number(item, line));
    }
    if (values.empty()) {
        throw ConfigError("empty list value", line);
    }
    return values;
}

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

// Key/value view of one config source with consumption tracking: every
// entry must be claimed by the scenario kind being built, so typos and
// keys from the wrong kind fail loudly with their line number.
class KvSource {
public:
    KvSource(std::istream& in, const std::string& name)
        : name_(name)
    {
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto comment = line.find('#');
            if (comment != std::string::npos) {
                line.erase(comment);
            }
            const std::string text = trim(line);
            if (text.empty()) {
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("expected 'key = value'", line_no);
            }
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("missing key before '='", line_no);
            }
            if (value.empty()) {
                throw ConfigError("missing value for key '" + key + "'", line_no);
            }
            if (key == "start") {
                starts_.push_back(RawEntry{value, line_no});
            } else if (!entries_.emplace(key, RawEntry{value, line_no}).second) {
                throw ConfigError("duplicate key '" + key + "'", line_no);
            }
        }
    }

    std::optional<std::string> take(const std::string& key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        it->second.used = true;
        last_line_ = it->second.line;
        return it->second.value;
    }

    std::string require(const std::string& key)
    {
        auto value = take(key);
        if (!value) {
            throw ConfigError("missing required key '" + key + "' for kind '" + kind_ + "'", 0);
        }
        return *value;
    }

    double require_double(const std::string& key) { return parse_number(require(key), last_line_); }

    double take_double_or(const std::string& key, double fallback)
    {
        auto value = take(key);
        return value ? parse_number(*value, last_line_) : fallback;
    }

    int take_int_or(const std::string& key, int fallback)
    {
        auto value = take(key);
        if (!value) {
            return fallback;
        }
        const double parsed = parse_number(*value, last_line_);
        const int as_int = static_cast<int>(parsed);
        if (parsed != as_int) {
            throw ConfigError("expected an integer for key '" + key + "'", last_line_);
        }
        return as_int;
    }

    std::vector<double> take_list_or(const std::string& key, std::vector<double> fallback)
    {
        auto value = take(key);
        return value ? parse_number_list(*value, last_line_) : std::move(fallback);
    }

    const std::vector<RawEntry>& starts()
    {
        starts_used_ = true;
        return starts_;
    }

    void set_kind_label(std::string kind) { kind_ = std::move(kind); }
    int last_line() const { return last_line_; }

    void finish() const
    {
        for (const auto& [key, entry] : entries_) {
            if (!entry.used) {
                throw ConfigError("unknown key '" + key + "' for kind '" + kind_ + "'", entry.line);
            }
        }
        if (!starts_.empty() && !starts_used_) {
            throw ConfigError("key 'start' is only valid for kind 'phase-portrait'",
                              starts_.front().line);
        }
    }

private:
    std::string name_;
    std::string kind_;
    std::map<std::string, RawEntry> entries_;
    std::vector<RawEntry> starts_;
    bool starts_used_ = false;
    int last_line_ = 0;
};

ScenarioKind kind_from_string(const std::string& text, int line)
{
    for (ScenarioKind kind :
         {ScenarioKind::kUncontrolled, ScenarioKind::kSingleInterval,
          ScenarioKind::kOptimalInterval, ScenarioKind::kMpc, ScenarioKind::kPhasePortrait,
          ScenarioKind::kSInfinitySweep}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    throw ConfigError("unknown scenario kind '" + text + "'", line);
}

EpidemicState parse_start(const RawEntry& entry)
{
    const std::vector<double> triple = parse_number_list(entry.value, entry.line);
    if (triple.size() != 3) {
        throw ConfigError("start state must be 'S,I,C'", entry.line);
    }
    try {
        return EpidemicState(triple[0], triple[1], triple[2]);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what(), entry.line);
    }
}

} // namespace

ScenarioConfig parse_config(std::istream& in, const std::string& name)
{
    KvSource source(in, name);

    const auto kind_value = source.take("kind");
    if (!kind_value) {
        throw ConfigError("missing required key 'kind'", 0);
    }
    const ScenarioKind kind = kind_from_string(*kind_value, source.last_line());
    source.set_kind_label(std::string(to_string(kind)));

    ModelParams params = [&] {
        const double r0 = source.require_double("r0");
        const double r_min = source.require_double("r_min");
        const double epsilon = source.take_double_or("epsilon", ModelParams::kDefaultEpsilon);
        try {
            return ModelParams(r0, r_min, epsilon);
        } catch (const std::invalid_argument& err) {
            throw ConfigError(err.what(), 0);
        }
    }();

    ScenarioConfig config(kind, name, params);

    const double ts = source.take_double_or("ts", SamplingConfig::kDefaultTs);
    const int substeps = source.take_int_or("substeps", SamplingConfig::kDefaultSubsteps);
    const double dense_step =
        source.take_double_or("dense_step", ts / SamplingConfig::kDenseStepsPerTs);
    try {
        config.sampling = SamplingConfig(ts, substeps, dense_step);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what(), 0);
    }
    config.qss_threshold = source.take_double_or("qss_threshold", kDefaultQssThreshold);

    try {
        switch (kind) {
        case ScenarioKind::kUncontrolled:
            config.t_end = source.require_double("t_end");
            config.u0 = source.take_double_or("u", 0.0);
            break;
        case ScenarioKind::kSingleInterval: {
            config.t_end = source.require_double("t_end");
            const double start = source.require_double("interval_start");
            const double end = source.require_double("interval_end");
            const double r_i = source.require_double("interval_r");
            config.interval = SingleInterval(start, end, r_i);
            break;
        }
        case ScenarioKind::kOptimalInterval:
            config.control_start = source.require_double("control_start");
            config.tail = source.take_double_or("tail", config.tail);
            config.max_hold = source.take_double_or("max_hold", config.max_hold);
            break;
        case ScenarioKind::kMpc: {
            config.t_end = source.require_double("t_end");
            config.control_start = source.take_double_or("control_start", config.control_start);
            config.mpc.sampling = config.sampling;
            config.mpc.horizon_n = source.take_int_or("horizon", config.mpc.horizon_n);
            config.mpc.weight_q = source.take_double_or("weight_q", config.mpc.weight_q);
            config.mpc.weight_u = source.take_double_or("weight_u", config.mpc.weight_u);
            config.mpc.weight_p = source.take_double_or("weight_p", config.mpc.weight_p);
            config.mpc.slack_weight = source.take_double_or("slack_weight", config.mpc.slack_weight);
            if (auto i_max = source.take("i_max")) {
                if (*i_max == "unconstrained") {
                    config.mpc.i_max = std::numeric_limits<double>::infinity();
                } else {
                    config.mpc.i_max = parse_number(*i_max, source.last_line());
                }
            }
            if (auto levels = source.take("grid_levels")) {
                config.mpc.grid = ControlGrid(parse_number_list(*levels, source.last_line()));
            }
            config.mpc.validate();
            break;
        }
        case ScenarioKind::kPhasePortrait: {
            config.t_end = source.require_double("t_end");
            for (const RawEntry& entry : source.starts()) {
                config.starts.push_back(parse_start(entry));
            }
            if (config.starts.empty()) {
                throw ConfigError("phase-portrait needs at least one 'start = S,I,C' entry", 0);
            }
            break;
        }
        case ScenarioKind::kSInfinitySweep:
            config.sweep.s0_min = source.take_double_or("sweep_s0_min", config.sweep.s0_min);
            config.sweep.s0_max = source.take_double_or("sweep_s0_max", config.sweep.s0_max);
            config.sweep.s0_count = source.take_int_or("sweep_s0_count", config.sweep.s0_count);
            config.sweep.i0_values = source.take_list_or("sweep_i0", config.sweep.i0_values);
            if (config.sweep.s0_count < 1 || !(config.sweep.s0_min <= config.sweep.s0_max)) {
                throw ConfigError("sweep grid must satisfy s0_min <= s0_max and s0_count >= 1", 0);
            }
            break;
        }
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what(), source.last_line());
    }

    source.finish();
    return config;
}

ScenarioConfig parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'", 0);
    }
    return parse_config(in, path.stem().string());
}

namespace {

struct Preset {
    const char* name;
    const char* text;
};

// fig3 scenarios use the initial infected fraction at which the reported
// terminal sizes and second-wave time are reproduced.
constexpr Preset kPresets[] = {
    {"fig1_portrait",
     "kind = phase-portrait\n"
     "r0 = 2.5\n"
     "r_min = 0.85\n"
     "t_end = 40\n"
     "start = 0.05,0.95,0\nstart = 0.10,0.90,0\nstart = 0.15,0.85,0\nstart = 0.20,0.80,0\n"
     "start = 0.25,0.75,0\nstart = 0.30,0.70,0\nstart = 0.35,0.65,0\nstart = 0.40,0.60,0\n"
     "start = 0.45,0.55,0\nstart = 0.50,0.50,0\nstart = 0.55,0.45,0\nstart = 0.60,0.40,0\n"
     "start = 0.65,0.35,0\nstart = 0.70,0.30,0\nstart = 0.75,0.25,0\nstart = 0.80,0.20,0\n"
     "start = 0.85,0.15,0\nstart = 0.90,0.10,0\nstart = 0.95,0.05,0\n"},
    {"fig2_sweep",
     "kind = s-infinity-sweep\n"
     "r0 = 2.5\n"
     "r_min = 0.85\n"
     "sweep_s0_min = 0.01\n"
     "sweep_s0_max = 0.99\n"
     "sweep_s0_count = 99\n"
     "sweep_i0 = 0.001,0.01,0.1\n"},
    {"fig3_blue",
     "kind = single-interval\n"
     "r0 = 2.5\n"
     "r_min = 0.85\n"
     "epsilon = 0.005\n"
     "t_end = 60\n"
     "interval_start = 2\n"
     "interval_end = 20\n"
     "interval_r = 0.5\n"},
    {"fig3_red",
     "kind = single-interval\n"
     "r0 = 2.5\n"
     "r_min = 0.85\n"
     "epsilon = 0.005\n"
     "t_end = 60\n"
     "interval_start = 2\n"
     "interval_end = 20\n"
     "interval_r = 1.9\n"},
    {"fig3_opt",
     "kind = optimal-interval\n"
     "r0 = 2.5\n"
     "r_min = 0.85\n"
     "epsilon = 0.005\n"
     "control_start = 2\n"},
    {"fig4_unconstrained",
     "kind = mpc\n"
     "r0 = 3.0\n"
     "r_min = 0.85\n"
     "epsilon = 0.001\n"
     "t_end = 30\n"
     "control_start = 2\n"},
    {"fig4_ipp015",
     "kind = mpc\n"
     "r0 = 3.0\n"
     "r_min = 0.85\n"
     "epsilon = 0.001\n"
     "t_end = 30\n"
     "control_start = 2\n"
     "i_max = 0.15\n"},
    {"fig4_ipp010",
     "kind = mpc\n"
     "r0 = 3.0\n"
     "r_min = 0.85\n"
     "epsilon = 0.001\n"
     "t_end = 30\n"
     "control_start = 2\n"
     "i_max = 0.10\n"},
    {"fig4_ipp005",
     "kind = mpc\n"
     "r0 = 3.0\n"
     "r_min = 0.85\n"
     "epsilon = 0.001\n"
     "t_end = 30\n"
     "control_start = 2\n"
     "i_max = 0.05\n"},
};

} // namespace

ScenarioConfig preset(std::string_view name)
{
    for (const Preset& entry : kPresets) {
        if (name == entry.name) {
            std::istringstream in{std::string(entry.text)};
            return parse_config(in, entry.name);
        }
    }
    std::string known;
    for (const Preset& entry : kPresets) {
        known += known.empty() ? entry.name : std::string(", ") + entry.name;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + known + ")", 0);
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const Preset& entry : kPresets) {
        names.emplace_back(entry.name);
    }
    return names;
}

std::vector<Trajectory> phase_portrait(const ModelParams& params,
                                       const std::vector<EpidemicState>& starts,
                                       const SamplingConfig& cfg, double t_end)
{
    std::vector<Trajectory> trajectories;
    trajectories.reserve(starts.size());
    const InputSchedule schedule = InputSchedule::constant(params, 0.0);
    for (const EpidemicState& start : starts) {
        trajectories.push_back(dense_trajectory(start, schedule, cfg, t_end));
    }
    return trajectories;
}

std::vector<SweepPoint> s_infinity_sweep(const ModelParams& params, const SweepSpec& spec)
{
    std::vector<SweepPoint> points;
    for (double i0 : spec.i0_values) {
        if (!(i0 >= 0.0) || i0 > 1.0) {
            throw std::invalid_argument("harness: sweep i0 values must lie in [0,1]");
        }
        for (int k = 0; k < spec.s0_count; ++k) {
            const double s0 =
                spec.s0_count == 1
                    ? spec.s0_min
                    : spec.s0_min + (spec.s0_max - spec.s0_min) * k / (spec.s0_count - 1);
            if (s0 + i0 > 1.0) {
                continue;
            }
            points.push_back(SweepPoint{i0, s0, s_infinity(s0, i0, params.r0())});
        }
    }
    return points;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("harness: cannot open output file '" + path.string() + "'");
    }
    return out;
}

void write_trajectory_csv(std::ofstream& out, const Trajectory& trajectory)
{
    out << "tau,S,I,C,u,R_effective\n";
    for (const TrajectorySample& sample : trajectory.samples) {
        out << format_double(sample.tau) << ',' << format_double(sample.state.s()) << ','
            << format_double(sample.state.i()) << ',' << format_double(sample.state.c()) << ','
            << format_double(sample.u) << ',' << format_double(sample.r_effective) << '\n';
    }
}

void write_events_common(std::ofstream& out, const ScenarioConfig& config,
                         const Trajectory& trajectory, const TrajectoryEvents& events,
                         double s_star)
{
    out << "scenario: " << config.name << '\n';
    out << "kind: " << to_string(config.kind) << '\n';
    const TrajectorySample& last = trajectory.back();
    out << "terminal_tau: " << format_double(last.tau) << '\n';
    out << "terminal_S: " << format_double(last.state.s()) << '\n';
    out << "terminal_I: " << format_double(last.state.i()) << '\n';
    out << "terminal_C: " << format_double(last.state.c()) << '\n';
    out << "s_star: " << format_double(s_star) << '\n';
    out << "max_I: " << format_double(trajectory.max_infected()) << '\n';
    out << "peak_count: " << events.peaks.size() << '\n';
    for (const Peak& peak : events.peaks) {
        out << "peak: tau=" << format_double(peak.tau) << " I=" << format_double(peak.value)
            << '\n';
    }
    if (events.qss_time) {
        out << "qss_time: " << format_double(*events.qss_time) << '\n';
    } else {
        out << "qss_time: none\n";
    }
    if (events.second_wave) {
        out << "second_wave: tau=" << format_double(events.second_wave->tau)
            << " I=" << format_double(events.second_wave->value) << '\n';
    } else {
        out << "second_wave: none\n";
    }
}

} // namespace

std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& config,
                                                const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    const double s_star = herd_immunity(config.params.r0());
    std::vector<std::filesystem::path> written;

    auto emit_time_series = [&](const Trajectory& trajectory, std::optional<double> release,
                                auto&& extra_events) {
        const TrajectoryEvents events =
            detect_events(trajectory, release, config.qss_threshold);
        const auto csv_path = out_dir / (config.name + "_trajectory.csv");
        auto csv = open_output(csv_path);
        write_trajectory_csv(csv, trajectory);
        written.push_back(csv_path);

        const auto events_path = out_dir / (config.name + "_events.txt");
        auto out = open_output(events_path);
        write_events_common(out, config, trajectory, events, s_star);
        extra_events(out);
        written.push_back(events_path);
    };

    switch (config.kind) {
    case ScenarioKind::kUncontrolled: {
        const Trajectory trajectory =
            dense_trajectory(config.params.initial_state(),
                             InputSchedule::constant(config.params, config.u0), config.sampling,
                             config.t_end);
        emit_time_series(trajectory, std::nullopt, [](std::ofstream&) {});
        break;
    }
    case ScenarioKind::kSingleInterval: {
        const Trajectory trajectory = simulate_single_interval(config.params, *config.interval,
                                                               config.sampling, config.t_end);
        emit_time_series(trajectory, config.interval->t_end(), [&](std::ofstream& out) {
            out << "release_time: " << format_double(config.interval->t_end()) << '\n';
            out << "interval_r: " << format_double(config.interval->r_i()) << '\n';
            out << "realizable: " << (config.interval->realizable(config.params) ? "yes" : "no")
                << '\n';
        });
        break;
    }
    case ScenarioKind::kOptimalInterval: {
        const OptimalRi opt = optimal_ri(config.params, config.control_start, config.sampling);
        const QssReleaseRun run =
            simulate_qss_release(config.params, opt.r_op, config.control_start, config.sampling,
                                 config.qss_threshold, config.max_hold, config.tail);
        emit_time_series(run.trajectory, run.release_time, [&](std::ofstream& out) {
            out << "r_i_op: " << format_double(opt.r_op) << '\n';
            out << "intervention_needed: " << (opt.intervention_needed ? "yes" : "no") << '\n';
            out << "realizable: " << (opt.realizable ? "yes" : "no") << '\n';
            out << "residual: " << format_double(opt.residual) << '\n';
            out << "release_time: " << format_double(run.release_time) << '\n';
        });
        break;
    }
    case ScenarioKind::kMpc: {
        const ClosedLoopResult result = closed_loop(config.params, config.mpc,
                                                    config.control_start, config.t_end,
                                                    config.qss_threshold);
        // Peaks after the last nonzero input count as second waves.
        double release = config.control_start;
        for (const TrajectorySample& sample : result.trajectory.samples) {
            if (sample.u > 0.0) {
                release = sample.tau;
            }
        }
        emit_time_series(result.trajectory, release, [&](std::ofstream& out) {
            out << "distancing_duration: " << format_double(result.distancing_duration) << '\n';
            if (result.herd_immunity_arrival) {
                out << "herd_immunity_arrival: " << format_double(*result.herd_immunity_arrival)
                    << '\n';
            } else {
                out << "herd_immunity_arrival: none\n";
            }
            out << "i_max: "
                << (config.mpc.constrained() ? format_double(config.mpc.i_max) : "unconstrained")
                << '\n';
            bool all_feasible = true;
            std::uint64_t nodes = 0;
            for (const ClosedLoopStep& step : result.steps) {
                all_feasible = all_feasible && step.feasible;
                nodes += step.nodes_explored;
            }
            out << "all_steps_feasible: " << (all_feasible ? "yes" : "no") << '\n';
            out << "total_nodes_explored: " << nodes << '\n';
        });
        break;
    }
    case ScenarioKind::kPhasePortrait: {
        const std::vector<Trajectory> trajectories =
            phase_portrait(config.params, config.starts, config.sampling, config.t_end);
        const auto csv_path = out_dir / (config.name + "_portrait.csv");
        auto csv = open_output(csv_path);
        csv << "trajectory,tau,S,I,C,u,R_effective\n";
        for (std::size_t t = 0; t < trajectories.size(); ++t) {
            for (const TrajectorySample& sample : trajectories[t].samples) {
                csv << t << ',' << format_double(sample.tau) << ','
                    << format_double(sample.state.s()) << ',' << format_double(sample.state.i())
                    << ',' << format_double(sample.state.c()) << ',' << format_double(sample.u)
                    << ',' << format_double(sample.r_effective) << '\n';
            }
        }
        written.push_back(csv_path);

        const auto events_path = out_dir / (config.name + "_events.txt");
        auto out = open_output(events_path);
        out << "scenario: " << config.name << '\n';
        out << "kind: " << to_string(config.kind) << '\n';
        out << "s_star: " << format_double(s_star) << '\n';
        out << "trajectory_count: " << trajectories.size() << '\n';
        for (std::size_t t = 0; t < trajectories.size(); ++t) {
            const TrajectorySample& first = trajectories[t].front();
            const TrajectorySample& last = trajectories[t].back();
            out << "trajectory " << t << ": start_S=" << format_double(first.state.s())
                << " start_I=" << format_double(first.state.i())
                << " terminal_S=" << format_double(last.state.s())
                << " terminal_I=" << format_double(last.state.i()) << '\n';
        }
        written.push_back(events_path);
        break;
    }
    case ScenarioKind::kSInfinitySweep: {
        const std::vector<SweepPoint> points = s_infinity_sweep(config.params, config.sweep);
        const auto csv_path = out_dir / (config.name + "_sweep.csv");
        auto csv = open_output(csv_path);
        csv << "i0,s0,s_infinity\n";
        for (const SweepPoint& point : points) {
            csv << format_double(point.i0) << ',' << format_double(point.s0) << ','
                << format_double(point.s_inf) << '\n';
        }
        written.push_back(csv_path);

        const auto events_path = out_dir / (config.name + "_events.txt");
        auto out = open_output(events_path);
        out << "scenario: " << config.name << '\n';
        out << "kind: " << to_string(config.kind) << '\n';
        out << "s_star: " << format_double(s_star) << '\n';
        out << "point_count: " << points.size() << '\n';
        written.push_back(events_path);
        break;
    }
    }

    return written;
}

} // namespace sirmpc
