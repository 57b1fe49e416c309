#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sirmpc/errors.hpp"
#include "sirmpc/scenario.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericFailure = 3;

struct Subcommand {
    CLI::App* cmd = nullptr;
    sirmpc::ScenarioKind kind = sirmpc::ScenarioKind::kUncontrolled;
    std::string config;
    std::string preset;
    std::string out = ".";
};

int run(const Subcommand& sub)
{
    if (sub.config.empty() == sub.preset.empty()) {
        throw sirmpc::ConfigError("provide exactly one of --config or --preset");
    }
    const sirmpc::ScenarioConfig config =
        sub.config.empty() ? sirmpc::preset(sub.preset) : sirmpc::parse_config_file(sub.config);
    if (config.kind != sub.kind) {
        throw sirmpc::ConfigError("config kind '" + std::string(to_string(config.kind))
                                  + "' does not match subcommand '"
                                  + std::string(to_string(sub.kind)) + "'");
    }
    for (const auto& path : sirmpc::run_scenario(config, sub.out)) {
        std::cout << "wrote " << path.string() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Non-dimensional SIR epidemic analysis and switching-MPC distancing design"};
    app.require_subcommand(1);

    std::vector<std::unique_ptr<Subcommand>> subs;
    auto add = [&](const char* name, const char* desc, sirmpc::ScenarioKind kind) {
        auto sub = std::make_unique<Subcommand>();
        sub->kind = kind;
        sub->cmd = app.add_subcommand(name, desc);
        sub->cmd->add_option("--config", sub->config, "scenario config file");
        sub->cmd->add_option("--preset", sub->preset,
                             "bundled scenario preset (fig1_portrait, fig2_sweep, fig3_blue, "
                             "fig3_red, fig3_opt, fig4_unconstrained, fig4_ipp015, fig4_ipp010, "
                             "fig4_ipp005)");
        sub->cmd->add_option("--out", sub->out, "output directory (default: current)");
        subs.push_back(std::move(sub));
    };

    add("simulate", "Constant-input trajectory from the outbreak state",
        sirmpc::ScenarioKind::kUncontrolled);
    add("single-interval", "One distancing window holding a fixed reproduction number",
        sirmpc::ScenarioKind::kSingleInterval);
    add("optimal-interval", "Quasi-optimal single-interval design with release at QSS",
        sirmpc::ScenarioKind::kOptimalInterval);
    add("mpc", "Receding-horizon switching controller", sirmpc::ScenarioKind::kMpc);
    add("phase-portrait", "Family of uncontrolled trajectories from given starts",
        sirmpc::ScenarioKind::kPhasePortrait);
    add("sweep", "Final-size surface over initial conditions",
        sirmpc::ScenarioKind::kSInfinitySweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        for (const auto& sub : subs) {
            if (sub->cmd->parsed()) {
                return run(*sub);
            }
        }
        return kExitConfigError;
    } catch (const sirmpc::ConfigError& err) {
        std::cerr << "config error";
        if (err.line() > 0) {
            std::cerr << " (line " << err.line() << ")";
        }
        std::cerr << ": " << err.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& err) {
        std::cerr << "numeric failure: " << err.what() << '\n';
        return kExitNumericFailure;
    }
}
