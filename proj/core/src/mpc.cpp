#include "sirmpc/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sirmpc {

void MpcConfig::validate() const
{
    if (horizon_n < 1) {
        throw std::invalid_argument("mpc: horizon must be >= 1");
    }
    if (!(weight_q >= 0.0) || !(weight_u >= 0.0) || !(weight_p >= 0.0)) {
        throw std::invalid_argument("mpc: weights must be >= 0");
    }
    if (constrained()) {
        if (!(i_max > 0.0 && i_max <= 1.0)) {
            throw std::invalid_argument("mpc: i_max must lie in (0,1]");
        }
        if (!(slack_weight > 0.0)) {
            throw std::invalid_argument("mpc: slack_weight must be > 0 when i_max is finite");
        }
    }
}

double stage_cost(const EpidemicState& state, double u, double s_star, const MpcConfig& cfg)
{
    const double ds = state.s() - s_star;
    return cfg.weight_q * ds * ds + cfg.weight_u * u * u;
}

namespace {

// Slack penalty term for one predicted state; zero when unconstrained.
double violation_sq(const EpidemicState& state, const MpcConfig& cfg)
{
    if (!cfg.constrained()) {
        return 0.0;
    }
    const double v = std::max(0.0, state.i() - cfg.i_max);
    return v * v;
}

struct BnbSearch {
    const ModelParams& params;
    const MpcConfig& cfg;
    double s_star;

    std::vector<double> incumbent_seq;
    double incumbent_cost = std::numeric_limits<double>::infinity();
    // True while the incumbent cost was seeded from outside the search
    // (warm start): equal-cost branches must then still be explored so
    // that the lexicographically smallest minimizer wins the tie.
    bool incumbent_synthetic = false;
    std::vector<double> current;
    std::uint64_t leaves = 0;

    void run(const EpidemicState& x0)
    {
        current.assign(static_cast<std::size_t>(cfg.horizon_n), 0.0);
        descend(x0, 0, 0.0);
    }

    void descend(const EpidemicState& x, int depth, double accumulated)
    {
        if (depth == cfg.horizon_n) {
            ++leaves;
            const double total = accumulated + cfg.weight_p * std::fabs(x.s() - s_star);
            if (total < incumbent_cost) {
                incumbent_cost = total;
                incumbent_seq = current;
                incumbent_synthetic = false;
            } else if (incumbent_synthetic && total == incumbent_cost) {
                // First in-search leaf matching the seeded cost; it is the
                // lexicographically smallest such leaf by DFS order.
                if (std::lexicographical_compare(current.begin(), current.end(),
                                                 incumbent_seq.begin(), incumbent_seq.end())) {
                    incumbent_seq = current;
                }
                incumbent_synthetic = false;
            }
            return;
        }
        // The slack term depends on the node state only, not on the input.
        const double penalty = cfg.slack_weight * violation_sq(x, cfg);
        for (double u : cfg.grid.levels()) {
            const double bound = (accumulated + stage_cost(x, u, s_star, cfg)) + penalty;
            if (incumbent_synthetic ? bound > incumbent_cost : bound >= incumbent_cost) {
                continue;
            }
            current[static_cast<std::size_t>(depth)] = u;
            descend(sample_map(x, u, params, cfg.sampling), depth + 1, bound);
        }
    }
};

} // namespace

SequenceEvaluation evaluate_sequence(const EpidemicState& x0, std::span<const double> sequence,
                                     const ModelParams& params, const MpcConfig& cfg)
{
    cfg.validate();
    if (sequence.size() != static_cast<std::size_t>(cfg.horizon_n)) {
        throw std::invalid_argument("mpc: sequence length " + std::to_string(sequence.size())
                                    + " does not match horizon " + std::to_string(cfg.horizon_n));
    }

    for (double u : sequence) {
        if (!cfg.grid.contains(u)) {
            throw std::invalid_argument("mpc: input " + std::to_string(u)
                                        + " is not a level of the control grid");
        }
    }

    const double s_star = herd_immunity(params.r0());
    const double ts = cfg.sampling.ts();

    SequenceEvaluation eval;
    eval.slack = 0.0;
    eval.predicted.samples.push_back(
        TrajectorySample{0.0, x0, sequence[0], effective_r(params, sequence[0])});

    double accumulated = 0.0;
    EpidemicState x = x0;
    for (std::size_t j = 0; j < sequence.size(); ++j) {
        const double u = sequence[j];
        const double sq = violation_sq(x, cfg);
        eval.slack += sq;
        accumulated = (accumulated + stage_cost(x, u, s_star, cfg)) + cfg.slack_weight * sq;
        x = sample_map(x, u, params, cfg.sampling);
        eval.predicted.samples.push_back(
            TrajectorySample{(j + 1) * ts, x, u, effective_r(params, u)});
    }
    eval.cost = accumulated + cfg.weight_p * std::fabs(x.s() - s_star);
    eval.max_infected = eval.predicted.max_infected();
    return eval;
}

MpcSolution solve(const EpidemicState& x0, const ModelParams& params, const MpcConfig& cfg,
                  std::span<const double> hint)
{
    cfg.validate();

    BnbSearch search{params, cfg, herd_immunity(params.r0())};
    if (hint.size() == static_cast<std::size_t>(cfg.horizon_n)) {
        bool on_grid = true;
        for (double u : hint) {
            on_grid = on_grid && cfg.grid.contains(u);
        }
        if (on_grid) {
            const SequenceEvaluation seeded = evaluate_sequence(x0, hint, params, cfg);
            search.incumbent_cost = seeded.cost;
            search.incumbent_seq.assign(hint.begin(), hint.end());
            search.incumbent_synthetic = true;
        }
    }
    search.run(x0);

    MpcSolution solution;
    solution.input_sequence = std::move(search.incumbent_seq);
    solution.cost = search.incumbent_cost;
    solution.nodes_explored = search.leaves;

    const SequenceEvaluation eval =
        evaluate_sequence(x0, solution.input_sequence, params, cfg);
    solution.feasible = eval.slack == 0.0;
    return solution;
}

ClosedLoopResult closed_loop(const ModelParams& params, const MpcConfig& cfg,
                             double t_start_control, double t_end, double qss_threshold)
{
    cfg.validate();
    if (!(t_start_control >= 0.0) || !(t_end > t_start_control)) {
        throw std::invalid_argument("mpc: need 0 <= t_start_control < t_end");
    }

    const double ts = cfg.sampling.ts();
    const int substeps = cfg.sampling.substeps();
    const double h = ts / substeps;
    const double s_star = herd_immunity(params.r0());
    const auto total_samples = static_cast<long>(std::ceil(t_end / ts - 1e-9));

    ClosedLoopResult result;
    result.s_star = s_star;
    result.distancing_duration = 0.0;

    EpidemicState x = params.initial_state();
    result.trajectory.samples.push_back(TrajectorySample{0.0, x, 0.0, params.r0()});
    std::vector<double> warm_start;

    for (long k = 0; k < total_samples; ++k) {
        const double tau_k = k * ts;
        const bool active = tau_k >= t_start_control - 1e-9;

        double u = 0.0;
        if (active) {
            MpcSolution sol = solve(x, params, cfg, warm_start);
            u = sol.input_sequence.front();
            result.steps.push_back(ClosedLoopStep{tau_k, u, sol.cost, sol.feasible,
                                                  sol.nodes_explored});
            if (u > 0.0) {
                result.distancing_duration += ts;
            }
            // Seed the next sample's search with this solution shifted one
            // step forward.
            warm_start = std::move(sol.input_sequence);
            warm_start.erase(warm_start.begin());
            warm_start.push_back(warm_start.back());
        }

        // Same discretization as sample_map, recorded substep by substep.
        const double r = effective_r(params, u);
        for (int j = 1; j <= substeps; ++j) {
            x = rk4_step(x, r, h, tau_k + (j - 1) * h);
            const double tau = (j == substeps) ? (k + 1) * ts : tau_k + j * h;
            result.trajectory.samples.push_back(TrajectorySample{tau, x, u, r});
        }
    }

    for (const TrajectorySample& sample : result.trajectory.samples) {
        if (sample.state.s() <= s_star + 5e-3 && sample.state.i() < qss_threshold) {
            result.herd_immunity_arrival = sample.tau;
            break;
        }
    }

    return result;
}

} // namespace sirmpc
