#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sirmpc/analysis.hpp"
#include "sirmpc/integrator.hpp"
#include "sirmpc/sir_model.hpp"
#include "sirmpc/trajectory.hpp"

namespace sirmpc {

/// Controller settings. The objective over a predicted sequence is
///   sum_{j=0}^{N-1} [ weight_q*(S_j - S*)^2 + weight_u*u_j^2
///                     + slack_weight*max(0, I_j - i_max)^2 ]
///   + weight_p*|S_N - S*|,
/// with S* computed from r0 (the reproduction number in force once all
/// measures end). i_max = infinity disables the peak constraint.
struct MpcConfig {
    int horizon_n = 10;
    double weight_q = 1.0;
    double weight_u = 0.02;
    double weight_p = 50.0;
    double i_max = std::numeric_limits<double>::infinity();
    double slack_weight = 1e6;
    ControlGrid grid;
    SamplingConfig sampling;

    bool constrained() const { return i_max != std::numeric_limits<double>::infinity(); }

    void validate() const;
};

/// Result of one optimization: the minimizing input sequence (ties broken
/// toward the smaller input at the earliest differing step), its cost,
/// whether the peak constraint held without slack, and the number of
/// complete sequences costed by the search.
struct MpcSolution {
    std::vector<double> input_sequence;
    double cost;
    bool feasible;
    std::uint64_t nodes_explored;
};

/// Per-sample running cost weight_q*(S - s_star)^2 + weight_u*u^2.
double stage_cost(const EpidemicState& state, double u, double s_star, const MpcConfig& cfg);

/// Open-loop rollout of one candidate sequence.
struct SequenceEvaluation {
    double cost;
    /// Predicted states x_0 .. x_N at sample resolution.
    Trajectory predicted;
    /// Largest predicted infected fraction (including x_N).
    double max_infected;
    /// Sum of squared peak-constraint violations over x_0 .. x_{N-1}; the
    /// objective charges slack_weight times this.
    double slack;
};

SequenceEvaluation evaluate_sequence(const EpidemicState& x0, std::span<const double> sequence,
                                     const ModelParams& params, const MpcConfig& cfg);

/// Global minimizer over grid^horizon_n by depth-first branch-and-bound.
/// Every cost term is non-negative, so the accumulated prefix cost bounds
/// any completion from below; a branch is pruned as soon as that bound
/// reaches the incumbent. Exploring inputs in increasing order with
/// strict-improvement replacement yields exactly the tie-break stated on
/// MpcSolution. An optional hint sequence seeds the incumbent (the
/// receding-horizon loop passes the previous solution shifted); seeded
/// incumbents only tighten pruning strictly, so the returned minimizer
/// and tie-break are identical to the unseeded search.
MpcSolution solve(const EpidemicState& x0, const ModelParams& params, const MpcConfig& cfg,
                  std::span<const double> hint = {});

/// Diagnostics for one closed-loop sample.
struct ClosedLoopStep {
    double tau;
    double u;
    double cost;
    bool feasible;
    std::uint64_t nodes_explored;
};

struct ClosedLoopResult {
    /// Applied trajectory at RK4-substep resolution.
    Trajectory trajectory;
    /// One entry per controlled sample.
    std::vector<ClosedLoopStep> steps;
    /// Total time with a nonzero input applied.
    double distancing_duration;
    /// First time with S <= S* + 5e-3 and I below the QSS threshold.
    std::optional<double> herd_immunity_arrival;
    double s_star;
};

/// Receding-horizon loop: the system evolves uncontrolled until
/// t_start_control (aligned to the sample grid), then at every sample the
/// optimization is solved and only the first input applied. The horizon
/// is rounded up to whole samples.
ClosedLoopResult closed_loop(const ModelParams& params, const MpcConfig& cfg,
                             double t_start_control, double t_end,
                             double qss_threshold = kDefaultQssThreshold);

} // namespace sirmpc
