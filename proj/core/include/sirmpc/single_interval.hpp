#pragma once

#include "sirmpc/analysis.hpp"
#include "sirmpc/integrator.hpp"
#include "sirmpc/sir_model.hpp"
#include "sirmpc/trajectory.hpp"

namespace sirmpc {

/// One social-distancing window [t_start, t_end) holding the effective
/// reproduction number at r_i; outside the window the system runs at r0.
class SingleInterval {
public:
    SingleInterval(double t_start, double t_end, double r_i);

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    double r_i() const { return r_i_; }

    /// True when r_i can be realized by an input u in [0,1].
    bool realizable(const ModelParams& params) const;

private:
    double t_start_;
    double t_end_;
    double r_i_;
};

/// Dense trajectory from the outbreak state (1-eps, eps, 0) under the
/// given interval policy, simulated to t_end_sim (> interval.t_end).
Trajectory simulate_single_interval(const ModelParams& params, const SingleInterval& interval,
                                    const SamplingConfig& cfg, double t_end_sim);

/// Interval policy with event-driven release: hold r_i from t_start until
/// the infected fraction first drops below qss_threshold, then release to
/// r0 for `tail` further time units.
struct QssReleaseRun {
    Trajectory trajectory;
    /// Time at which I first fell below the threshold and the measure was
    /// lifted.
    double release_time;
};

QssReleaseRun simulate_qss_release(const ModelParams& params, double r_i, double t_start,
                                   const SamplingConfig& cfg,
                                   double qss_threshold = kDefaultQssThreshold,
                                   double max_hold = 400.0, double tail = 40.0);

/// Root of the quasi-optimal interval condition
///   s_infinity(S(t_start), I(t_start), r) = S*(r0),
/// solved by bisection over r in (0, r0]. The state at t_start comes from
/// the uncontrolled dense trajectory.
struct OptimalRi {
    /// The quasi-optimal reproduction number during the interval. Equals
    /// r0 when no intervention is needed.
    double r_op;
    /// False when S(t_start) <= S* already (nothing to defend).
    bool intervention_needed;
    /// True when r_op lies in [r_min, r0] and is realizable by the
    /// control set (checked, not enforced).
    bool realizable;
    double s_at_start;
    double i_at_start;
    /// |s_infinity(S, I, r_op) - S*|.
    double residual;
};

OptimalRi optimal_ri(const ModelParams& params, double t_start, const SamplingConfig& cfg);

} // namespace sirmpc
