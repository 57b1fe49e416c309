#pragma once

#include <vector>

#include "sirmpc/sir_model.hpp"
#include "sirmpc/trajectory.hpp"

namespace sirmpc {

/// Discretization settings: the sampling interval T_s of the discrete map,
/// the number of RK4 sub-intervals per sample, and the step of the dense
/// reference integrator.
class SamplingConfig {
public:
    static constexpr double kDefaultTs = 0.5;
    static constexpr int kDefaultSubsteps = 8;
    static constexpr int kDenseStepsPerTs = 64;

    /// ts = 0.5, substeps = 8, dense_step = ts/64.
    SamplingConfig();
    SamplingConfig(double ts, int substeps, double dense_step);

    double ts() const { return ts_; }
    int substeps() const { return substeps_; }
    double dense_step() const { return dense_step_; }

private:
    double ts_;
    int substeps_;
    double dense_step_;
};

/// Piecewise-constant input over time. Each segment carries both the
/// distancing input u and the effective reproduction number in force, so
/// that intervention levels not representable by u in [0,1] can still be
/// simulated. Segments must be appended with strictly increasing start
/// times; the first segment starts at tau = 0.
class InputSchedule {
public:
    struct Segment {
        double tau_start;
        double u;
        double r;
    };

    /// Single segment holding input u for all time.
    static InputSchedule constant(const ModelParams& params, double u);
    /// Single segment holding the given reproduction number for all time;
    /// u is annotated as the affine pre-image of r.
    static InputSchedule constant_r(const ModelParams& params, double r);

    /// Appends a segment [tau_start, next start) with input u.
    void append(const ModelParams& params, double tau_start, double u);
    /// Appends a segment specified by reproduction number.
    void append_r(const ModelParams& params, double tau_start, double r);

    const std::vector<Segment>& segments() const { return segments_; }
    /// Segment in force at tau.
    const Segment& at(double tau) const;

private:
    void push(double tau_start, double u, double r);

    std::vector<Segment> segments_;
};

/// One classic explicit Runge-Kutta 4 step of the controlled dynamics at
/// constant effective reproduction number. Components that come out
/// negative by less than 1e-12 are clamped to zero; anything larger, or a
/// conservation defect above 1e-12, raises IntegrationError carrying the
/// time at the end of the step. tau is used only for error reporting.
EpidemicState rk4_step(const EpidemicState& state, double r_effective, double h, double tau = 0.0);

/// The sampled discrete-time map x_{k+1} = F(x_k, u_k): `substeps` RK4
/// steps of length ts/substeps under constant input u.
EpidemicState sample_map(const EpidemicState& state, double u, const ModelParams& params,
                         const SamplingConfig& cfg);

/// Reference trajectory: fixed-step RK4 at cfg.dense_step over the given
/// piecewise-constant schedule, recording the state at every step.
/// Segment boundaries are honored exactly (a shorter final step inside
/// each segment). The initial state is recorded at tau = 0.
Trajectory dense_trajectory(const EpidemicState& state0, const InputSchedule& schedule,
                            const SamplingConfig& cfg, double t_end);

} // namespace sirmpc
