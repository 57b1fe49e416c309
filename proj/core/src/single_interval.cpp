#include "sirmpc/single_interval.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sirmpc/errors.hpp"

namespace sirmpc {

SingleInterval::SingleInterval(double t_start, double t_end, double r_i)
    : t_start_(t_start), t_end_(t_end), r_i_(r_i)
{
    if (!(t_start >= 0.0) || !(t_end > t_start)) {
        throw std::invalid_argument("single-interval: need 0 <= t_start < t_end");
    }
    if (!(r_i > 0.0) || !std::isfinite(r_i)) {
        throw std::invalid_argument("single-interval: r_i must be finite and > 0");
    }
}

bool SingleInterval::realizable(const ModelParams& params) const
{
    return r_i_ >= params.r_min() && r_i_ <= params.r0();
}

Trajectory simulate_single_interval(const ModelParams& params, const SingleInterval& interval,
                                    const SamplingConfig& cfg, double t_end_sim)
{
    if (!(t_end_sim > interval.t_end())) {
        throw std::invalid_argument("single-interval: simulation horizon must extend past the interval");
    }
    InputSchedule schedule;
    if (interval.t_start() > 0.0) {
        schedule.append(params, 0.0, 0.0);
        schedule.append_r(params, interval.t_start(), interval.r_i());
    } else {
        schedule.append_r(params, 0.0, interval.r_i());
    }
    schedule.append(params, interval.t_end(), 0.0);
    return dense_trajectory(params.initial_state(), schedule, cfg, t_end_sim);
}

QssReleaseRun simulate_qss_release(const ModelParams& params, double r_i, double t_start,
                                   const SamplingConfig& cfg, double qss_threshold,
                                   double max_hold, double tail)
{
    if (!(r_i > 0.0) || !std::isfinite(r_i)) {
        throw std::invalid_argument("single-interval: r_i must be finite and > 0");
    }
    if (!(t_start >= 0.0) || !(max_hold > 0.0) || !(tail >= 0.0)) {
        throw std::invalid_argument("single-interval: invalid qss-release times");
    }

    const double h = cfg.dense_step();
    const double r0 = params.r0();
    const double u_i = (r0 - r_i) / (r0 - params.r_min());

    Trajectory traj;
    EpidemicState x = params.initial_state();
    traj.samples.push_back(TrajectorySample{0.0, x, 0.0, r0});

    // Uncontrolled run-up to the intervention start.
    long k = 0;
    while (k * h < t_start - 1e-12) {
        const double tau_prev = k * h;
        const double step = std::min(h, t_start - tau_prev);
        x = rk4_step(x, r0, step, tau_prev);
        ++k;
        traj.samples.push_back(TrajectorySample{std::min(k * h, t_start), x, 0.0, r0});
    }

    // Hold r_i until the infected fraction settles below the threshold.
    double tau = t_start;
    while (x.i() >= qss_threshold) {
        if (tau - t_start >= max_hold) {
            throw std::runtime_error(
                "single-interval: I did not settle below " + std::to_string(qss_threshold)
                + " within " + std::to_string(max_hold) + " time units of holding r_i = "
                + std::to_string(r_i));
        }
        x = rk4_step(x, r_i, h, tau);
        tau += h;
        traj.samples.push_back(TrajectorySample{tau, x, u_i, r_i});
    }
    const double release_time = tau;

    const double tau_end = release_time + tail;
    while (tau < tau_end - 1e-12) {
        const double step = std::min(h, tau_end - tau);
        x = rk4_step(x, r0, step, tau);
        tau += step;
        traj.samples.push_back(TrajectorySample{tau, x, 0.0, r0});
    }

    return QssReleaseRun{std::move(traj), release_time};
}

OptimalRi optimal_ri(const ModelParams& params, double t_start, const SamplingConfig& cfg)
{
    if (!(t_start > 0.0) || !std::isfinite(t_start)) {
        throw std::invalid_argument("single-interval: t_start must be finite and > 0");
    }

    const double s_star = herd_immunity(params.r0());
    const Trajectory run_up = dense_trajectory(params.initial_state(),
                                               InputSchedule::constant(params, 0.0), cfg, t_start);
    const EpidemicState& at_start = run_up.back().state;
    const double s_i = at_start.s();
    const double i_i = at_start.i();

    OptimalRi result;
    result.s_at_start = s_i;
    result.i_at_start = i_i;

    if (s_i <= s_star) {
        // Below the peak threshold the epidemic can no longer grow;
        // holding measures would only shrink the final size further.
        result.r_op = params.r0();
        result.intervention_needed = false;
        result.realizable = true;
        result.residual = std::fabs(s_infinity(s_i, i_i, params.r0()) - s_star);
        return result;
    }
    if (!(s_i * params.r0() > 1.0)) {
        throw std::invalid_argument(
            "single-interval: t_start is past the uncontrolled peak, S(t_start) <= S*");
    }

    auto residual_at = [&](double r) { return s_infinity(s_i, i_i, r) - s_star; };

    double lo = 1e-6;
    double hi = params.r0();
    double f_lo = residual_at(lo);
    double f_hi = residual_at(hi);
    if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
        throw std::runtime_error("single-interval: no quasi-optimal r_i in (0, r0] at t_start = "
                                 + std::to_string(t_start));
    }

    double mid = 0.5 * (lo + hi);
    double f_mid = residual_at(mid);
    for (int iter = 0; iter < 200 && std::fabs(f_mid) > 1e-9; ++iter) {
        if (f_mid > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        f_mid = residual_at(mid);
    }
    if (std::fabs(f_mid) > 1e-9) {
        throw std::runtime_error("single-interval: bisection failed to reach residual tolerance");
    }

    result.r_op = mid;
    result.intervention_needed = true;
    result.realizable = mid >= params.r_min() && mid <= params.r0();
    result.residual = std::fabs(f_mid);
    return result;
}

} // namespace sirmpc
