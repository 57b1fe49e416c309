#include "sirmpc/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sirmpc/errors.hpp"

namespace sirmpc {

namespace {

constexpr double kNegativeClampTol = 1e-12;
constexpr double kStepConservationTol = 1e-12;

struct RawDerivative {
    double ds;
    double di;
};

// Right-hand side on raw components; dc = i is implicit. Intermediate RK
// stages may leave the simplex by O(h), so they bypass state validation.
RawDerivative rhs(double s, double i, double r)
{
    const double incidence = r * s * i;
    return RawDerivative{-incidence, incidence - i};
}

double clamp_component(double x, double tau, const char* name)
{
    if (x >= 0.0) {
        return x;
    }
    if (x > -kNegativeClampTol) {
        return 0.0;
    }
    throw IntegrationError("integrator: " + std::string(name) + " = " + std::to_string(x)
                               + " at tau = " + std::to_string(tau)
                               + " (step size too large)",
                           tau);
}

} // namespace

SamplingConfig::SamplingConfig()
    : SamplingConfig(kDefaultTs, kDefaultSubsteps, kDefaultTs / kDenseStepsPerTs)
{
}

SamplingConfig::SamplingConfig(double ts, int substeps, double dense_step)
    : ts_(ts), substeps_(substeps), dense_step_(dense_step)
{
    if (!(ts > 0.0) || !std::isfinite(ts)) {
        throw std::invalid_argument("integrator: sampling interval must be finite and > 0");
    }
    if (substeps < 1) {
        throw std::invalid_argument("integrator: substeps must be >= 1");
    }
    if (!(dense_step > 0.0) || !(dense_step <= ts)) {
        throw std::invalid_argument("integrator: dense_step must satisfy 0 < dense_step <= ts");
    }
}

InputSchedule InputSchedule::constant(const ModelParams& params, double u)
{
    InputSchedule schedule;
    schedule.append(params, 0.0, u);
    return schedule;
}

InputSchedule InputSchedule::constant_r(const ModelParams& params, double r)
{
    InputSchedule schedule;
    schedule.append_r(params, 0.0, r);
    return schedule;
}

void InputSchedule::append(const ModelParams& params, double tau_start, double u)
{
    push(tau_start, u, effective_r(params, u));
}

void InputSchedule::append_r(const ModelParams& params, double tau_start, double r)
{
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("integrator: scheduled reproduction number must be finite and > 0");
    }
    const double u = (params.r0() - r) / (params.r0() - params.r_min());
    push(tau_start, u, r);
}

void InputSchedule::push(double tau_start, double u, double r)
{
    if (segments_.empty()) {
        if (tau_start != 0.0) {
            throw std::invalid_argument("integrator: first schedule segment must start at tau = 0");
        }
    } else if (!(tau_start > segments_.back().tau_start)) {
        throw std::invalid_argument("integrator: schedule segments must have strictly increasing start times");
    }
    segments_.push_back(Segment{tau_start, u, r});
}

const InputSchedule::Segment& InputSchedule::at(double tau) const
{
    if (segments_.empty()) {
        throw std::logic_error("integrator: empty schedule");
    }
    auto it = std::upper_bound(segments_.begin(), segments_.end(), tau,
                               [](double t, const Segment& seg) { return t < seg.tau_start; });
    if (it == segments_.begin()) {
        return segments_.front();
    }
    return *(it - 1);
}

EpidemicState rk4_step(const EpidemicState& state, double r_effective, double h, double tau)
{
    if (!std::isfinite(r_effective) || !(r_effective > 0.0)) {
        throw std::invalid_argument("integrator: effective reproduction number must be finite and > 0");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("integrator: step size must be finite and > 0");
    }

    const double s = state.s();
    const double i = state.i();
    const double c = state.c();

    const RawDerivative k1 = rhs(s, i, r_effective);
    const RawDerivative k2 = rhs(s + 0.5 * h * k1.ds, i + 0.5 * h * k1.di, r_effective);
    const RawDerivative k3 = rhs(s + 0.5 * h * k2.ds, i + 0.5 * h * k2.di, r_effective);
    const RawDerivative k4 = rhs(s + h * k3.ds, i + h * k3.di, r_effective);

    const double i1 = i + 0.5 * h * k1.di;
    const double i2 = i + 0.5 * h * k2.di;
    const double i3 = i + h * k3.di;

    double s_next = s + (h / 6.0) * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
    double i_next = i + (h / 6.0) * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di);
    double c_next = c + (h / 6.0) * (i + 2.0 * i1 + 2.0 * i2 + i3);

    const double t_next = tau + h;
    const double defect = (s_next + i_next + c_next) - 1.0;
    if (!(std::fabs(defect) <= kStepConservationTol)) {
        throw IntegrationError("integrator: conservation defect " + std::to_string(defect)
                                   + " at tau = " + std::to_string(t_next),
                               t_next);
    }

    s_next = clamp_component(s_next, t_next, "S");
    i_next = clamp_component(i_next, t_next, "I");
    c_next = clamp_component(c_next, t_next, "C");

    return EpidemicState::unchecked(s_next, i_next, c_next);
}

EpidemicState sample_map(const EpidemicState& state, double u, const ModelParams& params,
                         const SamplingConfig& cfg)
{
    const double r = effective_r(params, u);
    const double h = cfg.ts() / cfg.substeps();
    EpidemicState x = state;
    for (int k = 0; k < cfg.substeps(); ++k) {
        x = rk4_step(x, r, h, k * h);
    }
    return x;
}

Trajectory dense_trajectory(const EpidemicState& state0, const InputSchedule& schedule,
                            const SamplingConfig& cfg, double t_end)
{
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("integrator: horizon must be finite and >= 0");
    }

    Trajectory traj;
    const InputSchedule::Segment& first = schedule.at(0.0);
    traj.samples.push_back(TrajectorySample{0.0, state0, first.u, first.r});
    if (t_end == 0.0) {
        return traj;
    }

    EpidemicState x = state0;
    const auto& segments = schedule.segments();
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const double a = segments[si].tau_start;
        const double b = (si + 1 < segments.size()) ? std::min(segments[si + 1].tau_start, t_end)
                                                    : t_end;
        if (!(b > a)) {
            continue;
        }
        const double span = b - a;
        const auto n = static_cast<long>(std::ceil(span / cfg.dense_step() - 1e-9));
        const long steps = std::max<long>(1, n);
        const double h = span / steps;
        for (long k = 1; k <= steps; ++k) {
            const double tau_prev = a + (k - 1) * h;
            x = rk4_step(x, segments[si].r, h, tau_prev);
            const double tau = (k == steps) ? b : a + k * h;
            traj.samples.push_back(TrajectorySample{tau, x, segments[si].u, segments[si].r});
        }
        if (b >= t_end) {
            break;
        }
    }
    return traj;
}

} // namespace sirmpc
