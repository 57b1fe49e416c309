#pragma once

#include <optional>
#include <vector>

#include "sirmpc/trajectory.hpp"

namespace sirmpc {

/// Infected fraction below which the system is treated as having reached
/// a quasi-steady state.
inline constexpr double kDefaultQssThreshold = 1e-4;

/// Principal branch of the Lambert W function on [-1/e, 0], computed by
/// Halley iteration with series starts near 0 and near the branch point.
/// Arguments outside the interval by less than 1e-12 are clamped; larger
/// excursions raise std::domain_error. The result lies in [-1, 0] and
/// satisfies w*e^w = x to within 1e-13.
double lambert_w0(double x);

/// Herd-immunity threshold S* = min(1, 1/r).
double herd_immunity(double r);

/// Terminal susceptible fraction of the epidemic started at (s0, i0) and
/// run at constant reproduction number r:
///   S_inf = -W(-r*s0*e^{-r*(s0+i0)}) / r.
double s_infinity(double s0, double i0, double r);

/// Closed-form peak of the infected fraction. When s0*r <= 1 the infected
/// fraction only declines, the peak is i0 itself and monotone_decline is
/// set.
struct PeakPrevalence {
    double value;
    bool monotone_decline;
};

PeakPrevalence peak_prevalence(double s0, double i0, double r);

enum class Stability {
    kAsymptoticallyStable,
    kUnstable,
};

/// An equilibrium (s_bar, 0, 1 - s_bar) together with its stability:
/// asymptotically stable iff s_bar <= S*.
struct EquilibriumClassification {
    double s_bar;
    Stability stability;
};

EquilibriumClassification classify_equilibrium(double s_bar, double r);

/// Mean time of infection: trapezoidal quadrature of
/// tau * R(tau) * S(tau) * I(tau) / (1 - S_terminal) over the trajectory,
/// with R(tau) taken from the recorded effective reproduction number.
/// Requires a settled trajectory (terminal I below qss_threshold); a
/// trajectory with I identically zero is rejected as degenerate.
double average_infection_time(const Trajectory& trajectory,
                              double qss_threshold = kDefaultQssThreshold);

struct Peak {
    double tau;
    double value;
};

struct TrajectoryEvents {
    /// Interior local maxima of I with prominence above qss_threshold/10,
    /// in increasing time order.
    std::vector<Peak> peaks;
    /// First time I drops below qss_threshold and stays below until the
    /// end of the trajectory.
    std::optional<double> qss_time;
    /// First peak strictly after release_time, when one was requested.
    std::optional<Peak> second_wave;
};

TrajectoryEvents detect_events(const Trajectory& trajectory,
                               std::optional<double> release_time = std::nullopt,
                               double qss_threshold = kDefaultQssThreshold);

} // namespace sirmpc
