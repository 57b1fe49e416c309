#include "sirmpc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sirmpc {

namespace {

const double kBranchPoint = -std::exp(-1.0); // -1/e
constexpr double kDomainSlack = 1e-12;

} // namespace

double lambert_w0(double x)
{
    if (!std::isfinite(x) || x < kBranchPoint - kDomainSlack || x > 0.0) {
        throw std::domain_error("analysis: lambert_w0 argument " + std::to_string(x)
                                + " outside [-1/e, 0]");
    }
    if (x == 0.0) {
        return 0.0;
    }
    x = std::max(x, kBranchPoint);

    double w;
    if (x < -0.3) {
        // Branch-point expansion in p = sqrt(2*(1 + e*x)).
        const double p = std::sqrt(std::max(0.0, 2.0 * (1.0 + std::exp(1.0) * x)));
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
        if (p < 1e-5) {
            // Expansion error is O(p^4); Halley would divide by ~0 here.
            return std::max(w, -1.0);
        }
    } else {
        w = x * (1.0 - x);
    }

    for (int iter = 0; iter < 50; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (f == 0.0) {
            break;
        }
        const double fp = ew * (w + 1.0);
        const double step = f / (fp - (w + 2.0) * f / (2.0 * (w + 1.0)));
        w -= step;
        if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(w))) {
            break;
        }
    }
    return std::clamp(w, -1.0, 0.0);
}

double herd_immunity(double r)
{
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("analysis: reproduction number must be finite and > 0");
    }
    return std::min(1.0, 1.0 / r);
}

double s_infinity(double s0, double i0, double r)
{
    if (!(s0 >= 0.0) || !(i0 >= 0.0) || !(s0 + i0 <= 1.0 + 1e-12)) {
        throw std::invalid_argument("analysis: (s0, i0) must satisfy s0, i0 >= 0 and s0 + i0 <= 1");
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("analysis: reproduction number must be finite and > 0");
    }
    if (s0 == 0.0) {
        return 0.0;
    }
    const double arg = -r * s0 * std::exp(-r * (s0 + i0));
    return -lambert_w0(arg) / r;
}

PeakPrevalence peak_prevalence(double s0, double i0, double r)
{
    if (!(i0 > 0.0)) {
        throw std::invalid_argument("analysis: peak_prevalence requires i0 > 0");
    }
    if (!(s0 >= 0.0) || !(s0 + i0 <= 1.0 + 1e-12)) {
        throw std::invalid_argument("analysis: (s0, i0) must lie on the simplex");
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("analysis: reproduction number must be finite and > 0");
    }
    if (s0 * r <= 1.0) {
        return PeakPrevalence{i0, true};
    }
    const double peak = s0 + i0 - (1.0 / r) * (1.0 + std::log(s0 * r));
    return PeakPrevalence{peak, false};
}

EquilibriumClassification classify_equilibrium(double s_bar, double r)
{
    if (!(s_bar >= 0.0 && s_bar <= 1.0)) {
        throw std::invalid_argument("analysis: equilibrium susceptible fraction must lie in [0,1]");
    }
    const double s_star = herd_immunity(r);
    return EquilibriumClassification{
        s_bar, s_bar <= s_star ? Stability::kAsymptoticallyStable : Stability::kUnstable};
}

double average_infection_time(const Trajectory& trajectory, double qss_threshold)
{
    if (trajectory.empty()) {
        throw std::invalid_argument("analysis: empty trajectory");
    }
    if (trajectory.max_infected() == 0.0) {
        throw std::runtime_error("analysis: degenerate epidemic, I is identically zero");
    }
    if (!(trajectory.back().state.i() < qss_threshold)) {
        throw std::runtime_error(
            "analysis: insufficient horizon, terminal I = "
            + std::to_string(trajectory.back().state.i()) + " has not settled below "
            + std::to_string(qss_threshold));
    }

    const double s_terminal = trajectory.back().state.s();
    const double total_infected = 1.0 - s_terminal;
    if (!(total_infected > 0.0)) {
        throw std::runtime_error("analysis: degenerate epidemic, no individuals were infected");
    }

    auto integrand = [&](const TrajectorySample& sample) {
        return sample.tau * sample.r_effective * sample.state.s() * sample.state.i();
    };

    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
        const TrajectorySample& a = trajectory.samples[k];
        const TrajectorySample& b = trajectory.samples[k + 1];
        integral += 0.5 * (b.tau - a.tau) * (integrand(a) + integrand(b));
    }
    return integral / total_infected;
}

namespace {

// Height of the highest valley separating sample k from higher terrain,
// walked over the infected series; the peak's prominence is its height
// above that valley.
double peak_prominence(const std::vector<TrajectorySample>& samples, std::size_t k)
{
    const double height = samples[k].state.i();

    double left_min = height;
    for (std::size_t m = k; m-- > 0;) {
        const double v = samples[m].state.i();
        if (v > height) {
            break;
        }
        left_min = std::min(left_min, v);
    }

    double right_min = height;
    for (std::size_t m = k + 1; m < samples.size(); ++m) {
        const double v = samples[m].state.i();
        if (v > height) {
            break;
        }
        right_min = std::min(right_min, v);
    }

    return height - std::max(left_min, right_min);
}

} // namespace

TrajectoryEvents detect_events(const Trajectory& trajectory, std::optional<double> release_time,
                               double qss_threshold)
{
    if (trajectory.empty()) {
        throw std::invalid_argument("analysis: empty trajectory");
    }

    TrajectoryEvents events;
    const auto& samples = trajectory.samples;

    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
        const double prev = samples[k - 1].state.i();
        const double here = samples[k].state.i();
        const double next = samples[k + 1].state.i();
        if (here > prev && here >= next) {
            if (peak_prominence(samples, k) > qss_threshold / 10.0) {
                events.peaks.push_back(Peak{samples[k].tau, here});
            }
        }
    }

    // First time I falls below the threshold and stays below to the end.
    std::size_t last_above = samples.size();
    for (std::size_t k = samples.size(); k-- > 0;) {
        if (samples[k].state.i() >= qss_threshold) {
            last_above = k;
            break;
        }
    }
    if (last_above == samples.size()) {
        events.qss_time = samples.front().tau;
    } else if (last_above + 1 < samples.size()) {
        events.qss_time = samples[last_above + 1].tau;
    }

    if (release_time.has_value()) {
        for (const Peak& peak : events.peaks) {
            if (peak.tau > *release_time) {
                events.second_wave = peak;
                break;
            }
        }
    }

    return events;
}

} // namespace sirmpc
