#pragma once

#include <cstddef>
#include <vector>

namespace sirmpc {

/// One point of the epidemic state space: fractions of susceptible,
/// infected and removed individuals. Immutable; the simplex constraint
/// s + i + c = 1 is enforced at construction within kSimplexTol.
class EpidemicState {
public:
    static constexpr double kSimplexTol = 1e-12;

    EpidemicState(double s, double i, double c);

    double s() const { return s_; }
    double i() const { return i_; }
    double c() const { return c_; }

    /// Construction bypass for integrator-internal states whose simplex
    /// defect is tracked by the integrator itself.
    static EpidemicState unchecked(double s, double i, double c);

    /// s + i + c - 1.
    double simplex_defect() const;

private:
    EpidemicState() = default;

    double s_ = 0.0;
    double i_ = 0.0;
    double c_ = 0.0;
};

/// Epidemic parameters in non-dimensional time: the transmission and
/// removal rates are absorbed into the reproduction numbers by the time
/// rescaling, so only r0, r_min and the outbreak seed epsilon remain.
class ModelParams {
public:
    static constexpr double kDefaultEpsilon = 1e-3;

    ModelParams(double r0, double r_min, double epsilon = kDefaultEpsilon);

    double r0() const { return r0_; }
    double r_min() const { return r_min_; }
    double epsilon() const { return epsilon_; }

    /// Outbreak state (1 - epsilon, epsilon, 0).
    EpidemicState initial_state() const;

private:
    double r0_;
    double r_min_;
    double epsilon_;
};

/// Admissible quantized distancing levels u, ordered, with u = 0 meaning
/// no distancing and u = 1 the hardest measure. Each level induces a
/// reproduction number via effective_r, strictly decreasing over levels.
class ControlGrid {
public:
    /// Default grid {0, 1/4, 1/2, 3/4, 1}.
    ControlGrid();
    explicit ControlGrid(std::vector<double> levels);

    static ControlGrid five_level();
    /// Variant {0, 0.25, 0.5, 1}.
    static ControlGrid four_level();

    const std::vector<double>& levels() const { return levels_; }
    std::size_t size() const { return levels_.size(); }
    double level(std::size_t idx) const { return levels_[idx]; }

    /// True when u equals one of the grid levels.
    bool contains(double u) const;

private:
    std::vector<double> levels_;
};

/// Time derivative of the epidemic state. ds + dc + di is exactly zero
/// in that evaluation order (negation symmetry of rounding).
struct Derivative {
    double ds;
    double di;
    double dc;
};

/// Right-hand side of the controlled dynamics at effective reproduction
/// number r: (-r*S*I, r*S*I - I, I).
Derivative vector_field(const EpidemicState& state, double r_effective);

/// Linear-invariant residual of a derivative, grouped so that it is an
/// exact floating-point zero for vector_field outputs.
inline double conservation_defect(const Derivative& d)
{
    return (d.ds + d.dc) + d.di;
}

/// Affine control-to-reproduction-number map
/// r(u) = r0 + (r_min - r0) * u, for u in [0, 1].
double effective_r(const ModelParams& params, double u);

} // namespace sirmpc
