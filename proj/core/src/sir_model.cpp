#include "sirmpc/sir_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace sirmpc {

namespace {

bool in_unit_interval(double x)
{
    // NaN fails both comparisons.
    return x >= 0.0 && x <= 1.0;
}

} // namespace

EpidemicState::EpidemicState(double s, double i, double c)
    : s_(s), i_(i), c_(c)
{
    if (!in_unit_interval(s) || !in_unit_interval(i) || !in_unit_interval(c)) {
        throw std::invalid_argument(
            "sir-model: state components must lie in [0,1], got (" + std::to_string(s) + ", "
            + std::to_string(i) + ", " + std::to_string(c) + ")");
    }
    if (!(std::fabs((s + i + c) - 1.0) <= kSimplexTol)) {
        throw std::invalid_argument(
            "sir-model: state must satisfy S+I+C = 1 within " + std::to_string(kSimplexTol)
            + ", got sum " + std::to_string(s + i + c));
    }
}

EpidemicState EpidemicState::unchecked(double s, double i, double c)
{
    EpidemicState state;
    state.s_ = s;
    state.i_ = i;
    state.c_ = c;
    return state;
}

double EpidemicState::simplex_defect() const
{
    return (s_ + i_ + c_) - 1.0;
}

ModelParams::ModelParams(double r0, double r_min, double epsilon)
    : r0_(r0), r_min_(r_min), epsilon_(epsilon)
{
    if (!(r0 > 0.0) || !std::isfinite(r0) || !(r_min > 0.0) || !(r0 > r_min)) {
        throw std::invalid_argument("sir-model: reproduction numbers must satisfy r0 > r_min > 0");
    }
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw std::invalid_argument("sir-model: epsilon must lie in (0,1)");
    }
}

EpidemicState ModelParams::initial_state() const
{
    return EpidemicState(1.0 - epsilon_, epsilon_, 0.0);
}

ControlGrid::ControlGrid()
    : ControlGrid(std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0})
{
}

ControlGrid::ControlGrid(std::vector<double> levels)
    : levels_(std::move(levels))
{
    if (levels_.size() < 2) {
        throw std::invalid_argument("sir-model: control grid needs at least two levels");
    }
    if (levels_.front() != 0.0 || levels_.back() != 1.0) {
        throw std::invalid_argument("sir-model: control grid must start at 0 and end at 1");
    }
    for (std::size_t k = 0; k + 1 < levels_.size(); ++k) {
        if (!(levels_[k] < levels_[k + 1])) {
            throw std::invalid_argument("sir-model: control grid levels must be strictly increasing");
        }
    }
}

ControlGrid ControlGrid::five_level()
{
    return ControlGrid();
}

ControlGrid ControlGrid::four_level()
{
    return ControlGrid({0.0, 0.25, 0.5, 1.0});
}

bool ControlGrid::contains(double u) const
{
    for (double level : levels_) {
        if (level == u) {
            return true;
        }
    }
    return false;
}

Derivative vector_field(const EpidemicState& state, double r_effective)
{
    if (!std::isfinite(r_effective) || !(r_effective > 0.0)) {
        throw std::invalid_argument("sir-model: effective reproduction number must be finite and > 0");
    }
    const double incidence = r_effective * state.s() * state.i();
    return Derivative{-incidence, incidence - state.i(), state.i()};
}

double effective_r(const ModelParams& params, double u)
{
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::invalid_argument("sir-model: control input must lie in [0,1]");
    }
    return params.r0() + (params.r_min() - params.r0()) * u;
}

} // namespace sirmpc
