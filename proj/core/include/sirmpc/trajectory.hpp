#pragma once

#include <cstddef>
#include <vector>

#include "sirmpc/sir_model.hpp"

namespace sirmpc {

/// One recorded instant: state, the distancing input in force and the
/// reproduction number it induces. For segments specified directly by a
/// reproduction number, u is the affine pre-image (may fall outside
/// [0,1] when the level is not realizable by the control set).
struct TrajectorySample {
    double tau;
    EpidemicState state;
    double u;
    double r_effective;
};

/// Time-ordered sequence of samples produced by the integrators and the
/// closed loop.
struct Trajectory {
    std::vector<TrajectorySample> samples;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    const TrajectorySample& front() const { return samples.front(); }
    const TrajectorySample& back() const { return samples.back(); }

    /// Largest infected fraction over all samples.
    double max_infected() const;
};

} // namespace sirmpc
