#include "sirmpc/trajectory.hpp"

#include <algorithm>

namespace sirmpc {

double Trajectory::max_infected() const
{
    double peak = 0.0;
    for (const TrajectorySample& sample : samples) {
        peak = std::max(peak, sample.state.i());
    }
    return peak;
}

} // namespace sirmpc
