#pragma once

#include <span>
#include <vector>

#include "rydberg/model.hpp"
#include "rydberg/pulse.hpp"

namespace rydberg {

struct RescaledProblem {
    PhysicalModel model;
    ControlPulse pulse;
    std::vector<Vec3> positions;
};

/// Maps a protocol of duration T onto duration s*T: frequencies and
/// detunings scale by 1/s, lengths by s^(1/6). With C6 fixed the pair
/// shifts scale by 1/s as well, so the dimensionless dynamics is unchanged.
RescaledProblem rescale_protocol(const PhysicalModel& model, const ControlPulse& pulse,
                                 std::span<const Vec3> positions, double s);

}  // namespace rydberg
