#include "rydberg/rescale.hpp"

#include <cmath>

namespace rydberg {

RescaledProblem rescale_protocol(const PhysicalModel& model, const ControlPulse& pulse,
                                 std::span<const Vec3> positions, double s) {
    if (!(s > 0.0)) throw DomainError("rescale factor must be positive");
    RescaledProblem out{model, pulse.rescaled(s), {}};
    const double inv = 1.0 / s;
    out.model.omega1 *= inv;
    out.model.omega2 *= inv;
    out.model.omega3 *= inv;
    out.model.delta_gi *= inv;
    out.model.delta_ir *= inv;
    out.model.delta_re *= inv;
    const double length = std::pow(s, 1.0 / 6.0);
    out.positions.reserve(positions.size());
    for (const auto& r : positions) out.positions.push_back(r * length);
    return out;
}

}  // namespace rydberg
