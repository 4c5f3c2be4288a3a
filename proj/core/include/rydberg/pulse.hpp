#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace rydberg {

/// Two control channels sampled on a uniform grid t_k = k T / (n - 1).
/// omega_gr drives g<->r, omega_re drives r<->e; values in rad/ns.
class ControlPulse {
public:
    using Complex = std::complex<double>;
    using Sampler = std::function<std::pair<Complex, Complex>(double)>;

    ControlPulse() = default;
    ControlPulse(double duration, std::vector<Complex> gr, std::vector<Complex> re);

    /// Samples `sampler` on `n_points` uniform grid points over [0, duration].
    /// Magnitudes above `omega_max` are clipped, phases are kept.
    static ControlPulse sample(double duration, std::size_t n_points, const Sampler& sampler,
                               double omega_max = std::numeric_limits<double>::infinity());

    double duration() const { return duration_; }
    std::size_t points() const { return gr_.size(); }
    double time(std::size_t k) const;

    const std::vector<Complex>& gr() const { return gr_; }
    const std::vector<Complex>& re() const { return re_; }

    /// Linear interpolation of both channels; zero outside [0, T].
    std::pair<Complex, Complex> at(double t) const;

    bool is_real() const;
    double peak_gr() const;
    double peak_re() const;
    /// Trapezoid-rule area of |omega| for each channel.
    double area_gr() const;
    double area_re() const;

    /// Time axis stretched by `s`, amplitudes divided by `s`.
    ControlPulse rescaled(double s) const;

    bool operator==(const ControlPulse&) const = default;

private:
    double duration_ = 0.0;
    std::vector<Complex> gr_;
    std::vector<Complex> re_;
};

}  // namespace rydberg
