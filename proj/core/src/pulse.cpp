#include "rydberg/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rydberg/units.hpp"

namespace rydberg {

namespace {

ControlPulse::Complex clip(ControlPulse::Complex v, double omega_max) {
    const double mag = std::abs(v);
    if (mag > omega_max) return v * (omega_max / mag);
    return v;
}

double trapezoid_abs(const std::vector<ControlPulse::Complex>& values, double dt) {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (std::abs(values.front()) + std::abs(values.back()));
    for (std::size_t k = 1; k + 1 < values.size(); ++k) sum += std::abs(values[k]);
    return sum * dt;
}

}  // namespace

ControlPulse::ControlPulse(double duration, std::vector<Complex> gr, std::vector<Complex> re)
    : duration_(duration), gr_(std::move(gr)), re_(std::move(re)) {
    if (!(duration_ > 0.0)) throw DomainError("pulse duration must be positive");
    if (gr_.size() != re_.size() || gr_.size() < 2)
        throw DomainError("pulse channels need equal length >= 2");
    for (std::size_t k = 0; k < gr_.size(); ++k) {
        if (!std::isfinite(gr_[k].real()) || !std::isfinite(gr_[k].imag()) ||
            !std::isfinite(re_[k].real()) || !std::isfinite(re_[k].imag()))
            throw DomainError("pulse samples must be finite");
    }
}

ControlPulse ControlPulse::sample(double duration, std::size_t n_points, const Sampler& sampler,
                                  double omega_max) {
    if (n_points < 2) throw DomainError("pulse needs at least two grid points");
    std::vector<Complex> gr(n_points), re(n_points);
    const double dt = duration / static_cast<double>(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k) {
        const double t = k + 1 == n_points ? duration : dt * static_cast<double>(k);
        auto [a, b] = sampler(t);
        gr[k] = clip(a, omega_max);
        re[k] = clip(b, omega_max);
    }
    return ControlPulse(duration, std::move(gr), std::move(re));
}

double ControlPulse::time(std::size_t k) const {
    if (k + 1 == gr_.size()) return duration_;
    return duration_ * static_cast<double>(k) / static_cast<double>(gr_.size() - 1);
}

std::pair<ControlPulse::Complex, ControlPulse::Complex> ControlPulse::at(double t) const {
    if (t < 0.0 || t > duration_ || gr_.empty()) return {Complex{}, Complex{}};
    const double x = t / duration_ * static_cast<double>(gr_.size() - 1);
    const auto k = std::min(static_cast<std::size_t>(x), gr_.size() - 2);
    const double w = x - static_cast<double>(k);
    return {gr_[k] + w * (gr_[k + 1] - gr_[k]), re_[k] + w * (re_[k + 1] - re_[k])};
}

bool ControlPulse::is_real() const {
    auto real = [](const Complex& v) { return v.imag() == 0.0; };
    return std::all_of(gr_.begin(), gr_.end(), real) && std::all_of(re_.begin(), re_.end(), real);
}

double ControlPulse::peak_gr() const {
    double m = 0.0;
    for (const auto& v : gr_) m = std::max(m, std::abs(v));
    return m;
}

double ControlPulse::peak_re() const {
    double m = 0.0;
    for (const auto& v : re_) m = std::max(m, std::abs(v));
    return m;
}

double ControlPulse::area_gr() const {
    return trapezoid_abs(gr_, duration_ / static_cast<double>(gr_.size() - 1));
}

double ControlPulse::area_re() const {
    return trapezoid_abs(re_, duration_ / static_cast<double>(re_.size() - 1));
}

ControlPulse ControlPulse::rescaled(double s) const {
    if (!(s > 0.0)) throw DomainError("rescale factor must be positive");
    std::vector<Complex> gr = gr_, re = re_;
    for (auto& v : gr) v /= s;
    for (auto& v : re) v /= s;
    return ControlPulse(duration_ * s, std::move(gr), std::move(re));
}

}  // namespace rydberg
