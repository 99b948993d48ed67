#include "uwb/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace uwb {

double SampledWaveform::energy() const {
    double acc = 0.0;
    for (double s : samples) acc += s * s;
    return acc * sample_interval;
}

double sample_at(const SampledWaveform& w, double t) {
    if (w.samples.empty()) return 0.0;
    const double dt = w.sample_interval;
    const double x = (t - w.start_time) / dt;
    const auto n = static_cast<long long>(w.samples.size());
    if (x <= -1.0 || x >= static_cast<double>(n)) return 0.0;
    const double xf = std::floor(x);
    auto i = static_cast<long long>(xf);
    const double u = x - xf;
    // Catmull-Rom through s[i-1..i+2], zero-padded outside the support
    auto at = [&](long long k) -> double {
        return (k < 0 || k >= n) ? 0.0 : w.samples[static_cast<std::size_t>(k)];
    };
    const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    return 0.5 * (2.0 * p1 + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

long long grid_offset(const SampledWaveform& a, const SampledWaveform& b) {
    const double dt = a.sample_interval;
    if (!(dt > 0.0) || std::abs(b.sample_interval - dt) > 1e-12 * dt)
        throw std::invalid_argument("waveform: mismatched sample intervals");
    const double off = (b.start_time - a.start_time) / dt;
    const double rounded = std::round(off);
    if (std::abs(off - rounded) > 1e-6)
        throw std::invalid_argument("waveform: grids are not sample-aligned");
    return static_cast<long long>(rounded);
}

double inner_product(const SampledWaveform& a, const SampledWaveform& b) {
    if (a.samples.empty() || b.samples.empty()) return 0.0;
    const long long off = grid_offset(a, b); // b[k] pairs with a[k + off]
    const auto na = static_cast<long long>(a.samples.size());
    const auto nb = static_cast<long long>(b.samples.size());
    const long long ka0 = std::max(0LL, off);
    const long long ka1 = std::min(na, nb + off);
    double acc = 0.0;
    for (long long ka = ka0; ka < ka1; ++ka)
        acc += a.samples[static_cast<std::size_t>(ka)] * b.samples[static_cast<std::size_t>(ka - off)];
    return acc * a.sample_interval;
}

double inner_product_window(const SampledWaveform& a, const SampledWaveform& b,
                            double t_from, double t_to) {
    if (a.samples.empty() || b.samples.empty() || !(t_to > t_from)) return 0.0;
    const double dt = a.sample_interval;
    const long long off = grid_offset(a, b);
    const auto na = static_cast<long long>(a.samples.size());
    const auto nb = static_cast<long long>(b.samples.size());
    long long ka0 = static_cast<long long>(std::llround((t_from - a.start_time) / dt));
    long long ka1 = static_cast<long long>(std::llround((t_to - a.start_time) / dt));
    ka0 = std::max({ka0, 0LL, off});
    ka1 = std::min({ka1, na, nb + off});
    double acc = 0.0;
    for (long long ka = ka0; ka < ka1; ++ka)
        acc += a.samples[static_cast<std::size_t>(ka)] * b.samples[static_cast<std::size_t>(ka - off)];
    return acc * dt;
}

void add_scaled_shifted(SampledWaveform& dst, const SampledWaveform& src,
                        double shift, double scale) {
    if (src.samples.empty() || scale == 0.0) return;
    const double dt = dst.sample_interval;
    if (!(dt > 0.0) || std::abs(src.sample_interval - dt) > 1e-12 * dt)
        throw std::invalid_argument("add_scaled_shifted: mismatched sample intervals");
    const double off = (src.start_time + shift - dst.start_time) / dt;
    const auto k0 = static_cast<long long>(std::llround(off));
    if (k0 < 0 || k0 + static_cast<long long>(src.samples.size()) >
                      static_cast<long long>(dst.samples.size()))
        throw std::out_of_range("add_scaled_shifted: destination span too small");
    double* d = dst.samples.data() + k0;
    const double* s = src.samples.data();
    const std::size_t n = src.samples.size();
    for (std::size_t k = 0; k < n; ++k) d[k] += scale * s[k];
}

SampledWaveform make_zero_like(const SampledWaveform& like, double t_from, double t_to) {
    const double dt = like.sample_interval;
    if (!(dt > 0.0)) throw std::invalid_argument("make_zero_like: bad sample interval");
    // snap to the reference grid, widened so the requested span is covered
    const auto k0 = static_cast<long long>(std::floor((t_from - like.start_time) / dt));
    const auto k1 = static_cast<long long>(std::ceil((t_to - like.start_time) / dt)) + 1;
    SampledWaveform w;
    w.sample_interval = dt;
    w.start_time = like.start_time + static_cast<double>(k0) * dt;
    w.samples.assign(static_cast<std::size_t>(std::max(0LL, k1 - k0)), 0.0);
    return w;
}

} // namespace uwb
