#pragma once

#include <cstddef>
#include <vector>

namespace uwb {

// Uniformly sampled real-valued signal. Sample k sits at start_time + k * sample_interval.
// All waveforms that are combined must share the same sample_interval and sit on grids
// that are offset from each other by a whole number of samples.
struct SampledWaveform {
    double start_time = 0.0;      // seconds
    double sample_interval = 0.0; // seconds
    std::vector<double> samples;

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t k) const { return start_time + static_cast<double>(k) * sample_interval; }
    // time just past the last sample
    double end_time() const { return start_time + static_cast<double>(samples.size()) * sample_interval; }
    // sum s_k^2 * dt
    double energy() const;
};

// Value at an arbitrary time by Catmull-Rom interpolation of the samples,
// exactly 0 outside the sampled support.
double sample_at(const SampledWaveform& w, double t);

// Integer sample offset of b's grid relative to a's. Throws if the grids are not
// aligned (offset not a whole number of samples) or the intervals differ.
long long grid_offset(const SampledWaveform& a, const SampledWaveform& b);

// ∫ a(t) b(t) dt over the overlapping support (sampled inner product).
double inner_product(const SampledWaveform& a, const SampledWaveform& b);

// Same restricted to t ∈ [t_from, t_to). Window edges are rounded to a's grid.
double inner_product_window(const SampledWaveform& a, const SampledWaveform& b,
                            double t_from, double t_to);

// dst += scale * src(t - shift). The shift is rounded to the nearest whole sample.
// The destination span must already cover the shifted source.
void add_scaled_shifted(SampledWaveform& dst, const SampledWaveform& src,
                        double shift, double scale);

// Zero waveform on the same grid as `like`, spanning at least [t_from, t_to].
SampledWaveform make_zero_like(const SampledWaveform& like, double t_from, double t_to);

} // namespace uwb
