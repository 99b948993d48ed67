#include "uwb/txrx.hpp"

#include <cmath>
#include <stdexcept>

namespace uwb {

FrameConfig make_frame_config(double bit_rate_bps, int pulses_per_bit, double hop_slot_s,
                              int hop_slots) {
    FrameConfig f;
    f.bit_rate = bit_rate_bps;
    f.pulses_per_bit = pulses_per_bit;
    f.hop_slot = hop_slot_s;
    f.hop_slots = hop_slots;
    if (!(bit_rate_bps > 0.0) || pulses_per_bit < 1)
        throw std::invalid_argument("frame: bit_rate and pulses_per_bit must be positive");
    f.frame_period = 1.0 / (bit_rate_bps * pulses_per_bit);
    validate(f);
    return f;
}

void validate(const FrameConfig& f) {
    if (f.pulses_per_bit < 1) throw std::invalid_argument("frame: pulses_per_bit must be >= 1");
    if (f.hop_slots < 1) throw std::invalid_argument("frame: hop_slots must be >= 1");
    if (!(f.frame_period > 0.0) || !(f.hop_slot > 0.0) || !(f.bit_rate > 0.0))
        throw std::invalid_argument("frame: periods and rate must be positive");
    const double tf_expected = 1.0 / (f.bit_rate * f.pulses_per_bit);
    if (std::abs(f.frame_period - tf_expected) > 1e-12 * tf_expected)
        throw std::invalid_argument("frame: frame_period must equal 1/(bit_rate*pulses_per_bit)");
    if (f.hop_slots * f.hop_slot > f.frame_period * (1.0 + 1e-12))
        throw std::invalid_argument("frame: hop window Nh*Tc exceeds the frame period");
}

std::vector<int> generate_th_code(int hop_slots, int n_frames, Rng& rng) {
    if (hop_slots < 1) throw std::invalid_argument("generate_th_code: hop_slots must be >= 1");
    if (n_frames < 0) throw std::invalid_argument("generate_th_code: negative frame count");
    std::uniform_int_distribution<int> slot(0, hop_slots - 1);
    std::vector<int> code(static_cast<std::size_t>(n_frames));
    for (auto& c : code) c = slot(rng);
    return code;
}

SampledWaveform masked_pulse(const SampledWaveform& pulse, double keep_fraction) {
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw std::invalid_argument("masked_pulse: keep_fraction must be in (0, 1]");
    SampledWaveform out = pulse;
    const auto keep = static_cast<std::size_t>(
        std::llround(keep_fraction * static_cast<double>(pulse.samples.size())));
    for (std::size_t k = keep; k < out.samples.size(); ++k) out.samples[k] = 0.0;
    return out;
}

namespace {

// Sum of pulse replicas at the hopped slot positions. Entry i*Ns+j of `code` places a
// replica with weight weights[i] so its support starts at
// t_offset + i*Ns*Tf + j*Tf + code*Tc.
SampledWaveform place_pulse_train(const SampledWaveform& proto, const FrameConfig& frame,
                                  const std::vector<int>& code, const std::vector<int>& weights,
                                  double t_offset) {
    const int ns = frame.pulses_per_bit;
    const auto n_bits = static_cast<int>(weights.size());
    if (code.size() != static_cast<std::size_t>(n_bits) * static_cast<std::size_t>(ns))
        throw std::invalid_argument("place_pulse_train: code length must be n_bits * Ns");
    const double dt = proto.sample_interval;
    const double width = static_cast<double>(proto.samples.size()) * dt;
    if (width > frame.hop_slot * (1.0 + 1e-9))
        throw std::invalid_argument("pulse is wider than the hop slot; slots would overlap");

    SampledWaveform out;
    out.sample_interval = dt;
    // integer grid covering [t_offset, t_offset + n_bits * Tb] plus a one-sample guard
    const auto k0 = static_cast<long long>(std::floor(t_offset / dt)) - 1;
    const auto k1 = static_cast<long long>(
                        std::ceil((t_offset + frame.bit_period() * n_bits) / dt)) +
                    1;
    out.start_time = static_cast<double>(k0) * dt;
    out.samples.assign(static_cast<std::size_t>(k1 - k0), 0.0);

    for (int i = 0; i < n_bits; ++i) {
        const int w = weights[static_cast<std::size_t>(i)];
        if (w == 0) continue;
        if (w != 1 && w != -1)
            throw std::invalid_argument("place_pulse_train: bit values must be -1, 0 or +1");
        for (int j = 0; j < ns; ++j) {
            const int c = code[static_cast<std::size_t>(i) * ns + j];
            if (c < 0 || c >= frame.hop_slots)
                throw std::invalid_argument("place_pulse_train: hop code entry out of range");
            const double slot_start =
                t_offset + (static_cast<double>(i) * ns + j) * frame.frame_period +
                c * frame.hop_slot;
            add_scaled_shifted(out, proto, slot_start - proto.start_time, static_cast<double>(w));
        }
    }
    return out;
}

} // namespace

SampledWaveform synthesize_signal(const UserConfig& user, const FrameConfig& frame,
                                  const SampledWaveform& pulse) {
    validate(frame);
    return place_pulse_train(pulse, frame, user.th_code, user.bits, user.delay);
}

SampledWaveform propagate(const SampledWaveform& signal, const ChannelRealization& channel) {
    const double dt = signal.sample_interval;
    if (!(dt > 0.0)) throw std::invalid_argument("propagate: signal has no sample interval");
    SampledWaveform out;
    out.sample_interval = dt;
    out.start_time = signal.start_time;
    if (channel.taps.empty() || signal.samples.empty()) {
        out.samples.assign(signal.samples.size(), 0.0);
        return out;
    }
    struct TapOffset {
        long long shift;
        double amp;
    };
    std::vector<TapOffset> taps;
    taps.reserve(channel.taps.size());
    long long max_shift = 0;
    for (const auto& t : channel.taps) {
        if (t.delay_ns < 0.0) throw std::invalid_argument("propagate: negative tap delay");
        const auto shift = static_cast<long long>(std::llround(t.delay_ns * 1e-9 / dt));
        taps.push_back({shift, t.amplitude});
        max_shift = std::max(max_shift, shift);
    }
    const std::size_t n = signal.samples.size();
    out.samples.assign(n + static_cast<std::size_t>(max_shift), 0.0);
    // transmit signals are sparse pulse trains, so work run-by-run over the nonzero spans
    const double* s = signal.samples.data();
    std::size_t k = 0;
    while (k < n) {
        if (s[k] == 0.0) {
            ++k;
            continue;
        }
        std::size_t run_end = k;
        while (run_end < n && s[run_end] != 0.0) ++run_end;
        for (const auto& tap : taps) {
            double* d = out.samples.data() + k + static_cast<std::size_t>(tap.shift);
            for (std::size_t r = 0; r < run_end - k; ++r) d[r] += tap.amp * s[k + r];
        }
        k = run_end;
    }
    return out;
}

SampledWaveform add_awgn(const SampledWaveform& signal, double n0, Rng& rng) {
    if (n0 < 0.0) throw std::invalid_argument("add_awgn: N0 must be >= 0");
    SampledWaveform out = signal;
    if (n0 == 0.0) return out;
    const double sigma = std::sqrt(n0 / (2.0 * signal.sample_interval));
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& s : out.samples) s += noise(rng);
    return out;
}

Template build_template(TemplateKind kind, double keep_fraction, const FrameConfig& frame,
                        const std::vector<int>& code, const SampledWaveform& pulse,
                        double sync_delay, int n_bits) {
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw std::invalid_argument("build_template: keep_fraction must be in (0, 1]");
    validate(frame);
    Template t;
    t.kind = kind;
    t.keep_fraction = (kind == TemplateKind::conventional) ? 1.0 : keep_fraction;
    const SampledWaveform proto =
        (t.keep_fraction == 1.0) ? pulse : masked_pulse(pulse, t.keep_fraction);
    const std::vector<int> ones(static_cast<std::size_t>(n_bits), 1);
    t.waveform = place_pulse_train(proto, frame, code, ones, sync_delay);
    return t;
}

std::vector<int> correlate_and_decide(const SampledWaveform& received, const Template& tmpl,
                                      const BitWindows& windows) {
    if (windows.count < 0 || !(windows.period > 0.0))
        throw std::invalid_argument("correlate_and_decide: bad bit windows");
    std::vector<int> decisions(static_cast<std::size_t>(windows.count));
    for (int i = 0; i < windows.count; ++i) {
        const double t0 = windows.first_start + i * windows.period;
        const double z = inner_product_window(tmpl.waveform, received, t0, t0 + windows.period);
        decisions[static_cast<std::size_t>(i)] = (z >= 0.0) ? 1 : -1;
    }
    return decisions;
}

} // namespace uwb
