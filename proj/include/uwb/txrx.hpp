#pragma once

#include "uwb/channel.hpp"
#include "uwb/rng.hpp"
#include "uwb/waveform.hpp"

#include <string>
#include <vector>

namespace uwb {

// TH-BPSK frame structure. One pulse per frame, pulses_per_bit frames per bit.
struct FrameConfig {
    int pulses_per_bit = 1;    // Ns
    double frame_period = 0.0; // Tf, seconds (= 1 / (Rb * Ns))
    double hop_slot = 0.0;     // Tc, seconds
    int hop_slots = 16;        // Nh
    double bit_rate = 0.0;     // Rb, bits/second

    double bit_period() const { return frame_period * pulses_per_bit; }
};

// Build a frame config from the free parameters; Tf follows from Rb and Ns.
FrameConfig make_frame_config(double bit_rate_bps, int pulses_per_bit, double hop_slot_s,
                              int hop_slots);
void validate(const FrameConfig& f);

// Per-user transmit description. bits hold +1/-1; a 0 entry suppresses that bit's
// pulses entirely (used by the variance decomposition oracle to isolate components).
struct UserConfig {
    std::vector<int> th_code; // one entry per frame, values in [0, Nh)
    double delay = 0.0;       // offset of the bit stream start, seconds
    std::vector<int> bits;
};

enum class TemplateKind { conventional, partial };

struct Template {
    TemplateKind kind = TemplateKind::conventional;
    double keep_fraction = 1.0;
    SampledWaveform waveform;
};

// Uniform i.i.d. hopping code, one entry per frame.
std::vector<int> generate_th_code(int hop_slots, int n_frames, Rng& rng);

// Pulse with everything past the leading keep_fraction of its support zeroed.
// keep_fraction must be in (0, 1]; 1 returns the pulse unchanged.
SampledWaveform masked_pulse(const SampledWaveform& pulse, double keep_fraction);

// Transmitted TH-BPSK waveform: bit i, frame j places bits[i] * p at
// delay + i*Ns*Tf + j*Tf + code[i*Ns+j]*Tc (pulse support starts at the slot).
// Rejects pulses wider than the hop slot.
SampledWaveform synthesize_signal(const UserConfig& user, const FrameConfig& frame,
                                  const SampledWaveform& pulse);

// Tap-delay superposition: out(t) = sum_taps a * signal(t - delay).
SampledWaveform propagate(const SampledWaveform& signal, const ChannelRealization& channel);

// White Gaussian noise with per-sample variance N0 / (2 dt), so correlating a
// unit-energy template against pure noise has variance N0/2.
SampledWaveform add_awgn(const SampledWaveform& signal, double n0, Rng& rng);

// Receiver template spanning n_bits bits of the user-1 code, shifted by sync_delay
// (the first-ray arrival under perfect synchronization). Partial kind masks each
// pulse replica to the leading keep_fraction of its support.
Template build_template(TemplateKind kind, double keep_fraction, const FrameConfig& frame,
                        const std::vector<int>& code, const SampledWaveform& pulse,
                        double sync_delay, int n_bits);

struct BitWindows {
    double first_start = 0.0; // start of the first decision window, seconds
    double period = 0.0;      // Ns * Tf
    int count = 0;
};

// Per-bit correlation decisions: sign of ∫ r v over each bit window, ties to +1.
std::vector<int> correlate_and_decide(const SampledWaveform& received, const Template& tmpl,
                                      const BitWindows& windows);

} // namespace uwb
