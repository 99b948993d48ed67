#pragma once

#include "uwb/waveform.hpp"

namespace uwb {

// Gaussian-derivative monocycle description. The pulse is the order-th derivative of
// exp(-2 pi t^2 / tau^2), truncated to [-Tm/2, +Tm/2] and normalized to unit energy.
struct PulseSpec {
    int order = 2;                // derivative order, >= 1 (1, 2, 3, 5 in practice)
    double duration = 0.5e-9;     // Tm, seconds: truncation support width
    double shaping_tau = 0.0;     // seconds; 0 means "solve from the energy rule"
    double sample_interval = 0.0; // seconds; 0 means duration / 100

    // Copy with defaults filled in: sample_interval = Tm/100, shaping_tau solved so
    // that 99.9% of the pulse energy falls inside [-Tm/2, +Tm/2].
    PulseSpec resolved() const;
};

// n-th derivative of exp(-2 pi t^2 / tau^2) at time t (unnormalized).
// Throws std::invalid_argument for order < 1 or tau <= 0.
double gaussian_derivative(int order, double shaping_tau, double t);

// Largest shaping tau that keeps >= 99.9% of the pulse energy inside [-Tm/2, +Tm/2].
double default_shaping_tau(int order, double duration);

// Fraction of total pulse energy inside [-Tm/2, +Tm/2] for the given shaping tau.
double energy_fraction_in_window(int order, double shaping_tau, double duration);

// Unit-energy sampled pulse on a symmetric half-sample grid (no sample at t = 0, so
// even/odd symmetry and the half-pulse split are exact). Validates the spec.
SampledWaveform make_pulse(const PulseSpec& spec);

// R(lag) = ∫ p(t) p(t + lag) dt by the sampled inner product; exactly 0 once the
// shifted copies no longer overlap (|lag| >= support width).
double autocorrelation(const SampledWaveform& p, double lag);

// X(lag) = ∫ a(t) b(t - lag) dt. autocorrelation(p, y) == cross_correlation(p, p, -y).
double cross_correlation(const SampledWaveform& a, const SampledWaveform& b, double lag);

// -10 dB bandwidth of the pulse in Hz (diagnostic only; nothing downstream uses it).
double ten_db_bandwidth(const SampledWaveform& p);

} // namespace uwb
