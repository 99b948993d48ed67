#pragma once

#include "uwb/rng.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace uwb {

// Truncation rule for the impulse response. With fixed_ns > 0 the response is cut at
// that delay; otherwise tau_max is the smallest delay capturing `energy_fraction` of
// the expected channel energy under the decay law, hard-capped at `hard_cap_ns`.
struct TauMaxPolicy {
    double fixed_ns = 0.0;
    double energy_fraction = 0.995;
    double hard_cap_ns = 300.0;
};

// IEEE 802.15.4a style cluster/ray channel parameters. Times in ns, rates in 1/ns.
struct ChannelParams {
    double mean_clusters = 3.0;          // Lbar: mean number of clusters
    double cluster_rate = 0.047;         // Lambda: cluster arrival rate, 1/ns
    double ray_rate1 = 1.54;             // lambda_1: first ray arrival rate, 1/ns
    double ray_rate2 = 0.15;             // lambda_2: second ray arrival rate, 1/ns
    double mix_beta = 0.095;             // beta: probability of a lambda_2 gap
    double cluster_decay = 22.61;        // Gamma: inter-cluster energy decay, ns
    double intra_decay = 12.53;          // gamma_0: intra-cluster energy decay, ns
    double intra_decay_slope = 0.0;      // k_gamma: gamma_l = k_gamma * T_l + gamma_0
    double cluster_shadowing_db = 0.0;   // sigma of the per-cluster lognormal term, dB (0 = off)
    double nakagami_m_mean = 1.0;        // median of the per-tap lognormal m factor
    double nakagami_m_sigma = 0.0;       // lognormal spread of m (0 = degenerate)
    TauMaxPolicy tau_max;

    // effective ray rate (1-beta) lambda_1 + beta lambda_2
    double effective_ray_rate() const { return (1.0 - mix_beta) * ray_rate1 + mix_beta * ray_rate2; }
    // the bracket (1-beta) lambda_1 + beta lambda_2 + 1 dividing every mean ray power
    double rate_bracket() const { return effective_ray_rate() + 1.0; }
};

// Table presets. Residential and indoor office LOS environments.
ChannelParams residential_los();
ChannelParams indoor_office_los();

void validate(const ChannelParams& p);

struct ChannelTap {
    double delay_ns = 0.0;
    double amplitude = 0.0; // signed
};

// One drawn impulse response: taps sorted by strictly increasing delay, first tap at 0.
struct ChannelRealization {
    std::vector<ChannelTap> taps;
    double first_tap_delay() const { return taps.empty() ? 0.0 : taps.front().delay_ns; }
    double total_energy() const;
};

// Resolve the truncation delay for these parameters (deterministic).
double resolve_tau_max(const ChannelParams& p);

// Cluster arrival times T_l in ns: count ~ Poisson(Lbar) clamped to >= 1, T_1 = 0,
// exponential gaps at rate Lambda. No truncation here.
std::vector<double> sample_cluster_arrivals(const ChannelParams& p, Rng& rng);

// Ray arrival offsets within one cluster, truncated at tau_max - cluster_T. First ray
// at 0; each following gap is Exp(lambda_1) w.p. (1-beta), Exp(lambda_2) w.p. beta.
std::vector<double> sample_ray_arrivals(const ChannelParams& p, double cluster_T, double tau_max,
                                        Rng& rng);

// Mean ray power Omega_l exp(-tau/gamma_l) / (gamma_l [(1-beta)l1 + beta l2 + 1]) with
// the cluster shadowing term at 0 dB.
double mean_ray_power(const ChannelParams& p, double cluster_T, double tau);

// Signed Nakagami-m amplitude: magnitude^2 ~ Gamma(shape m, mean omega), sign +/-1.
// Throws for m < 0.5.
double sample_tap_amplitude(double omega, double m, Rng& rng);

// Full impulse response draw. Continuous delays; gridding happens downstream.
ChannelRealization realize_channel(const ChannelParams& p, Rng& rng);

// Two-column CSV (delay_ns, amplitude), one tap per line.
void write_channel_csv(std::ostream& os, const ChannelRealization& ch);

} // namespace uwb
