#pragma once

#include "uwb/channel.hpp"
#include "uwb/pulse.hpp"
#include "uwb/txrx.hpp"

#include <cstdint>
#include <utility>

namespace uwb {

// Decision-statistic moments of the correlation receiver: desired energy, noise
// variance and the three interference variances.
struct SinrBreakdown {
    double eb = 0.0;
    double sigma_n2 = 0.0;
    double sigma_iasi2 = 0.0;
    double sigma_isi2 = 0.0;
    double sigma_mui2 = 0.0;

    double interference_plus_noise() const {
        return sigma_n2 + sigma_iasi2 + sigma_isi2 + sigma_mui2;
    }
};

struct AnalyticConfig {
    ChannelParams channel;
    FrameConfig frame;
    PulseSpec pulse;
    int n_interferers = 0;  // Nu: users beyond the desired one
    double n0 = 1.0;        // noise PSD with Ep folded to 1
    TemplateKind template_kind = TemplateKind::conventional;
    double keep_fraction = 1.0;
    double f_omega0 = 1.0;  // the paper's undefined F(w0) scale in the MUI term
    double quad_tol = 1e-4; // relative quadrature / series truncation tolerance
};

void validate(const AnalyticConfig& c);

// Mean energy of the first ray: 1 / (gamma_0 [(1-beta) l1 + beta l2 + 1]).
double omega0(const ChannelParams& p);

// (Eb, sigma_n^2): Omega_0 Ns^2 and Ns N0 / 2, rescaled for a partial template by the
// squared pulse-template correlation and by the template energy respectively.
std::pair<double, double> desired_energy_and_noise(const AnalyticConfig& c);

// Intra-symbol interference variance. The k-th ray arrival density is the Erlang
// density of a Poisson process at rate (1-beta) l1 + beta l2; the k-sum stops once a
// term drops below tolerance (non-convergence within 1e4 terms throws).
double sigma_iasi(const AnalyticConfig& c);
// Same with the leading mean-power coefficient supplied explicitly (the variance is
// linear in it); sigma_iasi(c) == sigma_iasi_given_omega0(c, omega0(c.channel)).
double sigma_iasi_given_omega0(const AnalyticConfig& c, double omega0_value);

// Aggregate mean power of previous-frame pulses (the ISI energy coefficient), summed
// over s = 1 .. Nf*Ns - 1 with cluster positions integrated against Erlang densities.
double omega_sigma(const AnalyticConfig& c);

// Inter-symbol interference variance: the IASI integral with omega_sigma as the
// leading coefficient.
double sigma_isi(const AnalyticConfig& c);
double sigma_isi_given_omega_sigma(const AnalyticConfig& c, double omega_sigma_value);

// Multiuser interference variance, linear in the interferer count.
double sigma_mui(const AnalyticConfig& c);

SinrBreakdown analytic_breakdown(const AnalyticConfig& c);

// SINR = Eb / (noise + interference), BER = 0.5 erfc(sqrt(SINR / 2)).
// Throws std::domain_error on a zero denominator.
std::pair<double, double> sinr_and_ber(const SinrBreakdown& b);

// Component toggles for the decomposition oracle.
struct DecompositionComponents {
    bool noise = true;
    bool desired = true;
    bool iasi = true;
    bool isi = true;
    bool mui = true;
};

// Empirical counterpart of analytic_breakdown: simulates the receiver chain with one
// signal component enabled at a time (desired first ray / own tail / previous symbols
// / other users / noise) and returns the measured mean-square decision statistics.
SinrBreakdown estimate_variance_decomposition(const AnalyticConfig& c, std::uint64_t master_seed,
                                              int n_trials,
                                              DecompositionComponents on = {});

} // namespace uwb
