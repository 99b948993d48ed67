#include "uwb/channel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace uwb {

ChannelParams residential_los() {
    ChannelParams p;
    p.mean_clusters = 3.0;
    p.cluster_rate = 0.047;
    p.ray_rate1 = 1.54;
    p.ray_rate2 = 0.15;
    p.mix_beta = 0.095;
    p.cluster_decay = 22.61;
    p.intra_decay = 12.53;
    return p;
}

ChannelParams indoor_office_los() {
    ChannelParams p;
    p.mean_clusters = 5.4;
    p.cluster_rate = 0.016;
    p.ray_rate1 = 0.19;
    p.ray_rate2 = 2.97;
    p.mix_beta = 0.0184;
    p.cluster_decay = 14.6;
    p.intra_decay = 6.4;
    return p;
}

void validate(const ChannelParams& p) {
    if (!(p.mean_clusters > 0.0)) throw std::invalid_argument("channel: mean_clusters must be > 0");
    if (!(p.cluster_rate > 0.0)) throw std::invalid_argument("channel: cluster_rate must be > 0");
    if (!(p.ray_rate1 > 0.0) || !(p.ray_rate2 > 0.0))
        throw std::invalid_argument("channel: ray rates must be > 0");
    if (p.mix_beta < 0.0 || p.mix_beta > 1.0)
        throw std::invalid_argument("channel: mix_beta must be in [0, 1]");
    if (!(p.cluster_decay > 0.0) || !(p.intra_decay > 0.0))
        throw std::invalid_argument("channel: decay constants must be > 0");
    if (p.intra_decay_slope < 0.0)
        throw std::invalid_argument("channel: intra_decay_slope must be >= 0");
    if (p.cluster_shadowing_db < 0.0)
        throw std::invalid_argument("channel: cluster_shadowing_db must be >= 0");
    if (!(p.nakagami_m_mean >= 0.5))
        throw std::invalid_argument("channel: nakagami_m_mean must be >= 0.5");
    if (p.nakagami_m_sigma < 0.0)
        throw std::invalid_argument("channel: nakagami_m_sigma must be >= 0");
    if (p.tau_max.fixed_ns < 0.0)
        throw std::invalid_argument("channel: tau_max fixed_ns must be >= 0");
    if (p.tau_max.fixed_ns == 0.0 &&
        (p.tau_max.energy_fraction <= 0.0 || p.tau_max.energy_fraction >= 1.0))
        throw std::invalid_argument("channel: tau_max energy_fraction must be in (0, 1)");
}

double ChannelRealization::total_energy() const {
    double e = 0.0;
    for (const auto& t : taps) e += t.amplitude * t.amplitude;
    return e;
}

namespace {

// Expected channel energy up to delay D under the decay law, with clusters placed at
// their mean arrival times (l-1)/Lambda and weighted by P(cluster l exists); the
// Poisson cluster count is clamped to >= 1 as in the sampler.
double expected_energy_profile(const ChannelParams& p, double d) {
    const double lam_eff = p.effective_ray_rate();
    const double bracket = p.rate_bracket();
    const double g0 = p.intra_decay;
    // P(L >= l) for L = max(Poisson(Lbar), 1)
    const int l_cap = static_cast<int>(std::ceil(p.mean_clusters + 10.0 * std::sqrt(p.mean_clusters) + 10.0));
    double e = 0.0;
    double pmf = std::exp(-p.mean_clusters); // P(L = 0)
    double cdf = pmf;                        // P(L <= l-1), starts at l = 1
    for (int l = 1; l <= l_cap; ++l) {
        const double weight = (l == 1) ? 1.0 : 1.0 - cdf;
        const double t_l = static_cast<double>(l - 1) / p.cluster_rate;
        if (t_l <= d && weight > 0.0) {
            const double gl = p.intra_decay_slope * t_l + g0;
            const double span = d - t_l;
            const double rays = 1.0 + lam_eff * gl * (1.0 - std::exp(-span / gl));
            e += weight * std::exp(-t_l / p.cluster_decay) * rays / (gl * bracket);
        }
        pmf *= p.mean_clusters / static_cast<double>(l);
        cdf += pmf;
    }
    return e;
}

} // namespace

double resolve_tau_max(const ChannelParams& p) {
    validate(p);
    if (p.tau_max.fixed_ns > 0.0) return p.tau_max.fixed_ns;
    const double cap = p.tau_max.hard_cap_ns;
    const double total = expected_energy_profile(p, cap * 10.0); // effectively "all"
    const double target = p.tau_max.energy_fraction * total;
    if (expected_energy_profile(p, cap) < target) return cap;
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (expected_energy_profile(p, mid) < target ? lo : hi) = mid;
    }
    return hi;
}

std::vector<double> sample_cluster_arrivals(const ChannelParams& p, Rng& rng) {
    std::poisson_distribution<int> count(p.mean_clusters);
    std::exponential_distribution<double> gap(p.cluster_rate);
    const int n = std::max(1, count(rng));
    std::vector<double> arrivals;
    arrivals.reserve(static_cast<std::size_t>(n));
    double t = 0.0;
    arrivals.push_back(0.0);
    for (int l = 1; l < n; ++l) {
        t += gap(rng);
        arrivals.push_back(t);
    }
    return arrivals;
}

std::vector<double> sample_ray_arrivals(const ChannelParams& p, double cluster_T, double tau_max,
                                        Rng& rng) {
    if (cluster_T < 0.0) throw std::invalid_argument("sample_ray_arrivals: cluster_T must be >= 0");
    std::vector<double> rays;
    const double span = tau_max - cluster_T;
    if (span < 0.0) return rays;
    std::exponential_distribution<double> gap1(p.ray_rate1);
    std::exponential_distribution<double> gap2(p.ray_rate2);
    std::bernoulli_distribution pick2(p.mix_beta);
    double tau = 0.0;
    rays.push_back(0.0);
    for (;;) {
        tau += pick2(rng) ? gap2(rng) : gap1(rng);
        if (tau > span) break;
        rays.push_back(tau);
    }
    return rays;
}

double mean_ray_power(const ChannelParams& p, double cluster_T, double tau) {
    if (cluster_T < 0.0 || tau < 0.0)
        throw std::invalid_argument("mean_ray_power: negative arrival time");
    const double gl = p.intra_decay_slope * cluster_T + p.intra_decay;
    const double omega_l = std::exp(-cluster_T / p.cluster_decay);
    return omega_l * std::exp(-tau / gl) / (gl * p.rate_bracket());
}

double sample_tap_amplitude(double omega, double m, Rng& rng) {
    if (!(omega > 0.0)) throw std::invalid_argument("sample_tap_amplitude: omega must be > 0");
    if (!(m >= 0.5)) throw std::invalid_argument("sample_tap_amplitude: m must be >= 0.5");
    // |a|^2 ~ Gamma(shape m, mean omega) gives E[a^2] = omega
    std::gamma_distribution<double> power(m, omega / m);
    std::bernoulli_distribution flip(0.5);
    const double mag = std::sqrt(power(rng));
    return flip(rng) ? -mag : mag;
}

ChannelRealization realize_channel(const ChannelParams& p, Rng& rng) {
    validate(p);
    const double tau_max = resolve_tau_max(p);
    std::normal_distribution<double> unit_normal(0.0, 1.0);

    ChannelRealization ch;
    const std::vector<double> clusters = sample_cluster_arrivals(p, rng);
    for (double t_l : clusters) {
        if (t_l > tau_max) continue;
        // per-cluster lognormal shadowing, Omega_l multiplied by 10^(M/10)
        double shadow = 1.0;
        if (p.cluster_shadowing_db > 0.0)
            shadow = std::pow(10.0, p.cluster_shadowing_db * unit_normal(rng) / 10.0);
        const std::vector<double> rays = sample_ray_arrivals(p, t_l, tau_max, rng);
        for (double tau : rays) {
            double m = p.nakagami_m_mean;
            if (p.nakagami_m_sigma > 0.0)
                m = std::max(0.5, std::exp(std::log(p.nakagami_m_mean) +
                                           p.nakagami_m_sigma * unit_normal(rng)));
            const double omega = mean_ray_power(p, t_l, tau) * shadow;
            ch.taps.push_back({t_l + tau, sample_tap_amplitude(omega, m, rng)});
        }
    }
    std::sort(ch.taps.begin(), ch.taps.end(),
              [](const ChannelTap& a, const ChannelTap& b) { return a.delay_ns < b.delay_ns; });
    // exact delay ties are measure-zero but would break the strict ordering; merge them
    std::vector<ChannelTap> merged;
    merged.reserve(ch.taps.size());
    for (const auto& tap : ch.taps) {
        if (!merged.empty() && merged.back().delay_ns == tap.delay_ns)
            merged.back().amplitude += tap.amplitude;
        else
            merged.push_back(tap);
    }
    ch.taps = std::move(merged);
    return ch;
}

void write_channel_csv(std::ostream& os, const ChannelRealization& ch) {
    os << "delay_ns,amplitude\n";
    for (const auto& t : ch.taps) os << t.delay_ns << ',' << t.amplitude << '\n';
}

} // namespace uwb
