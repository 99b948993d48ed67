#include "uwb/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace uwb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEnergyRule = 0.999; // fraction of pulse energy kept inside [-Tm/2, Tm/2]

// Cumulative energy of the order-n derivative of exp(-2 pi u^2) over [0, u_max] in
// normalized units (tau = 1). Trapezoid on a fixed fine grid; the integrand decays
// like exp(-4 pi u^2) so [0, 4] captures everything representable.
struct EnergyProfile {
    std::vector<double> cum; // cum[i] = ∫_0^{u_i} q^2 du
    double du = 0.0;

    double total() const { return cum.back(); }
    double at(double u) const {
        if (u <= 0.0) return 0.0;
        const double x = u / du;
        const auto n = static_cast<double>(cum.size() - 1);
        if (x >= n) return cum.back();
        const auto i = static_cast<std::size_t>(x);
        const double frac = x - static_cast<double>(i);
        return cum[i] + frac * (cum[i + 1] - cum[i]);
    }
};

EnergyProfile energy_profile(int order) {
    constexpr std::size_t kIntervals = 16384;
    constexpr double kUMax = 4.0;
    EnergyProfile prof;
    prof.du = kUMax / static_cast<double>(kIntervals);
    prof.cum.resize(kIntervals + 1);
    double prev = 0.0; // q^2 at u = 0
    {
        const double q0 = gaussian_derivative(order, 1.0, 0.0);
        prev = q0 * q0;
    }
    prof.cum[0] = 0.0;
    for (std::size_t i = 1; i <= kIntervals; ++i) {
        const double u = static_cast<double>(i) * prof.du;
        const double q = gaussian_derivative(order, 1.0, u);
        const double cur = q * q;
        prof.cum[i] = prof.cum[i - 1] + 0.5 * (prev + cur) * prof.du;
        prev = cur;
    }
    return prof;
}

} // namespace

double gaussian_derivative(int order, double shaping_tau, double t) {
    if (order < 1) throw std::invalid_argument("gaussian_derivative: order must be >= 1");
    if (!(shaping_tau > 0.0))
        throw std::invalid_argument("gaussian_derivative: shaping_tau must be positive");
    const double a = 2.0 * kPi / (shaping_tau * shaping_tau);
    const double x = std::sqrt(a) * t;
    // physicists' Hermite polynomial H_n(x) by recurrence
    double hkm1 = 1.0;       // H_0
    double hk = 2.0 * x;     // H_1
    for (int k = 1; k < order; ++k) {
        const double hkp1 = 2.0 * x * hk - 2.0 * static_cast<double>(k) * hkm1;
        hkm1 = hk;
        hk = hkp1;
    }
    const double hn = (order == 0) ? hkm1 : hk;
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(a, 0.5 * order) * hn * std::exp(-a * t * t);
}

double energy_fraction_in_window(int order, double shaping_tau, double duration) {
    if (!(shaping_tau > 0.0) || !(duration > 0.0))
        throw std::invalid_argument("energy_fraction_in_window: non-positive time scale");
    const EnergyProfile prof = energy_profile(order);
    const double c = 0.5 * duration / shaping_tau;
    return prof.at(c) / prof.total();
}

double default_shaping_tau(int order, double duration) {
    if (!(duration > 0.0)) throw std::invalid_argument("default_shaping_tau: duration must be positive");
    const EnergyProfile prof = energy_profile(order);
    const double target = kEnergyRule * prof.total();
    // cum is increasing; find the first grid cell crossing the target and interpolate
    std::size_t i = 1;
    while (i < prof.cum.size() && prof.cum[i] < target) ++i;
    if (i >= prof.cum.size())
        throw std::runtime_error("default_shaping_tau: energy rule not bracketed");
    const double c0 = static_cast<double>(i - 1) * prof.du;
    const double seg = prof.cum[i] - prof.cum[i - 1];
    const double frac = seg > 0.0 ? (target - prof.cum[i - 1]) / seg : 0.0;
    const double c = c0 + frac * prof.du;
    return 0.5 * duration / c;
}

PulseSpec PulseSpec::resolved() const {
    PulseSpec r = *this;
    if (r.sample_interval == 0.0) r.sample_interval = r.duration / 100.0;
    if (r.shaping_tau == 0.0) r.shaping_tau = default_shaping_tau(r.order, r.duration);
    return r;
}

SampledWaveform make_pulse(const PulseSpec& spec_in) {
    const PulseSpec spec = spec_in.resolved();
    if (spec.order < 1) throw std::invalid_argument("make_pulse: order must be >= 1");
    if (!(spec.duration > 0.0)) throw std::invalid_argument("make_pulse: duration must be positive");
    if (!(spec.sample_interval > 0.0))
        throw std::invalid_argument("make_pulse: sample_interval must be positive");
    if (spec.sample_interval > spec.duration / 50.0)
        throw std::invalid_argument("make_pulse: sample_interval must be <= duration/50");
    // small slack so the tau produced by the solver itself is accepted
    if (energy_fraction_in_window(spec.order, spec.shaping_tau, spec.duration) < kEnergyRule - 1e-6)
        throw std::invalid_argument(
            "make_pulse: shaping_tau leaves less than 99.9% of the energy inside the duration window");

    const double dt = spec.sample_interval;
    const auto half = static_cast<long long>(std::llround(0.5 * spec.duration / dt));
    const auto n = static_cast<std::size_t>(2 * half);
    // half-sample grid: t_k = (k - half + 0.5) dt, symmetric about 0, support strictly
    // inside (-Tm/2, Tm/2) so the sampled autocorrelation vanishes exactly at |lag| >= Tm
    SampledWaveform w;
    w.sample_interval = dt;
    w.start_time = (0.5 - static_cast<double>(half)) * dt;
    w.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = (static_cast<double>(k) - static_cast<double>(half) + 0.5) * dt;
        w.samples[k] = gaussian_derivative(spec.order, spec.shaping_tau, t);
    }
    const double e = w.energy();
    if (!(e > 0.0)) throw std::runtime_error("make_pulse: degenerate pulse energy");
    const double scale = 1.0 / std::sqrt(e);
    for (double& s : w.samples) s *= scale;
    return w;
}

double cross_correlation(const SampledWaveform& a, const SampledWaveform& b, double lag) {
    if (a.samples.empty() || b.samples.empty()) return 0.0;
    const double dt = a.sample_interval;
    // no overlap: exact zero
    const double lo = a.start_time - b.end_time();
    const double hi = a.end_time() - b.start_time;
    if (lag <= lo || lag >= hi) return 0.0;
    const double shift = lag / dt;
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) < 1e-9) {
        // grid-aligned lag: plain shifted inner product
        SampledWaveform bs = b;
        bs.start_time += rounded * dt;
        return inner_product(a, bs);
    }
    double acc = 0.0;
    const std::size_t n = a.samples.size();
    for (std::size_t k = 0; k < n; ++k)
        acc += a.samples[k] * sample_at(b, a.time_at(k) - lag);
    return acc * dt;
}

double autocorrelation(const SampledWaveform& p, double lag) {
    return cross_correlation(p, p, -lag);
}

double ten_db_bandwidth(const SampledWaveform& p) {
    if (p.samples.empty()) return 0.0;
    const double dt = p.sample_interval;
    const double f_nyq = 0.5 / dt;
    const int nf = 4096;
    std::vector<double> power(nf);
    double pmax = 0.0;
    for (int i = 0; i < nf; ++i) {
        const double f = f_nyq * static_cast<double>(i) / static_cast<double>(nf);
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < p.samples.size(); ++k) {
            const double ph = -2.0 * kPi * f * p.time_at(k);
            re += p.samples[k] * std::cos(ph);
            im += p.samples[k] * std::sin(ph);
        }
        power[i] = (re * re + im * im) * dt * dt;
        pmax = std::max(pmax, power[i]);
    }
    if (pmax == 0.0) return 0.0;
    const double thresh = pmax * 0.1;
    int lo = 0;
    while (lo < nf && power[lo] < thresh) ++lo;
    int hi = nf - 1;
    while (hi >= 0 && power[hi] < thresh) --hi;
    if (hi < lo) return 0.0;
    return f_nyq * static_cast<double>(hi - lo + 1) / static_cast<double>(nf);
}

} // namespace uwb
