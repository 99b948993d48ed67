#include "uwb/analytic.hpp"

#include "uwb/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace uwb {

namespace {

constexpr int kMaxSeriesTerms = 10'000;

// Template/pulse cross-correlation X(y) = ∫ v(t) p(t - y) dt tabulated on a half-sample
// lag grid, evaluated by Catmull-Rom interpolation. For the conventional template this
// is the pulse autocorrelation R(y).
class CorrelationTable {
public:
    CorrelationTable(const SampledWaveform& tmpl, const SampledWaveform& pulse) {
        step_ = 0.5 * pulse.sample_interval;
        lo_ = tmpl.start_time - pulse.end_time();
        const double hi = tmpl.end_time() - pulse.start_time;
        const auto n = static_cast<std::size_t>(std::ceil((hi - lo_) / step_)) + 2;
        values_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            values_[i] = cross_correlation(tmpl, pulse, lo_ + static_cast<double>(i) * step_);
    }

    // lag in seconds
    double operator()(double lag) const {
        const double x = (lag - lo_) / step_;
        const auto n = static_cast<long long>(values_.size());
        if (x <= 0.0 || x >= static_cast<double>(n - 1)) return 0.0;
        const double xf = std::floor(x);
        const auto i = static_cast<long long>(xf);
        const double u = x - xf;
        auto at = [&](long long k) -> double {
            return (k < 0 || k >= n) ? 0.0 : values_[static_cast<std::size_t>(k)];
        };
        const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
        return 0.5 * (2.0 * p1 + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                      (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
    }

private:
    double lo_ = 0.0;
    double step_ = 0.0;
    std::vector<double> values_;
};

struct AnalyticContext {
    SampledWaveform pulse;
    SampledWaveform tmpl; // masked pulse prototype (== pulse for conventional)
    CorrelationTable xcorr;
    double duration_ns;   // pulse duration Tm in ns
    double rho_c;         // pulse/template correlation at zero lag
    double rho_e;         // template energy

    explicit AnalyticContext(const AnalyticConfig& c)
        : pulse(make_pulse(c.pulse)),
          tmpl(c.template_kind == TemplateKind::conventional
                   ? pulse
                   : masked_pulse(pulse, c.keep_fraction)),
          xcorr(tmpl, pulse),
          duration_ns(c.pulse.resolved().duration * 1e9),
          rho_c(inner_product(tmpl, pulse)),
          rho_e(tmpl.energy()) {}

    // X at a lag given in ns
    double x_ns(double lag_ns) const { return xcorr(lag_ns * 1e-9); }
};

// Erlang(order j, rate lam) density at y >= 0
double erlang_pdf(int j, double lam, double y) {
    if (y < 0.0) return 0.0;
    if (y == 0.0) return (j == 1) ? lam : 0.0;
    return std::exp(static_cast<double>(j) * std::log(lam) +
                    static_cast<double>(j - 1) * std::log(y) - lam * y - std::lgamma(j));
}

// P(T > x) for T ~ Erlang(order j, rate lam): Poisson(lam x) has fewer than j events
double erlang_survival(int j, double lam, double x) {
    if (x <= 0.0) return 1.0;
    double term = std::exp(-lam * x);
    double sum = term;
    for (int i = 1; i < j; ++i) {
        term *= lam * x / static_cast<double>(i);
        sum += term;
    }
    return std::min(1.0, sum);
}

// Sum over the ray index k >= 2 of ∫ e^(-y/gamma0) f_{k-1}(y) X^2(y + z_shift) dy over
// [y_lo, y_hi] (ns). The Erlang order giving the largest mass near y_hi bounds where
// the series can still grow; past it, terms below tolerance end the sum.
double ray_series(const AnalyticContext& ctx, const ChannelParams& ch, double y_lo, double y_hi,
                  double z_shift, double tol) {
    const double lam = ch.effective_ray_rate();
    const double g0 = ch.intra_decay;
    const int j_peak = static_cast<int>(std::ceil(lam * y_hi)) + 1;
    double sum = 0.0;
    for (int j = 1;; ++j) {
        const double term = integrate(
            [&](double y) {
                const double x = ctx.x_ns(y + z_shift);
                return std::exp(-y / g0) * erlang_pdf(j, lam, y) * x * x;
            },
            y_lo, y_hi, tol);
        sum += term;
        if (j > j_peak && term <= tol * sum) break;
        if (j >= kMaxSeriesTerms)
            throw QuadratureError("ray arrival series did not converge within 10^4 terms");
    }
    return sum;
}

int previous_pulse_count(const AnalyticConfig& c) {
    const double tau_max_ns = resolve_tau_max(c.channel);
    const double rb_per_ns = c.frame.bit_rate * 1e-9;
    const int n_f = static_cast<int>(std::ceil(tau_max_ns * rb_per_ns * c.frame.pulses_per_bit));
    return std::max(1, n_f);
}

} // namespace

void validate(const AnalyticConfig& c) {
    validate(c.channel);
    validate(c.frame);
    if (c.n_interferers < 0) throw std::invalid_argument("analytic: n_interferers must be >= 0");
    if (c.n0 < 0.0) throw std::invalid_argument("analytic: N0 must be >= 0");
    if (!(c.keep_fraction > 0.0) || c.keep_fraction > 1.0)
        throw std::invalid_argument("analytic: keep_fraction must be in (0, 1]");
    if (!(c.quad_tol > 0.0) || c.quad_tol > 1e-2)
        throw std::invalid_argument("analytic: quad_tol must be in (0, 1e-2]");
}

double omega0(const ChannelParams& p) {
    return 1.0 / (p.intra_decay * p.rate_bracket());
}

std::pair<double, double> desired_energy_and_noise(const AnalyticConfig& c) {
    validate(c);
    const AnalyticContext ctx(c);
    const double ns = c.frame.pulses_per_bit;
    const double eb = omega0(c.channel) * ns * ns * ctx.rho_c * ctx.rho_c;
    const double sn2 = ns * c.n0 / 2.0 * ctx.rho_e;
    return {eb, sn2};
}

double sigma_iasi_given_omega0(const AnalyticConfig& c, double omega0_value) {
    validate(c);
    const AnalyticContext ctx(c);
    const double ns = c.frame.pulses_per_bit;
    const double kernel = ray_series(ctx, c.channel, 0.0, ctx.duration_ns, 0.0, c.quad_tol);
    return omega0_value * ns * ns * kernel;
}

double sigma_iasi(const AnalyticConfig& c) {
    return sigma_iasi_given_omega0(c, omega0(c.channel));
}

double omega_sigma(const AnalyticConfig& c) {
    validate(c);
    const ChannelParams& ch = c.channel;
    const double tau_max = resolve_tau_max(ch);
    const double tf_ns = c.frame.frame_period * 1e9;
    const double ts_ns = 0.5 * tf_ns; // the code-offset window is one frame wide
    const double g0 = ch.intra_decay;
    const double gam = ch.cluster_decay;
    const double lam_c = ch.cluster_rate;
    const double tol = c.quad_tol;
    const int s_max = previous_pulse_count(c) * c.frame.pulses_per_bit - 1;

    // mean power reaching offset A, integrated over the position of the cluster that
    // contains it; the factor for "the next cluster has not started yet" uses the
    // Erlang survival of T_{l+1}
    auto power_at_offset = [&](double a) {
        if (a >= tau_max) return 0.0;
        const int l_peak = static_cast<int>(std::ceil(lam_c * a)) + 1;
        double sum = 0.0;
        for (int l = 1;; ++l) {
            double inner;
            if (l == 1) {
                inner = std::exp(-a / g0); // first cluster pinned at T = 0
            } else {
                inner = integrate(
                    [&](double t) {
                        return std::exp(-t / gam) * std::exp(-(a - t) / g0) *
                               erlang_pdf(l - 1, lam_c, t);
                    },
                    0.0, a, tol);
            }
            const double survive = erlang_survival(l, lam_c, a) - erlang_survival(l, lam_c, tau_max);
            const double term = inner * std::max(0.0, survive);
            sum += term;
            if (l > l_peak && term <= tol * sum) break;
            if (l >= kMaxSeriesTerms)
                throw QuadratureError("cluster series did not converge within 10^4 terms");
        }
        return sum;
    };

    double total = 0.0;
    for (int s = 1; s <= s_max; ++s) {
        const double term = integrate([&](double tc) { return power_at_offset(s * tf_ns + tc); },
                                      -ts_ns, ts_ns, tol) /
                            (2.0 * ts_ns);
        total += term;
        if (term <= tol * total) break;
    }
    return omega0(ch) * total;
}

double sigma_isi_given_omega_sigma(const AnalyticConfig& c, double omega_sigma_value) {
    validate(c);
    const AnalyticContext ctx(c);
    const double ns = c.frame.pulses_per_bit;
    // the ray density vanishes for negative lags, so the [-Tm, Tm] range collapses to
    // the IASI kernel
    const double kernel = ray_series(ctx, c.channel, 0.0, ctx.duration_ns, 0.0, c.quad_tol);
    return omega_sigma_value * ns * ns * kernel;
}

double sigma_isi(const AnalyticConfig& c) {
    return sigma_isi_given_omega_sigma(c, omega_sigma(c));
}

double sigma_mui(const AnalyticConfig& c) {
    validate(c);
    if (c.n_interferers == 0) return 0.0;
    const AnalyticContext ctx(c);
    const ChannelParams& ch = c.channel;
    const double tf_ns = c.frame.frame_period * 1e9;
    const double tm_ns = ctx.duration_ns;
    const double tol = c.quad_tol;

    // double integral over the asynchronous offset z and the ray delay y; the template
    // collision lag is y + z and the integrand vanishes outside [0, Tm]
    const double z_hi = std::min(0.5 * tf_ns, tm_ns);
    const double kernel = integrate(
        [&](double z) {
            const double y_lo = std::max(0.0, -z);
            const double y_hi = tm_ns - z;
            if (!(y_hi > y_lo)) return 0.0;
            return ray_series(ctx, ch, y_lo, y_hi, z, tol);
        },
        -0.5 * tf_ns, z_hi, tol);

    const double rb_per_ns = c.frame.bit_rate * 1e-9;
    const double ns = c.frame.pulses_per_bit;
    return c.f_omega0 * rb_per_ns * ns * ns * c.n_interferers *
           (omega0(ch) + omega_sigma(c)) * kernel;
}

SinrBreakdown analytic_breakdown(const AnalyticConfig& c) {
    SinrBreakdown b;
    const auto [eb, sn2] = desired_energy_and_noise(c);
    b.eb = eb;
    b.sigma_n2 = sn2;
    b.sigma_iasi2 = sigma_iasi(c);
    const double os = omega_sigma(c);
    b.sigma_isi2 = sigma_isi_given_omega_sigma(c, os);
    b.sigma_mui2 = sigma_mui(c);
    return b;
}

std::pair<double, double> sinr_and_ber(const SinrBreakdown& b) {
    const double denom = b.interference_plus_noise();
    if (!(denom > 0.0)) throw std::domain_error("sinr_and_ber: zero denominator");
    const double sinr = b.eb / denom;
    const double ber = 0.5 * std::erfc(std::sqrt(0.5 * sinr));
    return {sinr, ber};
}

SinrBreakdown estimate_variance_decomposition(const AnalyticConfig& c, std::uint64_t master_seed,
                                              int n_trials, DecompositionComponents on) {
    validate(c);
    if (n_trials < 1000)
        throw std::invalid_argument("estimate_variance_decomposition: need at least 10^3 trials");

    const SampledWaveform pulse = make_pulse(c.pulse);
    const FrameConfig& frame = c.frame;
    const double tb = frame.bit_period();
    const double tau_max_s = resolve_tau_max(c.channel) * 1e-9;
    const int n_warm = std::max(1, static_cast<int>(std::ceil(tau_max_s / tb)));
    const int n_bits = n_warm + 1;
    const int ns = frame.pulses_per_bit;

    double acc_des = 0.0, acc_iasi = 0.0, acc_isi = 0.0, acc_mui = 0.0, acc_noise = 0.0;

    for (int trial = 0; trial < n_trials; ++trial) {
        Rng rng = make_rng(master_seed, static_cast<std::uint64_t>(trial));
        const ChannelRealization chan = realize_channel(c.channel, rng);

        const std::vector<int> code = generate_th_code(frame.hop_slots, n_bits * ns, rng);
        std::bernoulli_distribution coin(0.5);
        std::vector<int> bits(static_cast<std::size_t>(n_bits));
        for (auto& b : bits) b = coin(rng) ? 1 : -1;

        // template for the measured (last) bit only, first-ray synchronization
        const std::vector<int> code_last(code.end() - ns, code.end());
        const Template tmpl = build_template(c.template_kind, c.keep_fraction, frame, code_last,
                                             pulse, n_warm * tb, 1);
        const double w0 = n_warm * tb, w1 = (n_warm + 1) * tb;

        if (on.desired || on.iasi) {
            std::vector<int> bits_cur(static_cast<std::size_t>(n_bits), 0);
            bits_cur.back() = bits.back();
            const SampledWaveform s_cur = synthesize_signal({code, 0.0, bits_cur}, frame, pulse);
            if (on.desired) {
                ChannelRealization first;
                first.taps.push_back(chan.taps.front());
                const double z = inner_product_window(tmpl.waveform, propagate(s_cur, first), w0, w1);
                acc_des += z * z;
            }
            if (on.iasi) {
                ChannelRealization tail;
                tail.taps.assign(chan.taps.begin() + 1, chan.taps.end());
                const double z = inner_product_window(tmpl.waveform, propagate(s_cur, tail), w0, w1);
                acc_iasi += z * z;
            }
        }
        if (on.isi) {
            std::vector<int> bits_prev = bits;
            bits_prev.back() = 0;
            const SampledWaveform s_prev = synthesize_signal({code, 0.0, bits_prev}, frame, pulse);
            const double z = inner_product_window(tmpl.waveform, propagate(s_prev, chan), w0, w1);
            acc_isi += z * z;
        }
        if (on.mui && c.n_interferers > 0) {
            std::uniform_real_distribution<double> delay(0.0, tb);
            double z = 0.0;
            for (int u = 0; u < c.n_interferers; ++u) {
                const ChannelRealization chan_u = realize_channel(c.channel, rng);
                const int nb_u = n_bits + 2; // one extra bit of history before t = 0
                const std::vector<int> code_u = generate_th_code(frame.hop_slots, nb_u * ns, rng);
                std::vector<int> bits_u(static_cast<std::size_t>(nb_u));
                for (auto& b : bits_u) b = coin(rng) ? 1 : -1;
                const UserConfig user_u{code_u, delay(rng) - tb, bits_u};
                const SampledWaveform s_u = synthesize_signal(user_u, frame, pulse);
                z += inner_product_window(tmpl.waveform, propagate(s_u, chan_u), w0, w1);
            }
            acc_mui += z * z;
        }
        if (on.noise && c.n0 > 0.0) {
            SampledWaveform noise = make_zero_like(tmpl.waveform, w0, w1);
            noise = add_awgn(noise, c.n0, rng);
            const double z = inner_product_window(tmpl.waveform, noise, w0, w1);
            acc_noise += z * z;
        }
    }

    SinrBreakdown b;
    const double inv_n = 1.0 / static_cast<double>(n_trials);
    b.eb = acc_des * inv_n;
    b.sigma_n2 = acc_noise * inv_n;
    b.sigma_iasi2 = acc_iasi * inv_n;
    b.sigma_isi2 = acc_isi * inv_n;
    b.sigma_mui2 = acc_mui * inv_n;
    return b;
}

} // namespace uwb
