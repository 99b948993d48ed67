#include "uwb/montecarlo.hpp"

#include "uwb/csv.hpp"
#include "uwb/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace uwb {

std::string ReceiverSpec::label() const {
    if (kind == TemplateKind::conventional) return "conventional";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "partial_%.2f", keep_fraction);
    return buf;
}

void validate(const SimConfig& c) {
    if (c.channel.kind == ChannelModel::Kind::ieee802154a) validate(c.channel.params);
    validate(c.frame);
    if (c.n_users < 1) throw std::invalid_argument("sim: n_users must be >= 1");
    if (c.receivers.empty()) throw std::invalid_argument("sim: at least one receiver required");
    for (const auto& r : c.receivers)
        if (!(r.keep_fraction > 0.0) || r.keep_fraction > 1.0)
            throw std::invalid_argument("sim: receiver keep_fraction must be in (0, 1]");
    for (std::size_t i = 1; i < c.ebn0_grid_db.size(); ++i)
        if (!(c.ebn0_grid_db[i] > c.ebn0_grid_db[i - 1]))
            throw std::invalid_argument("sim: ebn0 grid must be strictly increasing");
    if (c.max_bits < 1000) throw std::invalid_argument("sim: max_bits must be >= 10^3");
    if (c.min_errors < 10) throw std::invalid_argument("sim: min_errors must be >= 10");
    if (c.block_bits < 1) throw std::invalid_argument("sim: block_bits must be >= 1");
}

double wilson_halfwidth95(std::uint64_t errors, std::uint64_t bits) {
    if (bits == 0) return 0.5;
    const double z = 1.959963984540054;
    const double n = static_cast<double>(bits);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    return z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

namespace {

struct EngineSetup {
    SampledWaveform pulse;
    double tau_max_s = 0.0;
    int n_warm = 1;
};

EngineSetup prepare(const SimConfig& c) {
    EngineSetup s;
    s.pulse = make_pulse(c.pulse);
    s.tau_max_s = (c.channel.kind == ChannelModel::Kind::ieee802154a)
                      ? resolve_tau_max(c.channel.params) * 1e-9
                      : 0.0;
    s.n_warm = std::max(1, static_cast<int>(std::ceil(s.tau_max_s / c.frame.bit_period())));
    return s;
}

ChannelRealization draw_channel(const SimConfig& c, Rng& rng) {
    if (c.channel.kind == ChannelModel::Kind::delta) {
        ChannelRealization ch;
        ch.taps.push_back({0.0, 1.0});
        return ch;
    }
    return realize_channel(c.channel.params, rng);
}

// One fading block: fresh channels, codes, bits and noise; both receivers decide on
// the same received waveform. Returns per-receiver error counts over block_bits bits.
std::vector<std::uint64_t> run_block(const SimConfig& c, const EngineSetup& setup, double n0,
                                     std::uint64_t point_index, std::uint64_t block_index) {
    const FrameConfig& frame = c.frame;
    const double tb = frame.bit_period();
    const int ns = frame.pulses_per_bit;
    const int n_total = setup.n_warm + c.block_bits;

    Rng rng = make_rng(c.master_seed, point_index, block_index);

    ChannelRealization desired_chan = draw_channel(c, rng);
    // the receiver is locked to the first-ray polarity; a global sign flip of the
    // response is unobservable, so normalize it away
    if (!desired_chan.taps.empty() && desired_chan.taps.front().amplitude < 0.0)
        for (auto& t : desired_chan.taps) t.amplitude = -t.amplitude;

    std::vector<ChannelRealization> mui_chans;
    for (int u = 1; u < c.n_users; ++u) mui_chans.push_back(draw_channel(c, rng));

    const std::vector<int> code = generate_th_code(frame.hop_slots, n_total * ns, rng);
    std::bernoulli_distribution coin(0.5);
    std::vector<int> bits(static_cast<std::size_t>(n_total));
    for (auto& b : bits) b = coin(rng) ? 1 : -1;

    const SampledWaveform desired_rx =
        propagate(synthesize_signal({code, 0.0, bits}, frame, setup.pulse), desired_chan);

    double span_lo = desired_rx.start_time;
    double span_hi = desired_rx.end_time();
    std::vector<SampledWaveform> mui_rx;
    std::uniform_real_distribution<double> delay(0.0, tb);
    for (const auto& chan_u : mui_chans) {
        const int nb_u = n_total + 2; // one extra bit of history before t = 0
        const std::vector<int> code_u = generate_th_code(frame.hop_slots, nb_u * ns, rng);
        std::vector<int> bits_u(static_cast<std::size_t>(nb_u));
        for (auto& b : bits_u) b = coin(rng) ? 1 : -1;
        const UserConfig user{code_u, delay(rng) - tb, bits_u};
        mui_rx.push_back(propagate(synthesize_signal(user, frame, setup.pulse), chan_u));
        span_lo = std::min(span_lo, mui_rx.back().start_time);
        span_hi = std::max(span_hi, mui_rx.back().end_time());
    }

    SampledWaveform rx = make_zero_like(desired_rx, span_lo, span_hi);
    add_scaled_shifted(rx, desired_rx, 0.0, 1.0);
    for (const auto& w : mui_rx) add_scaled_shifted(rx, w, 0.0, 1.0);
    rx = add_awgn(rx, n0, rng);

    const double sync = desired_chan.first_tap_delay() * 1e-9;
    const BitWindows windows{setup.n_warm * tb + sync, tb, c.block_bits};

    std::vector<std::uint64_t> errors(c.receivers.size(), 0);
    for (std::size_t r = 0; r < c.receivers.size(); ++r) {
        const auto& spec = c.receivers[r];
        const Template tmpl =
            build_template(spec.kind, spec.keep_fraction, frame, code, setup.pulse, sync, n_total);
        const std::vector<int> decisions = correlate_and_decide(rx, tmpl, windows);
        for (int i = 0; i < c.block_bits; ++i)
            if (decisions[static_cast<std::size_t>(i)] !=
                bits[static_cast<std::size_t>(setup.n_warm + i)])
                ++errors[r];
    }
    return errors;
}

} // namespace

BerPoint run_ber_point(const SimConfig& c, double ebn0_db, int point_index, int threads) {
    validate(c);
    const EngineSetup setup = prepare(c);
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    // Ep = 1 per pulse, Ns pulses per bit; the grid point fixes N0
    const double n0 = static_cast<double>(c.frame.pulses_per_bit) / ebn0;

    const std::size_t n_rx = c.receivers.size();
    std::vector<std::uint64_t> errors(n_rx, 0);
    std::uint64_t bits = 0;

    // Blocks are processed in fixed-size waves; the stopping rule is evaluated only at
    // wave boundaries so the set of simulated blocks never depends on the thread count.
    constexpr int kWave = 8;
    const int n_workers = std::max(1, std::min(threads, kWave));
    std::uint64_t next_block = 0;
    for (;;) {
        std::vector<std::vector<std::uint64_t>> wave_errors(kWave);
        if (n_workers == 1) {
            for (int i = 0; i < kWave; ++i)
                wave_errors[static_cast<std::size_t>(i)] =
                    run_block(c, setup, n0, static_cast<std::uint64_t>(point_index),
                              next_block + static_cast<std::uint64_t>(i));
        } else {
            std::atomic<int> cursor{0};
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(n_workers));
            for (int w = 0; w < n_workers; ++w)
                pool.emplace_back([&]() {
                    for (;;) {
                        const int i = cursor.fetch_add(1);
                        if (i >= kWave) return;
                        wave_errors[static_cast<std::size_t>(i)] =
                            run_block(c, setup, n0, static_cast<std::uint64_t>(point_index),
                                      next_block + static_cast<std::uint64_t>(i));
                    }
                });
            for (auto& t : pool) t.join();
        }
        for (const auto& we : wave_errors)
            for (std::size_t r = 0; r < n_rx; ++r) errors[r] += we[r];
        next_block += kWave;
        bits += static_cast<std::uint64_t>(kWave) * static_cast<std::uint64_t>(c.block_bits);

        if (bits >= c.max_bits) break;
        const std::uint64_t worst =
            *std::min_element(errors.begin(), errors.end()); // least-resolved receiver
        if (worst >= c.min_errors) break;
    }

    BerPoint point;
    point.ebn0_db = ebn0_db;
    for (std::size_t r = 0; r < n_rx; ++r) {
        ReceiverEstimate est;
        est.receiver = c.receivers[r].label();
        est.errors = errors[r];
        est.bits = bits;
        est.ber = static_cast<double>(errors[r]) / static_cast<double>(bits);
        est.ci95 = wilson_halfwidth95(errors[r], bits);
        point.receivers.push_back(std::move(est));
    }
    return point;
}

BerCurve run_sweep(const SimConfig& c, int threads,
                   const std::function<void(const BerPoint&)>& on_point) {
    validate(c);
    BerCurve curve;
    for (std::size_t i = 0; i < c.ebn0_grid_db.size(); ++i) {
        curve.push_back(run_ber_point(c, c.ebn0_grid_db[i], static_cast<int>(i), threads));
        if (on_point) on_point(curve.back());
    }
    return curve;
}

std::string ber_curve_csv(const BerCurve& curve) {
    std::string out = "ebn0_db,receiver_kind,ber,ci95,bits,errors\n";
    for (const auto& p : curve) {
        for (const auto& r : p.receivers) {
            out += format_double(p.ebn0_db);
            out += ',';
            out += r.receiver;
            out += ',';
            out += format_double(r.ber);
            out += ',';
            out += format_double(r.ci95);
            out += ',';
            out += std::to_string(r.bits);
            out += ',';
            out += std::to_string(r.errors);
            out += '\n';
        }
    }
    return out;
}

} // namespace uwb
