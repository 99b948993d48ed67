#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uwb/pulse.hpp"
#include "uwb/rng.hpp"
#include "uwb/txrx.hpp"

#include <cmath>
#include <vector>

using namespace uwb;

namespace {

PulseSpec test_pulse_spec() {
    PulseSpec s;
    s.order = 2;
    s.duration = 0.5e-9;
    return s;
}

ChannelRealization delta_channel() {
    ChannelRealization ch;
    ch.taps.push_back({0.0, 1.0});
    return ch;
}

std::vector<int> random_bits(int n, Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    std::vector<int> bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = coin(rng) ? 1 : -1;
    return bits;
}

} // namespace

TEST_CASE("generate_th_code: degenerate, uniform, reproducible") {
    Rng rng = make_rng(31, 0);
    for (int c : generate_th_code(1, 1000, rng)) CHECK(c == 0);

    std::vector<int> hist(16, 0);
    const auto code = generate_th_code(16, 100000, rng);
    for (int c : code) ++hist[static_cast<std::size_t>(c)];
    for (int h : hist) CHECK(std::abs(h / 100000.0 - 1.0 / 16.0) <= 0.005);

    Rng a = make_rng(32, 0), b = make_rng(32, 0);
    CHECK(generate_th_code(16, 500, a) == generate_th_code(16, 500, b));
}

TEST_CASE("synthesize_signal places unit-energy pulses") {
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    const FrameConfig frame = make_frame_config(100e6, 1, 0.5e-9, 16);

    const SampledWaveform one = synthesize_signal({{0}, 0.0, {1}}, frame, pulse);
    CHECK(std::abs(one.energy() - 1.0) <= 1e-9);

    // antipodal: flipping the bit negates the waveform pointwise
    const SampledWaveform neg = synthesize_signal({{0}, 0.0, {-1}}, frame, pulse);
    REQUIRE(neg.size() == one.size());
    for (std::size_t k = 0; k < one.size(); ++k) CHECK(neg.samples[k] == -one.samples[k]);

    // Ns = 4 disjoint pulses add their energies
    const FrameConfig frame4 = make_frame_config(25e6, 4, 0.5e-9, 16);
    const SampledWaveform four = synthesize_signal({{0, 3, 7, 12}, 0.0, {1}}, frame4, pulse);
    CHECK(four.energy() == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("synthesize_signal rejects pulses wider than the hop slot") {
    PulseSpec wide = test_pulse_spec();
    wide.duration = 1.0e-9;
    const SampledWaveform pulse = make_pulse(wide);
    const FrameConfig frame = make_frame_config(100e6, 1, 0.5e-9, 16); // Tc = 0.5 ns < Tm
    CHECK_THROWS_AS(synthesize_signal({{0}, 0.0, {1}}, frame, pulse), std::invalid_argument);
}

TEST_CASE("propagate: delta identity, shift/scale, superposition oracle") {
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    const FrameConfig frame = make_frame_config(100e6, 1, 0.5e-9, 16);
    Rng rng = make_rng(33, 0);
    const auto code = generate_th_code(frame.hop_slots, 8, rng);
    const SampledWaveform sig = synthesize_signal({code, 0.0, random_bits(8, rng)}, frame, pulse);

    const SampledWaveform ident = propagate(sig, delta_channel());
    REQUIRE(ident.size() >= sig.size());
    for (std::size_t k = 0; k < sig.size(); ++k)
        CHECK(std::abs(ident.samples[k] - sig.samples[k]) <= 1e-12);

    ChannelRealization scaled;
    scaled.taps.push_back({4.0, -0.6});
    const SampledWaveform sh = propagate(sig, scaled);
    CHECK(sh.energy() == doctest::Approx(0.36 * sig.energy()).epsilon(1e-9));
    const auto shift = static_cast<std::size_t>(std::llround(4.0e-9 / sig.sample_interval));
    for (std::size_t k = 0; k < sig.size(); ++k)
        CHECK(sh.samples[k + shift] == doctest::Approx(-0.6 * sig.samples[k]));

    // two taps against brute-force sample-by-sample superposition
    ChannelRealization two;
    two.taps.push_back({1.3, 0.8});
    two.taps.push_back({5.9, -0.45});
    const SampledWaveform got = propagate(sig, two);
    SampledWaveform want = got;
    std::fill(want.samples.begin(), want.samples.end(), 0.0);
    for (const auto& tap : two.taps) {
        const auto off = static_cast<std::size_t>(std::llround(tap.delay_ns * 1e-9 / sig.sample_interval));
        for (std::size_t k = 0; k < sig.size(); ++k)
            want.samples[k + off] += tap.amplitude * sig.samples[k];
    }
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k)
        CHECK(std::abs(got.samples[k] - want.samples[k]) <= 1e-9);
}

TEST_CASE("add_awgn: zero PSD is a no-op, correlator moment matches N0/2") {
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    Rng rng = make_rng(34, 0);

    const SampledWaveform same = add_awgn(pulse, 0.0, rng);
    CHECK(same.samples == pulse.samples);

    const double n0 = 0.37;
    double zsum = 0.0, zsq = 0.0, mean_acc = 0.0;
    std::size_t mean_n = 0;
    const int trials = 100000;
    SampledWaveform zero = pulse;
    std::fill(zero.samples.begin(), zero.samples.end(), 0.0);
    for (int i = 0; i < trials; ++i) {
        const SampledWaveform noise = add_awgn(zero, n0, rng);
        const double z = inner_product(pulse, noise);
        zsum += z;
        zsq += z * z;
        if (i < 100) {
            for (double s : noise.samples) mean_acc += s;
            mean_n += noise.size();
        }
    }
    const double mean_z = zsum / trials;
    const double var_z = zsq / trials - mean_z * mean_z;
    CHECK(var_z == doctest::Approx(n0 / 2.0).epsilon(0.02));
    // sample mean of the added noise is zero within 3 sigma
    const double sigma = std::sqrt(n0 / (2.0 * pulse.sample_interval));
    CHECK(std::abs(mean_acc / static_cast<double>(mean_n)) <=
          3.0 * sigma / std::sqrt(static_cast<double>(mean_n)));
}

TEST_CASE("build_template: degeneracy, half energy, kept-part correlation") {
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    const FrameConfig frame = make_frame_config(50e6, 2, 0.5e-9, 16);
    Rng rng = make_rng(35, 0);
    const auto code = generate_th_code(frame.hop_slots, 2, rng);

    const Template conv = build_template(TemplateKind::conventional, 1.0, frame, code, pulse, 0.0, 1);
    const Template part1 = build_template(TemplateKind::partial, 1.0, frame, code, pulse, 0.0, 1);
    CHECK(conv.waveform.samples == part1.waveform.samples);

    const Template half = build_template(TemplateKind::partial, 0.5, frame, code, pulse, 0.0, 1);
    CHECK(half.waveform.energy() == doctest::Approx(2.0 * 0.5).epsilon(1e-6)); // Ns = 2

    // a full pulse against its own kept half integrates to half the energy
    const SampledWaveform masked = masked_pulse(pulse, 0.5);
    CHECK(inner_product(masked, pulse) == doctest::Approx(0.5).epsilon(1e-6));
    for (std::size_t k = masked.size() / 2; k < masked.size(); ++k)
        CHECK(masked.samples[k] == 0.0);

    CHECK_THROWS_AS(masked_pulse(pulse, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(masked_pulse(pulse, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(build_template(TemplateKind::partial, 0.0, frame, code, pulse, 0.0, 1),
                    std::invalid_argument);
}

TEST_CASE("correlate_and_decide: matched detection and antipodal flip") {
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    const FrameConfig frame = make_frame_config(100e6, 1, 0.5e-9, 16);
    Rng rng = make_rng(36, 0);
    const int n_bits = 1000;
    const auto code = generate_th_code(frame.hop_slots, n_bits, rng);
    const auto bits = random_bits(n_bits, rng);

    const SampledWaveform rx = propagate(synthesize_signal({code, 0.0, bits}, frame, pulse),
                                         delta_channel());
    const Template tmpl =
        build_template(TemplateKind::conventional, 1.0, frame, code, pulse, 0.0, n_bits);
    const BitWindows windows{0.0, frame.bit_period(), n_bits};
    CHECK(correlate_and_decide(rx, tmpl, windows) == bits);

    // received = -template decides all -1
    SampledWaveform neg = tmpl.waveform;
    for (double& s : neg.samples) s = -s;
    for (int d : correlate_and_decide(neg, tmpl, windows)) CHECK(d == -1);
}

TEST_CASE("correlate_and_decide rejects mismatched grids") {
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    const FrameConfig frame = make_frame_config(100e6, 1, 0.5e-9, 16);
    const Template tmpl = build_template(TemplateKind::conventional, 1.0, frame, {0}, pulse, 0.0, 1);
    SampledWaveform other = tmpl.waveform;
    other.sample_interval *= 2.0;
    CHECK_THROWS_AS(correlate_and_decide(other, tmpl, BitWindows{0.0, frame.bit_period(), 1}),
                    std::invalid_argument);
}

TEST_CASE("AWGN chain matches the closed-form BPSK error rate at 4 dB") {
    // 0.5 erfc(sqrt(10^0.4)) = 1.2501e-2; one million paired bits keep the binomial
    // 3 sigma band near 3% relative
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    const FrameConfig frame = make_frame_config(200e6, 1, 0.5e-9, 8);
    const double n0 = 1.0 / std::pow(10.0, 0.4);
    const double want = 0.5 * std::erfc(std::sqrt(std::pow(10.0, 0.4)));

    const int block = 1000, blocks = 1000;
    std::uint64_t errors = 0;
    for (int b = 0; b < blocks; ++b) {
        Rng rng = make_rng(37, static_cast<std::uint64_t>(b));
        const auto code = generate_th_code(frame.hop_slots, block, rng);
        const auto bits = random_bits(block, rng);
        SampledWaveform rx = propagate(synthesize_signal({code, 0.0, bits}, frame, pulse),
                                       delta_channel());
        rx = add_awgn(rx, n0, rng);
        const Template tmpl =
            build_template(TemplateKind::conventional, 1.0, frame, code, pulse, 0.0, block);
        const auto dec = correlate_and_decide(rx, tmpl, {0.0, frame.bit_period(), block});
        for (int i = 0; i < block; ++i)
            if (dec[static_cast<std::size_t>(i)] != bits[static_cast<std::size_t>(i)]) ++errors;
    }
    const double n = 1e6;
    const double ber = static_cast<double>(errors) / n;
    const double sigma3 = 3.0 * std::sqrt(want * (1.0 - want) / n);
    CHECK(std::abs(ber - want) <= sigma3);
}

TEST_CASE("perfect synchronization recovers the delayed single-tap case exactly") {
    const SampledWaveform pulse = make_pulse(test_pulse_spec());
    const FrameConfig frame = make_frame_config(100e6, 1, 0.5e-9, 16);
    Rng rng = make_rng(38, 0);
    const int n_bits = 50;
    const auto code = generate_th_code(frame.hop_slots, n_bits, rng);
    const auto bits = random_bits(n_bits, rng);
    const SampledWaveform sig = synthesize_signal({code, 0.0, bits}, frame, pulse);

    const double d_ns = 3.215;
    ChannelRealization delayed;
    delayed.taps.push_back({d_ns, 0.7});
    const SampledWaveform rx = propagate(sig, delayed);
    const double sync = d_ns * 1e-9;
    const Template tmpl =
        build_template(TemplateKind::conventional, 1.0, frame, code, pulse, sync, n_bits);
    const BitWindows windows{sync, frame.bit_period(), n_bits};
    CHECK(correlate_and_decide(rx, tmpl, windows) == bits);

    // per-bit statistics equal the zero-delay case up to the 0.7 tap weight
    const SampledWaveform rx0 = propagate(sig, delta_channel());
    const Template tmpl0 =
        build_template(TemplateKind::conventional, 1.0, frame, code, pulse, 0.0, n_bits);
    for (int i = 0; i < 5; ++i) {
        const double t0 = i * frame.bit_period();
        const double z0 = inner_product_window(tmpl0.waveform, rx0, t0, t0 + frame.bit_period());
        const double zd = inner_product_window(tmpl.waveform, rx, t0 + sync,
                                               t0 + sync + frame.bit_period());
        CHECK(zd == doctest::Approx(0.7 * z0).epsilon(1e-12));
    }
}
