#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uwb/channel.hpp"
#include "uwb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace uwb;

namespace {

// two-sided Kolmogorov-Smirnov distance of sorted samples against a CDF
template <typename Cdf>
double ks_distance(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

} // namespace

TEST_CASE("cluster arrivals follow Table-1 statistics (residential LOS)") {
    const ChannelParams p = residential_los();
    Rng rng = make_rng(11, 0);
    double gap_sum = 0.0;
    std::size_t gap_count = 0;
    double count_sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto t = sample_cluster_arrivals(p, rng);
        REQUIRE(!t.empty());
        CHECK(t.front() == 0.0);
        count_sum += static_cast<double>(t.size());
        for (std::size_t l = 1; l < t.size(); ++l) {
            gap_sum += t[l] - t[l - 1];
            ++gap_count;
        }
    }
    // mean gap 1/0.047 = 21.28 ns; mean count Poisson(3) clamped to >= 1
    CHECK(gap_sum / static_cast<double>(gap_count) == doctest::Approx(1.0 / 0.047).epsilon(0.02));
    CHECK(count_sum / draws == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("ray arrival gaps have the Table-1 mixture mean (indoor office LOS)") {
    const ChannelParams p = indoor_office_los();
    Rng rng = make_rng(12, 0);
    double gap_sum = 0.0;
    std::size_t gap_count = 0;
    while (gap_count < 100000) {
        const auto rays = sample_ray_arrivals(p, 0.0, 1e6, rng);
        REQUIRE(!rays.empty());
        CHECK(rays.front() == 0.0);
        for (std::size_t k = 1; k < rays.size(); ++k) {
            gap_sum += rays[k] - rays[k - 1];
            ++gap_count;
        }
    }
    const double want = (1.0 - p.mix_beta) / p.ray_rate1 + p.mix_beta / p.ray_rate2; // 5.1725 ns
    CHECK(gap_sum / static_cast<double>(gap_count) == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("beta = 0 degenerates the ray gaps to Exp(lambda1)") {
    ChannelParams p = indoor_office_los();
    p.mix_beta = 0.0;
    Rng rng = make_rng(13, 0);
    std::vector<double> gaps;
    while (gaps.size() < 20000) {
        const auto rays = sample_ray_arrivals(p, 0.0, 1e6, rng);
        for (std::size_t k = 1; k < rays.size(); ++k) gaps.push_back(rays[k] - rays[k - 1]);
    }
    const double d = ks_distance(gaps, [&](double x) { return 1.0 - std::exp(-p.ray_rate1 * x); });
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(gaps.size()))); // 1% KS threshold
}

TEST_CASE("mean_ray_power reproduces the first-ray energy values") {
    // residential: 1/(12.53 (0.905*1.54 + 0.095*0.15 + 1)) = 0.033144
    CHECK(mean_ray_power(residential_los(), 0.0, 0.0) == doctest::Approx(0.03314).epsilon(3e-3));
    // indoor office: 1/(6.4 (0.9816*0.19 + 0.0184*2.97 + 1)) = 0.125891
    CHECK(mean_ray_power(indoor_office_los(), 0.0, 0.0) == doctest::Approx(0.1259).epsilon(1e-2));

    // one intra-cluster decay constant multiplies the power by exactly 1/e
    const ChannelParams p = indoor_office_los();
    const double base = mean_ray_power(p, 0.0, 3.0);
    CHECK(mean_ray_power(p, 0.0, 3.0 + p.intra_decay) == doctest::Approx(base * std::exp(-1.0)));
}

TEST_CASE("tap amplitudes have the requested mean square and balanced signs") {
    Rng rng = make_rng(14, 0);
    const double omega = 0.2;
    double sq_sum = 0.0;
    int positive = 0;
    const int n_mean = 1000000;
    for (int i = 0; i < n_mean; ++i) {
        const double a = sample_tap_amplitude(omega, 1.0, rng);
        sq_sum += a * a;
        if (i < 100000 && a > 0.0) ++positive;
    }
    CHECK(sq_sum / n_mean == doctest::Approx(omega).epsilon(0.01));
    CHECK(std::abs(positive / 100000.0 - 0.5) <= 0.01);
    CHECK_THROWS_AS(sample_tap_amplitude(0.2, 0.3, rng), std::invalid_argument);
}

TEST_CASE("m = 1 magnitudes are Rayleigh") {
    Rng rng = make_rng(15, 0);
    const double omega = 0.7;
    std::vector<double> mags(20000);
    for (auto& m : mags) m = std::abs(sample_tap_amplitude(omega, 1.0, rng));
    const double d =
        ks_distance(mags, [&](double x) { return 1.0 - std::exp(-x * x / omega); });
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(mags.size())));
}

TEST_CASE("realize_channel invariants") {
    const ChannelParams p = indoor_office_los();
    const double tau_max = resolve_tau_max(p);
    Rng rng = make_rng(16, 0);
    for (int i = 0; i < 200; ++i) {
        const ChannelRealization ch = realize_channel(p, rng);
        REQUIRE(!ch.taps.empty());
        CHECK(ch.first_tap_delay() == 0.0);
        CHECK(ch.total_energy() > 0.0);
        for (std::size_t k = 0; k < ch.taps.size(); ++k) {
            CHECK(ch.taps[k].delay_ns >= 0.0);
            CHECK(ch.taps[k].delay_ns <= tau_max);
            if (k > 0) CHECK(ch.taps[k].delay_ns > ch.taps[k - 1].delay_ns);
        }
    }
}

TEST_CASE("realize_channel is reproducible for a fixed seed") {
    const ChannelParams p = residential_los();
    Rng a = make_rng(17, 0), b = make_rng(17, 0);
    const ChannelRealization ca = realize_channel(p, a);
    const ChannelRealization cb = realize_channel(p, b);
    REQUIRE(ca.taps.size() == cb.taps.size());
    for (std::size_t k = 0; k < ca.taps.size(); ++k) {
        CHECK(ca.taps[k].delay_ns == cb.taps[k].delay_ns);
        CHECK(ca.taps[k].amplitude == cb.taps[k].amplitude);
    }
}

TEST_CASE("first-tap mean power matches the Eq-style value") {
    const ChannelParams p = indoor_office_los();
    Rng rng = make_rng(18, 0);
    double acc = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const ChannelRealization ch = realize_channel(p, rng);
        acc += ch.taps.front().amplitude * ch.taps.front().amplitude;
    }
    CHECK(acc / n == doctest::Approx(0.125891).epsilon(0.03));
}

TEST_CASE("intra-cluster log-power decay slope is -1/gamma0") {
    // build cluster-1 taps from the component samplers and regress log binned mean
    // power against delay
    const ChannelParams p = indoor_office_los();
    Rng rng = make_rng(19, 0);
    const double bin_w = 1.0, lo = 0.0, hi = 16.0;
    const int n_bins = static_cast<int>((hi - lo) / bin_w);
    std::vector<double> power(n_bins, 0.0);
    std::vector<int> count(n_bins, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto rays = sample_ray_arrivals(p, 0.0, hi, rng);
        for (double tau : rays) {
            const double a = sample_tap_amplitude(mean_ray_power(p, 0.0, tau), 1.0, rng);
            const int b = std::min(n_bins - 1, static_cast<int>(tau / bin_w));
            power[b] += a * a;
            ++count[b];
        }
    }
    // least-squares slope of log(mean power) on the bin centers
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (int b = 0; b < n_bins; ++b) {
        REQUIRE(count[b] > 0);
        const double x = (b + 0.5) * bin_w;
        const double y = std::log(power[b] / count[b]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-1.0 / p.intra_decay).epsilon(0.05));
}

TEST_CASE("distinct taps are uncorrelated") {
    const ChannelParams p = indoor_office_los();
    Rng rng = make_rng(20, 0);
    double prod_sum = 0.0, prod_sq = 0.0;
    int n = 0;
    for (int i = 0; i < 20000; ++i) {
        const ChannelRealization ch = realize_channel(p, rng);
        if (ch.taps.size() < 2) continue;
        const double v = ch.taps[0].amplitude * ch.taps[1].amplitude;
        prod_sum += v;
        prod_sq += v * v;
        ++n;
    }
    REQUIRE(n > 1000);
    const double mean = prod_sum / n;
    const double sd = std::sqrt((prod_sq / n - mean * mean) / n);
    CHECK(std::abs(mean) <= 3.0 * sd);
}

TEST_CASE("tau_max policies") {
    ChannelParams p = indoor_office_los();
    p.tau_max.fixed_ns = 42.0;
    CHECK(resolve_tau_max(p) == 42.0);

    p.tau_max.fixed_ns = 0.0;
    const double t995 = resolve_tau_max(p);
    CHECK(t995 > 10.0);
    CHECK(t995 <= 300.0);
    // a stricter energy fraction cannot shorten the response
    ChannelParams p2 = p;
    p2.tau_max.energy_fraction = 0.999;
    CHECK(resolve_tau_max(p2) >= t995);
}

TEST_CASE("parameter validation") {
    ChannelParams p = residential_los();
    p.mix_beta = 1.5;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = residential_los();
    p.nakagami_m_mean = 0.2;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = residential_los();
    p.intra_decay = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}
