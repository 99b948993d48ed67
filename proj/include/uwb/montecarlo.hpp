#pragma once

#include "uwb/channel.hpp"
#include "uwb/pulse.hpp"
#include "uwb/txrx.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace uwb {

// Channel used for a simulation run. `delta` is the single-tap identity channel used
// by the AWGN baselines.
struct ChannelModel {
    enum class Kind { delta, ieee802154a };
    Kind kind = Kind::ieee802154a;
    ChannelParams params;
};

struct ReceiverSpec {
    TemplateKind kind = TemplateKind::conventional;
    double keep_fraction = 1.0;
    std::string label() const;
};

struct SimConfig {
    ChannelModel channel;
    FrameConfig frame;
    PulseSpec pulse;
    int n_users = 1; // desired user plus interferers
    std::vector<double> ebn0_grid_db;
    std::vector<ReceiverSpec> receivers;
    std::uint64_t max_bits = 1'000'000;
    std::uint64_t min_errors = 100;
    int block_bits = 100; // bits per fading block (channel redraw granularity)
    std::uint64_t master_seed = 0;
};

void validate(const SimConfig& c);

struct ReceiverEstimate {
    std::string receiver;
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
    double ber = 0.0;
    double ci95 = 0.0; // Wilson 95% half-width
};

struct BerPoint {
    double ebn0_db = 0.0;
    std::vector<ReceiverEstimate> receivers;
};

using BerCurve = std::vector<BerPoint>;

// Wilson score interval half-width for errors/bits at 95% confidence.
double wilson_halfwidth95(std::uint64_t errors, std::uint64_t bits);

// Simulate one grid point: paired trials over fading blocks until every receiver has
// min_errors errors or max_bits bits are spent. Deterministic in (config, point_index)
// for any thread count.
BerPoint run_ber_point(const SimConfig& c, double ebn0_db, int point_index, int threads = 1);

// Map run_ber_point over the grid. on_point, when set, observes each finished point.
BerCurve run_sweep(const SimConfig& c, int threads = 1,
                   const std::function<void(const BerPoint&)>& on_point = {});

// CSV body (no comment header): ebn0_db,receiver_kind,ber,ci95,bits,errors rows.
std::string ber_curve_csv(const BerCurve& curve);

} // namespace uwb
