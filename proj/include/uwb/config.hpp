#pragma once

#include "uwb/analytic.hpp"
#include "uwb/montecarlo.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed experiment file: sectioned key = value text. Only keys from the fixed schema
// are accepted; unknown sections or keys are reported by name. Values are kept as the
// raw strings, so serialize(parse(x)) is idempotent.
class ExperimentFile {
public:
    static ExperimentFile parse(const std::string& text);
    static ExperimentFile load(const std::string& path);

    // canonical text: schema section/key order, `key = value` lines
    std::string serialize() const;
    std::uint64_t hash() const;

    bool has(const std::string& section, const std::string& key) const;
    // typed getters; throw ConfigError naming section.key on bad values
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

// Experiment assembly from a parsed file (defaults filled in, units converted from the
// config's ns / Mbps conventions to SI).
ChannelModel build_channel_model(const ExperimentFile& f);
PulseSpec build_pulse_spec(const ExperimentFile& f);
FrameConfig build_frame_config(const ExperimentFile& f);
std::vector<ReceiverSpec> build_receivers(const ExperimentFile& f);
SimConfig build_sim_config(const ExperimentFile& f);
AnalyticConfig build_analytic_config(const ExperimentFile& f);

struct RunOptions {
    std::uint64_t seed = 0;
    std::string out;
    int threads = 1;
};
RunOptions build_run_options(const ExperimentFile& f);

} // namespace uwb
