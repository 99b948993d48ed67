#include "uwb/config.hpp"

#include "uwb/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace uwb {

namespace {

struct SchemaSection {
    const char* name;
    std::vector<const char*> keys;
};

const std::vector<SchemaSection>& schema() {
    static const std::vector<SchemaSection> s = {
        {"channel",
         {"preset", "mean_clusters", "cluster_rate", "ray_rate1", "ray_rate2", "mix_beta",
          "cluster_decay_ns", "intra_decay_ns", "intra_decay_slope", "cluster_shadowing_db",
          "nakagami_m_mean", "nakagami_m_sigma", "tau_max_ns", "tau_max_energy_fraction"}},
        {"pulse", {"order", "duration_ns", "samples_per_pulse", "shaping_tau_ns"}},
        {"frame", {"bit_rate_mbps", "pulses_per_bit", "hop_slots", "hop_slot_ns"}},
        {"users", {"count"}},
        {"receivers", {"conventional", "partial_keep"}},
        {"sweep", {"ebn0_db", "max_bits", "min_errors", "block_bits"}},
        {"analytic",
         {"ebn0_db", "template", "keep_fraction", "f_omega0", "quad_tol", "compare_empirical",
          "empirical_trials"}},
        {"run", {"seed", "out", "threads"}},
    };
    return s;
}

bool schema_has(const std::string& section, const std::string& key) {
    for (const auto& s : schema()) {
        if (section != s.name) continue;
        if (key.empty()) return true; // section existence check
        return std::any_of(s.keys.begin(), s.keys.end(),
                           [&](const char* k) { return key == k; });
    }
    return false;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

ExperimentFile ExperimentFile::parse(const std::string& text) {
    ExperimentFile f;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema_has(section, ""))
                throw ConfigError("unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!schema_has(section, key))
            throw ConfigError("unknown key '" + section + "." + key + "'");
        if (f.values_[section].count(key))
            throw ConfigError("duplicate key '" + section + "." + key + "'");
        if (value.empty())
            throw ConfigError("empty value for '" + section + "." + key + "'");
        f.values_[section][key] = value;
    }
    return f;
}

ExperimentFile ExperimentFile::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

std::string ExperimentFile::serialize() const {
    std::string out;
    for (const auto& sec : schema()) {
        const auto it = values_.find(sec.name);
        if (it == values_.end() || it->second.empty()) continue;
        out += '[';
        out += sec.name;
        out += "]\n";
        for (const char* key : sec.keys) {
            const auto kit = it->second.find(key);
            if (kit == it->second.end()) continue;
            out += key;
            out += " = ";
            out += kit->second;
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

std::uint64_t ExperimentFile::hash() const { return fnv1a64(serialize()); }

bool ExperimentFile::has(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section);
    return it != values_.end() && it->second.count(key) > 0;
}

std::string ExperimentFile::get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) const {
    const auto it = values_.find(section);
    if (it == values_.end()) return fallback;
    const auto kit = it->second.find(key);
    return kit == it->second.end() ? fallback : kit->second;
}

double ExperimentFile::get_double(const std::string& section, const std::string& key,
                                  double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(d))
        throw ConfigError("bad numeric value for '" + section + "." + key + "': " + v);
    return d;
}

long long ExperimentFile::get_int(const std::string& section, const std::string& key,
                                  long long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    char* end = nullptr;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("bad integer value for '" + section + "." + key + "': " + v);
    return i;
}

bool ExperimentFile::get_bool(const std::string& section, const std::string& key,
                              bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError("bad boolean value for '" + section + "." + key + "': " + v);
}

std::vector<double> ExperimentFile::get_double_list(const std::string& section,
                                                    const std::string& key) const {
    std::vector<double> out;
    if (!has(section, key)) return out;
    const std::string v = get_string(section, key, "");
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("empty element in list '" + section + "." + key + "'");
        char* end = nullptr;
        const double d = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0' || !std::isfinite(d))
            throw ConfigError("bad list value for '" + section + "." + key + "': " + item);
        out.push_back(d);
    }
    return out;
}

void ExperimentFile::set(const std::string& section, const std::string& key,
                         const std::string& value) {
    if (!schema_has(section, key))
        throw ConfigError("unknown key '" + section + "." + key + "'");
    values_[section][key] = value;
}

ChannelModel build_channel_model(const ExperimentFile& f) {
    ChannelModel m;
    const std::string preset = f.get_string("channel", "preset", "");
    if (preset.empty()) throw ConfigError("channel.preset is required");
    if (preset == "delta") {
        m.kind = ChannelModel::Kind::delta;
        static const std::array<const char*, 13> overrides = {
            "mean_clusters", "cluster_rate", "ray_rate1", "ray_rate2", "mix_beta",
            "cluster_decay_ns", "intra_decay_ns", "intra_decay_slope", "cluster_shadowing_db",
            "nakagami_m_mean", "nakagami_m_sigma", "tau_max_ns", "tau_max_energy_fraction"};
        for (const char* k : overrides)
            if (f.has("channel", k))
                throw ConfigError(std::string("channel.") + k + " does not apply to the delta preset");
        return m;
    }
    m.kind = ChannelModel::Kind::ieee802154a;
    if (preset == "residential_los")
        m.params = residential_los();
    else if (preset == "indoor_office_los")
        m.params = indoor_office_los();
    else
        throw ConfigError("unknown channel.preset '" + preset + "'");
    auto& p = m.params;
    p.mean_clusters = f.get_double("channel", "mean_clusters", p.mean_clusters);
    p.cluster_rate = f.get_double("channel", "cluster_rate", p.cluster_rate);
    p.ray_rate1 = f.get_double("channel", "ray_rate1", p.ray_rate1);
    p.ray_rate2 = f.get_double("channel", "ray_rate2", p.ray_rate2);
    p.mix_beta = f.get_double("channel", "mix_beta", p.mix_beta);
    p.cluster_decay = f.get_double("channel", "cluster_decay_ns", p.cluster_decay);
    p.intra_decay = f.get_double("channel", "intra_decay_ns", p.intra_decay);
    p.intra_decay_slope = f.get_double("channel", "intra_decay_slope", p.intra_decay_slope);
    p.cluster_shadowing_db = f.get_double("channel", "cluster_shadowing_db", p.cluster_shadowing_db);
    p.nakagami_m_mean = f.get_double("channel", "nakagami_m_mean", p.nakagami_m_mean);
    p.nakagami_m_sigma = f.get_double("channel", "nakagami_m_sigma", p.nakagami_m_sigma);
    p.tau_max.fixed_ns = f.get_double("channel", "tau_max_ns", p.tau_max.fixed_ns);
    p.tau_max.energy_fraction =
        f.get_double("channel", "tau_max_energy_fraction", p.tau_max.energy_fraction);
    validate(p);
    return m;
}

PulseSpec build_pulse_spec(const ExperimentFile& f) {
    PulseSpec s;
    s.order = static_cast<int>(f.get_int("pulse", "order", 2));
    s.duration = f.get_double("pulse", "duration_ns", 0.5) * 1e-9;
    const long long spp = f.get_int("pulse", "samples_per_pulse", 100);
    if (spp < 1) throw ConfigError("pulse.samples_per_pulse must be >= 1");
    s.sample_interval = s.duration / static_cast<double>(spp);
    s.shaping_tau = f.get_double("pulse", "shaping_tau_ns", 0.0) * 1e-9;
    return s;
}

FrameConfig build_frame_config(const ExperimentFile& f) {
    const double rb = f.get_double("frame", "bit_rate_mbps", 15.0) * 1e6;
    const int ns = static_cast<int>(f.get_int("frame", "pulses_per_bit", 1));
    const int nh = static_cast<int>(f.get_int("frame", "hop_slots", 16));
    const double tc = f.get_double("frame", "hop_slot_ns", 0.5) * 1e-9;
    return make_frame_config(rb, ns, tc, nh);
}

std::vector<ReceiverSpec> build_receivers(const ExperimentFile& f) {
    std::vector<ReceiverSpec> rx;
    if (f.get_bool("receivers", "conventional", true))
        rx.push_back({TemplateKind::conventional, 1.0});
    for (double keep : f.get_double_list("receivers", "partial_keep")) {
        if (!(keep > 0.0) || keep > 1.0)
            throw ConfigError("receivers.partial_keep entries must be in (0, 1]");
        rx.push_back({TemplateKind::partial, keep});
    }
    if (rx.empty()) throw ConfigError("no receivers enabled");
    return rx;
}

SimConfig build_sim_config(const ExperimentFile& f) {
    SimConfig c;
    c.channel = build_channel_model(f);
    c.frame = build_frame_config(f);
    c.pulse = build_pulse_spec(f);
    c.n_users = static_cast<int>(f.get_int("users", "count", 1));
    c.ebn0_grid_db = f.get_double_list("sweep", "ebn0_db");
    c.receivers = build_receivers(f);
    c.max_bits = static_cast<std::uint64_t>(f.get_int("sweep", "max_bits", 1'000'000));
    c.min_errors = static_cast<std::uint64_t>(f.get_int("sweep", "min_errors", 100));
    c.block_bits = static_cast<int>(f.get_int("sweep", "block_bits", 100));
    c.master_seed = static_cast<std::uint64_t>(f.get_int("run", "seed", 0));
    validate(c);
    return c;
}

AnalyticConfig build_analytic_config(const ExperimentFile& f) {
    AnalyticConfig c;
    const ChannelModel m = build_channel_model(f);
    if (m.kind != ChannelModel::Kind::ieee802154a)
        throw ConfigError("analytic evaluation needs an ieee802154a channel preset");
    c.channel = m.params;
    c.frame = build_frame_config(f);
    c.pulse = build_pulse_spec(f);
    const long long users = f.get_int("users", "count", 1);
    if (users < 1) throw ConfigError("users.count must be >= 1");
    c.n_interferers = static_cast<int>(users - 1);
    const double ebn0_db = f.get_double("analytic", "ebn0_db", 10.0);
    c.n0 = static_cast<double>(c.frame.pulses_per_bit) / std::pow(10.0, ebn0_db / 10.0);
    const std::string kind = f.get_string("analytic", "template", "conventional");
    if (kind == "conventional") {
        c.template_kind = TemplateKind::conventional;
        c.keep_fraction = 1.0;
    } else if (kind == "partial") {
        c.template_kind = TemplateKind::partial;
        c.keep_fraction = f.get_double("analytic", "keep_fraction", 0.5);
    } else {
        throw ConfigError("analytic.template must be 'conventional' or 'partial'");
    }
    c.f_omega0 = f.get_double("analytic", "f_omega0", 1.0);
    c.quad_tol = f.get_double("analytic", "quad_tol", 1e-4);
    validate(c);
    return c;
}

RunOptions build_run_options(const ExperimentFile& f) {
    RunOptions o;
    o.seed = static_cast<std::uint64_t>(f.get_int("run", "seed", 0));
    o.out = f.get_string("run", "out", "");
    o.threads = static_cast<int>(f.get_int("run", "threads", 1));
    if (o.threads < 1) throw ConfigError("run.threads must be >= 1");
    return o;
}

} // namespace uwb
