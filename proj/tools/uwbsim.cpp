#include "uwb/analytic.hpp"
#include "uwb/config.hpp"
#include "uwb/csv.hpp"
#include "uwb/montecarlo.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <string>

namespace {

struct CliArgs {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0; // 0: take the config value
    std::string dump_what;
};

uwb::RunOptions effective_options(const uwb::ExperimentFile& file, const CliArgs& args,
                                  const std::string& default_out) {
    uwb::RunOptions opts = uwb::build_run_options(file);
    if (args.seed_set) opts.seed = args.seed;
    if (!args.out.empty()) opts.out = args.out;
    if (opts.out.empty()) opts.out = default_out;
    if (args.threads > 0) opts.threads = args.threads;
    return opts;
}

int cmd_sweep(const CliArgs& args) {
    const uwb::ExperimentFile file = uwb::ExperimentFile::load(args.config_path);
    const uwb::RunOptions opts = effective_options(file, args, "sweep.csv");
    uwb::SimConfig cfg = uwb::build_sim_config(file);
    cfg.master_seed = opts.seed;
    if (cfg.ebn0_grid_db.empty()) std::fprintf(stderr, "uwbsim: empty sweep grid, writing header only\n");

    const auto on_point = [](const uwb::BerPoint& p) {
        for (const auto& r : p.receivers)
            std::fprintf(stderr, "uwbsim: ebn0=%g dB %s ber=%.4g (%" PRIu64 "/%" PRIu64 ")\n",
                         p.ebn0_db, r.receiver.c_str(), r.ber, r.errors, r.bits);
    };
    const uwb::BerCurve curve = uwb::run_sweep(cfg, opts.threads, on_point);

    std::string content = uwb::csv_header("sweep", opts.seed, file.hash());
    content += uwb::ber_curve_csv(curve);
    uwb::write_file_atomic(opts.out, content);
    std::fprintf(stderr, "uwbsim: wrote %s\n", opts.out.c_str());
    return 0;
}

int cmd_analytic(const CliArgs& args) {
    const uwb::ExperimentFile file = uwb::ExperimentFile::load(args.config_path);
    const uwb::RunOptions opts = effective_options(file, args, "analytic.csv");
    const uwb::AnalyticConfig cfg = uwb::build_analytic_config(file);

    const uwb::SinrBreakdown analytic = uwb::analytic_breakdown(cfg);
    const bool with_empirical = file.get_bool("analytic", "compare_empirical", false);
    uwb::SinrBreakdown empirical;
    if (with_empirical) {
        const int trials = static_cast<int>(file.get_int("analytic", "empirical_trials", 20000));
        std::fprintf(stderr, "uwbsim: running decomposition oracle, %d trials\n", trials);
        empirical = uwb::estimate_variance_decomposition(cfg, opts.seed, trials);
    }

    std::string content = uwb::csv_header("analytic", opts.seed, file.hash());
    content += "term,analytic_value,empirical_value,ratio\n";
    const auto row = [&](const char* term, double a, double e) {
        content += term;
        content += ',';
        content += uwb::format_double(a);
        content += ',';
        if (with_empirical) {
            content += uwb::format_double(e);
            content += ',';
            if (e != 0.0) content += uwb::format_double(a / e);
        } else {
            content += ',';
        }
        content += '\n';
    };
    row("eb", analytic.eb, empirical.eb);
    row("sigma_n2", analytic.sigma_n2, empirical.sigma_n2);
    row("sigma_iasi2", analytic.sigma_iasi2, empirical.sigma_iasi2);
    row("sigma_isi2", analytic.sigma_isi2, empirical.sigma_isi2);
    row("sigma_mui2", analytic.sigma_mui2, empirical.sigma_mui2);
    const auto [sinr, ber] = uwb::sinr_and_ber(analytic);
    if (with_empirical) {
        const auto [esinr, eber] = uwb::sinr_and_ber(empirical);
        row("sinr", sinr, esinr);
        row("ber", ber, eber);
    } else {
        row("sinr", sinr, 0.0);
        row("ber", ber, 0.0);
    }
    uwb::write_file_atomic(opts.out, content);
    std::fprintf(stderr, "uwbsim: wrote %s\n", opts.out.c_str());
    return 0;
}

int cmd_dump(const CliArgs& args) {
    const uwb::ExperimentFile file = uwb::ExperimentFile::load(args.config_path);
    const uwb::RunOptions opts = effective_options(file, args, "dump_" + args.dump_what + ".csv");

    std::string content = uwb::csv_header("dump " + args.dump_what, opts.seed, file.hash());
    if (args.dump_what == "pulse") {
        const uwb::SampledWaveform p = uwb::make_pulse(uwb::build_pulse_spec(file));
        content += "time_s,amplitude\n";
        for (std::size_t k = 0; k < p.size(); ++k)
            content += uwb::format_double(p.time_at(k)) + "," + uwb::format_double(p.samples[k]) + "\n";
    } else if (args.dump_what == "channel") {
        const uwb::ChannelModel m = uwb::build_channel_model(file);
        uwb::ChannelRealization ch;
        if (m.kind == uwb::ChannelModel::Kind::delta) {
            ch.taps.push_back({0.0, 1.0});
        } else {
            uwb::Rng rng = uwb::make_rng(opts.seed, 0);
            ch = uwb::realize_channel(m.params, rng);
        }
        content += "delay_ns,amplitude\n";
        for (const auto& t : ch.taps)
            content += uwb::format_double(t.delay_ns) + "," + uwb::format_double(t.amplitude) + "\n";
    } else if (args.dump_what == "template") {
        const uwb::FrameConfig frame = uwb::build_frame_config(file);
        const uwb::SampledWaveform pulse = uwb::make_pulse(uwb::build_pulse_spec(file));
        uwb::TemplateKind kind = uwb::TemplateKind::conventional;
        double keep = 1.0;
        const std::string req = file.get_string("analytic", "template", "conventional");
        if (req == "partial") {
            kind = uwb::TemplateKind::partial;
            keep = file.get_double("analytic", "keep_fraction", 0.5);
        } else if (req != "conventional") {
            throw uwb::ConfigError("analytic.template must be 'conventional' or 'partial'");
        }
        uwb::Rng rng = uwb::make_rng(opts.seed, 0);
        const auto code = uwb::generate_th_code(frame.hop_slots, frame.pulses_per_bit, rng);
        const uwb::Template t = uwb::build_template(kind, keep, frame, code, pulse, 0.0, 1);
        content += "time_s,amplitude\n";
        for (std::size_t k = 0; k < t.waveform.size(); ++k)
            content += uwb::format_double(t.waveform.time_at(k)) + "," +
                       uwb::format_double(t.waveform.samples[k]) + "\n";
    } else {
        throw uwb::ConfigError("unknown dump object '" + args.dump_what +
                               "' (expected pulse, channel or template)");
    }
    uwb::write_file_atomic(opts.out, content);
    std::fprintf(stderr, "uwbsim: wrote %s\n", opts.out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TH-BPSK impulse-radio UWB link simulator"};
    app.require_subcommand(1);
    CliArgs args;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "experiment config file")->required();
        sub->add_option("--out", args.out, "output CSV path");
        sub->add_option("--seed", args.seed, "master seed (overrides the config)")
            ->each([&](const std::string&) { args.seed_set = true; });
        sub->add_option("--threads", args.threads, "worker threads");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "run the Monte Carlo BER sweep");
    add_common(sweep);
    CLI::App* analytic = app.add_subcommand("analytic", "evaluate the SINR breakdown");
    add_common(analytic);
    CLI::App* dump = app.add_subcommand("dump", "dump an object as CSV");
    dump->add_option("what", args.dump_what, "pulse, channel or template")->required();
    add_common(dump);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return cmd_sweep(args);
        if (analytic->parsed()) return cmd_analytic(args);
        if (dump->parsed()) return cmd_dump(args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "uwbsim: error: %s\n", e.what());
        return 1;
    }
    return 1;
}
