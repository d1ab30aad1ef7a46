// Experiment runner for the otfsidet library. Subcommands map one-to-one
// onto the C API runners; --config loads a JSON file, individual flags
// override it. Output goes to --out or stdout.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "otfsidet.h"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::int64_t> trials;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file");
    cmd->add_option("--out", args.out_path, "output path (default: stdout)");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--threads", args.threads, "worker thread count");
    cmd->add_option("--trials", args.trials, "Monte-Carlo trial count");
}

int fail(oi_status st, const char* what) {
    std::cerr << "otfsidet_cli: " << what << ": " << oi_status_message(st);
    const char* detail = oi_last_error();
    if (detail && detail[0]) std::cerr << " (" << detail << ")";
    std::cerr << "\n";
    switch (st) {
        case OI_E_CONFIG:
        case OI_E_PARSE:
        case OI_E_INVALID_ARG: return 2;
        case OI_E_INFEASIBLE: return 3;
        case OI_E_VALIDATION: return 4;
        default: return 1;
    }
}

int run(const std::string& name, const CommonArgs& args,
        oi_status (*runner)(const oi_config*, oi_result**)) {
    oi_config* cfg = nullptr;
    oi_status st;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) {
            std::cerr << "otfsidet_cli: cannot open " << args.config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        st = oi_config_from_json(ss.str().c_str(), &cfg);
    } else {
        st = oi_config_create(&cfg);
    }
    if (st != OI_OK) return fail(st, "config");

    if (args.seed) oi_config_set_seed(cfg, *args.seed);
    if (args.threads) oi_config_set_threads(cfg, *args.threads);
    if (args.trials) oi_config_set_trials(cfg, *args.trials);

    oi_result* res = nullptr;
    st = runner(cfg, &res);
    oi_config_free(cfg);
    if (!res) return fail(st, name.c_str());

    int rc = 0;
    if (st != OI_OK) rc = fail(st, name.c_str());

    const char* payload = oi_result_payload(res);
    if (args.out_path.empty()) {
        std::fputs(payload, stdout);
    } else {
        std::ofstream out(args.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "otfsidet_cli: cannot write " << args.out_path << "\n";
            oi_result_free(res);
            return 1;
        }
        out << payload;
    }
    oi_result_free(res);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay-Doppler data+energy waveform designer and link simulator"};
    app.set_version_flag("--version", oi_version());
    app.require_subcommand(1);

    CommonArgs design_args, sweep_args, validate_args, compare_args, chan_args;
    auto* design =
        app.add_subcommand("design", "design one waveform and emit the solution JSON");
    add_common(design, design_args);
    auto* sweep =
        app.add_subcommand("sweep", "sweep r_min/lambda/err_var/speed axes to CSV");
    add_common(sweep, sweep_args);
    auto* validate = app.add_subcommand(
        "validate", "check closed-form moments and rate against simulation");
    add_common(validate, validate_args);
    auto* compare =
        app.add_subcommand("compare", "compare waveforms per speed to CSV");
    add_common(compare, compare_args);
    auto* changen =
        app.add_subcommand("channel-gen", "sample channel realizations to JSON");
    add_common(changen, chan_args);

    CLI11_PARSE(app, argc, argv);

    if (design->parsed()) return run("design", design_args, oi_run_design);
    if (sweep->parsed()) return run("sweep", sweep_args, oi_run_sweep);
    if (validate->parsed()) return run("validate", validate_args, oi_run_validate);
    if (compare->parsed()) return run("compare", compare_args, oi_run_compare);
    if (changen->parsed()) return run("channel-gen", chan_args, oi_run_channel_gen);
    return 2;
}
