#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "designer.hpp"
#include "link_sim.hpp"
#include "ofdm_baseline.hpp"

namespace oi {

// Experiment runner configuration: system parameters plus sweep axes,
// realization counts and seeding. Loaded from JSON; CLI flags override
// individual fields.
struct ExperimentConfig {
    SystemParams base;       // lambda and r_min hold the single-cell values
    double err_var = 0.0;    // estimation-error variance on the unit-power channel
    int p_paths = 3;
    int l_max = 6;           // maximum delay tap; also the OFDM CP length
    double speed_kmph = 300.0;

    std::vector<double> sweep_r_min{0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0};
    std::vector<double> sweep_lambda{0.0, 0.1, 0.5};
    std::vector<double> sweep_err_var{0.0, 0.01, 0.05};
    std::vector<double> sweep_speed{30.0, 150.0, 300.0};

    int realizations = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    std::int64_t trials = 100000;
    std::string waveform = "otfs";  // otfs | ofdm | both
    std::string channel_file;       // optional channel JSON for replay

    void validate() const;
    std::string to_json() const;               // full round-trip form
    static ExperimentConfig from_json(const std::string& text);
    std::string canonical() const;             // hash input (threads excluded)
    std::uint64_t config_hash() const;
};

// Effective TF channel: sampled taps synthesized on the grid, then path
// loss + rx gain folded in as one amplitude scale (the error variance
// scales with its square so the configured value keeps its meaning
// relative to the unit-power channel).
DDChannel sample_channel(const ExperimentConfig& cfg, double speed_kmph,
                         std::uint64_t stream);
TFChannel effective_tf_channel(const ExperimentConfig& cfg, const DDChannel& dd);

struct RunResult {
    std::string payload;
    std::string kind;  // "json" or "csv"
    bool ok = true;
};

// Subcommand backends.
RunResult run_design(const ExperimentConfig& cfg);
RunResult run_sweep(const ExperimentConfig& cfg);
RunResult run_validate(const ExperimentConfig& cfg);
RunResult run_compare(const ExperimentConfig& cfg);
RunResult run_channel_gen(const ExperimentConfig& cfg);

// Structured forms used by the CSV emitters and by the acceptance suite.
struct SweepRow {
    double r_min = 0.0, lambda = 0.0, err_var = 0.0, speed = 0.0;
    int realization = 0;
    std::string waveform;
    double i_out = 0.0, rate = 0.0;
    std::string status;  // ok | infeasible | error
};
std::vector<SweepRow> run_sweep_rows(const ExperimentConfig& cfg);

struct CompareRow {
    double speed = 0.0;
    int realization = 0;
    double otfs_iout = 0.0, otfs_rate = 0.0;
    double ofdm_iout = 0.0, ofdm_rate = 0.0;
    std::string status;
};
std::vector<CompareRow> run_compare_rows(const ExperimentConfig& cfg);

std::string design_solution_to_json(const DesignSolution& sol);

}  // namespace oi
