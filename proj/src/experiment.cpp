#include "experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "thread_pool.hpp"
#include "units.hpp"

namespace oi {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

nlohmann::json meta_json(const ExperimentConfig& cfg) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(cfg.config_hash()));
    return nlohmann::json{{"schema_version", 1},
                          {"version", kVersion},
                          {"seed", cfg.seed},
                          {"config_hash", hash}};
}

std::string csv_header(const ExperimentConfig& cfg) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(cfg.config_hash()));
    std::ostringstream out;
    out << "# version=" << kVersion << "\n";
    out << "# seed=" << cfg.seed << "\n";
    out << "# config_hash=" << hash << "\n";
    return out.str();
}

nlohmann::json grid_json_obj(const ComplexGrid& g) {
    return nlohmann::json::parse(grid_to_json(g));
}

nlohmann::json real_grid_rows(const RealGrid& g) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < g.dims.n_slots; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < g.dims.m_subcarriers; ++j) row.push_back(g.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

int doppler_bound_for(const ExperimentConfig& cfg, double speed_kmph) {
    if (speed_kmph <= 0.0) return 0;
    return doppler_index_bound(cfg.base.fc_hz, kmph_to_mps(speed_kmph),
                               cfg.base.dims.n_slots, cfg.base.df_hz);
}

DDChannel load_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open channel file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return channel_from_json(ss.str());
}

DesignerOptions default_designer_options(const ExperimentConfig& cfg) {
    DesignerOptions opt;
    (void)cfg;
    return opt;
}

}  // namespace

void ExperimentConfig::validate() const {
    base.validate();
    if (err_var < 0.0) throw std::invalid_argument("config: err_var < 0");
    if (p_paths < 1) throw std::invalid_argument("config: p_paths < 1");
    if (l_max < 1) throw std::invalid_argument("config: l_max < 1");
    if (p_paths > l_max + 1)
        throw std::invalid_argument("config: p_paths > l_max + 1 cannot have distinct delays");
    if (speed_kmph < 0.0) throw std::invalid_argument("config: speed < 0");
    if (realizations < 1) throw std::invalid_argument("config: realizations < 1");
    if (trials < 1) throw std::invalid_argument("config: trials < 1");
    if (sweep_r_min.empty() || sweep_lambda.empty() || sweep_err_var.empty() ||
        sweep_speed.empty())
        throw std::invalid_argument("config: sweep axes must be nonempty");
    if (waveform != "otfs" && waveform != "ofdm" && waveform != "both")
        throw std::invalid_argument("config: waveform must be otfs|ofdm|both");
    for (double v : sweep_err_var)
        if (v < 0.0) throw std::invalid_argument("config: sweep err_var < 0");
    for (double v : sweep_r_min)
        if (v < 0.0) throw std::invalid_argument("config: sweep r_min < 0");
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["n_slots"] = base.dims.n_slots;
    j["m_subcarriers"] = base.dims.m_subcarriers;
    j["df_hz"] = base.df_hz;
    j["fc_hz"] = base.fc_hz;
    j["p_tx_dbm"] = watts_to_dbm(base.p_tx_w);
    j["p_pilot_dbm"] = watts_to_dbm(base.p_pilot_w);
    j["p_peak_w"] = base.p_peak_w;
    j["p_noise_dbm"] = watts_to_dbm(base.p_noise_w);
    j["lambda"] = base.lambda;
    j["r_min"] = base.r_min;
    j["err_var"] = err_var;
    j["k2"] = base.circuit.k2;
    j["k4"] = base.circuit.k4;
    j["r_ohm"] = base.circuit.r_ohm;
    j["rx_gain_db"] = base.rx_gain_db;
    j["path_loss_db"] = base.path_loss_db;
    j["p_paths"] = p_paths;
    j["l_max"] = l_max;
    j["speed_kmph"] = speed_kmph;
    j["sweep_r_min"] = sweep_r_min;
    j["sweep_lambda"] = sweep_lambda;
    j["sweep_err_var"] = sweep_err_var;
    j["sweep_speed_kmph"] = sweep_speed;
    j["realizations"] = realizations;
    j["seed"] = seed;
    j["trials"] = trials;
    j["waveform"] = waveform;
    j["channel_file"] = channel_file;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::remove_reference_t<decltype(dst)>>();
    };
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("config: unsupported schema_version");
    get("n_slots", cfg.base.dims.n_slots);
    get("m_subcarriers", cfg.base.dims.m_subcarriers);
    get("df_hz", cfg.base.df_hz);
    get("fc_hz", cfg.base.fc_hz);
    if (j.contains("p_tx_dbm")) cfg.base.p_tx_w = dbm_to_watts(j.at("p_tx_dbm").get<double>());
    if (j.contains("p_pilot_dbm"))
        cfg.base.p_pilot_w = dbm_to_watts(j.at("p_pilot_dbm").get<double>());
    get("p_peak_w", cfg.base.p_peak_w);
    if (j.contains("p_noise_dbm"))
        cfg.base.p_noise_w = dbm_to_watts(j.at("p_noise_dbm").get<double>());
    get("lambda", cfg.base.lambda);
    get("r_min", cfg.base.r_min);
    get("err_var", cfg.err_var);
    get("k2", cfg.base.circuit.k2);
    get("k4", cfg.base.circuit.k4);
    get("r_ohm", cfg.base.circuit.r_ohm);
    get("rx_gain_db", cfg.base.rx_gain_db);
    get("path_loss_db", cfg.base.path_loss_db);
    get("p_paths", cfg.p_paths);
    get("l_max", cfg.l_max);
    get("speed_kmph", cfg.speed_kmph);
    get("sweep_r_min", cfg.sweep_r_min);
    get("sweep_lambda", cfg.sweep_lambda);
    get("sweep_err_var", cfg.sweep_err_var);
    get("sweep_speed_kmph", cfg.sweep_speed);
    get("realizations", cfg.realizations);
    get("seed", cfg.seed);
    get("trials", cfg.trials);
    get("waveform", cfg.waveform);
    get("channel_file", cfg.channel_file);
    return cfg;
}

std::string ExperimentConfig::canonical() const {
    // threads excluded: outputs are thread-count invariant
    return to_json();
}

std::uint64_t ExperimentConfig::config_hash() const {
    const std::string s = canonical();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DDChannel sample_channel(const ExperimentConfig& cfg, double speed_kmph,
                         std::uint64_t stream) {
    Rng rng = Rng::derive(cfg.seed, 0x100000ULL + stream);
    const int k_max = doppler_bound_for(cfg, speed_kmph);
    return sample_dd_channel(rng, cfg.p_paths, cfg.l_max, k_max, cfg.err_var);
}

TFChannel effective_tf_channel(const ExperimentConfig& cfg, const DDChannel& dd) {
    TFChannel tf = tf_from_dd(dd, cfg.base.dims);
    const double g = cfg.base.channel_amp_scale();
    for (auto& z : tf.h_est.v) z *= g;
    tf.err_var = dd.err_var_tf * g * g;
    return tf;
}

std::string design_solution_to_json(const DesignSolution& sol) {
    nlohmann::json j;
    j["a_d"] = real_grid_rows(sol.vars.a_d);
    j["a_e"] = real_grid_rows(sol.vars.a_e);
    j["rho"] = sol.vars.rho;
    j["rho_bar"] = sol.vars.rho_bar;
    j["x_d_dd"] = grid_json_obj(sol.x_d_dd);
    j["x_e_dd"] = grid_json_obj(sol.x_e_dd);
    j["i_out"] = sol.i_out;
    j["rate"] = {{"per_slot", sol.rate.per_slot}, {"average", sol.rate.average}};
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& it : sol.trace)
        trace.push_back({{"i_out", it.i_out},
                         {"gp_status", to_string(it.gp_status)},
                         {"newton_steps", it.newton_steps}});
    j["trace"] = std::move(trace);
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;

    double pd = 0.0, pe = 0.0;
    for (double a : sol.vars.a_d.v) pd += a * a;
    for (double a : sol.vars.a_e.v) pe += a * a;
    const double total = pd + pe;
    j["power_used"] = 0.5 * total;
    j["data_power_fraction"] = total > 0.0 ? pd / total : 0.0;
    j["energy_power_fraction"] = total > 0.0 ? pe / total : 0.0;
    j["energy_only"] = total > 0.0 && pd / total <= 0.01;
    j["data_only"] = total > 0.0 && pe / total <= 0.01;
    return j.dump();
}

RunResult run_design(const ExperimentConfig& cfg) {
    cfg.validate();
    nlohmann::json out;
    out["meta"] = meta_json(cfg);

    DDChannel dd;
    std::uint64_t ch_seed = cfg.seed;
    if (!cfg.channel_file.empty()) {
        dd = load_channel_file(cfg.channel_file);
        dd.err_var_tf = cfg.err_var;
    } else {
        dd = sample_channel(cfg, cfg.speed_kmph, 0);
    }
    out["channel"] = nlohmann::json::parse(channel_to_json(dd, ch_seed));

    RunResult res;
    res.kind = "json";
    const bool ofdm = cfg.waveform == "ofdm";
    out["waveform"] = ofdm ? "ofdm" : "otfs";
    try {
        const TFChannel tf = effective_tf_channel(cfg, dd);
        const DesignSolution sol =
            ofdm ? design_ofdm(tf, cfg.base, cfg.l_max, default_designer_options(cfg))
                 : WaveformDesigner(tf, cfg.base, default_designer_options(cfg)).run();
        out["solution"] = nlohmann::json::parse(design_solution_to_json(sol));
    } catch (const InfeasibleError& e) {
        out["error"] = std::string("infeasible: ") + e.what();
        res.ok = false;
    }
    res.payload = out.dump(2) + "\n";
    return res;
}

std::vector<SweepRow> run_sweep_rows(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Cell {
        double r_min, lambda, err_var, speed;
        int speed_idx;
    };
    std::vector<Cell> cells;
    for (double r : cfg.sweep_r_min)
        for (double l : cfg.sweep_lambda)
            for (double e : cfg.sweep_err_var)
                for (size_t si = 0; si < cfg.sweep_speed.size(); ++si)
                    cells.push_back({r, l, e, cfg.sweep_speed[si], static_cast<int>(si)});

    std::vector<std::string> waveforms;
    if (cfg.waveform == "otfs" || cfg.waveform == "both") waveforms.push_back("otfs");
    if (cfg.waveform == "ofdm" || cfg.waveform == "both") waveforms.push_back("ofdm");

    const int n_tasks = static_cast<int>(cells.size()) * cfg.realizations;
    std::vector<std::vector<SweepRow>> results(static_cast<size_t>(n_tasks));

    parallel_for(n_tasks, cfg.threads, [&](int task) {
        const int cell_idx = task / cfg.realizations;
        const int realization = task % cfg.realizations;
        const Cell& cell = cells[static_cast<size_t>(cell_idx)];

        ExperimentConfig local = cfg;
        local.base.r_min = cell.r_min;
        local.base.lambda = cell.lambda;
        local.err_var = cell.err_var;
        local.speed_kmph = cell.speed;
        local.threads = 1;

        const std::uint64_t stream =
            static_cast<std::uint64_t>(cell.speed_idx) * 4096ULL +
            static_cast<std::uint64_t>(realization);
        const DDChannel dd = sample_channel(local, cell.speed, stream);
        const TFChannel tf = effective_tf_channel(local, dd);

        for (const auto& wf : waveforms) {
            SweepRow row;
            row.r_min = cell.r_min;
            row.lambda = cell.lambda;
            row.err_var = cell.err_var;
            row.speed = cell.speed;
            row.realization = realization;
            row.waveform = wf;
            try {
                if (wf == "otfs") {
                    WaveformDesigner designer(tf, local.base,
                                              default_designer_options(local));
                    const DesignSolution sol = designer.run();
                    row.i_out = sol.i_out;
                    row.rate = sol.rate.average;
                } else {
                    const DesignSolution sol =
                        design_ofdm(tf, local.base, local.l_max,
                                    default_designer_options(local));
                    McConfig mc;
                    mc.trials = std::max<std::int64_t>(1, local.trials / 10);
                    mc.seed = Rng::derive(local.seed, 0x200000ULL + stream).next_u64();
                    mc.threads = 1;
                    const MobilityEval ev = evaluate_under_mobility(
                        sol.vars, ofdm_design_channel(tf), dd, local.base,
                        local.l_max, mc);
                    row.i_out = ev.i_out;
                    row.rate = ev.rate;
                }
                row.status = "ok";
            } catch (const InfeasibleError&) {
                row.status = "infeasible";
            } catch (const std::exception&) {
                row.status = "error";
            }
            results[static_cast<size_t>(task)].push_back(std::move(row));
        }
    });

    // aggregate means per (cell, waveform) over ok realizations
    std::vector<SweepRow> means;
    for (size_t ci = 0; ci < cells.size(); ++ci) {
        for (const auto& wf : waveforms) {
            SweepRow mean;
            const Cell& cell = cells[ci];
            mean.r_min = cell.r_min;
            mean.lambda = cell.lambda;
            mean.err_var = cell.err_var;
            mean.speed = cell.speed;
            mean.realization = -1;
            mean.waveform = wf;
            int n_ok = 0;
            for (int r = 0; r < cfg.realizations; ++r) {
                const auto& task_rows =
                    results[ci * static_cast<size_t>(cfg.realizations) + static_cast<size_t>(r)];
                for (const auto& row : task_rows) {
                    if (row.waveform == wf && row.status == "ok") {
                        mean.i_out += row.i_out;
                        mean.rate += row.rate;
                        ++n_ok;
                    }
                }
            }
            if (n_ok > 0) {
                mean.i_out /= n_ok;
                mean.rate /= n_ok;
                mean.status = "mean";
            } else {
                mean.status = "mean_empty";
            }
            means.push_back(std::move(mean));
        }
    }

    std::vector<SweepRow> rows;
    for (auto& r : results)
        for (auto& row : r) rows.push_back(std::move(row));
    for (auto& m_row : means) rows.push_back(std::move(m_row));
    return rows;
}

RunResult run_sweep(const ExperimentConfig& cfg) {
    const auto rows = run_sweep_rows(cfg);
    std::ostringstream out;
    out << csv_header(cfg);
    out << "r_min,lambda,err_var,speed_kmph,realization,waveform,i_out,rate,status\n";
    for (const auto& r : rows) {
        out << fmt(r.r_min) << ',' << fmt(r.lambda) << ',' << fmt(r.err_var) << ','
            << fmt(r.speed) << ',' << r.realization << ',' << r.waveform << ','
            << fmt(r.i_out) << ',' << fmt(r.rate) << ',' << r.status << "\n";
    }
    RunResult res;
    res.kind = "csv";
    res.payload = out.str();
    for (const auto& r : rows)
        if (r.status == "error") res.ok = false;
    return res;
}

std::vector<CompareRow> run_compare_rows(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n_speeds = static_cast<int>(cfg.sweep_speed.size());
    const int n_tasks = n_speeds * cfg.realizations;
    std::vector<CompareRow> rows(static_cast<size_t>(n_tasks));

    parallel_for(n_tasks, cfg.threads, [&](int task) {
        const int si = task / cfg.realizations;
        const int realization = task % cfg.realizations;
        const double speed = cfg.sweep_speed[static_cast<size_t>(si)];

        ExperimentConfig local = cfg;
        local.speed_kmph = speed;
        local.threads = 1;

        CompareRow row;
        row.speed = speed;
        row.realization = realization;
        const std::uint64_t stream = static_cast<std::uint64_t>(si) * 4096ULL +
                                     static_cast<std::uint64_t>(realization);
        const DDChannel dd = sample_channel(local, speed, stream);
        const TFChannel tf = effective_tf_channel(local, dd);
        try {
            WaveformDesigner designer(tf, local.base, default_designer_options(local));
            const DesignSolution otfs = designer.run();
            row.otfs_iout = otfs.i_out;
            row.otfs_rate = otfs.rate.average;

            const DesignSolution ofdm =
                design_ofdm(tf, local.base, local.l_max, default_designer_options(local));
            McConfig mc;
            mc.trials = std::max<std::int64_t>(1, local.trials / 10);
            mc.seed = Rng::derive(local.seed, 0x300000ULL + stream).next_u64();
            mc.threads = 1;
            const MobilityEval ev = evaluate_under_mobility(
                ofdm.vars, ofdm_design_channel(tf), dd, local.base, local.l_max, mc);
            row.ofdm_iout = ev.i_out;
            row.ofdm_rate = ev.rate;
            row.status = "ok";
        } catch (const InfeasibleError&) {
            row.status = "infeasible";
        } catch (const std::exception&) {
            row.status = "error";
        }
        rows[static_cast<size_t>(task)] = std::move(row);
    });
    return rows;
}

RunResult run_compare(const ExperimentConfig& cfg) {
    const auto rows = run_compare_rows(cfg);
    std::ostringstream out;
    out << csv_header(cfg);
    out << "speed_kmph,realization,waveform,i_out,rate,status\n";
    for (const auto& r : rows) {
        out << fmt(r.speed) << ',' << r.realization << ",otfs," << fmt(r.otfs_iout)
            << ',' << fmt(r.otfs_rate) << ',' << r.status << "\n";
        out << fmt(r.speed) << ',' << r.realization << ",ofdm," << fmt(r.ofdm_iout)
            << ',' << fmt(r.ofdm_rate) << ',' << r.status << "\n";
    }
    for (size_t si = 0; si < cfg.sweep_speed.size(); ++si) {
        const double speed = cfg.sweep_speed[si];
        double otfs = 0.0, ofdm = 0.0, otfs_rate = 0.0, ofdm_rate = 0.0;
        int n_ok = 0;
        for (const auto& r : rows) {
            if (r.speed == speed && r.status == "ok") {
                otfs += r.otfs_iout;
                ofdm += r.ofdm_iout;
                otfs_rate += r.otfs_rate;
                ofdm_rate += r.ofdm_rate;
                ++n_ok;
            }
        }
        if (n_ok > 0) {
            out << fmt(speed) << ",-1,otfs," << fmt(otfs / n_ok) << ','
                << fmt(otfs_rate / n_ok) << ",mean\n";
            out << fmt(speed) << ",-1,ofdm," << fmt(ofdm / n_ok) << ','
                << fmt(ofdm_rate / n_ok) << ",mean\n";
        }
    }
    RunResult res;
    res.kind = "csv";
    res.payload = out.str();
    for (const auto& r : rows)
        if (r.status == "error") res.ok = false;
    return res;
}

RunResult run_validate(const ExperimentConfig& cfg) {
    cfg.validate();
    nlohmann::json out;
    out["meta"] = meta_json(cfg);
    RunResult res;
    res.kind = "json";

    DDChannel dd;
    if (!cfg.channel_file.empty()) {
        dd = load_channel_file(cfg.channel_file);
        dd.err_var_tf = cfg.err_var;
    } else {
        dd = sample_channel(cfg, cfg.speed_kmph, 0);
    }
    const TFChannel tf = effective_tf_channel(cfg, dd);

    DesignSolution sol;
    try {
        WaveformDesigner designer(tf, cfg.base, default_designer_options(cfg));
        sol = designer.run();
    } catch (const InfeasibleError& e) {
        out["error"] = std::string("infeasible: ") + e.what();
        res.ok = false;
        res.payload = out.dump(2) + "\n";
        return res;
    }

    McConfig mc;
    mc.trials = cfg.trials;
    mc.seed = Rng::derive(cfg.seed, 0x400000ULL).next_u64();
    mc.threads = cfg.threads;
    McReport rep = estimate_moments(sol.vars, tf, mc);
    rep.emp_rate = estimate_rate(sol.vars, tf, cfg.base.lambda, cfg.base.p_noise_w, mc);
    rep.closed_rate = sol.rate.average;

    bool all_pass = true;
    nlohmann::json checks = nlohmann::json::array();
    auto check = [&](const std::string& name, double closed, const Moment& emp,
                     bool assert_it, double rel_floor) {
        nlohmann::json c;
        c["name"] = name;
        c["closed"] = closed;
        c["empirical"] = emp.value;
        c["stderr"] = emp.stderr_;
        const double rel =
            std::abs(emp.value - closed) / std::max(std::abs(closed), 1e-300);
        bool pass;
        if (emp.stderr_ > 0.0) {
            const double n_sig = std::abs(emp.value - closed) / emp.stderr_;
            c["sigmas"] = n_sig;
            pass = n_sig <= 4.0 || rel <= rel_floor;
        } else {
            c["rel_error"] = rel;
            pass = rel <= rel_floor;
        }
        c["pass"] = pass;
        c["asserted"] = assert_it;
        if (assert_it && !pass) all_pass = false;
        checks.push_back(std::move(c));
    };

    check("psi_yd2", rep.closed.yd2, rep.emp_psi_yd2, true, 1e-9);
    check("psi_ye2", rep.closed.ye2, rep.emp_psi_ye2, true, 1e-9);
    check("psi_yd4", rep.closed.yd4, rep.emp_psi_yd4, tf.err_var == 0.0, 1e-9);
    // exact regime for the quartic energy moment is sigma_e = 0; with error
    // the two readings of the error product are reported, not asserted
    check("psi_ye4", rep.closed.ye4, rep.emp_psi_ye4, tf.err_var == 0.0, 1e-9);
    // the ensemble-SINR rate estimator carries a small nonlinear averaging
    // bias, so a relative floor backs up the confidence band
    check("rate", rep.closed_rate, rep.emp_rate, true,
          tf.err_var == 0.0 ? 1e-9 : 5e-3);

    out["checks"] = std::move(checks);
    out["report"] = nlohmann::json::parse(mc_report_to_json(rep));
    out["all_pass"] = all_pass;
    if (rep.ci_warning) out["warning"] = "too few trials for confidence intervals; bands widened";
    res.ok = all_pass;
    res.payload = out.dump(2) + "\n";
    return res;
}

RunResult run_channel_gen(const ExperimentConfig& cfg) {
    cfg.validate();
    nlohmann::json out;
    out["meta"] = meta_json(cfg);
    nlohmann::json arr = nlohmann::json::array();
    for (int r = 0; r < cfg.realizations; ++r) {
        const DDChannel dd = sample_channel(cfg, cfg.speed_kmph,
                                            static_cast<std::uint64_t>(r));
        arr.push_back(nlohmann::json::parse(
            channel_to_json(dd, cfg.seed + static_cast<std::uint64_t>(r))));
    }
    out["channels"] = std::move(arr);
    RunResult res;
    res.kind = "json";
    res.payload = out.dump(2) + "\n";
    return res;
}

}  // namespace oi
