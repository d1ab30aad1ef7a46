#include "ofdm_baseline.hpp"

#include <cmath>

#include "thread_pool.hpp"

namespace oi {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

int max_delay_tap(const DDChannel& ch) {
    int mx = 0;
    for (const auto& p : ch.paths) mx = std::max(mx, p.delay_tap);
    return mx;
}
}  // namespace

TimeSignal ofdm_modulate(const TFGrid& x, int l_cp) {
    const int n = x.dims.n_slots;
    const int m = x.dims.m_subcarriers;
    if (l_cp < 0 || l_cp > m)
        throw std::invalid_argument("ofdm_modulate: bad cyclic prefix length");
    TimeSignal out;
    out.dims = x.dims;
    out.l_cp = l_cp;
    out.samples.assign(static_cast<size_t>(n) * (m + l_cp), cd(0, 0));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<cd> block(static_cast<size_t>(m));
    for (int b = 0; b < n; ++b) {
        for (int u = 0; u < m; ++u) {
            cd acc(0, 0);
            for (int sub = 0; sub < m; ++sub) {
                const double ang = kTwoPi * sub * u / static_cast<double>(m);
                acc += x.at(b, sub) * cd(std::cos(ang), std::sin(ang));
            }
            block[static_cast<size_t>(u)] = scale * acc;
        }
        const size_t base = static_cast<size_t>(b) * (m + l_cp);
        for (int u = 0; u < l_cp; ++u)
            out.samples[base + static_cast<size_t>(u)] =
                block[static_cast<size_t>(m - l_cp + u)];
        for (int u = 0; u < m; ++u)
            out.samples[base + static_cast<size_t>(l_cp + u)] = block[static_cast<size_t>(u)];
    }
    return out;
}

std::vector<cd> apply_dd_channel_time(const TimeSignal& s, const DDChannel& ch,
                                      double gain_scale) {
    if (max_delay_tap(ch) > s.l_cp)
        throw std::invalid_argument("apply_dd_channel_time: CP shorter than max delay tap");
    const auto total = static_cast<std::int64_t>(s.samples.size());
    const double nm = static_cast<double>(s.dims.size());
    std::vector<cd> y(s.samples.size(), cd(0, 0));
    for (const auto& p : ch.paths) {
        const cd gain = gain_scale * p.gain_est;
        for (std::int64_t t = 0; t < total; ++t) {
            const std::int64_t src = t - p.delay_tap;
            if (src < 0) continue;  // nothing transmitted before the frame
            const double ang = kTwoPi * p.doppler_tap * static_cast<double>(t) / nm;
            y[static_cast<size_t>(t)] +=
                gain * s.samples[static_cast<size_t>(src)] * cd(std::cos(ang), std::sin(ang));
        }
    }
    return y;
}

TFGrid ofdm_demodulate(const std::vector<cd>& samples, GridDims dims, int l_cp) {
    const int n = dims.n_slots;
    const int m = dims.m_subcarriers;
    if (samples.size() != static_cast<size_t>(n) * (m + l_cp))
        throw std::invalid_argument("ofdm_demodulate: sample count mismatch");
    TFGrid out(dims);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int b = 0; b < n; ++b) {
        const size_t base = static_cast<size_t>(b) * (m + l_cp) + static_cast<size_t>(l_cp);
        for (int sub = 0; sub < m; ++sub) {
            cd acc(0, 0);
            for (int u = 0; u < m; ++u) {
                const double ang = -kTwoPi * sub * u / static_cast<double>(m);
                acc += samples[base + static_cast<size_t>(u)] * cd(std::cos(ang), std::sin(ang));
            }
            out.at(b, sub) = scale * acc;
        }
    }
    return out;
}

std::vector<std::vector<cd>> block_channel_matrices(const DDChannel& ch,
                                                    GridDims dims, int l_cp,
                                                    double gain_scale) {
    const int n = dims.n_slots;
    const int m = dims.m_subcarriers;
    std::vector<std::vector<cd>> g(static_cast<size_t>(n));
    for (auto& blk : g) blk.assign(static_cast<size_t>(m) * m, cd(0, 0));
    TFGrid unit(dims);
    for (int b = 0; b < n; ++b)
        for (int m_in = 0; m_in < m; ++m_in) {
            std::fill(unit.v.begin(), unit.v.end(), cd(0, 0));
            unit.at(b, m_in) = cd(1, 0);
            const TimeSignal tx = ofdm_modulate(unit, l_cp);
            const auto rx = apply_dd_channel_time(tx, ch, gain_scale);
            const TFGrid y = ofdm_demodulate(rx, dims, l_cp);
            for (int m_out = 0; m_out < m; ++m_out)
                g[static_cast<size_t>(b)][static_cast<size_t>(m_out) * m + m_in] =
                    y.at(b, m_out);
        }
    return g;
}

TFChannel ofdm_design_channel(const TFChannel& ch_full) {
    const int n = ch_full.h_est.dims.n_slots;
    const int m = ch_full.h_est.dims.m_subcarriers;
    TFChannel out;
    out.err_var = ch_full.err_var;
    out.h_est = TFGrid(ch_full.h_est.dims);
    for (int j = 0; j < m; ++j) {
        double pow_sum = 0.0;
        cd mean(0, 0);
        for (int i = 0; i < n; ++i) {
            pow_sum += std::norm(ch_full.h_est.at(i, j));
            mean += ch_full.h_est.at(i, j);
        }
        const double mag = std::sqrt(pow_sum / n);
        const double mm = std::abs(mean);
        const cd phase = mm > 0.0 ? mean / mm : cd(1, 0);
        for (int i = 0; i < n; ++i) out.h_est.at(i, j) = mag * phase;
    }
    return out;
}

DesignSolution design_ofdm(const TFChannel& ch_full, const SystemParams& params,
                           int l_cp, const DesignerOptions& opt) {
    const int m = params.dims.m_subcarriers;
    SystemParams p2 = params;
    const double overhead = static_cast<double>(m) / (m + l_cp);
    p2.p_tx_w = params.p_pilot_w + params.p_opt() * overhead;
    p2.p_peak_w = params.p_peak() * overhead;

    DesignerOptions o2 = opt;
    o2.tie_slots = true;
    WaveformDesigner designer(ofdm_design_channel(ch_full), p2, o2);
    return designer.run();
}

MobilityEval evaluate_under_mobility(const DesignVariables& vars,
                                     const TFChannel& design_ch,
                                     const DDChannel& ch_true,
                                     const SystemParams& params, int l_cp,
                                     const McConfig& cfg) {
    if (l_cp < max_delay_tap(ch_true))
        throw std::invalid_argument("evaluate_under_mobility: CP shorter than max delay tap");
    const int n = params.dims.n_slots;
    const int m = params.dims.m_subcarriers;

    // Per-subcarrier design amplitudes and channel-aligned energy phases.
    std::vector<double> a_d(static_cast<size_t>(m)), a_e(static_cast<size_t>(m));
    std::vector<cd> x_e(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        a_d[static_cast<size_t>(j)] = vars.a_d.at(0, j);
        a_e[static_cast<size_t>(j)] = vars.a_e.at(0, j);
        const cd h = design_ch.h_est.at(0, j);
        const double mag = std::abs(h);
        const cd phase = mag > 0.0 ? std::conj(h) / mag : cd(1, 0);
        x_e[static_cast<size_t>(j)] = a_e[static_cast<size_t>(j)] * phase;
    }

    const auto g = block_channel_matrices(ch_true, params.dims, l_cp,
                                          params.channel_amp_scale());

    MobilityEval out;

    // Deterministic part: received energy signal, per-element data signal
    // and leakage powers, expectation-based rate and 2nd-order EH moment.
    std::vector<std::vector<cd>> e_rx(static_cast<size_t>(n),
                                      std::vector<cd>(static_cast<size_t>(m)));
    double rate_sum = 0.0;
    for (int b = 0; b < n; ++b) {
        double c_n = 0.0;
        for (int mo = 0; mo < m; ++mo) {
            const auto row = &g[static_cast<size_t>(b)][static_cast<size_t>(mo) * m];
            cd erx(0, 0);
            double data_pow = 0.0;
            double diag_pow = 0.0;
            for (int mi = 0; mi < m; ++mi) {
                erx += row[mi] * x_e[static_cast<size_t>(mi)];
                const double contrib =
                    std::norm(row[mi]) * a_d[static_cast<size_t>(mi)] * a_d[static_cast<size_t>(mi)];
                data_pow += contrib;
                if (mi == mo) diag_pow = contrib;
            }
            e_rx[static_cast<size_t>(b)][static_cast<size_t>(mo)] = erx;
            const double ici = data_pow - diag_pow;
            out.signal_power += diag_pow;
            out.ici_power += ici;
            out.psi2 += 0.5 * (data_pow + std::norm(erx));
            const double den = vars.rho_bar * ici +
                               params.lambda * vars.rho_bar * std::norm(erx) +
                               params.p_noise_w;
            c_n += std::log2(1.0 + vars.rho_bar * diag_pow / den);
        }
        rate_sum += c_n;
    }
    out.rate = rate_sum / n;

    // 4th-order EH moment by Monte Carlo over data symbols.
    const std::int64_t block_trials = 1024;
    const int n_blocks =
        static_cast<int>((cfg.trials + block_trials - 1) / block_trials);
    std::vector<double> sums(static_cast<size_t>(n_blocks), 0.0);
    std::vector<double> sumsq(static_cast<size_t>(n_blocks), 0.0);
    std::vector<std::int64_t> counts(static_cast<size_t>(n_blocks), 0);
    parallel_for(n_blocks, cfg.threads, [&](int blk) {
        Rng rng = Rng::derive(cfg.seed ^ 0x0fd3c41bULL, static_cast<std::uint64_t>(blk));
        const std::int64_t lo = static_cast<std::int64_t>(blk) * block_trials;
        const std::int64_t hi = std::min(cfg.trials, lo + block_trials);
        TFGrid y(params.dims);
        std::vector<cd> zx(static_cast<size_t>(m));
        for (std::int64_t t = lo; t < hi; ++t) {
            for (int b = 0; b < n; ++b) {
                for (int mi = 0; mi < m; ++mi)
                    zx[static_cast<size_t>(mi)] =
                        rng.complex_gaussian(1.0) * a_d[static_cast<size_t>(mi)];
                for (int mo = 0; mo < m; ++mo) {
                    const auto row = &g[static_cast<size_t>(b)][static_cast<size_t>(mo) * m];
                    cd acc = e_rx[static_cast<size_t>(b)][static_cast<size_t>(mo)];
                    for (int mi = 0; mi < m; ++mi) acc += row[mi] * zx[static_cast<size_t>(mi)];
                    y.at(b, mo) = acc;
                }
            }
            const double q = quartic_statistic(y);
            sums[static_cast<size_t>(blk)] += q;
            sumsq[static_cast<size_t>(blk)] += q * q;
            ++counts[static_cast<size_t>(blk)];
        }
    });
    double sum = 0.0, sq = 0.0;
    std::int64_t cnt = 0;
    for (int b = 0; b < n_blocks; ++b) {
        sum += sums[static_cast<size_t>(b)];
        sq += sumsq[static_cast<size_t>(b)];
        cnt += counts[static_cast<size_t>(b)];
    }
    out.psi4.value = sum / static_cast<double>(cnt);
    if (cnt > 1) {
        const double var = std::max(
            0.0, (sq - sum * sum / static_cast<double>(cnt)) / static_cast<double>(cnt - 1));
        out.psi4.stderr_ = std::sqrt(var / static_cast<double>(cnt));
    }

    const EHCircuit& c = params.circuit;
    const double quad = c.k2 * vars.rho * c.r_ohm * out.psi2;
    const double quart_scale = c.k4 * vars.rho * vars.rho * c.r_ohm * c.r_ohm;
    out.i_out = quad + quart_scale * out.psi4.value;
    out.i_out_stderr = quart_scale * out.psi4.stderr_;

    // Energy conservation diagnostic on one deterministic pass (energy
    // signal only): per-block time energy with CP discarded vs frequency.
    {
        TFGrid xgrid(params.dims);
        for (int b = 0; b < n; ++b)
            for (int j = 0; j < m; ++j) xgrid.at(b, j) = x_e[static_cast<size_t>(j)];
        const TimeSignal tx = ofdm_modulate(xgrid, l_cp);
        const auto rx = apply_dd_channel_time(tx, ch_true, params.channel_amp_scale());
        const TFGrid yf = ofdm_demodulate(rx, params.dims, l_cp);
        double e_time = 0.0;
        for (int b = 0; b < n; ++b) {
            const size_t base =
                static_cast<size_t>(b) * (m + l_cp) + static_cast<size_t>(l_cp);
            for (int u = 0; u < m; ++u) e_time += std::norm(rx[base + static_cast<size_t>(u)]);
        }
        double e_freq = 0.0;
        for (const auto& z : yf.v) e_freq += std::norm(z);
        out.energy_time = e_time;
        out.energy_freq = e_freq;
    }
    return out;
}

}  // namespace oi
