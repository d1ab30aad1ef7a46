#include "link_sim.hpp"

#include <cmath>

#include "json.hpp"
#include "thread_pool.hpp"

namespace oi {

namespace {

constexpr std::int64_t kBlockTrials = 4096;

// energy-signal TF grid with channel-phase pre-compensation
TFGrid energy_signal(const DesignVariables& vars, const TFChannel& ch) {
    TFGrid xe(vars.a_e.dims);
    for (size_t i = 0; i < xe.v.size(); ++i) {
        const cd h = ch.h_est.v[i];
        const double mag = std::abs(h);
        const cd phase = mag > 0.0 ? std::conj(h) / mag : cd(1.0, 0.0);
        xe.v[i] = vars.a_e.v[i] * phase;
    }
    return xe;
}

struct Accum {
    double sum = 0.0;
    double sumsq = 0.0;
    std::int64_t n = 0;

    void push(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    void merge(const Accum& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    Moment moment() const {
        Moment m;
        if (n == 0) return m;
        m.value = sum / static_cast<double>(n);
        if (n > 1) {
            const double var =
                std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) /
                                  static_cast<double>(n - 1));
            m.stderr_ = std::sqrt(var / static_cast<double>(n));
        }
        return m;
    }
};

}  // namespace

TFGrid draw_received(const DesignVariables& vars, const TFChannel& ch,
                     double p_noise, Rng& rng) {
    if (!(vars.a_d.dims == ch.h_est.dims))
        throw std::invalid_argument("draw_received: dims mismatch");
    const TFGrid xe = energy_signal(vars, ch);
    TFGrid y(ch.h_est.dims);
    for (size_t i = 0; i < y.v.size(); ++i) {
        const cd z = rng.complex_gaussian(1.0);
        const cd e = ch.err_var > 0.0 ? rng.complex_gaussian(ch.err_var) : cd(0, 0);
        const cd n0 = p_noise > 0.0 ? rng.complex_gaussian(p_noise) : cd(0, 0);
        y.v[i] = (z * vars.a_d.v[i] + xe.v[i]) * (ch.h_est.v[i] + e) + n0;
    }
    return y;
}

double quartic_statistic(const TFGrid& y) {
    const int n = y.dims.n_slots;
    const int m = y.dims.m_subcarriers;
    std::vector<cd> conv(static_cast<size_t>(2 * m - 1));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        std::fill(conv.begin(), conv.end(), cd(0, 0));
        for (int m0 = 0; m0 < m; ++m0)
            for (int m1 = 0; m1 < m; ++m1)
                conv[static_cast<size_t>(m0 + m1)] += y.at(i, m0) * y.at(i, m1);
        for (const cd& u : conv) acc += std::norm(u);
    }
    return 0.375 * acc;
}

McReport estimate_moments(const DesignVariables& vars, const TFChannel& ch,
                          const McConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("estimate_moments: trials < 1");
    const TFGrid xe = energy_signal(vars, ch);
    const GridDims dims = ch.h_est.dims;

    const int n_blocks =
        static_cast<int>((cfg.trials + kBlockTrials - 1) / kBlockTrials);
    struct BlockOut {
        Accum yd2, ye2, yd4, ye4;
    };
    std::vector<BlockOut> blocks(static_cast<size_t>(n_blocks));

    parallel_for(n_blocks, cfg.threads, [&](int b) {
        Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(b));
        const std::int64_t lo = static_cast<std::int64_t>(b) * kBlockTrials;
        const std::int64_t hi = std::min(cfg.trials, lo + kBlockTrials);
        BlockOut& out = blocks[static_cast<size_t>(b)];
        TFGrid yd(dims), ye(dims);
        for (std::int64_t t = lo; t < hi; ++t) {
            for (size_t i = 0; i < yd.v.size(); ++i) {
                const cd z = rng.complex_gaussian(1.0);
                const cd e =
                    ch.err_var > 0.0 ? rng.complex_gaussian(ch.err_var) : cd(0, 0);
                const cd h = ch.h_est.v[i] + e;
                yd.v[i] = z * vars.a_d.v[i] * h;
                ye.v[i] = xe.v[i] * h;
            }
            double s2d = 0.0, s2e = 0.0;
            for (size_t i = 0; i < yd.v.size(); ++i) {
                s2d += std::norm(yd.v[i]);
                s2e += std::norm(ye.v[i]);
            }
            out.yd2.push(0.5 * s2d);
            out.ye2.push(0.5 * s2e);
            out.yd4.push(quartic_statistic(yd));
            out.ye4.push(quartic_statistic(ye));
        }
    });

    Accum yd2, ye2, yd4, ye4;
    for (const auto& b : blocks) {
        yd2.merge(b.yd2);
        ye2.merge(b.ye2);
        yd4.merge(b.yd4);
        ye4.merge(b.ye4);
    }

    McReport rep;
    rep.trials = cfg.trials;
    rep.emp_psi_yd2 = yd2.moment();
    rep.emp_psi_ye2 = ye2.moment();
    rep.emp_psi_yd4 = yd4.moment();
    rep.emp_psi_ye4 = ye4.moment();
    if (cfg.report_ci && cfg.trials < 2) {
        rep.ci_warning = true;
        rep.emp_psi_yd2.stderr_ = std::abs(rep.emp_psi_yd2.value);
        rep.emp_psi_ye2.stderr_ = std::abs(rep.emp_psi_ye2.value);
        rep.emp_psi_yd4.stderr_ = std::abs(rep.emp_psi_yd4.value);
        rep.emp_psi_ye4.stderr_ = std::abs(rep.emp_psi_ye4.value);
    }

    RealGrid hmag(dims);
    for (size_t i = 0; i < hmag.v.size(); ++i) hmag.v[i] = std::abs(ch.h_est.v[i]);
    rep.closed = psi_terms(vars.a_d, vars.a_e, hmag, ch.err_var);
    rep.psi_ye4_literal = psi_ye4(vars.a_e, hmag, std::sqrt(ch.err_var),
                                  EhOptions{.literal_quartic_error_term = true},
                                  &vars.a_d);
    return rep;
}

Moment estimate_rate(const DesignVariables& vars, const TFChannel& ch,
                     double lambda, double p_noise, const McConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("estimate_rate: trials < 1");
    const TFGrid xe = energy_signal(vars, ch);
    const GridDims dims = ch.h_est.dims;
    const int total = dims.size();

    const int n_blocks =
        static_cast<int>((cfg.trials + kBlockTrials - 1) / kBlockTrials);
    struct BlockOut {
        std::vector<double> err_pow;  // per-element mean |Z A_D e|^2 sums
        std::vector<double> e_pow;    // per-element mean |X_E (H+e)|^2 sums
        std::int64_t n = 0;
    };
    std::vector<BlockOut> blocks(static_cast<size_t>(n_blocks));

    parallel_for(n_blocks, cfg.threads, [&](int b) {
        Rng rng = Rng::derive(cfg.seed ^ 0x9d2c5680ULL, static_cast<std::uint64_t>(b));
        const std::int64_t lo = static_cast<std::int64_t>(b) * kBlockTrials;
        const std::int64_t hi = std::min(cfg.trials, lo + kBlockTrials);
        BlockOut& out = blocks[static_cast<size_t>(b)];
        out.err_pow.assign(static_cast<size_t>(total), 0.0);
        out.e_pow.assign(static_cast<size_t>(total), 0.0);
        for (std::int64_t t = lo; t < hi; ++t) {
            for (int i = 0; i < total; ++i) {
                const cd z = rng.complex_gaussian(1.0);
                const cd e =
                    ch.err_var > 0.0 ? rng.complex_gaussian(ch.err_var) : cd(0, 0);
                out.err_pow[static_cast<size_t>(i)] +=
                    std::norm(z * vars.a_d.v[static_cast<size_t>(i)] * e);
                out.e_pow[static_cast<size_t>(i)] +=
                    std::norm(xe.v[static_cast<size_t>(i)] * (ch.h_est.v[static_cast<size_t>(i)] + e));
            }
            ++out.n;
        }
    });

    // Rate from per-element interference means; stderr over 8 block-batches.
    auto rate_from = [&](const std::vector<double>& err_pow,
                         const std::vector<double>& e_pow, std::int64_t n) {
        const int nslots = dims.n_slots;
        const int msub = dims.m_subcarriers;
        double avg = 0.0;
        for (int i = 0; i < nslots; ++i) {
            double c_n = 0.0;
            for (int j = 0; j < msub; ++j) {
                const size_t idx = static_cast<size_t>(i) * msub + j;
                const double a2 = vars.a_d.v[idx] * vars.a_d.v[idx];
                const double h2 = std::norm(ch.h_est.v[idx]);
                const double sig = vars.rho_bar * a2 * h2;
                const double den = lambda * vars.rho_bar * e_pow[idx] / n +
                                   vars.rho_bar * err_pow[idx] / n + p_noise;
                c_n += std::log2(1.0 + sig / den);
            }
            avg += c_n;
        }
        return avg / nslots;
    };

    std::vector<double> err_tot(static_cast<size_t>(total), 0.0);
    std::vector<double> e_tot(static_cast<size_t>(total), 0.0);
    std::int64_t n_tot = 0;
    for (const auto& b : blocks) {
        for (int i = 0; i < total; ++i) {
            err_tot[static_cast<size_t>(i)] += b.err_pow[static_cast<size_t>(i)];
            e_tot[static_cast<size_t>(i)] += b.e_pow[static_cast<size_t>(i)];
        }
        n_tot += b.n;
    }
    Moment out;
    out.value = rate_from(err_tot, e_tot, n_tot);

    const int n_batches = std::min<int>(8, n_blocks);
    if (n_batches > 1) {
        std::vector<double> batch_rates;
        for (int g = 0; g < n_batches; ++g) {
            std::vector<double> err(static_cast<size_t>(total), 0.0);
            std::vector<double> epw(static_cast<size_t>(total), 0.0);
            std::int64_t n = 0;
            for (int b = g; b < n_blocks; b += n_batches) {
                for (int i = 0; i < total; ++i) {
                    err[static_cast<size_t>(i)] += blocks[static_cast<size_t>(b)].err_pow[static_cast<size_t>(i)];
                    epw[static_cast<size_t>(i)] += blocks[static_cast<size_t>(b)].e_pow[static_cast<size_t>(i)];
                }
                n += blocks[static_cast<size_t>(b)].n;
            }
            if (n > 0) batch_rates.push_back(rate_from(err, epw, n));
        }
        double mean = 0.0;
        for (double r : batch_rates) mean += r;
        mean /= static_cast<double>(batch_rates.size());
        double var = 0.0;
        for (double r : batch_rates) var += (r - mean) * (r - mean);
        if (batch_rates.size() > 1) {
            var /= static_cast<double>(batch_rates.size() - 1);
            out.stderr_ = std::sqrt(var / static_cast<double>(batch_rates.size()));
        }
    } else {
        out.stderr_ = 0.0;
    }
    return out;
}

std::string mc_report_to_json(const McReport& rep) {
    nlohmann::json j;
    auto row = [](const Moment& emp, double closed) {
        return nlohmann::json{{"closed", closed},
                              {"empirical", emp.value},
                              {"stderr", emp.stderr_}};
    };
    j["psi_yd2"] = row(rep.emp_psi_yd2, rep.closed.yd2);
    j["psi_ye2"] = row(rep.emp_psi_ye2, rep.closed.ye2);
    j["psi_yd4"] = row(rep.emp_psi_yd4, rep.closed.yd4);
    j["psi_ye4"] = row(rep.emp_psi_ye4, rep.closed.ye4);
    j["psi_ye4_literal_variant"] = rep.psi_ye4_literal;
    j["rate"] = row(rep.emp_rate, rep.closed_rate);
    j["trials"] = rep.trials;
    j["ci_warning"] = rep.ci_warning;
    return j.dump();
}

}  // namespace oi
