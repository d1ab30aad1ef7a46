#include "channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace oi {

namespace {
constexpr double kSpeedOfLight = 2.998e8;  // m/s
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

int doppler_index_bound(double fc_hz, double v_max_mps, int n_slots, double df_hz) {
    if (fc_hz <= 0.0 || n_slots < 1 || df_hz <= 0.0 || v_max_mps < 0.0)
        throw std::invalid_argument("doppler_index_bound: nonpositive input");
    const double k = fc_hz * v_max_mps * n_slots / (kSpeedOfLight * df_hz);
    return static_cast<int>(std::lround(k));
}

DDChannel sample_dd_channel(Rng& rng, int p_paths, int l_max, int k_max,
                            double err_var) {
    if (p_paths < 1) throw std::invalid_argument("sample_dd_channel: p_paths < 1");
    if (l_max < 1) throw std::invalid_argument("sample_dd_channel: l_max < 1");
    if (k_max < 0) throw std::invalid_argument("sample_dd_channel: k_max < 0");
    if (err_var < 0.0) throw std::invalid_argument("sample_dd_channel: err_var < 0");
    if (p_paths > l_max + 1)
        throw std::invalid_argument(
            "sample_dd_channel: cannot place more than l_max + 1 paths with distinct delays");

    DDChannel ch;
    ch.err_var_tf = err_var;
    ch.paths.resize(static_cast<size_t>(p_paths));

    // Delays: path 0 at tap 0, the rest drawn without replacement from
    // {1..l_max}.
    std::vector<int> pool;
    pool.reserve(static_cast<size_t>(l_max));
    for (int l = 1; l <= l_max; ++l) pool.push_back(l);
    ch.paths[0].delay_tap = 0;
    for (int i = 1; i < p_paths; ++i) {
        const auto pick = static_cast<size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
        ch.paths[static_cast<size_t>(i)].delay_tap = pool[pick];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }

    const double var_per_path = 1.0 / static_cast<double>(p_paths);
    for (auto& p : ch.paths) {
        p.doppler_tap = static_cast<int>(rng.uniform_int(-k_max, k_max));
        p.gain_est = rng.complex_gaussian(var_per_path);
    }
    return ch;
}

TFChannel tf_from_dd(const DDChannel& ch, GridDims dims) {
    TFChannel out;
    out.h_est = TFGrid(dims);
    out.err_var = ch.err_var_tf;
    const int n = dims.n_slots;
    const int m = dims.m_subcarriers;
    for (const auto& p : ch.paths) {
        for (int i = 0; i < n; ++i) {
            const double ang_n = kTwoPi * p.doppler_tap * i / static_cast<double>(n);
            for (int j = 0; j < m; ++j) {
                const double ang = ang_n - kTwoPi * p.delay_tap * j / static_cast<double>(m);
                out.h_est.at(i, j) += p.gain_est * cd(std::cos(ang), std::sin(ang));
            }
        }
    }
    return out;
}

TFGrid sample_tf_error(Rng& rng, GridDims dims, double err_var) {
    if (err_var < 0.0) throw std::invalid_argument("sample_tf_error: err_var < 0");
    TFGrid g(dims);
    if (err_var == 0.0) return g;
    for (auto& z : g.v) z = rng.complex_gaussian(err_var);
    return g;
}

std::string channel_to_json(const DDChannel& ch, std::uint64_t seed) {
    nlohmann::json j;
    j["seed"] = seed;
    j["err_var"] = ch.err_var_tf;
    auto& paths = j["paths"] = nlohmann::json::array();
    for (const auto& p : ch.paths) {
        paths.push_back({{"gain", {p.gain_est.real(), p.gain_est.imag()}},
                         {"delay_tap", p.delay_tap},
                         {"doppler_tap", p.doppler_tap}});
    }
    return j.dump();
}

DDChannel channel_from_json(const std::string& text, std::uint64_t* seed_out) {
    const auto j = nlohmann::json::parse(text);
    DDChannel ch;
    ch.err_var_tf = j.at("err_var").get<double>();
    for (const auto& p : j.at("paths")) {
        DDPath path;
        path.gain_est = cd(p.at("gain")[0].get<double>(), p.at("gain")[1].get<double>());
        path.delay_tap = p.at("delay_tap").get<int>();
        path.doppler_tap = p.at("doppler_tap").get<int>();
        ch.paths.push_back(path);
    }
    if (ch.paths.empty()) throw std::invalid_argument("channel_from_json: no paths");
    if (seed_out && j.contains("seed")) *seed_out = j.at("seed").get<std::uint64_t>();
    return ch;
}

}  // namespace oi
