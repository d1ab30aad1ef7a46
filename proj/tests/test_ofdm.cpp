#include <cmath>

#include "doctest.h"
#include "ofdm_baseline.hpp"

using namespace oi;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

SystemParams small_params(GridDims dims) {
    SystemParams p;
    p.dims = dims;
    p.r_min = 10.0;
    p.lambda = 0.1;
    return p;
}

DDChannel static_two_path() {
    DDChannel ch;
    ch.paths.push_back({cd(0.8, 0.1), 0, 0});
    ch.paths.push_back({cd(-0.2, 0.5), 3, 0});
    return ch;
}

}  // namespace

TEST_CASE("modulate/demodulate round trip without a channel") {
    const GridDims dims{3, 8};
    Rng rng(91);
    TFGrid x(dims);
    for (auto& z : x.v) z = rng.complex_gaussian(1.0);
    const TimeSignal tx = ofdm_modulate(x, 2);
    CHECK(tx.samples.size() == static_cast<size_t>(3 * 10));
    const TFGrid back = ofdm_demodulate(tx.samples, dims, 2);
    for (size_t i = 0; i < x.v.size(); ++i) CHECK(std::abs(back.v[i] - x.v[i]) < 1e-12);
}

TEST_CASE("zero Doppler leaves no intercarrier leakage") {
    const GridDims dims{4, 12};
    const DDChannel ch = static_two_path();
    const auto g = block_channel_matrices(ch, dims, 6, 1.0);
    for (int n = 0; n < dims.n_slots; ++n) {
        double diag = 0.0, off = 0.0;
        for (int mo = 0; mo < 12; ++mo)
            for (int mi = 0; mi < 12; ++mi) {
                const double p = std::norm(g[static_cast<size_t>(n)][static_cast<size_t>(mo) * 12 + mi]);
                if (mo == mi)
                    diag += p;
                else
                    off += p;
            }
        CHECK(off <= 1e-10 * diag);
    }
}

TEST_CASE("static-channel frequency response matches the tap sum") {
    const GridDims dims{2, 12};
    const DDChannel ch = static_two_path();
    const auto g = block_channel_matrices(ch, dims, 6, 1.0);
    for (int m = 0; m < 12; ++m) {
        cd expected(0, 0);
        for (const auto& p : ch.paths)
            expected += p.gain_est * std::polar(1.0, -kTwoPi * p.delay_tap * m / 12.0);
        CHECK(std::abs(g[0][static_cast<size_t>(m) * 12 + m] - expected) < 1e-12);
    }
}

TEST_CASE("Doppler leakage matches the Dirichlet-kernel oracle") {
    const GridDims dims{4, 12};
    const int n = dims.n_slots, m = dims.m_subcarriers, l_cp = 6;
    DDChannel ch;
    ch.paths.push_back({cd(1, 0), 0, 6});
    const auto g = block_channel_matrices(ch, dims, l_cp, 1.0);

    // closed form: G[b][m'][mi] = e^{j phi_b} (1/M) sum_u e^{j(theta u)} with
    // theta = 2 pi k/(NM) + 2 pi (mi - m')/M and phi_b the block phase offset
    const double k = 6.0;
    for (int b = 0; b < n; ++b) {
        const double phi =
            kTwoPi * k * (b * (m + l_cp) + l_cp) / static_cast<double>(n * m);
        for (int mo = 0; mo < m; ++mo)
            for (int mi = 0; mi < m; ++mi) {
                const double theta =
                    kTwoPi * k / static_cast<double>(n * m) + kTwoPi * (mi - mo) / m;
                cd dirichlet(0, 0);
                for (int u = 0; u < m; ++u) dirichlet += std::polar(1.0, theta * u);
                const cd expected = std::polar(1.0, phi) * dirichlet / static_cast<double>(m);
                CHECK(std::abs(g[static_cast<size_t>(b)][static_cast<size_t>(mo) * m + mi] -
                               expected) < 1e-9);
            }
    }
}

TEST_CASE("cyclic prefix shorter than the delay spread is rejected") {
    const GridDims dims{2, 12};
    DDChannel ch;
    ch.paths.push_back({cd(1, 0), 5, 0});
    TFGrid x(dims);
    const TimeSignal tx = ofdm_modulate(x, 3);
    CHECK_THROWS_AS(apply_dd_channel_time(tx, ch, 1.0), std::invalid_argument);
}

TEST_CASE("OFDM design variable count and static-case equivalence") {
    const GridDims dims{4, 6};
    SystemParams p = small_params(dims);
    const DDChannel dd = static_two_path();
    TFChannel tf = tf_from_dd(dd, dims);
    const double g = p.channel_amp_scale();
    for (auto& z : tf.h_est.v) z *= g;

    // variable count: 2M + 2 + M + 1
    DesignerOptions tied;
    tied.tie_slots = true;
    WaveformDesigner tied_designer(ofdm_design_channel(tf), p, tied);
    CHECK(tied_designer.n_design_vars() == 3 * 6 + 3);

    // zero CP so the budgets coincide; static channel makes the design
    // channels identical, so the tied optimum matches the full optimum
    const DesignSolution ofdm = design_ofdm(tf, p, 0);
    WaveformDesigner full(tf, p);
    const DesignSolution otfs = full.run();
    CHECK(ofdm.i_out == doctest::Approx(otfs.i_out).epsilon(2e-3));

    // n-constant amplitudes by construction
    for (int m = 0; m < dims.m_subcarriers; ++m)
        for (int n = 1; n < dims.n_slots; ++n) {
            CHECK(ofdm.vars.a_d.at(n, m) == doctest::Approx(ofdm.vars.a_d.at(0, m)));
            CHECK(ofdm.vars.a_e.at(n, m) == doctest::Approx(ofdm.vars.a_e.at(0, m)));
        }
}

TEST_CASE("mobility evaluation: static channel reproduces closed forms") {
    const GridDims dims{4, 6};
    SystemParams p = small_params(dims);
    const DDChannel dd = static_two_path();
    TFChannel tf = tf_from_dd(dd, dims);
    const double g = p.channel_amp_scale();
    for (auto& z : tf.h_est.v) z *= g;

    const int l_cp = 3;
    const DesignSolution sol = design_ofdm(tf, p, l_cp);
    McConfig cfg;
    cfg.trials = 60000;
    cfg.seed = 92;
    const MobilityEval ev =
        evaluate_under_mobility(sol.vars, ofdm_design_channel(tf), dd, p, l_cp, cfg);

    // no Doppler: no ICI, rate equals the closed form of the design view
    CHECK(ev.ici_power <= 1e-10 * ev.signal_power);
    CHECK(ev.rate == doctest::Approx(sol.rate.average).epsilon(1e-6));
    CHECK(ev.energy_time == doctest::Approx(ev.energy_freq).epsilon(1e-9));
    // closed-form DC on the same design channel
    CHECK(ev.i_out ==
          doctest::Approx(sol.i_out).epsilon(std::max(0.05, 8.0 * ev.i_out_stderr / sol.i_out)));
}

TEST_CASE("the same design loses rate under mobility") {
    const GridDims dims{4, 12};
    SystemParams p = small_params(dims);
    DDChannel still;
    still.paths.push_back({cd(0.9, 0.0), 0, 0});
    still.paths.push_back({cd(0.0, 0.4), 4, 0});
    DDChannel moving = still;
    moving.paths[0].doppler_tap = 6;
    moving.paths[1].doppler_tap = -3;

    TFChannel tf = tf_from_dd(still, dims);
    const double g = p.channel_amp_scale();
    for (auto& z : tf.h_est.v) z *= g;

    const int l_cp = 6;
    const DesignSolution sol = design_ofdm(tf, p, l_cp);
    McConfig cfg;
    cfg.trials = 4000;
    cfg.seed = 93;
    const MobilityEval at_rest =
        evaluate_under_mobility(sol.vars, ofdm_design_channel(tf), still, p, l_cp, cfg);
    const MobilityEval at_speed =
        evaluate_under_mobility(sol.vars, ofdm_design_channel(tf), moving, p, l_cp, cfg);
    CHECK(at_speed.rate < at_rest.rate);
    CHECK(at_speed.ici_power > 1e3 * at_rest.ici_power);
}
