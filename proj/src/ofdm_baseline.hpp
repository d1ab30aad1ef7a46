#pragma once

#include "designer.hpp"
#include "link_sim.hpp"

namespace oi {

// OFDM benchmark: the same successive-GP designer constrained to
// frequency-domain-only degrees of freedom (one amplitude per subcarrier,
// constant across time slots), then evaluated under the true doubly
// dispersive channel with a per-block time-domain pass, where Doppler breaks
// subcarrier orthogonality.

// N blocks of (l_cp + M) samples at rate M*df; each block's cyclic prefix
// copies its own tail.
struct TimeSignal {
    std::vector<cd> samples;
    GridDims dims;
    int l_cp = 0;
};

TimeSignal ofdm_modulate(const TFGrid& x, int l_cp);

// Tapped delay-Doppler channel at sample level:
//   y[t] = sum_i h_i s[t - l_i] exp(j 2 pi k_i t / (N M))
// with t the global sample index (cyclic prefixes included in the time
// flow) and gain_scale folded into the tap gains. Throws if the CP is
// shorter than the largest delay tap.
std::vector<cd> apply_dd_channel_time(const TimeSignal& s, const DDChannel& ch,
                                      double gain_scale);

// Per block: drop CP, unitary DFT back to the TF grid.
TFGrid ofdm_demodulate(const std::vector<cd>& samples, GridDims dims, int l_cp);

// Effective per-block subcarrier coupling matrices G[n] (row-major M x M,
// entry (m_out, m_in)), measured by passing unit subcarriers through the
// modulate -> channel -> demodulate chain. With zero Doppler G[n] is
// diagonal; Doppler fills in intercarrier leakage.
std::vector<std::vector<cd>> block_channel_matrices(const DDChannel& ch,
                                                    GridDims dims, int l_cp,
                                                    double gain_scale);

// Frequency-domain design channel the OFDM transmitter is allowed to see:
// per-subcarrier RMS magnitude over slots with the coherent mean phase,
// replicated across slots. Equals the true channel when it is
// time-invariant.
TFChannel ofdm_design_channel(const TFChannel& ch_full);

// Runs the tied-variable designer on the OFDM design channel. The power and
// peak budgets are deflated by M/(M+l_cp) so the transmitted frame including
// cyclic prefixes spends the same budget as the OTFS frame.
DesignSolution design_ofdm(const TFChannel& ch_full, const SystemParams& params,
                           int l_cp, const DesignerOptions& opt = {});

struct MobilityEval {
    double i_out = 0.0;
    double i_out_stderr = 0.0;
    double rate = 0.0;      // bits per slot, expectation over data symbols
    double psi2 = 0.0;      // total 2nd-order EH moment
    Moment psi4;            // total 4th-order EH moment (Monte Carlo)
    double signal_power = 0.0;  // sum of on-diagonal data power
    double ici_power = 0.0;     // sum of off-diagonal data leakage power
    double energy_time = 0.0;   // received frame energy, time domain
    double energy_freq = 0.0;   // received frame energy, frequency domain
};

// Evaluates an n-constant design under the true channel. `design_ch` is the
// channel the energy-signal phases were aligned to; `ch_true` drives the
// time-domain pass.
MobilityEval evaluate_under_mobility(const DesignVariables& vars,
                                     const TFChannel& design_ch,
                                     const DDChannel& ch_true,
                                     const SystemParams& params, int l_cp,
                                     const McConfig& cfg);

}  // namespace oi
