#pragma once

#include <string>
#include <vector>

#include "grid.hpp"
#include "rng.hpp"

namespace oi {

// One propagation path on the delay-Doppler lattice. Taps are integer
// multiples of the lattice resolution (1/(M df) in delay, 1/(N T) in
// Doppler), so the TF response is a superposition of exact lattice
// exponentials.
struct DDPath {
    cd gain_est;      // estimated path gain
    int delay_tap;    // l_i in 0..l_max, path 0 pinned to 0
    int doppler_tap;  // k_i in -k_max..k_max
};

struct DDChannel {
    std::vector<DDPath> paths;
    double err_var_tf = 0.0;  // per-element TF estimation error variance

    int n_paths() const { return static_cast<int>(paths.size()); }
};

// Synthesized TF-domain estimate of a DD channel plus the error variance it
// carries.
struct TFChannel {
    TFGrid h_est;
    double err_var = 0.0;
};

// Maximum Doppler tap index for carrier fc, speed v_max and N time slots of
// subcarrier spacing df: round(fc * v_max * N / (c * df)).
int doppler_index_bound(double fc_hz, double v_max_mps, int n_slots, double df_hz);

// Draws a P-path channel: path 0 at delay 0, remaining delays distinct
// uniform on {1..l_max}, Doppler taps uniform on {-k_max..k_max}, gains
// CN(0, 1/P). Deterministic given the generator state.
DDChannel sample_dd_channel(Rng& rng, int p_paths, int l_max, int k_max,
                            double err_var);

// TF response of the estimated taps:
//   H[n,m] = sum_i h_i exp(+j2pi(n k_i / N - m l_i / M))
TFChannel tf_from_dd(const DDChannel& ch, GridDims dims);

// I.i.d. CN(0, err_var) grid (real/imag each err_var/2 per element).
TFGrid sample_tf_error(Rng& rng, GridDims dims, double err_var);

// Serialization for experiment replay: paths, err_var and the seed that
// produced them.
std::string channel_to_json(const DDChannel& ch, std::uint64_t seed);
DDChannel channel_from_json(const std::string& text, std::uint64_t* seed_out = nullptr);

}  // namespace oi
