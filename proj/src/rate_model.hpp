#pragma once

#include <vector>

#include "grid.hpp"

namespace oi {

// Per-slot and average achievable rate under power splitting, residual
// energy-signal interference and channel-estimation error.
struct RateReport {
    std::vector<double> per_slot;  // C_n, bits per slot
    double average = 0.0;          // mean over slots
    RealGrid sinr;                 // per-element SINR
};

// Received power routed to the data branch, per element:
//   P_D = rho_bar A_D^2 (|H|^2 + err_var)
//   P_E = rho_bar A_E^2 (|H|^2 + err_var)
void split_powers(const RealGrid& a_d, const RealGrid& a_e, const RealGrid& hmag,
                  double err_var, double rho_bar, RealGrid& p_d, RealGrid& p_e);

// Shannon rate per slot with
//   SINR[n,m] = rho_bar A_D^2 |H|^2
//             / (lambda P_E[n,m] + rho_bar A_D^2 err_var + p_noise)
//   C_n = sum_m log2(1 + SINR[n,m]),  C = mean_n C_n
RateReport rate(const RealGrid& a_d, const RealGrid& a_e, const RealGrid& hmag,
                double err_var, double rho_bar, double lambda, double p_noise);

}  // namespace oi
