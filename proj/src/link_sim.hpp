#pragma once

#include <cstdint>
#include <span>

#include "channel.hpp"
#include "designer.hpp"

namespace oi {

struct McConfig {
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    bool report_ci = true;
    int threads = 1;
};

struct Moment {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Empirical counterparts of the closed-form DC moments and the rate, with
// standard errors, plus the closed forms they are checked against.
struct McReport {
    Moment emp_psi_yd2, emp_psi_ye2, emp_psi_yd4, emp_psi_ye4;
    Moment emp_rate;
    PsiTerms closed;
    double closed_rate = 0.0;
    double psi_ye4_literal = 0.0;  // alternate reading of the quartic error term
    std::int64_t trials = 0;
    bool ci_warning = false;  // set when trials are too few for the requested CI
};

// One channel use: Y = (Z .* A_D + X_E) (H_est + e) + noise, with fresh
// i.i.d. CN(0,1) data symbols Z, estimation error e and AWGN of power
// p_noise. X_E carries the channel-phase pre-compensation.
TFGrid draw_received(const DesignVariables& vars, const TFChannel& ch,
                     double p_noise, Rng& rng);

// Quartic statistic (3/8) sum_n sum_{m0+m1=m2+m3} Y[m0]Y[m1]conj(Y[m2]Y[m3]),
// evaluated per slot via the autocorrelation identity
//   sum_{quad} ... = sum_s | sum_{m0+m1=s} Y[m0]Y[m1] |^2.
double quartic_statistic(const TFGrid& y);

// Estimates the DC moments by simulation (noise excluded, matching the EH
// model's assumption). Trials run in fixed-size blocks with per-block
// derived seeds and are reduced in block order, so the result is identical
// for any thread count.
McReport estimate_moments(const DesignVariables& vars, const TFChannel& ch,
                          const McConfig& cfg);

// Empirical rate from per-element power accounting over draws; noise power
// and the interference factor come from `params`.
Moment estimate_rate(const DesignVariables& vars, const TFChannel& ch,
                     double lambda, double p_noise, const McConfig& cfg);

std::string mc_report_to_json(const McReport& rep);

}  // namespace oi
