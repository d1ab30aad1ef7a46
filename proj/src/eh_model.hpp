#pragma once

#include <array>
#include <vector>

#include "grid.hpp"

namespace oi {

// Rectenna circuit parameters of the polynomial DC model; the output current
// depends on the 2nd and 4th moments of the RF input.
struct EHCircuit {
    double k2 = 0.0034;
    double k4 = 0.3859;
    double r_ohm = 50.0;
};

// Closed-form moment terms of the harvested DC. Data (random Gaussian) and
// energy (deterministic, channel-phase-aligned) signals contribute
// differently at 4th order.
//
// cross_e2d2 is the slot-wise product sum_n psi_n(Y_E^2) psi_n(Y_D^2): the
// 4th-order energy/data interaction is a time average of an instantaneous
// nonlinearity, so quartic products only pair elements within one slot,
// matching the structure of the pure quartic terms.
struct PsiTerms {
    double yd2 = 0.0;
    double ye2 = 0.0;
    double yd4 = 0.0;
    double ye4 = 0.0;
    double cross_e2d2 = 0.0;
};

struct EhOptions {
    // The quartic energy term's error product as printed carries the data
    // amplitudes; the type/dimension-consistent reading uses the energy
    // amplitudes. Default is the consistent reading; the literal variant is
    // kept for comparison runs.
    bool literal_quartic_error_term = false;
};

// All ordered index tuples (m0,m1,m2,m3) in [0,M)^4 with m0+m1 = m2+m3,
// in deterministic lexicographic order. These index the quartic DC term of
// the deterministic energy signal.
std::vector<std::array<int, 4>> quadruple_set(int m_subcarriers);

// 0.5 * sum_{n,m} A^2 (|H|^2 + err_var) for the data / energy signal.
double psi_yd2(const RealGrid& a_d, const RealGrid& hmag, double err_var);
double psi_ye2(const RealGrid& a_e, const RealGrid& hmag, double err_var);

// (3/8) sum_n sum_{quadruples} ( prod_j A_E|H| + prod_j A_E*err_std ).
// Assumes the energy signal's transmit phases pre-compensate the channel so
// the received energy entries are nonnegative reals of magnitude A_E |H|.
double psi_ye4(const RealGrid& a_e, const RealGrid& hmag, double err_std,
               const EhOptions& opt = {}, const RealGrid* a_d = nullptr);

// (3/4) sum_n ( sum_m A_D^2 (|H|^2 + err_var) )^2.
double psi_yd4(const RealGrid& a_d, const RealGrid& hmag, double err_var);

PsiTerms psi_terms(const RealGrid& a_d, const RealGrid& a_e, const RealGrid& hmag,
                   double err_var, const EhOptions& opt = {});

// Harvested DC:
//   i_out = k2 rho R (ye2 + yd2)
//         + k4 rho^2 R^2 (ye4 + yd4 + 6 cross_e2d2)
double i_out(const PsiTerms& psi, double rho, const EHCircuit& circuit);

}  // namespace oi
