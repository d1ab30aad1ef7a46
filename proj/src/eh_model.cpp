#include "eh_model.hpp"

#include <cmath>
#include <stdexcept>

namespace oi {

namespace {

void check_shapes(const RealGrid& a, const RealGrid& hmag, const char* who) {
    if (!(a.dims == hmag.dims))
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

double quadratic_psi(const RealGrid& a, const RealGrid& hmag, double err_var) {
    double acc = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double a2 = a.v[i] * a.v[i];
        acc += a2 * (hmag.v[i] * hmag.v[i] + err_var);
    }
    return 0.5 * acc;
}

}  // namespace

std::vector<std::array<int, 4>> quadruple_set(int m_subcarriers) {
    if (m_subcarriers < 1) throw std::invalid_argument("quadruple_set: M < 1");
    std::vector<std::array<int, 4>> out;
    const int m = m_subcarriers;
    for (int m0 = 0; m0 < m; ++m0)
        for (int m1 = 0; m1 < m; ++m1)
            for (int m2 = 0; m2 < m; ++m2) {
                const int m3 = m0 + m1 - m2;
                if (m3 >= 0 && m3 < m) out.push_back({m0, m1, m2, m3});
            }
    return out;
}

double psi_yd2(const RealGrid& a_d, const RealGrid& hmag, double err_var) {
    check_shapes(a_d, hmag, "psi_yd2");
    return quadratic_psi(a_d, hmag, err_var);
}

double psi_ye2(const RealGrid& a_e, const RealGrid& hmag, double err_var) {
    check_shapes(a_e, hmag, "psi_ye2");
    return quadratic_psi(a_e, hmag, err_var);
}

double psi_ye4(const RealGrid& a_e, const RealGrid& hmag, double err_std,
               const EhOptions& opt, const RealGrid* a_d) {
    check_shapes(a_e, hmag, "psi_ye4");
    const RealGrid& err_amp = (opt.literal_quartic_error_term && a_d) ? *a_d : a_e;
    const auto quads = quadruple_set(hmag.dims.m_subcarriers);
    const int n = hmag.dims.n_slots;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double slot = 0.0;
        for (const auto& q : quads) {
            double sig = 1.0;
            double err = 1.0;
            for (int j = 0; j < 4; ++j) {
                sig *= a_e.at(i, q[j]) * hmag.at(i, q[j]);
                err *= err_amp.at(i, q[j]) * err_std;
            }
            slot += sig + err;
        }
        acc += slot;
    }
    return 0.375 * acc;
}

double psi_yd4(const RealGrid& a_d, const RealGrid& hmag, double err_var) {
    check_shapes(a_d, hmag, "psi_yd4");
    const int n = hmag.dims.n_slots;
    const int m = hmag.dims.m_subcarriers;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double slot = 0.0;
        for (int j = 0; j < m; ++j) {
            const double a2 = a_d.at(i, j) * a_d.at(i, j);
            slot += a2 * (hmag.at(i, j) * hmag.at(i, j) + err_var);
        }
        acc += slot * slot;
    }
    return 0.75 * acc;
}

PsiTerms psi_terms(const RealGrid& a_d, const RealGrid& a_e, const RealGrid& hmag,
                   double err_var, const EhOptions& opt) {
    PsiTerms psi;
    psi.yd2 = psi_yd2(a_d, hmag, err_var);
    psi.ye2 = psi_ye2(a_e, hmag, err_var);
    psi.yd4 = psi_yd4(a_d, hmag, err_var);
    psi.ye4 = psi_ye4(a_e, hmag, std::sqrt(err_var), opt, &a_d);

    const int n = hmag.dims.n_slots;
    const int m = hmag.dims.m_subcarriers;
    for (int i = 0; i < n; ++i) {
        double slot_e = 0.0, slot_d = 0.0;
        for (int j = 0; j < m; ++j) {
            const double g2 = hmag.at(i, j) * hmag.at(i, j) + err_var;
            slot_e += 0.5 * a_e.at(i, j) * a_e.at(i, j) * g2;
            slot_d += 0.5 * a_d.at(i, j) * a_d.at(i, j) * g2;
        }
        psi.cross_e2d2 += slot_e * slot_d;
    }
    return psi;
}

double i_out(const PsiTerms& psi, double rho, const EHCircuit& circuit) {
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("i_out: rho out of [0,1]");
    const double quad = circuit.k2 * rho * circuit.r_ohm * (psi.ye2 + psi.yd2);
    const double quart = circuit.k4 * rho * rho * circuit.r_ohm * circuit.r_ohm *
                         (psi.ye4 + psi.yd4 + 6.0 * psi.cross_e2d2);
    return quad + quart;
}

}  // namespace oi
