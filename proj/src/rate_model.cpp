#include "rate_model.hpp"

#include <cmath>
#include <stdexcept>

namespace oi {

void split_powers(const RealGrid& a_d, const RealGrid& a_e, const RealGrid& hmag,
                  double err_var, double rho_bar, RealGrid& p_d, RealGrid& p_e) {
    if (rho_bar < 0.0 || rho_bar > 1.0)
        throw std::invalid_argument("split_powers: rho_bar out of [0,1]");
    if (!(a_d.dims == hmag.dims) || !(a_e.dims == hmag.dims))
        throw std::invalid_argument("split_powers: shape mismatch");
    p_d = RealGrid(hmag.dims);
    p_e = RealGrid(hmag.dims);
    for (size_t i = 0; i < hmag.v.size(); ++i) {
        const double gain2 = hmag.v[i] * hmag.v[i] + err_var;
        p_d.v[i] = rho_bar * a_d.v[i] * a_d.v[i] * gain2;
        p_e.v[i] = rho_bar * a_e.v[i] * a_e.v[i] * gain2;
    }
}

RateReport rate(const RealGrid& a_d, const RealGrid& a_e, const RealGrid& hmag,
                double err_var, double rho_bar, double lambda, double p_noise) {
    if (p_noise <= 0.0) throw std::invalid_argument("rate: p_noise must be > 0");
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("rate: lambda out of [0,1]");
    RealGrid p_d, p_e;
    split_powers(a_d, a_e, hmag, err_var, rho_bar, p_d, p_e);

    const int n = hmag.dims.n_slots;
    const int m = hmag.dims.m_subcarriers;
    RateReport rep;
    rep.sinr = RealGrid(hmag.dims);
    rep.per_slot.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double c_n = 0.0;
        for (int j = 0; j < m; ++j) {
            const double a2 = a_d.at(i, j) * a_d.at(i, j);
            const double sig = rho_bar * a2 * hmag.at(i, j) * hmag.at(i, j);
            const double denom = lambda * p_e.at(i, j) + rho_bar * a2 * err_var + p_noise;
            const double sinr = sig / denom;
            rep.sinr.at(i, j) = sinr;
            c_n += std::log2(1.0 + sinr);
        }
        rep.per_slot[static_cast<size_t>(i)] = c_n;
        rep.average += c_n;
    }
    rep.average /= static_cast<double>(n);
    return rep;
}

}  // namespace oi
