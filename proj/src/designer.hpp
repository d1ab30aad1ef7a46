#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "eh_model.hpp"
#include "gp_solver.hpp"
#include "rate_model.hpp"
#include "units.hpp"

namespace oi {

// System-level configuration for one waveform design.
struct SystemParams {
    GridDims dims{12, 12};
    double df_hz = 15e3;
    double fc_hz = 27e9;
    double p_tx_w = dbm_to_watts(36.1);
    double p_pilot_w = dbm_to_watts(20.0);
    double p_peak_w = 0.0;  // 0 = auto: 4 P_o / N
    double p_noise_w = dbm_to_watts(-50.0);
    double lambda = 0.1;   // residual energy-signal interference factor
    double r_min = 40.0;   // minimum rate, bits per time slot
    EHCircuit circuit;
    double rx_gain_db = 2.0;
    double path_loss_db = -50.0;

    double p_opt() const { return p_tx_w - p_pilot_w; }
    double p_peak() const {
        return p_peak_w > 0.0 ? p_peak_w : 4.0 * p_opt() / dims.n_slots;
    }
    // Path loss and rx gain fold into one amplitude scale on the channel.
    double channel_amp_scale() const {
        return db_to_amplitude(path_loss_db + rx_gain_db);
    }
    double symbol_duration_s() const { return 1.0 / df_hz; }
    double bandwidth_hz() const { return dims.m_subcarriers * df_hz; }

    void validate() const;  // throws std::invalid_argument on bad invariants
};

// TF-domain design point: nonnegative amplitude grids plus the receive
// power split (rho to the harvester, rho_bar to the data chain).
struct DesignVariables {
    RealGrid a_d;
    RealGrid a_e;
    double rho = 0.0;
    double rho_bar = 0.0;

    double power_used() const;       // 0.5 (||a_d||^2 + ||a_e||^2)
    double slot_power(int n) const;  // sum_m a_d^2 + a_e^2
};

struct IterationRecord {
    double i_out = 0.0;
    GPStatus gp_status = GPStatus::optimal;
    int newton_steps = 0;
};

struct DesignSolution {
    DesignVariables vars;
    DDGrid x_d_dd;
    DDGrid x_e_dd;
    double i_out = 0.0;
    RateReport rate;
    std::vector<IterationRecord> trace;
    int iterations = 0;
    bool converged = false;
};

struct DesignerOptions {
    double eps_rel = 1e-3;  // stop when |i_out step| < eps_rel * i_out
    int max_outer = 30;
    // The trace-monotonicity slack is orders of magnitude looser than this
    // gap, and shorter barrier stages center in a handful of steps.
    GPOptions gp{.tol = 1e-5, .max_newton_steps = 4000, .barrier_mu = 8.0};
    bool tie_slots = false;  // one amplitude per subcarrier, constant over slots
    double zeta_min = 0.02;
    double amp_floor_scale = 1e-6;  // floor = scale * sqrt(P_o / MN)
};

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Builds the successive-GP subproblems for one channel estimate and runs the
// design loop: condense the DC objective and the per-element interference
// posynomials into monomials at the current iterate, solve the resulting GP,
// re-expand, repeat until the harvested DC stabilizes.
class WaveformDesigner {
public:
    // `ch` is the effective channel (path loss / antenna gain already
    // applied): h_est grid plus TF error variance.
    WaveformDesigner(TFChannel ch, SystemParams params, DesignerOptions opt = {});

    DesignVariables initialize() const;

    // Standard-form GP for the current expansion point. Exposed for tests;
    // `run` drives it internally.
    GPProblem build_p2(const DesignVariables& point) const;

    DesignSolution run();

    // SFFT of the TF design back to the delay-Doppler domain. Energy-signal
    // phases pre-compensate the channel estimate; data amplitudes map as-is.
    static std::pair<DDGrid, DDGrid> to_dd(const DesignVariables& vars,
                                           const TFChannel& ch);

    // Exact closed-form evaluation of the current models at a design point.
    double evaluate_i_out(const DesignVariables& vars) const;
    RateReport evaluate_rate(const DesignVariables& vars) const;

    // Introspection for tests.
    const VarSet& variables() const { return vars_; }
    const Posynomial& iout_posynomial() const { return iout_posy_; }
    const Posynomial& kappa_posynomial(int n, int m) const;
    int n_design_vars() const { return n_vars_; }
    std::vector<double> pack_point(const DesignVariables& vars) const;
    const RealGrid& channel_magnitude() const { return hmag_; }

private:
    VarId ad(int n, int m) const;
    VarId ae(int n, int m) const;
    VarId gamma(int n, int m) const;
    double initial_zeta() const;
    DesignVariables init_with_zeta(double zeta) const;
    DesignSolution run_sca(const DesignVariables& init);
    DesignVariables unpack(const std::vector<double>& x) const;
    std::vector<double> pack_full(const DesignVariables& vars,
                                  const Monomial& iout_hat) const;
    void build_static_parts();

    TFChannel ch_;
    SystemParams params_;
    DesignerOptions opt_;
    RealGrid hmag_;   // |H_est| per element
    double err_var_;  // TF error variance
    double amp_floor_ = 0.0;

    VarSet vars_;
    int n_vars_ = 0;
    bool rate_active_ = true;
    VarId rho_ = -1, rho_bar_ = -1, eta_ = -1;
    Posynomial iout_posy_;                 // over {A_D, A_E, rho}
    std::vector<Posynomial> kappa_posys_;  // per element, over {A_D, A_E, rho_bar}
    std::vector<Posynomial> dnum_posys_;   // rate-denominator numerators, per element
    Posynomial power_posy_;                // constraint (d)
    std::vector<Posynomial> peak_posys_;   // constraint (e), per built slot
    std::vector<int> built_slots_;
};

}  // namespace oi
