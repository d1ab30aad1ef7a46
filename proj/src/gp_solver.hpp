#pragma once

#include <limits>
#include <string>
#include <vector>

#include "posynomial.hpp"

namespace oi {

// Geometric program in standard form:
//   minimize    objective(x)                      (posynomial)
//   subject to  coeff_c * prod_j factor_{c,j}(x) <= 1   for each constraint
//               lo_v <= x_v <= hi_v               (optional, positive)
// with all variables strictly positive.
//
// A constraint is stored as a product of posynomial factors. A product of
// posynomials is itself a posynomial, but keeping the factors unexpanded
// lets per-slot rate constraints (products of M small posynomials) stay at
// O(M K) terms instead of O(K^M). A single-factor constraint is the usual
// "posynomial <= 1" form. After the log change of variables y = log x each
// constraint becomes a sum of log-sum-exp functions, which is smooth and
// convex, and the solver Newton-centers a log barrier over it.
struct GPConstraint {
    double coeff = 1.0;
    std::vector<Posynomial> factors;
    std::string label;
};

struct GPProblem {
    VarSet vars;
    Posynomial objective;
    std::vector<GPConstraint> constraints;
    std::vector<double> lower;  // per-var, 0 = unbounded below
    std::vector<double> upper;  // per-var, +inf = unbounded above
    // When true, variables without explicit bounds get a wide synthetic box
    // so the log-domain feasible set is compact. Problems whose constraints
    // already bound every variable both ways can turn this off; fewer
    // barrier blocks means less centering work.
    bool synthetic_bounds = true;

    void add_constraint(Posynomial p, std::string label = {}, double coeff = 1.0);
    void add_product_constraint(std::vector<Posynomial> factors, std::string label = {},
                                double coeff = 1.0);
    void set_lower(VarId v, double lo);
    void set_upper(VarId v, double hi);
    int n_vars() const { return vars.size(); }
};

enum class GPStatus { optimal, max_iter, infeasible };

const char* to_string(GPStatus s);

struct GPSolution {
    std::vector<double> x;          // strictly positive assignment
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    double kkt_residual = std::numeric_limits<double>::quiet_NaN();
    GPStatus status = GPStatus::max_iter;
    int newton_steps = 0;
    double barrier_t = 1.0;  // final barrier parameter, usable as a warm start
    std::string message;
};

struct GPOptions {
    double tol = 1e-8;          // duality-gap target (log-objective scale)
    int max_newton_steps = 4000;
    double barrier_mu = 60.0;   // barrier parameter growth factor
    // Initial barrier parameter. A solver warm-started near the previous
    // central path can begin stages close to the gap target.
    double t_start = 1.0;
};

// Solves the GP by a log-barrier interior-point method on the
// log-transformed problem. `x0`, when given, is used as the starting point
// (it does not need to be feasible; a phase-I problem is solved first if it
// is not). Without `x0` the solver starts from all-ones. Variables without
// explicit bounds are boxed into [1e-30, 1e30] to keep the log-domain
// feasible set compact; optima that push into that synthetic box indicate a
// formulation unbounded in the open positive orthant.
GPSolution solve_gp(const GPProblem& prob, const GPOptions& opt = {},
                    const std::vector<double>* x0 = nullptr);

// Debug dump of the full problem (variables, terms, exponents) and its
// inverse, used for solver-regression tests.
std::string gp_problem_to_json(const GPProblem& prob);
GPProblem gp_problem_from_json(const std::string& text);

}  // namespace oi
