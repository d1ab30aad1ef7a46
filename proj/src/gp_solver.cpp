#include "gp_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace oi {

void GPProblem::add_constraint(Posynomial p, std::string label, double coeff) {
    GPConstraint c;
    c.coeff = coeff;
    c.factors.push_back(std::move(p));
    c.label = std::move(label);
    constraints.push_back(std::move(c));
}

void GPProblem::add_product_constraint(std::vector<Posynomial> factors,
                                       std::string label, double coeff) {
    GPConstraint c;
    c.coeff = coeff;
    c.factors = std::move(factors);
    c.label = std::move(label);
    constraints.push_back(std::move(c));
}

void GPProblem::set_lower(VarId v, double lo) {
    lower.resize(static_cast<size_t>(vars.size()), 0.0);
    lower[static_cast<size_t>(v)] = lo;
}

void GPProblem::set_upper(VarId v, double hi) {
    upper.resize(static_cast<size_t>(vars.size()),
                 std::numeric_limits<double>::infinity());
    upper[static_cast<size_t>(v)] = hi;
}

const char* to_string(GPStatus s) {
    switch (s) {
        case GPStatus::optimal: return "optimal";
        case GPStatus::max_iter: return "max_iter";
        case GPStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

namespace {

struct CTerm {
    double logc;
    std::vector<std::pair<int, double>> a;  // (local support index, exponent)
};

struct CFactor {
    std::vector<CTerm> terms;
};

// Compiled constraint block: offset + sum_j LSE_j(y_support) <= 0.
struct CBlock {
    double offset = 0.0;
    std::vector<CFactor> factors;
    std::vector<int> support;  // sorted global variable ids
};

// synthetic box applied to variables without explicit bounds
constexpr double kBoxLo = 1e-30;
constexpr double kBoxHi = 1e+30;

CFactor compile_factor(const Posynomial& p,
                       const std::unordered_map<int, int>& local) {
    CFactor f;
    f.terms.reserve(p.terms.size());
    for (const auto& t : p.terms) {
        CTerm ct;
        ct.logc = std::log(t.coeff);
        for (const auto& [v, e] : t.exps) ct.a.emplace_back(local.at(v), e);
        f.terms.push_back(std::move(ct));
    }
    return f;
}

CBlock compile_block(const GPConstraint& c) {
    if (c.coeff <= 0.0)
        throw std::invalid_argument("GP constraint coefficient must be positive");
    CBlock b;
    b.offset = std::log(c.coeff);
    std::vector<int> vars;
    for (const auto& f : c.factors) {
        if (f.empty()) throw std::invalid_argument("GP constraint with empty factor");
        for (const auto& t : f.terms)
            for (const auto& [v, e] : t.exps) vars.push_back(v);
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    b.support = std::move(vars);
    std::unordered_map<int, int> local;
    for (size_t i = 0; i < b.support.size(); ++i)
        local[b.support[i]] = static_cast<int>(i);
    for (const auto& f : c.factors) b.factors.push_back(compile_factor(f, local));
    return b;
}

// Per-block scratch keeps allocations out of the Newton loop.
struct BlockScratch {
    Eigen::VectorXd grad;   // local gradient of F
    Eigen::MatrixXd hess;   // local Hessian of F
    Eigen::VectorXd fgrad;  // per-factor gradient
};

// Value of one block at y; when a scratch is given, the local gradient and
// Hessian (over the block support) are written to it.
double block_value(const CBlock& b, const Eigen::VectorXd& y, BlockScratch* ws) {
    const int ns = static_cast<int>(b.support.size());
    if (ws) {
        ws->grad.setZero(ns);
        ws->hess.setZero(ns, ns);
    }
    thread_local std::vector<double> zz;
    double val = b.offset;
    for (const auto& f : b.factors) {
        zz.resize(f.terms.size());
        double zmax = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < f.terms.size(); ++k) {
            double t = f.terms[k].logc;
            for (const auto& [li, e] : f.terms[k].a)
                t += e * y[b.support[static_cast<size_t>(li)]];
            zz[k] = t;
            zmax = std::max(zmax, t);
        }
        double sum = 0.0;
        for (double t : zz) sum += std::exp(t - zmax);
        val += zmax + std::log(sum);
        if (!ws) continue;

        // softmax weights give the LSE gradient; Hessian is
        // sum_k p_k a_k a_k^T - g g^T (PSD). Single-term factors are affine:
        // gradient only, no curvature.
        ws->fgrad.setZero(ns);
        if (f.terms.size() == 1) {
            for (const auto& [li, e] : f.terms[0].a) ws->fgrad[li] += e;
        } else {
            for (size_t k = 0; k < f.terms.size(); ++k) {
                const double p = std::exp(zz[k] - zmax) / sum;
                if (p <= 0.0) continue;
                for (const auto& [li, e] : f.terms[k].a) ws->fgrad[li] += p * e;
                for (const auto& [li, ei] : f.terms[k].a)
                    for (const auto& [lj, ej] : f.terms[k].a)
                        ws->hess(li, lj) += p * ei * ej;
            }
            ws->hess.noalias() -= ws->fgrad * ws->fgrad.transpose();
        }
        ws->grad += ws->fgrad;
    }
    return val;
}

struct Compiled {
    int nv = 0;
    CBlock objective;                 // single-factor block, offset 0
    std::vector<CBlock> blocks;       // constraints + bounds
    std::vector<std::string> labels;
};

Compiled compile(const GPProblem& prob) {
    Compiled c;
    c.nv = prob.n_vars();
    if (prob.objective.empty())
        throw std::invalid_argument("solve_gp: empty objective");
    GPConstraint obj;
    obj.factors.push_back(prob.objective);
    c.objective = compile_block(obj);
    for (const auto& con : prob.constraints) {
        c.blocks.push_back(compile_block(con));
        c.labels.push_back(con.label);
    }
    // Every variable gets a box: the user bound when given, else (when
    // synthetic bounds are on) a wide one that keeps the log-domain
    // feasible set compact along slack directions the problem does not
    // otherwise pin down.
    for (int v = 0; v < c.nv; ++v) {
        double lo = prob.synthetic_bounds ? kBoxLo : 0.0;
        double hi = prob.synthetic_bounds ? kBoxHi
                                          : std::numeric_limits<double>::infinity();
        if (static_cast<size_t>(v) < prob.lower.size() && prob.lower[static_cast<size_t>(v)] > 0.0)
            lo = prob.lower[static_cast<size_t>(v)];
        if (static_cast<size_t>(v) < prob.upper.size() &&
            std::isfinite(prob.upper[static_cast<size_t>(v)])) {
            hi = prob.upper[static_cast<size_t>(v)];
            if (hi <= 0.0)
                throw std::invalid_argument("solve_gp: nonpositive upper bound");
        }
        if (lo > 0.0) {
            CBlock blo;
            blo.support = {v};
            CFactor flo;
            flo.terms.push_back({std::log(lo), {{0, -1.0}}});
            blo.factors.push_back(std::move(flo));
            c.blocks.push_back(std::move(blo));
            c.labels.push_back("lower_bound");
        }
        if (std::isfinite(hi)) {
            CBlock bhi;
            bhi.support = {v};
            CFactor fhi;
            fhi.terms.push_back({-std::log(hi), {{0, 1.0}}});
            bhi.factors.push_back(std::move(fhi));
            c.blocks.push_back(std::move(bhi));
            c.labels.push_back("upper_bound");
        }
    }
    return c;
}

class BarrierSolver {
public:
    BarrierSolver(const Compiled& c, const GPOptions& opt) : c_(c), opt_(opt) {
        scratch_.resize(c.blocks.size());
        for (size_t i = 0; i < c.blocks.size(); ++i) {
            const int ns = static_cast<int>(c.blocks[i].support.size());
            scratch_[i].grad.resize(ns);
            scratch_[i].hess.resize(ns, ns);
            scratch_[i].fgrad.resize(ns);
        }
        obj_scratch_.grad.resize(static_cast<int>(c.objective.support.size()));
        obj_scratch_.hess.resize(static_cast<int>(c.objective.support.size()),
                                 static_cast<int>(c.objective.support.size()));
        obj_scratch_.fgrad.resize(static_cast<int>(c.objective.support.size()));
    }

    // phase1: minimizes s with constraints F_c(y) - s <= 0, where s is the
    // trailing coordinate of yx. Otherwise minimizes the compiled objective
    // with constraints F_c(y) <= 0.
    // Returns false when the Newton budget runs out.
    bool center(Eigen::VectorXd& yx, double t, bool phase1, int* steps_used,
                int step_budget,
                double s_exit = -std::numeric_limits<double>::infinity(),
                double decrement_tol = 1e-11) {
        const int nd = static_cast<int>(yx.size());
        Eigen::VectorXd g(nd), d(nd);
        Eigen::MatrixXd H(nd, nd);
        stalls_ = 0;
        while (*steps_used < step_budget) {
            ++*steps_used;
            if (phase1 && yx[nd - 1] < s_exit) return true;
            double phi = 0.0;
            if (!assemble(yx, t, phase1, &phi, &g, &H)) return false;

            Eigen::LLT<Eigen::MatrixXd> llt(H);
            const double diag_scale = std::max(1.0, H.diagonal().maxCoeff());
            double ridge = 1e-14 * diag_scale;
            while (llt.info() != Eigen::Success) {
                if (ridge > 1e-2 * diag_scale) return false;
                H.diagonal().array() += ridge;
                ridge *= 100.0;
                llt.compute(H);
            }
            d = llt.solve(-g);
            const double lambda2 = -g.dot(d);
            if (lambda2 / 2.0 < decrement_tol) return true;

            // cap the step: phase-I models are unbounded along rays and a
            // near-singular Hessian can otherwise produce astronomic steps
            const double dmax = 20.0 * (1.0 + yx.norm());
            if (d.norm() > dmax) d *= dmax / d.norm();

            // backtracking line search with domain check
            double alpha = 1.0;
            const double slope = g.dot(d);
            Eigen::VectorXd trial(nd);
            bool moved = false;
            double phi_new = phi;
            while (alpha > 1e-14) {
                trial = yx + alpha * d;
                double phi_t;
                if (domain_ok(trial, phase1, t, &phi_t) &&
                    phi_t <= phi + 0.25 * alpha * slope) {
                    yx = trial;
                    phi_new = phi_t;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) return true;  // cannot make progress; accept center
            // near machine precision the decrement is noise-limited; treat
            // repeated negligible descent as centered
            if (phi - phi_new <= 1e-13 * (1.0 + std::abs(phi))) {
                if (++stalls_ >= 2) return true;
            } else {
                stalls_ = 0;
            }
        }
        return false;
    }

    // Evaluates all constraint values at y (phase-2 coordinates).
    double max_constraint(const Eigen::VectorXd& y) {
        double mx = -std::numeric_limits<double>::infinity();
        for (const auto& b : c_.blocks) mx = std::max(mx, block_value(b, y, nullptr));
        if (c_.blocks.empty()) mx = -1.0;
        return mx;
    }

    int n_blocks() const { return static_cast<int>(c_.blocks.size()); }

    // Residual of the scaled KKT stationarity condition at a centered point.
    double stationarity(const Eigen::VectorXd& y, double t) {
        Eigen::VectorXd g(static_cast<int>(y.size()));
        double phi;
        if (!assemble(y, t, false, &phi, &g, nullptr))
            return std::numeric_limits<double>::infinity();
        return g.lpNorm<Eigen::Infinity>() / t;
    }

private:
    // phi = t * f0 + sum_c -log(-F_c); fills gradient and (optionally)
    // Hessian. Returns false if outside the barrier domain.
    bool assemble(const Eigen::VectorXd& yx, double t, bool phase1, double* phi,
                  Eigen::VectorXd* g, Eigen::MatrixXd* H) {
        const int nd = static_cast<int>(yx.size());
        const int s_idx = nd - 1;
        if (g) g->setZero(nd);
        if (H) H->setZero(nd, nd);
        double phi_acc = 0.0;

        if (phase1) {
            phi_acc += t * yx[s_idx];
            if (g) (*g)[s_idx] += t;
        } else {
            auto& ws = obj_scratch_;
            const double f0 = block_value(c_.objective, yx, &ws);
            phi_acc += t * f0;
            const auto& sup = c_.objective.support;
            if (g)
                for (size_t i = 0; i < sup.size(); ++i)
                    (*g)[sup[i]] += t * ws.grad[static_cast<int>(i)];
            if (H)
                for (size_t i = 0; i < sup.size(); ++i)
                    for (size_t j = 0; j < sup.size(); ++j)
                        (*H)(sup[i], sup[j]) +=
                            t * ws.hess(static_cast<int>(i), static_cast<int>(j));
        }

        for (size_t bi = 0; bi < c_.blocks.size(); ++bi) {
            const auto& b = c_.blocks[bi];
            auto& ws = scratch_[bi];
            double val = block_value(b, yx, (g || H) ? &ws : nullptr);
            if (phase1) val -= yx[s_idx];
            if (!(val < 0.0)) return false;
            const double winv = 1.0 / (-val);
            const double w2 = winv * winv;
            phi_acc -= std::log(-val);
            const auto& sup = b.support;
            const int ns = static_cast<int>(sup.size());
            if (g) {
                for (int i = 0; i < ns; ++i) (*g)[sup[static_cast<size_t>(i)]] += winv * ws.grad[i];
                if (phase1) (*g)[s_idx] += winv * -1.0;
            }
            if (H) {
                for (int i = 0; i < ns; ++i) {
                    const int gi = sup[static_cast<size_t>(i)];
                    for (int j = 0; j < ns; ++j) {
                        const int gj = sup[static_cast<size_t>(j)];
                        (*H)(gi, gj) += winv * ws.hess(i, j) + w2 * ws.grad[i] * ws.grad[j];
                    }
                    if (phase1) {
                        (*H)(gi, s_idx) += w2 * ws.grad[i] * -1.0;
                        (*H)(s_idx, gi) += w2 * ws.grad[i] * -1.0;
                    }
                }
                if (phase1) (*H)(s_idx, s_idx) += w2;
            }
        }
        *phi = phi_acc;
        return true;
    }

    bool domain_ok(const Eigen::VectorXd& yx, bool phase1, double t, double* phi) {
        return assemble(yx, t, phase1, phi, nullptr, nullptr);
    }

    const Compiled& c_;
    const GPOptions& opt_;
    std::vector<BlockScratch> scratch_;
    BlockScratch obj_scratch_;
    int stalls_ = 0;
};

}  // namespace

GPSolution solve_gp(const GPProblem& prob, const GPOptions& opt,
                    const std::vector<double>* x0) {
    const Compiled comp = compile(prob);
    const int nv = comp.nv;
    GPSolution sol;

    Eigen::VectorXd y(nv);
    if (x0) {
        if (static_cast<int>(x0->size()) != nv)
            throw std::invalid_argument("solve_gp: x0 size mismatch");
        for (int i = 0; i < nv; ++i) {
            if (!((*x0)[static_cast<size_t>(i)] > 0.0))
                throw std::invalid_argument("solve_gp: x0 must be strictly positive");
            y[i] = std::log((*x0)[static_cast<size_t>(i)]);
        }
    } else {
        y.setZero();
    }

    BarrierSolver solver(comp, opt);
    int steps = 0;

    // Phase I if the start violates any constraint.
    const double f_start = solver.max_constraint(y);
    if (f_start >= 0.0) {
        Eigen::VectorXd ys(nv + 1);
        ys.head(nv) = y;
        const double s0 = f_start + 1.0;
        ys[nv] = s0;
        const double s_exit = -1e-6 * (1.0 + std::abs(s0));
        double t = 1.0;
        // overshooting t past the gap target only runs the barrier into
        // cancellation noise; cap it
        const double t_target =
            (solver.n_blocks() + 1) / std::max(opt.tol, 1e-10);
        bool found = false;
        bool certified = false;
        while (steps < opt.max_newton_steps) {
            if (!solver.center(ys, t, true, &steps, opt.max_newton_steps, s_exit)) break;
            if (ys[nv] < s_exit) {
                found = true;
                break;
            }
            if (t >= t_target) {
                certified = true;
                break;
            }
            t = std::min(t * opt.barrier_mu, t_target);
        }
        if (!found && ys[nv] < 0.0) found = true;  // thin but strictly feasible
        if (!found) {
            if (certified) {
                sol.status = GPStatus::infeasible;
                sol.message = "no strictly feasible point found (phase I best slack " +
                              std::to_string(ys[nv]) + ")";
            } else {
                sol.status = GPStatus::max_iter;
                sol.message = "phase I exceeded Newton budget";
            }
            sol.newton_steps = steps;
            return sol;
        }
        y = ys.head(nv);
    }

    // Phase II: follow the central path up to the gap target.
    const int m = solver.n_blocks();
    const double t_target = (m == 0) ? 1.0 : m / opt.tol;
    double t = std::min(std::max(opt.t_start, 1.0), t_target);
    bool converged = false;
    while (steps < opt.max_newton_steps) {
        if (!solver.center(y, t, false, &steps, opt.max_newton_steps)) break;
        if (m == 0 || t >= t_target) {
            converged = true;
            break;
        }
        t = std::min(t * opt.barrier_mu, t_target);
    }
    if (converged && m > 0) {
        // a few extra-tight Newton steps sharpen the stationarity residual
        solver.center(y, t, false, &steps, steps + 8,
                      -std::numeric_limits<double>::infinity(), 1e-16);
    }

    sol.barrier_t = t;
    sol.x.resize(static_cast<size_t>(nv));
    bool extreme = false;
    for (int i = 0; i < nv; ++i) {
        if (!std::isfinite(y[i]) || std::abs(y[i]) > 700.0) extreme = true;
        sol.x[static_cast<size_t>(i)] = std::exp(std::min(700.0, std::max(-700.0, y[i])));
    }
    if (extreme) {
        sol.status = GPStatus::max_iter;
        sol.message = "iterates ran to the edge of the positive orthant";
        sol.kkt_residual = std::numeric_limits<double>::infinity();
        return sol;
    }
    sol.objective_value = prob.objective.eval(sol.x);
    const double gap = (m == 0) ? 0.0 : static_cast<double>(m) / t;
    sol.kkt_residual = std::max(gap, solver.stationarity(y, std::max(t, 1.0)));
    sol.newton_steps = steps;
    sol.status = converged ? GPStatus::optimal : GPStatus::max_iter;
    if (!converged) sol.message = "Newton budget exhausted before target gap";
    return sol;
}

std::string gp_problem_to_json(const GPProblem& prob) {
    nlohmann::json j;
    auto& vars = j["variables"] = nlohmann::json::array();
    for (int i = 0; i < prob.vars.size(); ++i) vars.push_back(prob.vars.name(i));

    auto posy_json = [](const Posynomial& p) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : p.terms) {
            nlohmann::json term;
            term["c"] = t.coeff;
            auto& e = term["e"] = nlohmann::json::array();
            for (const auto& [v, ex] : t.exps) e.push_back({v, ex});
            arr.push_back(std::move(term));
        }
        return arr;
    };

    j["objective"] = posy_json(prob.objective);
    auto& cons = j["constraints"] = nlohmann::json::array();
    for (const auto& c : prob.constraints) {
        nlohmann::json jc;
        jc["coeff"] = c.coeff;
        jc["label"] = c.label;
        auto& fs = jc["factors"] = nlohmann::json::array();
        for (const auto& f : c.factors) fs.push_back(posy_json(f));
        cons.push_back(std::move(jc));
    }
    auto& lo = j["lower"] = nlohmann::json::array();
    for (size_t v = 0; v < prob.lower.size(); ++v)
        if (prob.lower[v] > 0.0) lo.push_back({static_cast<int>(v), prob.lower[v]});
    auto& hi = j["upper"] = nlohmann::json::array();
    for (size_t v = 0; v < prob.upper.size(); ++v)
        if (std::isfinite(prob.upper[v])) hi.push_back({static_cast<int>(v), prob.upper[v]});
    return j.dump();
}

GPProblem gp_problem_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    GPProblem prob;
    for (const auto& name : j.at("variables")) prob.vars.add(name.get<std::string>());

    auto posy_parse = [](const nlohmann::json& arr) {
        Posynomial p;
        for (const auto& term : arr) {
            Monomial m;
            m.coeff = term.at("c").get<double>();
            for (const auto& e : term.at("e"))
                m.mul_var(e[0].get<VarId>(), e[1].get<double>());
            p.add(std::move(m));
        }
        return p;
    };

    prob.objective = posy_parse(j.at("objective"));
    for (const auto& jc : j.at("constraints")) {
        GPConstraint c;
        c.coeff = jc.at("coeff").get<double>();
        c.label = jc.at("label").get<std::string>();
        for (const auto& f : jc.at("factors")) c.factors.push_back(posy_parse(f));
        prob.constraints.push_back(std::move(c));
    }
    for (const auto& b : j.at("lower")) prob.set_lower(b[0].get<VarId>(), b[1].get<double>());
    for (const auto& b : j.at("upper")) prob.set_upper(b[0].get<VarId>(), b[1].get<double>());
    return prob;
}

}  // namespace oi
