#include "posynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace oi {

VarId VarSet::add(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end())
        throw std::invalid_argument("VarSet: duplicate variable " + name);
    const VarId v = static_cast<VarId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, v);
    return v;
}

VarId VarSet::id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw std::invalid_argument("VarSet: unknown variable " + name);
    return it->second;
}

Monomial& Monomial::mul_var(VarId v, double exp) {
    if (exp == 0.0) return *this;
    auto it = std::lower_bound(exps.begin(), exps.end(), v,
                               [](const auto& p, VarId w) { return p.first < w; });
    if (it != exps.end() && it->first == v) {
        it->second += exp;
        if (it->second == 0.0) exps.erase(it);
    } else {
        exps.insert(it, {v, exp});
    }
    return *this;
}

double Monomial::eval(std::span<const double> x) const {
    double acc = coeff;
    for (const auto& [v, e] : exps) {
        const double xv = x[static_cast<size_t>(v)];
        if (!(xv > 0.0))
            throw std::invalid_argument("Monomial::eval: nonpositive point");
        acc *= std::pow(xv, e);
    }
    return acc;
}

double Monomial::log_eval(std::span<const double> logx) const {
    double acc = std::log(coeff);
    for (const auto& [v, e] : exps) acc += e * logx[static_cast<size_t>(v)];
    return acc;
}

double Posynomial::eval(std::span<const double> x) const {
    // Kahan summation: quartic expansions reach ~1e4 terms and the AM-GM
    // tightness checks are asserted to 1e-9 relative.
    double sum = 0.0, comp = 0.0;
    for (const auto& t : terms) {
        const double y = t.eval(x) - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

Posynomial& Posynomial::add(Monomial m) {
    if (m.coeff < 0.0)
        throw std::invalid_argument("Posynomial: negative coefficient");
    if (m.coeff > 0.0) terms.push_back(std::move(m));
    return *this;
}

Posynomial& Posynomial::add(const Posynomial& p) {
    for (const auto& t : p.terms) add(t);
    return *this;
}

Posynomial operator*(const Posynomial& a, const Posynomial& b) {
    Posynomial out;
    out.terms.reserve(a.terms.size() * b.terms.size());
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            Monomial m = ta;
            m.coeff *= tb.coeff;
            for (const auto& [v, e] : tb.exps) m.mul_var(v, e);
            out.terms.push_back(std::move(m));
        }
    return out;
}

namespace {

struct ExpsHash {
    size_t operator()(const std::vector<std::pair<VarId, double>>& exps) const {
        size_t h = 0xcbf29ce484222325ULL;
        for (const auto& [v, e] : exps) {
            h ^= static_cast<size_t>(v);
            h *= 0x100000001b3ULL;
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(e));
            std::memcpy(&bits, &e, sizeof(bits));
            h ^= bits;
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

}  // namespace

Posynomial merged(const Posynomial& p) {
    std::unordered_map<std::vector<std::pair<VarId, double>>, size_t, ExpsHash> seen;
    Posynomial out;
    out.terms.reserve(p.terms.size());
    for (const auto& t : p.terms) {
        auto [it, inserted] = seen.try_emplace(t.exps, out.terms.size());
        if (inserted) {
            out.terms.push_back(t);
        } else {
            out.terms[it->second].coeff += t.coeff;
        }
    }
    return out;
}

std::vector<double> amgm_weights(const Posynomial& p, std::span<const double> point) {
    if (p.empty()) throw std::invalid_argument("amgm_weights: empty posynomial");
    std::vector<double> vals(p.terms.size());
    double sum = 0.0, comp = 0.0;
    for (size_t k = 0; k < p.terms.size(); ++k) {
        vals[k] = p.terms[k].eval(point);
        const double y = vals[k] - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    if (!(sum > 0.0))
        throw std::invalid_argument("amgm_weights: degenerate zero value at point");
    for (auto& v : vals) v /= sum;
    return vals;
}

Monomial amgm_condense(const Posynomial& p, std::span<const double> point) {
    const Posynomial q = merged(p);
    const auto w = amgm_weights(q, point);

    // log coefficient accumulates sum_k w_k (log c_k - log w_k); exponents
    // are the w-weighted combination of the term exponents.
    double logc = 0.0, comp = 0.0;
    std::unordered_map<VarId, double> exp_acc;
    for (size_t k = 0; k < q.terms.size(); ++k) {
        if (w[k] <= 0.0) continue;  // vanishing weight contributes nothing
        const double y = w[k] * (std::log(q.terms[k].coeff) - std::log(w[k])) - comp;
        const double s = logc + y;
        comp = (s - logc) - y;
        logc = s;
        for (const auto& [v, e] : q.terms[k].exps) exp_acc[v] += w[k] * e;
    }
    Monomial m;
    m.coeff = std::exp(logc);
    m.exps.assign(exp_acc.begin(), exp_acc.end());
    std::sort(m.exps.begin(), m.exps.end());
    std::erase_if(m.exps, [](const auto& p2) { return p2.second == 0.0; });
    return m;
}

}  // namespace oi
