#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace oi {

// Positive-coefficient power-law algebra over named positive variables.
// Variables are dense integer ids into a VarSet; assignments are plain
// vectors indexed by id.

using VarId = std::int32_t;

class VarSet {
public:
    VarId add(const std::string& name);
    VarId id(const std::string& name) const;  // throws if unknown
    const std::string& name(VarId v) const { return names_.at(static_cast<size_t>(v)); }
    int size() const { return static_cast<int>(names_.size()); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, VarId> index_;
};

// coeff * prod_v x_v^e_v with coeff > 0. Exponent pairs are kept sorted by
// variable id with no duplicates and no zero exponents.
struct Monomial {
    double coeff = 1.0;
    std::vector<std::pair<VarId, double>> exps;

    Monomial& mul_var(VarId v, double exp);  // multiply by x_v^exp
    double eval(std::span<const double> x) const;
    double log_eval(std::span<const double> logx) const;  // log of value
};

struct Posynomial {
    std::vector<Monomial> terms;

    bool empty() const { return terms.empty(); }
    double eval(std::span<const double> x) const;
    Posynomial& add(Monomial m);  // drops zero-coefficient terms, rejects negatives
    Posynomial& add(const Posynomial& p);
};

// Product of two posynomials, fully expanded.
Posynomial operator*(const Posynomial& a, const Posynomial& b);

// Merges terms with identical exponent vectors (coefficients added).
Posynomial merged(const Posynomial& p);

// Best monomial lower bound of p at `point` (arithmetic-geometric mean
// inequality): with weights w_k = g_k(point)/p(point), returns
//   mhat = prod_k (g_k / w_k)^{w_k}
// which satisfies mhat(x) <= p(x) for all positive x with equality at
// `point`. The weights sum to 1 by construction.
Monomial amgm_condense(const Posynomial& p, std::span<const double> point);

// Weights used by amgm_condense, exposed for diagnostics and tests.
std::vector<double> amgm_weights(const Posynomial& p, std::span<const double> point);

}  // namespace oi
