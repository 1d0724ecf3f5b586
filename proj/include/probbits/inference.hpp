#pragma once

#include <map>

#include "probbits/encodings.hpp"

namespace probbits {

/// Conjunction of all accumulated observations; TRUE when none.
class Evidence {
public:
    explicit Evidence(Manager& m) : formula_(m.true_node()) {}
    explicit Evidence(NodeRef formula) : formula_(formula) {}

    void observe(NodeRef condition) {
        formula_ = formula_.manager()->land(formula_, condition);
    }
    NodeRef formula() const { return formula_; }

private:
    NodeRef formula_;
};

/// Finite map from integer value to probability; zero-probability values are
/// omitted.
using Distribution = std::map<uint64_t, double>;

/// P(f | e) = wmc(f and e) / wmc(e). Unsatisfiable evidence is an error.
double prob(NodeRef f, const Evidence& e);

/// Full conditional distribution of x, one WMC per support value.
Distribution marginal_distribution(const ProbInt& x, const Evidence& e);

/// E[x | e] via linearity over bits; avoids enumerating the support.
double expectation(const ProbInt& x, const Evidence& e);

}  // namespace probbits
