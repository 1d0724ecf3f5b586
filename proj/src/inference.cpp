#include "probbits/inference.hpp"

namespace probbits {

namespace {

double evidence_mass(Manager& m, const Evidence& e) {
    double we = m.wmc(e.formula());
    if (we <= 0.0) {
        throw Error(ErrorKind::UnsatisfiableEvidence, "evidence has zero probability");
    }
    return we;
}

}  // namespace

double prob(NodeRef f, const Evidence& e) {
    Manager& m = *e.formula().manager();
    double we = evidence_mass(m, e);
    return m.wmc(m.land(f, e.formula())) / we;
}

Distribution marginal_distribution(const ProbInt& x, const Evidence& e) {
    Manager& m = *x.manager();
    double we = evidence_mass(m, e);
    if (x.width() > 26) {
        throw Error(ErrorKind::InvalidRange,
                    "marginal enumeration capped at width 26; use expectation "
                    "or query narrower values");
    }
    Distribution dist;
    uint64_t support = uint64_t{1} << x.width();
    for (uint64_t k = 0; k < support; ++k) {
        NodeRef conj = e.formula();
        for (uint32_t i = 0; i < x.width() && !conj.is_false(); ++i) {
            NodeRef b = x.bit(i);
            conj = m.land(conj, ((k >> i) & 1) ? b : m.lnot(b));
        }
        if (conj.is_false()) continue;
        double p = m.wmc(conj) / we;
        if (p > 0.0) dist[k] = p;
    }
    return dist;
}

double expectation(const ProbInt& x, const Evidence& e) {
    Manager& m = *x.manager();
    double we = evidence_mass(m, e);
    double acc = 0.0;
    double scale = 1.0;
    for (uint32_t i = 0; i < x.width(); ++i, scale *= 2.0) {
        acc += scale * m.wmc(m.land(x.bit(i), e.formula())) / we;
    }
    return acc;
}

}  // namespace probbits
