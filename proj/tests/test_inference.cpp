#include "doctest.h"

#include <cmath>
#include <random>

#include "probbits/arith.hpp"
#include "probbits/inference.hpp"

using namespace probbits;

TEST_CASE("prob with trivial evidence") {
    Manager m;
    NodeRef x = m.fresh_var(0.3);
    Evidence none(m);
    CHECK(prob(x, none) == doctest::Approx(0.3));
}

TEST_CASE("contradictory evidence is an error") {
    Manager m;
    NodeRef x = m.fresh_var(0.3);
    Evidence e(m);
    e.observe(m.land(x, m.lnot(x)));
    CHECK_THROWS_AS(prob(x, e), Error);
    CHECK_THROWS_AS(expectation(const_int(m, 1, 1), e), Error);
}

TEST_CASE("marginal of a constant is a point mass") {
    Manager m;
    Evidence none(m);
    Distribution d = marginal_distribution(const_int(m, 5, 3), none);
    CHECK(d.size() == 1);
    CHECK(d.at(5) == doctest::Approx(1.0));
}

TEST_CASE("conditioning a uniform on an upper bound") {
    Manager m;
    ProbInt x = uniform_int(m, 4);
    Evidence e(m);
    e.observe(lt(x, const_int(m, 2, 2)));
    Distribution d = marginal_distribution(x, e);
    CHECK(d.size() == 2);
    CHECK(d.at(0) == doctest::Approx(0.5));
    CHECK(d.at(1) == doctest::Approx(0.5));
}

TEST_CASE("expectation basics") {
    Manager m;
    Evidence none(m);
    CHECK(expectation(uniform_int(m, 8), none) == doctest::Approx(3.5));
    CHECK(expectation(const_int(m, 11, 4), none) == doctest::Approx(11.0));
    ProbInt s = add(uniform_int(m, 4), uniform_int(m, 4));
    CHECK(expectation(s, none) == doctest::Approx(3.0));
}

TEST_CASE("normalization, consistency, and Bayes identity on random models") {
    std::mt19937_64 rng(31415);
    std::uniform_real_distribution<double> unit(0.1, 0.9);
    for (int round = 0; round < 20; ++round) {
        Manager m;
        std::vector<double> v(2 + rng() % 15);
        for (double& x : v) x = unit(rng);
        ProbInt x = round % 2 ? bitwise_int(m, v) : categ_int(m, v);
        NodeRef f = m.fresh_var(unit(rng));

        Evidence e(m);
        e.observe(m.lor(f, lt(x, const_int(m, 3, x.width() > 2 ? x.width() : 2))));
        double we = m.wmc(e.formula());
        if (we <= 0.0) continue;

        Distribution d = marginal_distribution(x, e);
        double total = 0.0;
        double by_values = 0.0;
        for (auto& [k, p] : d) {
            total += p;
            by_values += static_cast<double>(k) * p;
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
        CHECK(std::abs(by_values - expectation(x, e)) < 1e-9);

        // Bayes consistency
        CHECK(std::abs(prob(f, e) * we - m.wmc(m.land(f, e.formula()))) < 1e-12);

        // conditioning on TRUE is the identity
        Evidence empty(m);
        Distribution unconditioned = marginal_distribution(x, empty);
        double norm = 0.0;
        for (auto& [k, p] : unconditioned) norm += p;
        CHECK(std::abs(norm - 1.0) < 1e-9);
    }
}
