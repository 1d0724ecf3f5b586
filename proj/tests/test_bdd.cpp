#include "doctest.h"

#include <cmath>
#include <array>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "probbits/bdd.hpp"

using namespace probbits;

namespace {

// Tiny expression tree evaluated independently of the BDD path; used as the
// enumeration oracle for wmc and as a construction recipe for canonicity
// checks.
struct Formula {
    enum Kind { Var, Not, And, Or, Xor } kind;
    int var = -1;
    int lhs = -1, rhs = -1;  // indices into the pool
};

struct FormulaPool {
    std::vector<Formula> nodes;
    int root = -1;

    bool eval(int idx, const std::vector<bool>& assignment) const {
        const Formula& f = nodes[idx];
        switch (f.kind) {
            case Formula::Var: return assignment[f.var];
            case Formula::Not: return !eval(f.lhs, assignment);
            case Formula::And: return eval(f.lhs, assignment) && eval(f.rhs, assignment);
            case Formula::Or: return eval(f.lhs, assignment) || eval(f.rhs, assignment);
            case Formula::Xor: return eval(f.lhs, assignment) != eval(f.rhs, assignment);
        }
        return false;
    }
};

FormulaPool random_formula(std::mt19937_64& rng, int num_vars, int size) {
    FormulaPool pool;
    std::uniform_int_distribution<int> var_pick(0, num_vars - 1);
    for (int i = 0; i < num_vars; ++i) {
        pool.nodes.push_back(Formula{Formula::Var, i, -1, -1});
    }
    std::uniform_int_distribution<int> op_pick(0, 3);
    for (int i = 0; i < size; ++i) {
        int avail = static_cast<int>(pool.nodes.size());
        std::uniform_int_distribution<int> sub(0, avail - 1);
        Formula f;
        switch (op_pick(rng)) {
            case 0: f = Formula{Formula::Not, -1, sub(rng), -1}; break;
            case 1: f = Formula{Formula::And, -1, sub(rng), sub(rng)}; break;
            case 2: f = Formula{Formula::Or, -1, sub(rng), sub(rng)}; break;
            default: f = Formula{Formula::Xor, -1, sub(rng), sub(rng)}; break;
        }
        pool.nodes.push_back(f);
    }
    pool.root = static_cast<int>(pool.nodes.size()) - 1;
    return pool;
}

NodeRef build_bdd(Manager& m, const FormulaPool& pool, int idx,
                  const std::vector<NodeRef>& vars) {
    const Formula& f = pool.nodes[idx];
    switch (f.kind) {
        case Formula::Var: return vars[f.var];
        case Formula::Not: return m.lnot(build_bdd(m, pool, f.lhs, vars));
        case Formula::And:
            return m.land(build_bdd(m, pool, f.lhs, vars), build_bdd(m, pool, f.rhs, vars));
        case Formula::Or:
            return m.lor(build_bdd(m, pool, f.lhs, vars), build_bdd(m, pool, f.rhs, vars));
        case Formula::Xor:
            return m.lxor(build_bdd(m, pool, f.lhs, vars), build_bdd(m, pool, f.rhs, vars));
    }
    return m.false_node();
}

double enumerate_wmc(const FormulaPool& pool, const std::vector<double>& weights) {
    int n = 0;
    for (const Formula& f : pool.nodes) {
        if (f.kind == Formula::Var) n = std::max(n, f.var + 1);
    }
    double total = 0.0;
    std::vector<bool> assignment(n);
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            assignment[i] = (mask >> i) & 1;
            w *= assignment[i] ? weights[i] : 1.0 - weights[i];
        }
        if (pool.eval(pool.root, assignment)) total += w;
    }
    return total;
}

}  // namespace

TEST_CASE("fresh_var basics") {
    Manager m;
    NodeRef v = m.fresh_var(0.3);
    CHECK(!v.is_terminal());
    CHECK(m.wmc(v) == doctest::Approx(0.3).epsilon(1e-12));

    CHECK(m.fresh_var(0.0).is_false());
    CHECK(m.fresh_var(1.0).is_true());
    CHECK(m.var_count() == 1);  // constant flips allocate nothing

    CHECK_THROWS_AS(m.fresh_var(-0.1), Error);
    CHECK_THROWS_AS(m.fresh_var(1.5), Error);
    CHECK_THROWS_AS(m.fresh_var(std::nan("")), Error);
}

TEST_CASE("ite terminal rules") {
    Manager m;
    NodeRef c = m.fresh_var(0.5);
    NodeRef t = m.fresh_var(0.25);
    NodeRef g = m.fresh_var(0.75);

    CHECK(m.ite(c, t, t) == t);
    CHECK(m.ite(m.true_node(), t, g) == t);
    CHECK(m.ite(m.false_node(), t, g) == g);
    CHECK(m.land(c, m.lnot(c)).is_false());
    CHECK(m.lor(c, m.lnot(c)).is_true());
    CHECK(m.lxnor(t, t).is_true());
}

TEST_CASE("manager mismatch rejected") {
    Manager m1, m2;
    NodeRef a = m1.fresh_var(0.5);
    NodeRef b = m2.fresh_var(0.5);
    CHECK_THROWS_AS(m1.land(a, b), Error);
    CHECK_THROWS_AS(m1.wmc(b), Error);
    CHECK_THROWS_AS(m2.ite(b, a, b), Error);
}

TEST_CASE("wmc terminals and tautology") {
    Manager m;
    CHECK(m.wmc(m.true_node()) == 1.0);
    CHECK(m.wmc(m.false_node()) == 0.0);
    NodeRef x = m.fresh_var(0.123);
    CHECK(m.wmc(m.lor(x, m.lnot(x))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wmc matches weighted enumeration on random formulas") {
    std::mt19937_64 rng(20240517);
    for (int round = 0; round < 60; ++round) {
        int num_vars = 2 + static_cast<int>(rng() % 15);  // up to 16
        FormulaPool pool = random_formula(rng, num_vars, 12 + round % 20);

        Manager m;
        std::vector<double> weights;
        std::vector<NodeRef> vars;
        std::uniform_real_distribution<double> unit(0.05, 0.95);
        for (int i = 0; i < num_vars; ++i) {
            double w = unit(rng);
            weights.push_back(w);
            vars.push_back(m.fresh_var(w));
        }
        NodeRef root = build_bdd(m, pool, pool.root, vars);
        double expected = enumerate_wmc(pool, weights);
        CHECK(std::abs(m.wmc(root) - expected) < 1e-9);

        // complement property
        CHECK(std::abs(m.wmc(root) + m.wmc(m.lnot(root)) - 1.0) < 1e-9);
    }
}

TEST_CASE("canonicity: construction order does not matter") {
    std::mt19937_64 rng(98765);
    for (int round = 0; round < 40; ++round) {
        int num_vars = 2 + static_cast<int>(rng() % 11);  // up to 12
        FormulaPool pool = random_formula(rng, num_vars, 16);

        Manager m;
        std::vector<NodeRef> vars;
        std::uniform_real_distribution<double> unit(0.05, 0.95);
        for (int i = 0; i < num_vars; ++i) vars.push_back(m.fresh_var(unit(rng)));

        NodeRef direct = build_bdd(m, pool, pool.root, vars);

        // Rebuild via Shannon expansion on the first variable; a completely
        // different construction order must produce the same handle.
        const FormulaPool& p = pool;
        std::vector<bool> assignment(num_vars, false);
        std::function<NodeRef(int, std::vector<bool>&)> cofactor_build =
            [&](int var, std::vector<bool>& partial) -> NodeRef {
            if (var == num_vars) {
                return m.constant(p.eval(p.root, partial));
            }
            partial[var] = true;
            NodeRef hi = cofactor_build(var + 1, partial);
            partial[var] = false;
            NodeRef lo = cofactor_build(var + 1, partial);
            return m.ite(vars[var], hi, lo);
        };
        if (num_vars <= 10) {
            NodeRef expanded = cofactor_build(0, assignment);
            CHECK(expanded == direct);
        }
    }
}

TEST_CASE("reduction audit on a worked manager") {
    std::mt19937_64 rng(5150);
    Manager m;
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::vector<NodeRef> vars;
    for (int i = 0; i < 14; ++i) vars.push_back(m.fresh_var(unit(rng)));
    NodeRef acc = m.true_node();
    for (int round = 0; round < 200; ++round) {
        NodeRef a = vars[rng() % vars.size()];
        NodeRef b = vars[rng() % vars.size()];
        switch (rng() % 4) {
            case 0: acc = m.land(acc, m.lor(a, b)); break;
            case 1: acc = m.lor(acc, m.land(a, m.lnot(b))); break;
            case 2: acc = m.lxor(acc, b); break;
            default: acc = m.ite(a, acc, b); break;
        }
    }
    CHECK(m.check_invariants());
}

TEST_CASE("node_count of terminals is zero") {
    Manager m;
    std::vector<NodeRef> roots = {m.true_node(), m.false_node()};
    CHECK(m.node_count(roots) == 0);
}

TEST_CASE("distinct managers run concurrently") {
    std::vector<std::thread> workers;
    std::array<double, 4> results{};
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([t, &results]() {
            Manager m;
            std::mt19937_64 rng(1000 + t);
            std::uniform_real_distribution<double> unit(0.1, 0.9);
            NodeRef acc = m.true_node();
            std::vector<NodeRef> vars;
            for (int i = 0; i < 10; ++i) vars.push_back(m.fresh_var(unit(rng)));
            for (int i = 0; i < 100; ++i) {
                acc = m.ite(vars[rng() % 10], acc, m.lor(vars[rng() % 10], acc));
            }
            results[t] = m.wmc(acc) + m.wmc(m.lnot(acc));
        });
    }
    for (auto& w : workers) w.join();
    for (double r : results) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
}
