#include "doctest.h"

#include <cmath>

#include "probbits/compiler.hpp"
#include "probbits/oracle.hpp"

using namespace probbits;
using namespace probbits::lang;

namespace {

RunResult run(const char* src, Encoding enc = Encoding::Bitwise) {
    return run_program(src, enc);
}

void check_dist(const QueryResult& q, std::initializer_list<std::pair<uint64_t, double>> kv,
                double tol = 1e-9) {
    for (auto& [k, p] : kv) {
        double got = q.distribution.count(k) ? q.distribution.at(k) : 0.0;
        CHECK(std::abs(got - p) < tol);
    }
    double total = 0.0;
    for (auto& [k, p] : q.distribution) total += p;
    CHECK(std::abs(total - 1.0) < 1e-9);
}

}  // namespace

TEST_CASE("discrete marginals under both encodings") {
    for (Encoding enc : {Encoding::Bitwise, Encoding::Categ}) {
        RunResult r = run("return discrete([0.1, 0.2, 0.3, 0.4])", enc);
        REQUIRE(r.queries.size() == 1);
        check_dist(r.queries[0], {{0, 0.1}, {1, 0.2}, {2, 0.3}, {3, 0.4}});
        CHECK(r.evidence_probability == doctest::Approx(1.0));
    }
}

TEST_CASE("the if-else chain program equals its discrete form") {
    const char* chain = R"(
        let x = 0
        if flip(0.1) { x = 0 }
        else if flip(0.2/0.9) { x = 1 }
        else if flip(0.3/0.7) { x = 2 }
        else { x = 3 }
        return x
    )";
    for (Encoding enc : {Encoding::Bitwise, Encoding::Categ}) {
        RunResult r = run(chain, enc);
        check_dist(r.queries[0], {{0, 0.1}, {1, 0.2}, {2, 0.3}, {3, 0.4}});
    }
}

TEST_CASE("observe conditions the program") {
    RunResult r = run("x = flip(0.5) observe(x) return x");
    CHECK(r.queries[0].probability == doctest::Approx(1.0));
    CHECK(r.evidence_probability == doctest::Approx(0.5));

    CHECK_THROWS_AS(run("x = flip(0.5) observe(x && !x) return x"), Error);
}

TEST_CASE("conditional observe only constrains reaching executions") {
    // when c is false nothing is observed, so x stays fair
    const char* src = R"(
        let c = flip(0.5)
        let x = flip(0.5)
        if c { observe(x) }
        return c, x
    )";
    RunResult r = run(src);
    CHECK(r.evidence_probability == doctest::Approx(0.75));
    CHECK(r.queries[0].probability == doctest::Approx(0.25 / 0.75));
    CHECK(r.queries[1].probability == doctest::Approx(0.5 / 0.75));
}

TEST_CASE("observe placement among top-level statements does not matter") {
    const char* early = "let x = flip(0.3) observe(x) let y = flip(0.6) return y";
    const char* late = "let x = flip(0.3) let y = flip(0.6) observe(x) return y";
    RunResult a = run(early);
    RunResult b = run(late);
    CHECK(a.evidence_probability == doctest::Approx(b.evidence_probability));
    CHECK(a.queries[0].probability == doctest::Approx(b.queries[0].probability));
}

TEST_CASE("branch merging muxes re-assigned variables") {
    const char* src = R"(
        let x = 1
        if flip(0.7) { x = 3 }
        return x
    )";
    RunResult r = run(src);
    check_dist(r.queries[0], {{3, 0.7}, {1, 0.3}});
}

TEST_CASE("flips in both branches are always allocated") {
    const char* src = R"(
        let x = 0
        if flip(0.5) { x = if flip(0.25) then 1 else 0 }
        else { x = if flip(0.75) then 1 else 0 }
        return x
    )";
    RunResult r = run(src);
    CHECK(r.flip_count == 3);
    check_dist(r.queries[0], {{1, 0.5}, {0, 0.5}});
}

TEST_CASE("evaluation order: flips get textual variable indices") {
    const char* src = R"(
        let a = flip(0.11)
        let b = 0
        if flip(0.22) { b = if flip(0.33) then 1 else 0 }
        else { b = if flip(0.44) then 1 else 0 }
        observe(a || b == 1)
        return b
    )";
    Program prog = parse(src);
    Manager m;
    compile(m, prog, Encoding::Bitwise);
    REQUIRE(m.var_count() == 4);
    CHECK(m.weight(0) == doctest::Approx(0.11));
    CHECK(m.weight(1) == doctest::Approx(0.22));
    CHECK(m.weight(2) == doctest::Approx(0.33));
    CHECK(m.weight(3) == doctest::Approx(0.44));
}

TEST_CASE("encoding-internal flips follow the program listing order") {
    Program prog = parse("return discrete([0.1, 0.2, 0.3, 0.4])");
    {
        Manager m;
        compile(m, prog, Encoding::Categ);
        REQUIRE(m.var_count() == 3);
        CHECK(m.weight(0) == doctest::Approx(0.1));
        CHECK(m.weight(1) == doctest::Approx(0.2 / 0.9));
        CHECK(m.weight(2) == doctest::Approx(0.3 / 0.7));
    }
    {
        Manager m;
        compile(m, prog, Encoding::Bitwise);
        REQUIRE(m.var_count() == 3);
        CHECK(m.weight(0) == doctest::Approx(0.7));
        CHECK(m.weight(1) == doctest::Approx(0.4 / 0.7));
        CHECK(m.weight(2) == doctest::Approx(0.2 / 0.3));
    }
}

TEST_CASE("static loops and arrays") {
    const char* src = R"(
        let xs = [1, 2, 3, 4]
        let s = 0
        for i in 0..4 { s = s + xs[i] }
        return s
    )";
    RunResult r = run(src);
    check_dist(r.queries[0], {{10, 1.0}});
}

TEST_CASE("uniform with an offset") {
    RunResult r = run("return uniform(2, 5)");
    check_dist(r.queries[0], {{2, 1.0 / 3}, {3, 1.0 / 3}, {4, 1.0 / 3}});
    CHECK(std::abs(r.queries[0].expectation - 3.0) < 1e-9);
}

TEST_CASE("comparison of two uniforms") {
    RunResult r = run("return uniform(0, 8) < uniform(0, 8)");
    CHECK(std::abs(r.queries[0].probability - 0.4375) < 1e-12);
}

TEST_CASE("arithmetic width and wrap semantics") {
    // subtraction wraps at the common width
    RunResult r = run("let x = int(0, 3) return x - 1");
    check_dist(r.queries[0], {{7, 1.0}});

    // division by zero follows the q=0, r=a convention
    RunResult q = run("let x = uniform(0, 4) return x / 0, x % 0");
    check_dist(q.queries[0], {{0, 1.0}});
    check_dist(q.queries[1], {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}});
}

TEST_CASE("casts widen but never narrow") {
    RunResult r = run("return int(3, 5)");
    check_dist(r.queries[0], {{3, 1.0}});
    CHECK_THROWS_AS(run("let x = uniform(0, 8) return int(x, 2)"), Error);
}

TEST_CASE("static conditions prune branches at compile time") {
    const char* src = R"(
        let x = 0
        for i in 0..2 {
            if i % 2 == 0 { x = x + flip(0.5) } else { x = x + 10 }
        }
        return x
    )";
    Program prog = parse(src);
    Manager m;
    compile(m, prog, Encoding::Bitwise);
    CHECK(m.var_count() == 1);  // only the i==0 iteration draws
    RunResult r = run(src);
    check_dist(r.queries[0], {{11, 0.5}, {10, 0.5}});
}

TEST_CASE("beta conjugacy: single observed draw") {
    const char* src = R"(
        let theta ~ Beta(1, 2)
        let x = beta_flip(theta)
        observe(x)
        return theta
    )";
    RunResult r = run(src);
    REQUIRE(r.queries.size() == 1);
    CHECK(r.queries[0].kind == Output::Kind::BetaPosterior);
    CHECK(r.queries[0].beta_total == 4);
    check_dist(r.queries[0], {{2, 1.0}}, 1e-12);  // posterior Beta(2, 2)
}

TEST_CASE("beta conjugacy: two draws with missing data") {
    const char* src = R"(
        let theta ~ Beta(1, 1)
        let x = beta_flip(theta)
        let y = beta_flip(theta)
        observe(x)
        return theta
    )";
    RunResult r = run(src);
    CHECK(r.queries[0].beta_total == 4);
    check_dist(r.queries[0], {{3, 2.0 / 3}, {2, 1.0 / 3}}, 1e-12);
}

TEST_CASE("beta with zero draws keeps the prior") {
    RunResult r = run("let theta ~ Beta(1, 2) return theta");
    CHECK(r.queries[0].beta_total == 3);
    check_dist(r.queries[0], {{1, 1.0}}, 1e-12);
}

TEST_CASE("beta_flip under a probabilistic condition is rejected") {
    const char* src = R"(
        let theta ~ Beta(1, 1)
        let x = 0
        if flip(0.5) { x = beta_flip(theta) }
        return theta
    )";
    CHECK_THROWS_AS(run(src), Error);
}

TEST_CASE("beta draws can be selected through if-then-else values") {
    // both candidates drawn unconditionally, value picked per path
    const char* src = R"(
        let a ~ Beta(1, 1)
        let b ~ Beta(1, 1)
        let pick = flip(0.5)
        let x = if pick then beta_flip(a) else beta_flip(b)
        observe(x)
        return a, b
    )";
    RunResult r = run(src);
    CHECK(r.queries[0].beta_total == 3);
    CHECK(r.queries[1].beta_total == 3);
}

TEST_CASE("returning arrays flattens into labeled outputs") {
    RunResult r = run("let xs = [flip(0.5), 4] return xs");
    REQUIRE(r.queries.size() == 2);
    CHECK(r.queries[0].kind == Output::Kind::Probability);
    CHECK(r.queries[1].kind == Output::Kind::Distribution);
    CHECK(r.queries[0].label == "xs[0]");
}

TEST_CASE("compile errors") {
    // random array index
    CHECK_THROWS_AS(run("let xs = [1, 2] let u = uniform(0, 2) return xs[u]"), Error);
    // random uniform bound
    CHECK_THROWS_AS(run("let u = uniform(0, 2) return uniform(0, u + 1)"), Error);
    // observe of an integer
    CHECK_THROWS_AS(run("observe(uniform(0, 2)) return 0"), Error);
    // beta variable in arithmetic
    CHECK_THROWS_AS(run("let t ~ Beta(1, 1) return t + 1"), Error);
}

TEST_CASE("checksum program with uniform digit priors matches enumeration") {
    // check digit plus two data digits; 10^3 joint assignments
    const char* src = R"(
        let id0 = discrete([1, 1, 1, 1, 1, 1, 1, 1, 1, 1])
        let id1 = discrete([1, 1, 1, 1, 1, 1, 1, 1, 1, 1])
        let id2 = discrete([1, 1, 1, 1, 1, 1, 1, 1, 1, 1])
        let sum = 0
        let rest = [id1, id2]
        for i in 0..2 {
            if i % 2 == 0 {
                if rest[i] > 4 { sum = sum + (2 * rest[i] - 9) }
                else { sum = sum + 2 * rest[i] }
            } else {
                sum = sum + rest[i]
            }
        }
        observe((id0 + sum) % 10 == 0)
        return id0, id1, id2
    )";
    Program prog = parse(src);
    auto truth = probbits::oracle::enumerate(prog);
    for (Encoding enc : {Encoding::Bitwise, Encoding::Categ}) {
        RunResult r = run_parsed(prog, enc);
        CHECK(std::abs(r.evidence_probability - truth.evidence_probability) < 1e-9);
        for (size_t q = 0; q < r.queries.size(); ++q) {
            for (auto& [k, p] : truth.queries[q].distribution) {
                double got = r.queries[q].distribution.count(k)
                                 ? r.queries[q].distribution.at(k)
                                 : 0.0;
                CHECK(std::abs(got - p) < 1e-9);
            }
        }
    }
}

TEST_CASE("encoding independence on a mixed program") {
    const char* src = R"(
        let a = discrete([0.3, 0.2, 0.1, 0.4])
        let b = uniform(0, 3)
        observe(a + b < 5)
        return a * b
    )";
    RunResult x = run(src, Encoding::Bitwise);
    RunResult y = run(src, Encoding::Categ);
    CHECK(x.evidence_probability == doctest::Approx(y.evidence_probability).epsilon(1e-9));
    for (auto& [k, p] : x.queries[0].distribution) {
        CHECK(y.queries[0].distribution.at(k) == doctest::Approx(p).epsilon(1e-9));
    }
}
