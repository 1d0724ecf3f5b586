#include "doctest.h"

#include <cmath>

#include "probbits/errors.hpp"
#include "probbits/oracle.hpp"
#include "probbits/parser.hpp"

using namespace probbits;
using namespace probbits::lang;

namespace {

oracle::OracleResult run_oracle(const char* src, uint64_t cap = oracle::kDefaultPathCap) {
    return oracle::enumerate(parse(src), cap);
}

}  // namespace

TEST_CASE("conjunction of two fair flips") {
    auto r = run_oracle("return flip(0.5) && flip(0.5)");
    REQUIRE(r.queries.size() == 1);
    CHECK(r.queries[0].probability == doctest::Approx(0.25));
    CHECK(r.evidence_probability == doctest::Approx(1.0));
}

TEST_CASE("the sequential chain program") {
    const char* src = R"(
        let x = 0
        if flip(0.1) { x = 0 }
        else if flip(0.2/0.9) { x = 1 }
        else if flip(0.3/0.7) { x = 2 }
        else { x = 3 }
        return x
    )";
    auto r = run_oracle(src);
    CHECK(r.queries[0].distribution.at(0) == doctest::Approx(0.1));
    CHECK(r.queries[0].distribution.at(1) == doctest::Approx(0.2));
    CHECK(r.queries[0].distribution.at(2) == doctest::Approx(0.3));
    CHECK(r.queries[0].distribution.at(3) == doctest::Approx(0.4));
}

TEST_CASE("native discrete and uniform") {
    auto r = run_oracle("return discrete([0.5, 0, 0.5]) + uniform(0, 2)");
    // values: 0 or 2, plus 0 or 1
    CHECK(r.queries[0].distribution.at(0) == doctest::Approx(0.25));
    CHECK(r.queries[0].distribution.at(1) == doctest::Approx(0.25));
    CHECK(r.queries[0].distribution.at(2) == doctest::Approx(0.25));
    CHECK(r.queries[0].distribution.at(3) == doctest::Approx(0.25));
}

TEST_CASE("rejected mass accounting") {
    auto r = run_oracle("let x = flip(0.3) observe(x) return x");
    CHECK(r.evidence_probability == doctest::Approx(0.3));
    CHECK(r.rejected_mass == doctest::Approx(0.7));
    CHECK(std::abs(r.evidence_probability + r.rejected_mass - 1.0) < 1e-12);
}

TEST_CASE("determinism") {
    const char* src = R"(
        let a = uniform(0, 5)
        let b = discrete([0.2, 0.5, 0.3])
        observe(a + b > 2)
        return a * b
    )";
    auto r1 = run_oracle(src);
    auto r2 = run_oracle(src);
    CHECK(r1.evidence_probability == r2.evidence_probability);
    for (auto& [k, p] : r1.queries[0].distribution) {
        CHECK(r2.queries[0].distribution.at(k) == p);
    }
}

TEST_CASE("path cap") {
    CHECK_THROWS_AS(run_oracle("return uniform(0, 100) + uniform(0, 100)", 1000), Error);
    try {
        run_oracle("return uniform(0, 100) + uniform(0, 100)", 1000);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EnumerationTooLarge);
    }
}

TEST_CASE("unsatisfiable evidence") {
    CHECK_THROWS_AS(run_oracle("let x = flip(0.5) observe(x && !x) return x"), Error);
}

TEST_CASE("beta draws follow the urn process") {
    const char* src = R"(
        let theta ~ Beta(1, 1)
        let x = beta_flip(theta)
        let y = beta_flip(theta)
        observe(x)
        return theta
    )";
    auto r = run_oracle(src);
    CHECK(r.queries[0].beta_total == 4);
    CHECK(r.queries[0].distribution.at(3) == doctest::Approx(2.0 / 3));
    CHECK(r.queries[0].distribution.at(2) == doctest::Approx(1.0 / 3));
}

TEST_CASE("wrap semantics match the circuit widths") {
    // 0 (width 3 after the cast) minus 1 wraps to 7
    auto r = run_oracle("let x = int(0, 3) return x - 1");
    CHECK(r.queries[0].distribution.at(7) == doctest::Approx(1.0));

    // width merging across probabilistic branches uses the wider branch
    const char* merged = R"(
        let x = 0
        if flip(0.5) { x = int(0, 5) } else { x = 1 }
        return x - 3
    )";
    auto m = run_oracle(merged);
    CHECK(m.queries[0].distribution.at((0 - 3) & 31) == doctest::Approx(0.5));
    CHECK(m.queries[0].distribution.at((1 - 3) & 31) == doctest::Approx(0.5));
}
