#include "doctest.h"

#include <variant>

#include "probbits/errors.hpp"
#include "probbits/parser.hpp"

using namespace probbits;
using namespace probbits::lang;

TEST_CASE("trivial program") {
    Program p = parse("return 0");
    CHECK(p.statements.empty());
    REQUIRE(p.returns.size() == 1);
    CHECK(std::holds_alternative<IntLitExpr>(p.returns[0]->node));
}

TEST_CASE("the sequential if-else chain parses to a 4-branch chain") {
    const char* src = R"(
        let x = 0
        if flip(0.1) { x = 0 }
        else if flip(0.2/0.9) { x = 1 }
        else if flip(0.3/0.7) { x = 2 }
        else { x = 3 }
        return x
    )";
    Program p = parse(src);
    REQUIRE(p.statements.size() == 2);
    int depth = 0;
    const Stmt* cur = p.statements[1].get();
    while (true) {
        const auto* branch = std::get_if<IfStmt>(&cur->node);
        if (branch == nullptr) break;
        ++depth;
        const auto* guard = std::get_if<FlipExpr>(&branch->cond->node);
        REQUIRE(guard != nullptr);
        if (branch->else_body.size() == 1 &&
            std::holds_alternative<IfStmt>(branch->else_body[0]->node)) {
            cur = branch->else_body[0].get();
        } else {
            break;
        }
    }
    CHECK(depth == 3);  // three guarded branches plus the final else
}

TEST_CASE("fraction literals") {
    Program p = parse("let x = flip(0.2/0.9) return x");
    const auto* let = std::get_if<LetStmt>(&p.statements[0]->node);
    REQUIRE(let != nullptr);
    const auto* flip = std::get_if<FlipExpr>(&let->value->node);
    REQUIRE(flip != nullptr);
    CHECK(flip->prob == doctest::Approx(0.2 / 0.9));
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse("observe(");
        FAIL("expected a syntax error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SyntaxError);
        CHECK(e.line() == 1);
        CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parse("return"), Error);
    CHECK_THROWS_AS(parse("let = 3 return 0"), Error);
    CHECK_THROWS_AS(parse("return 1 2"), Error);
    CHECK_THROWS_AS(parse("x = -1 return x"), Error);
}

TEST_CASE("name resolution") {
    CHECK_THROWS_AS(parse("return y"), Error);
    CHECK_THROWS_AS(parse("let x = 1 let x = 2 return x"), Error);
    CHECK_THROWS_AS(parse("let t ~ Beta(1, 2) t = 3 return t"), Error);
    CHECK_THROWS_AS(parse("let x = 1 return beta_flip(x)"), Error);
    CHECK_THROWS_AS(parse("for i in 0..3 { i = 2 } return 0"), Error);
    CHECK_THROWS_AS(parse("let t ~ Beta(0, 1) return t"), Error);

    // define-if-absent assignment at top level
    Program p = parse("x = flip(0.5) observe(x) return x");
    CHECK(p.statements.size() == 2);

    // branch-local definitions do not escape
    CHECK_THROWS_AS(parse("if flip(0.5) { let y = 1 } return y"), Error);

    // loop variables are visible in the body only
    Program q = parse("let s = 0 for i in 0..4 { s = s + i } return s");
    CHECK(q.statements.size() == 2);
    CHECK_THROWS_AS(parse("for i in 0..4 { } return i"), Error);
}

TEST_CASE("operator precedence") {
    // (a + b) % 10 == 0 groups the modulus before the comparison
    Program p = parse("let a = 1 let b = 2 return (a + b) % 10 == 0");
    const auto* cmp = std::get_if<BinaryExpr>(&p.returns[0]->node);
    REQUIRE(cmp != nullptr);
    CHECK(cmp->op == BinOp::Eq);
    const auto* mod = std::get_if<BinaryExpr>(&cmp->lhs->node);
    REQUIRE(mod != nullptr);
    CHECK(mod->op == BinOp::Mod);

    // a < b && a < c parses as (a<b) && (a<c)
    Program q = parse("let a = 1 return a < 2 && a < 3");
    const auto* conj = std::get_if<BinaryExpr>(&q.returns[0]->node);
    REQUIRE(conj != nullptr);
    CHECK(conj->op == BinOp::And);
}

TEST_CASE("expression labels recover source text") {
    Program p = parse("let a = 1 return a + 2, a");
    CHECK(p.snippet(*p.returns[0]) == "a + 2");
    CHECK(p.snippet(*p.returns[1]) == "a");
}

TEST_CASE("uniform, arrays, casts, if-expressions") {
    const char* src = R"(
        let u = uniform(0, 8)
        let xs = [u, uniform(2, 5), 3]
        let y = if u < 3 then xs[0] else xs[2]
        return int(y, 6)
    )";
    Program p = parse(src);
    CHECK(p.statements.size() == 3);
}
