#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace probbits::lang {

struct SourcePos {
    uint32_t line = 0;   // 1-based
    uint32_t column = 0; // 1-based
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class BinOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Mod };
enum class UnOp { Not };

struct FlipExpr { double prob; };
struct DiscreteExpr { std::vector<double> weights; };
struct UniformExpr { ExprPtr lo; ExprPtr hi; };
struct BetaFlipExpr { std::string name; };
struct IntLitExpr { int64_t value; };
struct VarExpr { std::string name; };
struct ArrayExpr { std::vector<ExprPtr> elems; };
struct IndexExpr { std::string name; ExprPtr index; };
struct CastExpr { ExprPtr value; int64_t width; };  // int(e, w): widening only
struct BinaryExpr { BinOp op; ExprPtr lhs; ExprPtr rhs; };
struct UnaryExpr { UnOp op; ExprPtr operand; };
struct IfExpr { ExprPtr cond; ExprPtr then_val; ExprPtr else_val; };

struct Expr {
    SourcePos pos;
    uint32_t begin = 0;  // byte offsets into the source, for labels
    uint32_t end = 0;
    std::variant<FlipExpr, DiscreteExpr, UniformExpr, BetaFlipExpr, IntLitExpr,
                 VarExpr, ArrayExpr, IndexExpr, CastExpr, BinaryExpr, UnaryExpr,
                 IfExpr>
        node;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct LetStmt { std::string name; ExprPtr value; };
struct BetaDeclStmt { std::string name; int64_t alpha; int64_t beta; };
struct AssignStmt { std::string name; ExprPtr value; };
struct ObserveStmt { ExprPtr cond; };
struct IfStmt {
    ExprPtr cond;
    std::vector<StmtPtr> then_body;
    std::vector<StmtPtr> else_body;
};
struct ForStmt {
    std::string var;
    int64_t begin;  // iterates begin .. end-1
    int64_t end;
    std::vector<StmtPtr> body;
};

struct Stmt {
    SourcePos pos;
    std::variant<LetStmt, BetaDeclStmt, AssignStmt, ObserveStmt, IfStmt, ForStmt> node;
};

struct Program {
    std::vector<StmtPtr> statements;
    std::vector<ExprPtr> returns;
    std::string source;

    std::string snippet(const Expr& e) const {
        if (e.end <= e.begin || e.end > source.size()) return "<expr>";
        return source.substr(e.begin, e.end - e.begin);
    }
};

}  // namespace probbits::lang
