#include "probbits/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <string>

#include "probbits/errors.hpp"

namespace probbits::lang {

namespace {

enum class Tok {
    End, Ident, Int, Real,
    LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Comma, DotDot, Tilde, Bang,
    Assign, EqEq, NotEq, Lt, Le, Gt, Ge, AndAnd, OrOr,
    Plus, Minus, Star, Slash, Percent,
    KwLet, KwObserve, KwIf, KwElse, KwThen, KwFor, KwIn, KwReturn,
    KwFlip, KwDiscrete, KwUniform, KwBetaFlip, KwBeta, KwInt,
};

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
    uint32_t begin = 0;
    uint32_t end = 0;
};

const std::map<std::string, Tok, std::less<>> kKeywords = {
    {"let", Tok::KwLet},         {"observe", Tok::KwObserve},
    {"if", Tok::KwIf},           {"else", Tok::KwElse},
    {"then", Tok::KwThen},       {"for", Tok::KwFor},
    {"in", Tok::KwIn},           {"return", Tok::KwReturn},
    {"flip", Tok::KwFlip},       {"discrete", Tok::KwDiscrete},
    {"uniform", Tok::KwUniform}, {"beta_flip", Tok::KwBetaFlip},
    {"Beta", Tok::KwBeta},       {"int", Tok::KwInt},
};

[[noreturn]] void fail(SourcePos pos, const std::string& msg) {
    throw Error(ErrorKind::SyntaxError, msg, pos.line, pos.column);
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            Token t = next_token();
            out.push_back(t);
            if (t.kind == Tok::End) break;
        }
        return out;
    }

private:
    void skip_trivia() {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (c == '\n') { ++line_; col_ = 1; ++i_; }
            else if (std::isspace(static_cast<unsigned char>(c))) { ++col_; ++i_; }
            else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
                while (i_ < src_.size() && src_[i_] != '\n') ++i_;
            } else {
                break;
            }
        }
    }

    Token next_token() {
        SourcePos pos{line_, col_};
        uint32_t begin = static_cast<uint32_t>(i_);
        auto make = [&](Tok kind, size_t len) {
            Token t{kind, std::string(src_.substr(i_, len)), pos, begin,
                    static_cast<uint32_t>(i_ + len)};
            i_ += len;
            col_ += static_cast<uint32_t>(len);
            return t;
        };
        if (i_ >= src_.size()) return Token{Tok::End, "", pos, begin, begin};
        char c = src_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) {
                ++j;
            }
            std::string_view word = src_.substr(i_, j - i_);
            auto kw = kKeywords.find(word);
            return make(kw == kKeywords.end() ? Tok::Ident : kw->second, j - i_);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i_;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            bool real = false;
            if (j + 1 < src_.size() && src_[j] == '.' && src_[j + 1] != '.' &&
                std::isdigit(static_cast<unsigned char>(src_[j + 1]))) {
                real = true;
                ++j;
                while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            }
            return make(real ? Tok::Real : Tok::Int, j - i_);
        }
        auto two = [&](char a, char b) {
            return c == a && i_ + 1 < src_.size() && src_[i_ + 1] == b;
        };
        if (two('.', '.')) return make(Tok::DotDot, 2);
        if (two('=', '=')) return make(Tok::EqEq, 2);
        if (two('!', '=')) return make(Tok::NotEq, 2);
        if (two('<', '=')) return make(Tok::Le, 2);
        if (two('>', '=')) return make(Tok::Ge, 2);
        if (two('&', '&')) return make(Tok::AndAnd, 2);
        if (two('|', '|')) return make(Tok::OrOr, 2);
        switch (c) {
            case '(': return make(Tok::LParen, 1);
            case ')': return make(Tok::RParen, 1);
            case '[': return make(Tok::LBracket, 1);
            case ']': return make(Tok::RBracket, 1);
            case '{': return make(Tok::LBrace, 1);
            case '}': return make(Tok::RBrace, 1);
            case ',': return make(Tok::Comma, 1);
            case '~': return make(Tok::Tilde, 1);
            case '!': return make(Tok::Bang, 1);
            case '=': return make(Tok::Assign, 1);
            case '<': return make(Tok::Lt, 1);
            case '>': return make(Tok::Gt, 1);
            case '+': return make(Tok::Plus, 1);
            case '-': return make(Tok::Minus, 1);
            case '*': return make(Tok::Star, 1);
            case '/': return make(Tok::Slash, 1);
            case '%': return make(Tok::Percent, 1);
            default: break;
        }
        fail(pos, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    size_t i_ = 0;
    uint32_t line_ = 1;
    uint32_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src)
        : tokens_(Lexer(src).run()), source_(src) {}

    Program run() {
        Program prog;
        prog.source = std::string(source_);
        while (!at(Tok::KwReturn)) {
            if (at(Tok::End)) fail(cur().pos, "expected a statement or 'return'");
            prog.statements.push_back(parse_stmt());
        }
        expect(Tok::KwReturn, "'return'");
        prog.returns.push_back(parse_expr());
        while (accept(Tok::Comma)) prog.returns.push_back(parse_expr());
        if (!at(Tok::End)) fail(cur().pos, "trailing input after the return statement");
        return prog;
    }

private:
    const Token& cur() const { return tokens_[pos_]; }
    const Token& peek(size_t ahead = 1) const {
        size_t i = pos_ + ahead;
        return tokens_[i < tokens_.size() ? i : tokens_.size() - 1];
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }
    Token expect(Tok k, const char* what) {
        if (!at(k)) fail(cur().pos, std::string("expected ") + what);
        return tokens_[pos_++];
    }

    int64_t parse_int_literal() {
        Token t = expect(Tok::Int, "an integer literal");
        int64_t value = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
            fail(t.pos, "integer literal out of range");
        }
        return value;
    }

    // REAL or INT, optionally followed by "/" REAL-or-INT (fraction literal)
    double parse_prob_literal() {
        auto number = [&]() -> double {
            if (at(Tok::Real) || at(Tok::Int)) {
                Token t = tokens_[pos_++];
                return std::stod(t.text);
            }
            fail(cur().pos, "expected a probability literal");
        };
        double value = number();
        if (accept(Tok::Slash)) value /= number();
        return value;
    }

    StmtPtr parse_stmt() {
        SourcePos pos = cur().pos;
        auto wrap = [&](auto node) {
            auto s = std::make_unique<Stmt>();
            s->pos = pos;
            s->node = std::move(node);
            return s;
        };
        if (accept(Tok::KwLet)) {
            Token name = expect(Tok::Ident, "a variable name");
            if (accept(Tok::Tilde)) {
                expect(Tok::KwBeta, "'Beta'");
                expect(Tok::LParen, "'('");
                int64_t alpha = parse_int_literal();
                expect(Tok::Comma, "','");
                int64_t beta = parse_int_literal();
                expect(Tok::RParen, "')'");
                return wrap(BetaDeclStmt{name.text, alpha, beta});
            }
            expect(Tok::Assign, "'='");
            return wrap(LetStmt{name.text, parse_expr()});
        }
        if (accept(Tok::KwObserve)) {
            expect(Tok::LParen, "'('");
            ExprPtr cond = parse_expr();
            expect(Tok::RParen, "')'");
            return wrap(ObserveStmt{std::move(cond)});
        }
        if (at(Tok::KwIf)) return parse_if_stmt();
        if (accept(Tok::KwFor)) {
            Token name = expect(Tok::Ident, "a loop variable");
            expect(Tok::KwIn, "'in'");
            int64_t begin = parse_int_literal();
            expect(Tok::DotDot, "'..'");
            int64_t end = parse_int_literal();
            std::vector<StmtPtr> body = parse_block();
            return wrap(ForStmt{name.text, begin, end, std::move(body)});
        }
        if (at(Tok::Ident) && peek().kind == Tok::Assign) {
            Token name = tokens_[pos_++];
            ++pos_;  // '='
            return wrap(AssignStmt{name.text, parse_expr()});
        }
        fail(pos, "expected a statement");
    }

    StmtPtr parse_if_stmt() {
        SourcePos pos = cur().pos;
        expect(Tok::KwIf, "'if'");
        ExprPtr cond = parse_expr();
        std::vector<StmtPtr> then_body = parse_block();
        std::vector<StmtPtr> else_body;
        if (accept(Tok::KwElse)) {
            if (at(Tok::KwIf)) {
                else_body.push_back(parse_if_stmt());  // else-if chain
            } else {
                else_body = parse_block();
            }
        }
        auto s = std::make_unique<Stmt>();
        s->pos = pos;
        s->node = IfStmt{std::move(cond), std::move(then_body), std::move(else_body)};
        return s;
    }

    std::vector<StmtPtr> parse_block() {
        expect(Tok::LBrace, "'{'");
        std::vector<StmtPtr> body;
        while (!accept(Tok::RBrace)) {
            if (at(Tok::End)) fail(cur().pos, "unterminated block");
            body.push_back(parse_stmt());
        }
        return body;
    }

    ExprPtr finish(SourcePos pos, uint32_t begin, auto node) {
        auto e = std::make_unique<Expr>();
        e->pos = pos;
        e->begin = begin;
        e->end = pos_ > 0 ? tokens_[pos_ - 1].end : begin;
        e->node = std::move(node);
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::OrOr)) {
            SourcePos pos = cur().pos;
            uint32_t begin = lhs->begin;
            ++pos_;
            ExprPtr rhs = parse_and();
            lhs = finish(pos, begin, BinaryExpr{BinOp::Or, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (at(Tok::AndAnd)) {
            SourcePos pos = cur().pos;
            uint32_t begin = lhs->begin;
            ++pos_;
            ExprPtr rhs = parse_cmp();
            lhs = finish(pos, begin, BinaryExpr{BinOp::And, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        BinOp op;
        switch (cur().kind) {
            case Tok::EqEq: op = BinOp::Eq; break;
            case Tok::NotEq: op = BinOp::Ne; break;
            case Tok::Lt: op = BinOp::Lt; break;
            case Tok::Le: op = BinOp::Le; break;
            case Tok::Gt: op = BinOp::Gt; break;
            case Tok::Ge: op = BinOp::Ge; break;
            default: return lhs;
        }
        SourcePos pos = cur().pos;
        uint32_t begin = lhs->begin;
        ++pos_;
        ExprPtr rhs = parse_add();  // comparisons do not chain
        return finish(pos, begin, BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            SourcePos pos = cur().pos;
            uint32_t begin = lhs->begin;
            ++pos_;
            ExprPtr rhs = parse_mul();
            lhs = finish(pos, begin, BinaryExpr{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
            BinOp op = at(Tok::Star)    ? BinOp::Mul
                       : at(Tok::Slash) ? BinOp::Div
                                        : BinOp::Mod;
            SourcePos pos = cur().pos;
            uint32_t begin = lhs->begin;
            ++pos_;
            ExprPtr rhs = parse_unary();
            lhs = finish(pos, begin, BinaryExpr{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Bang)) {
            SourcePos pos = cur().pos;
            uint32_t begin = cur().begin;
            ++pos_;
            ExprPtr operand = parse_unary();
            return finish(pos, begin, UnaryExpr{UnOp::Not, std::move(operand)});
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        SourcePos pos = cur().pos;
        uint32_t begin = cur().begin;
        if (accept(Tok::LParen)) {
            ExprPtr inner = parse_expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (at(Tok::Int)) {
            int64_t v = parse_int_literal();
            return finish(pos, begin, IntLitExpr{v});
        }
        if (accept(Tok::KwFlip)) {
            expect(Tok::LParen, "'('");
            double p = parse_prob_literal();
            expect(Tok::RParen, "')'");
            return finish(pos, begin, FlipExpr{p});
        }
        if (accept(Tok::KwDiscrete)) {
            expect(Tok::LParen, "'('");
            expect(Tok::LBracket, "'['");
            std::vector<double> weights;
            weights.push_back(parse_prob_literal());
            while (accept(Tok::Comma)) weights.push_back(parse_prob_literal());
            expect(Tok::RBracket, "']'");
            expect(Tok::RParen, "')'");
            return finish(pos, begin, DiscreteExpr{std::move(weights)});
        }
        if (accept(Tok::KwUniform)) {
            expect(Tok::LParen, "'('");
            ExprPtr lo = parse_expr();
            expect(Tok::Comma, "','");
            ExprPtr hi = parse_expr();
            expect(Tok::RParen, "')'");
            return finish(pos, begin, UniformExpr{std::move(lo), std::move(hi)});
        }
        if (accept(Tok::KwBetaFlip)) {
            expect(Tok::LParen, "'('");
            Token name = expect(Tok::Ident, "a Beta variable name");
            expect(Tok::RParen, "')'");
            return finish(pos, begin, BetaFlipExpr{name.text});
        }
        if (accept(Tok::KwInt)) {
            expect(Tok::LParen, "'('");
            ExprPtr value = parse_expr();
            expect(Tok::Comma, "','");
            int64_t width = parse_int_literal();
            expect(Tok::RParen, "')'");
            return finish(pos, begin, CastExpr{std::move(value), width});
        }
        if (accept(Tok::KwIf)) {
            ExprPtr cond = parse_expr();
            expect(Tok::KwThen, "'then'");
            ExprPtr then_val = parse_expr();
            expect(Tok::KwElse, "'else'");
            ExprPtr else_val = parse_expr();
            return finish(pos, begin,
                          IfExpr{std::move(cond), std::move(then_val), std::move(else_val)});
        }
        if (accept(Tok::LBracket)) {
            std::vector<ExprPtr> elems;
            elems.push_back(parse_expr());
            while (accept(Tok::Comma)) elems.push_back(parse_expr());
            expect(Tok::RBracket, "']'");
            return finish(pos, begin, ArrayExpr{std::move(elems)});
        }
        if (at(Tok::Ident)) {
            Token name = tokens_[pos_++];
            if (accept(Tok::LBracket)) {
                ExprPtr index = parse_expr();
                expect(Tok::RBracket, "']'");
                return finish(pos, begin, IndexExpr{name.text, std::move(index)});
            }
            return finish(pos, begin, VarExpr{name.text});
        }
        fail(pos, "expected an expression");
    }

    std::vector<Token> tokens_;
    std::string_view source_;
    size_t pos_ = 0;
};

// Name resolution over the pre-unroll structure. Definition is textual in this
// language, so a set-based walk mirrors the compiler's scoping exactly.
class Resolver {
public:
    void run(const Program& prog) {
        Scope top;
        resolve_stmts(prog.statements, top);
        for (const ExprPtr& e : prog.returns) resolve_expr(*e, top);
    }

private:
    struct Scope {
        std::set<std::string> values;
        std::set<std::string> betas;
        std::set<std::string> loop_vars;

        bool known(const std::string& n) const {
            return values.count(n) || betas.count(n) || loop_vars.count(n);
        }
    };

    void resolve_stmts(const std::vector<StmtPtr>& stmts, Scope& scope) {
        for (const StmtPtr& s : stmts) resolve_stmt(*s, scope);
    }

    void resolve_stmt(const Stmt& stmt, Scope& scope) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, LetStmt>) {
                    resolve_expr(*node.value, scope);
                    if (scope.known(node.name)) {
                        fail(stmt.pos, "'" + node.name + "' is already defined");
                    }
                    scope.values.insert(node.name);
                } else if constexpr (std::is_same_v<T, BetaDeclStmt>) {
                    if (scope.known(node.name)) {
                        fail(stmt.pos, "'" + node.name + "' is already defined");
                    }
                    if (node.alpha <= 0 || node.beta <= 0) {
                        fail(stmt.pos, "Beta prior parameters must be positive integers");
                    }
                    scope.betas.insert(node.name);
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    resolve_expr(*node.value, scope);
                    if (scope.betas.count(node.name)) {
                        fail(stmt.pos, "cannot assign to Beta variable '" + node.name + "'");
                    }
                    if (scope.loop_vars.count(node.name)) {
                        fail(stmt.pos, "cannot assign to loop variable '" + node.name + "'");
                    }
                    scope.values.insert(node.name);  // define-if-absent
                } else if constexpr (std::is_same_v<T, ObserveStmt>) {
                    resolve_expr(*node.cond, scope);
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    resolve_expr(*node.cond, scope);
                    Scope then_scope = scope;
                    resolve_stmts(node.then_body, then_scope);
                    Scope else_scope = scope;
                    resolve_stmts(node.else_body, else_scope);
                } else if constexpr (std::is_same_v<T, ForStmt>) {
                    if (scope.known(node.var)) {
                        fail(stmt.pos,
                             "loop variable '" + node.var + "' shadows an existing name");
                    }
                    Scope body_scope = scope;
                    body_scope.loop_vars.insert(node.var);
                    resolve_stmts(node.body, body_scope);
                }
            },
            stmt.node);
    }

    void resolve_expr(const Expr& expr, const Scope& scope) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, VarExpr>) {
                    if (!scope.known(node.name)) {
                        fail(expr.pos, "unknown identifier '" + node.name + "'");
                    }
                } else if constexpr (std::is_same_v<T, IndexExpr>) {
                    if (!scope.known(node.name)) {
                        fail(expr.pos, "unknown identifier '" + node.name + "'");
                    }
                    resolve_expr(*node.index, scope);
                } else if constexpr (std::is_same_v<T, BetaFlipExpr>) {
                    if (!scope.betas.count(node.name)) {
                        fail(expr.pos, "'" + node.name + "' is not a Beta-declared variable");
                    }
                } else if constexpr (std::is_same_v<T, UniformExpr>) {
                    resolve_expr(*node.lo, scope);
                    resolve_expr(*node.hi, scope);
                } else if constexpr (std::is_same_v<T, ArrayExpr>) {
                    for (const ExprPtr& e : node.elems) resolve_expr(*e, scope);
                } else if constexpr (std::is_same_v<T, CastExpr>) {
                    resolve_expr(*node.value, scope);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    resolve_expr(*node.lhs, scope);
                    resolve_expr(*node.rhs, scope);
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    resolve_expr(*node.operand, scope);
                } else if constexpr (std::is_same_v<T, IfExpr>) {
                    resolve_expr(*node.cond, scope);
                    resolve_expr(*node.then_val, scope);
                    resolve_expr(*node.else_val, scope);
                }
            },
            expr.node);
    }
};

}  // namespace

Program parse(std::string_view source) {
    Parser parser(source);
    Program prog = parser.run();
    Resolver().run(prog);
    return prog;
}

}  // namespace probbits::lang
