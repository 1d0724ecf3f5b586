#include "probbits/compiler.hpp"

#include <bit>
#include <map>
#include <memory>
#include <variant>

namespace probbits::lang {

namespace {

[[noreturn]] void fail(SourcePos pos, const std::string& msg) {
    throw Error(ErrorKind::CompileError, msg, pos.line, pos.column);
}

uint32_t value_width(int64_t v) {
    return v <= 1 ? 1 : static_cast<uint32_t>(std::bit_width(static_cast<uint64_t>(v)));
}

// Static integers carry a width and follow the same width/wrap rules as the
// circuits, so constant folding is observationally identical to compiling.
struct StaticInt {
    int64_t value;
    uint32_t width;
};
struct StaticBool {
    bool value;
};
struct BoolVal {
    NodeRef node;
};
struct IntVal {
    ProbInt value;
};
struct BetaVal {
    std::string name;
};
struct Value;
struct ArrayVal {
    std::shared_ptr<const std::vector<Value>> elems;
};

struct Value {
    std::variant<StaticInt, StaticBool, BoolVal, IntVal, BetaVal, ArrayVal> v;
};

const char* kind_name(const Value& x) {
    switch (x.v.index()) {
        case 0: return "integer constant";
        case 1: return "boolean constant";
        case 2: return "boolean";
        case 3: return "random integer";
        case 4: return "Beta variable";
        default: return "array";
    }
}

struct BetaState {
    ProbInt alpha;
    int64_t total = 0;
    uint32_t width = 0;
};

struct Ctx {
    Manager& m;
    Encoding encoding;
    const Program& prog;
    std::map<std::string, Value> env;
    std::map<std::string, BetaState> betas;
    std::map<std::string, int64_t> beta_draw_bound;  // post-unroll upper bound
    NodeRef path;
    NodeRef evidence;
};

// --- beta draw counting (pre-pass; conservative across if branches) ---------

void count_draws_expr(const Expr& e, int64_t mult, std::map<std::string, int64_t>& out);

void count_draws_stmts(const std::vector<StmtPtr>& stmts, int64_t mult,
                       std::map<std::string, int64_t>& out) {
    for (const StmtPtr& s : stmts) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, LetStmt>) {
                    count_draws_expr(*node.value, mult, out);
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    count_draws_expr(*node.value, mult, out);
                } else if constexpr (std::is_same_v<T, ObserveStmt>) {
                    count_draws_expr(*node.cond, mult, out);
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    count_draws_expr(*node.cond, mult, out);
                    count_draws_stmts(node.then_body, mult, out);
                    count_draws_stmts(node.else_body, mult, out);
                } else if constexpr (std::is_same_v<T, ForStmt>) {
                    int64_t iters = node.end > node.begin ? node.end - node.begin : 0;
                    if (iters > 0) count_draws_stmts(node.body, mult * iters, out);
                }
            },
            s->node);
    }
}

void count_draws_expr(const Expr& e, int64_t mult, std::map<std::string, int64_t>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BetaFlipExpr>) {
                out[node.name] += mult;
            } else if constexpr (std::is_same_v<T, UniformExpr>) {
                count_draws_expr(*node.lo, mult, out);
                count_draws_expr(*node.hi, mult, out);
            } else if constexpr (std::is_same_v<T, ArrayExpr>) {
                for (const ExprPtr& el : node.elems) count_draws_expr(*el, mult, out);
            } else if constexpr (std::is_same_v<T, IndexExpr>) {
                count_draws_expr(*node.index, mult, out);
            } else if constexpr (std::is_same_v<T, CastExpr>) {
                count_draws_expr(*node.value, mult, out);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                count_draws_expr(*node.lhs, mult, out);
                count_draws_expr(*node.rhs, mult, out);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                count_draws_expr(*node.operand, mult, out);
            } else if constexpr (std::is_same_v<T, IfExpr>) {
                count_draws_expr(*node.cond, mult, out);
                count_draws_expr(*node.then_val, mult, out);
                count_draws_expr(*node.else_val, mult, out);
            }
        },
        e.node);
}

// --- evaluation --------------------------------------------------------------

Value eval(const Expr& e, Ctx& ctx);

ProbInt as_int(const Value& x, Ctx& ctx, SourcePos pos) {
    if (const auto* s = std::get_if<StaticInt>(&x.v)) {
        return const_int(ctx.m, static_cast<uint64_t>(s->value), s->width);
    }
    if (const auto* b = std::get_if<StaticBool>(&x.v)) {
        return ProbInt({ctx.m.constant(b->value)});
    }
    if (const auto* b = std::get_if<BoolVal>(&x.v)) {
        return ProbInt({b->node});
    }
    if (const auto* i = std::get_if<IntVal>(&x.v)) {
        return i->value;
    }
    fail(pos, std::string("expected an integer value, found ") + kind_name(x));
}

NodeRef as_bool(const Value& x, Ctx& ctx, SourcePos pos) {
    if (const auto* b = std::get_if<StaticBool>(&x.v)) return ctx.m.constant(b->value);
    if (const auto* b = std::get_if<BoolVal>(&x.v)) return b->node;
    fail(pos, std::string("expected a boolean value, found ") + kind_name(x));
}

int64_t as_static(const Value& x, SourcePos pos, const char* what) {
    if (const auto* s = std::get_if<StaticInt>(&x.v)) return s->value;
    fail(pos, std::string(what) + " must be a compile-time integer");
}

bool is_boolish(const Value& x) {
    return std::holds_alternative<StaticBool>(x.v) || std::holds_alternative<BoolVal>(x.v);
}

Value static_int(int64_t v, uint32_t w) { return Value{StaticInt{v, w}}; }

Value eval_static_arith(BinOp op, StaticInt a, StaticInt b, SourcePos pos) {
    uint32_t wmax = std::max(a.width, b.width);
    auto wrap = [](uint64_t v, uint32_t w) {
        return static_cast<int64_t>(v & ((uint64_t{1} << w) - 1));
    };
    switch (op) {
        case BinOp::Add: {
            uint32_t w = wmax + 1;
            if (w > 62) fail(pos, "constant width exceeds 62 bits");
            return static_int(a.value + b.value, w);
        }
        case BinOp::Sub:
            return static_int(
                wrap(static_cast<uint64_t>(a.value) - static_cast<uint64_t>(b.value), wmax),
                wmax);
        case BinOp::Mul: {
            uint32_t w = a.width + b.width;
            if (w > 62) fail(pos, "constant width exceeds 62 bits");
            return static_int(a.value * b.value, w);
        }
        case BinOp::Div:
            return static_int(b.value == 0 ? 0 : a.value / b.value, wmax);
        case BinOp::Mod:
            return static_int(b.value == 0 ? a.value : a.value % b.value, wmax);
        default: break;
    }
    fail(pos, "internal: not an arithmetic operator");
}

// mux over arbitrary values; shared by if-expressions and branch merging
Value mux_value(Ctx& ctx, NodeRef cond, const Value& t, const Value& f, SourcePos pos) {
    if (is_boolish(t) && is_boolish(f)) {
        return Value{BoolVal{ctx.m.ite(cond, as_bool(t, ctx, pos), as_bool(f, ctx, pos))}};
    }
    const auto* ta = std::get_if<ArrayVal>(&t.v);
    const auto* fa = std::get_if<ArrayVal>(&f.v);
    if (ta != nullptr || fa != nullptr) {
        if (ta == nullptr || fa == nullptr || ta->elems->size() != fa->elems->size()) {
            fail(pos, "cannot merge arrays of different shape");
        }
        std::vector<Value> merged;
        merged.reserve(ta->elems->size());
        for (size_t i = 0; i < ta->elems->size(); ++i) {
            merged.push_back(mux_value(ctx, cond, (*ta->elems)[i], (*fa->elems)[i], pos));
        }
        return Value{ArrayVal{std::make_shared<const std::vector<Value>>(std::move(merged))}};
    }
    if (std::holds_alternative<BetaVal>(t.v) || std::holds_alternative<BetaVal>(f.v)) {
        fail(pos, "Beta variables cannot be merged across branches");
    }
    return Value{IntVal{mux_int(cond, as_int(t, ctx, pos), as_int(f, ctx, pos))}};
}

bool values_identical(const Value& a, const Value& b) {
    if (a.v.index() != b.v.index()) return false;
    if (const auto* s = std::get_if<StaticInt>(&a.v)) {
        const auto& o = std::get<StaticInt>(b.v);
        return s->value == o.value && s->width == o.width;
    }
    if (const auto* s = std::get_if<StaticBool>(&a.v)) {
        return s->value == std::get<StaticBool>(b.v).value;
    }
    if (const auto* s = std::get_if<BoolVal>(&a.v)) {
        return s->node == std::get<BoolVal>(b.v).node;
    }
    if (const auto* s = std::get_if<IntVal>(&a.v)) {
        const auto& o = std::get<IntVal>(b.v);
        if (s->value.width() != o.value.width()) return false;
        for (uint32_t i = 0; i < s->value.width(); ++i) {
            if (!(s->value.bit(i) == o.value.bit(i))) return false;
        }
        return true;
    }
    if (const auto* s = std::get_if<BetaVal>(&a.v)) {
        return s->name == std::get<BetaVal>(b.v).name;
    }
    const auto& aa = std::get<ArrayVal>(a.v);
    const auto& ba = std::get<ArrayVal>(b.v);
    if (aa.elems->size() != ba.elems->size()) return false;
    for (size_t i = 0; i < aa.elems->size(); ++i) {
        if (!values_identical((*aa.elems)[i], (*ba.elems)[i])) return false;
    }
    return true;
}

Value eval_binary(const Expr& e, const BinaryExpr& bin, Ctx& ctx) {
    // no short-circuit: both operands always materialize, like the circuits
    Value lhs = eval(*bin.lhs, ctx);
    Value rhs = eval(*bin.rhs, ctx);
    SourcePos pos = e.pos;

    const auto* ls = std::get_if<StaticInt>(&lhs.v);
    const auto* rs = std::get_if<StaticInt>(&rhs.v);
    const auto* lb = std::get_if<StaticBool>(&lhs.v);
    const auto* rb = std::get_if<StaticBool>(&rhs.v);

    switch (bin.op) {
        case BinOp::Or:
        case BinOp::And: {
            if (lb && rb) {
                bool v = bin.op == BinOp::Or ? (lb->value || rb->value)
                                             : (lb->value && rb->value);
                return Value{StaticBool{v}};
            }
            NodeRef l = as_bool(lhs, ctx, pos);
            NodeRef r = as_bool(rhs, ctx, pos);
            return Value{BoolVal{bin.op == BinOp::Or ? ctx.m.lor(l, r) : ctx.m.land(l, r)}};
        }
        case BinOp::Eq:
        case BinOp::Ne: {
            if (lb && rb) {
                bool v = (lb->value == rb->value) == (bin.op == BinOp::Eq);
                return Value{StaticBool{v}};
            }
            if (ls && rs) {
                bool v = (ls->value == rs->value) == (bin.op == BinOp::Eq);
                return Value{StaticBool{v}};
            }
            ProbInt a = as_int(lhs, ctx, pos);
            ProbInt b = as_int(rhs, ctx, pos);
            return Value{BoolVal{bin.op == BinOp::Eq ? eq(a, b) : ne(a, b)}};
        }
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: {
            if (ls && rs) {
                bool v = false;
                switch (bin.op) {
                    case BinOp::Lt: v = ls->value < rs->value; break;
                    case BinOp::Le: v = ls->value <= rs->value; break;
                    case BinOp::Gt: v = ls->value > rs->value; break;
                    default: v = ls->value >= rs->value; break;
                }
                return Value{StaticBool{v}};
            }
            ProbInt a = as_int(lhs, ctx, pos);
            ProbInt b = as_int(rhs, ctx, pos);
            NodeRef r;
            switch (bin.op) {
                case BinOp::Lt: r = lt(a, b); break;
                case BinOp::Le: r = le(a, b); break;
                case BinOp::Gt: r = gt(a, b); break;
                default: r = ge(a, b); break;
            }
            return Value{BoolVal{r}};
        }
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: {
            if (ls && rs) return eval_static_arith(bin.op, *ls, *rs, pos);
            ProbInt a = as_int(lhs, ctx, pos);
            ProbInt b = as_int(rhs, ctx, pos);
            switch (bin.op) {
                case BinOp::Add: return Value{IntVal{add(a, b)}};
                case BinOp::Sub: return Value{IntVal{sub_wrap(a, b)}};
                case BinOp::Mul: return Value{IntVal{mul(a, b)}};
                case BinOp::Div: return Value{IntVal{divmod(a, b).quotient}};
                default: return Value{IntVal{divmod(a, b).remainder}};
            }
        }
    }
    fail(pos, "internal: unhandled operator");
}

Value eval_beta_flip(const Expr& e, const BetaFlipExpr& node, Ctx& ctx) {
    if (!ctx.path.is_true()) {
        fail(e.pos,
             "beta_flip under a probabilistic condition is not supported; bind the "
             "draw with let and select with if-then-else");
    }
    auto it = ctx.betas.find(node.name);
    if (it == ctx.betas.end()) {
        fail(e.pos, "'" + node.name + "' is not a Beta-declared variable");
    }
    BetaState& st = it->second;
    // flip(A/T) as uniform(0,T) < A; then A grows by the drawn bit and the
    // deterministic total advances
    ProbInt u = uniform_int(ctx.m, static_cast<uint64_t>(st.total));
    NodeRef bit = lt(u, st.alpha);
    ProbInt bumped = add_wrap(st.alpha, const_int(ctx.m, 1, 1));
    st.alpha = mux_int(bit, bumped, st.alpha);
    st.total += 1;
    return Value{BoolVal{bit}};
}

Value eval(const Expr& e, Ctx& ctx) {
    return std::visit(
        [&](const auto& node) -> Value {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLitExpr>) {
                return static_int(node.value, value_width(node.value));
            } else if constexpr (std::is_same_v<T, FlipExpr>) {
                return Value{BoolVal{ctx.m.fresh_var(node.prob)}};
            } else if constexpr (std::is_same_v<T, DiscreteExpr>) {
                ProbInt x = ctx.encoding == Encoding::Bitwise
                                ? bitwise_int(ctx.m, node.weights)
                                : categ_int(ctx.m, node.weights);
                return Value{IntVal{x}};
            } else if constexpr (std::is_same_v<T, UniformExpr>) {
                int64_t lo = as_static(eval(*node.lo, ctx), e.pos, "uniform bound");
                int64_t hi = as_static(eval(*node.hi, ctx), e.pos, "uniform bound");
                if (lo < 0 || hi <= lo) {
                    fail(e.pos, "uniform(lo, hi) requires 0 <= lo < hi");
                }
                ProbInt u = uniform_int(ctx.m, static_cast<uint64_t>(hi - lo));
                if (lo == 0) return Value{IntVal{u}};
                ProbInt shifted =
                    add(u, const_int(ctx.m, static_cast<uint64_t>(lo), value_width(lo)));
                return Value{IntVal{
                    shifted.truncated(width_for_count(static_cast<uint64_t>(hi)))}};
            } else if constexpr (std::is_same_v<T, BetaFlipExpr>) {
                return eval_beta_flip(e, node, ctx);
            } else if constexpr (std::is_same_v<T, VarExpr>) {
                auto it = ctx.env.find(node.name);
                if (it != ctx.env.end()) return it->second;
                if (ctx.betas.count(node.name)) return Value{BetaVal{node.name}};
                fail(e.pos, "unknown identifier '" + node.name + "'");
            } else if constexpr (std::is_same_v<T, ArrayExpr>) {
                std::vector<Value> elems;
                elems.reserve(node.elems.size());
                for (const ExprPtr& el : node.elems) elems.push_back(eval(*el, ctx));
                return Value{
                    ArrayVal{std::make_shared<const std::vector<Value>>(std::move(elems))}};
            } else if constexpr (std::is_same_v<T, IndexExpr>) {
                auto it = ctx.env.find(node.name);
                if (it == ctx.env.end()) fail(e.pos, "unknown identifier '" + node.name + "'");
                const auto* arr = std::get_if<ArrayVal>(&it->second.v);
                if (arr == nullptr) fail(e.pos, "'" + node.name + "' is not an array");
                int64_t idx = as_static(eval(*node.index, ctx), e.pos, "array index");
                if (idx < 0 || static_cast<size_t>(idx) >= arr->elems->size()) {
                    fail(e.pos, "array index out of bounds");
                }
                return (*arr->elems)[static_cast<size_t>(idx)];
            } else if constexpr (std::is_same_v<T, CastExpr>) {
                if (node.width < 1 || node.width > 62) {
                    fail(e.pos, "cast width must be in 1..62");
                }
                uint32_t w = static_cast<uint32_t>(node.width);
                Value inner = eval(*node.value, ctx);
                if (const auto* s = std::get_if<StaticInt>(&inner.v)) {
                    if (s->width > w) fail(e.pos, "int(e, w) widens; it cannot narrow");
                    if (value_width(s->value) > w) fail(e.pos, "constant does not fit width");
                    return static_int(s->value, w);
                }
                ProbInt x = as_int(inner, ctx, e.pos);
                if (x.width() > w) fail(e.pos, "int(e, w) widens; it cannot narrow");
                return Value{IntVal{x.zero_extended(w)}};
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                return eval_binary(e, node, ctx);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                Value operand = eval(*node.operand, ctx);
                if (const auto* b = std::get_if<StaticBool>(&operand.v)) {
                    return Value{StaticBool{!b->value}};
                }
                return Value{BoolVal{ctx.m.lnot(as_bool(operand, ctx, e.pos))}};
            } else {
                static_assert(std::is_same_v<T, IfExpr>);
                // all three parts evaluate eagerly: flips in both arms always
                // materialize, exactly like the circuit mux
                Value cond = eval(*node.cond, ctx);
                Value t = eval(*node.then_val, ctx);
                Value f = eval(*node.else_val, ctx);
                if (const auto* sb = std::get_if<StaticBool>(&cond.v)) {
                    return sb->value ? t : f;
                }
                return mux_value(ctx, as_bool(cond, ctx, e.pos), t, f, e.pos);
            }
        },
        e.node);
}

// --- statements --------------------------------------------------------------

void exec_stmts(const std::vector<StmtPtr>& stmts, Ctx& ctx);

void exec_stmt(const Stmt& stmt, Ctx& ctx) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, LetStmt>) {
                Value v = eval(*node.value, ctx);
                if (ctx.env.count(node.name) || ctx.betas.count(node.name)) {
                    fail(stmt.pos, "'" + node.name + "' is already defined");
                }
                ctx.env.emplace(node.name, std::move(v));
            } else if constexpr (std::is_same_v<T, BetaDeclStmt>) {
                if (!ctx.path.is_true()) {
                    fail(stmt.pos, "Beta declarations must be unconditional");
                }
                if (ctx.env.count(node.name) || ctx.betas.count(node.name)) {
                    fail(stmt.pos, "'" + node.name + "' is already defined");
                }
                int64_t draws = 0;
                if (auto it = ctx.beta_draw_bound.find(node.name);
                    it != ctx.beta_draw_bound.end()) {
                    draws = it->second;
                }
                int64_t max_total = node.alpha + node.beta + draws;
                BetaState st;
                st.width = width_for_count(static_cast<uint64_t>(max_total) + 1);
                st.alpha = const_int(ctx.m, static_cast<uint64_t>(node.alpha), st.width);
                st.total = node.alpha + node.beta;
                ctx.betas.emplace(node.name, std::move(st));
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                Value v = eval(*node.value, ctx);
                ctx.env[node.name] = std::move(v);  // define-if-absent
            } else if constexpr (std::is_same_v<T, ObserveStmt>) {
                Value v = eval(*node.cond, ctx);
                NodeRef cond = as_bool(v, ctx, stmt.pos);
                // only constrains executions that reach this statement
                ctx.evidence = ctx.m.land(ctx.evidence, ctx.m.implies(ctx.path, cond));
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                Value cond = eval(*node.cond, ctx);
                if (const auto* sb = std::get_if<StaticBool>(&cond.v)) {
                    // statically resolved: compile only the taken branch
                    auto before = ctx.env;
                    exec_stmts(sb->value ? node.then_body : node.else_body, ctx);
                    for (auto it = ctx.env.begin(); it != ctx.env.end();) {
                        it = before.count(it->first) ? std::next(it) : ctx.env.erase(it);
                    }
                    return;
                }
                NodeRef c = as_bool(cond, ctx, stmt.pos);
                NodeRef path_before = ctx.path;
                auto env_before = ctx.env;

                ctx.path = ctx.m.land(path_before, c);
                exec_stmts(node.then_body, ctx);
                auto env_then = std::move(ctx.env);

                ctx.env = env_before;
                ctx.path = ctx.m.land(path_before, ctx.m.lnot(c));
                exec_stmts(node.else_body, ctx);
                auto env_else = std::move(ctx.env);

                ctx.path = path_before;
                ctx.env.clear();
                for (auto& [name, old_value] : env_before) {
                    const Value& tv = env_then.at(name);
                    const Value& fv = env_else.at(name);
                    if (values_identical(tv, fv)) {
                        ctx.env.emplace(name, tv);
                    } else {
                        ctx.env.emplace(name, mux_value(ctx, c, tv, fv, stmt.pos));
                    }
                }
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                for (int64_t i = node.begin; i < node.end; ++i) {
                    auto before = ctx.env;
                    ctx.env.emplace(node.var, static_int(i, value_width(i)));
                    exec_stmts(node.body, ctx);
                    for (auto it = ctx.env.begin(); it != ctx.env.end();) {
                        it = before.count(it->first) ? std::next(it) : ctx.env.erase(it);
                    }
                }
            }
        },
        stmt.node);
}

void exec_stmts(const std::vector<StmtPtr>& stmts, Ctx& ctx) {
    for (const StmtPtr& s : stmts) exec_stmt(*s, ctx);
}

void flatten_output(Ctx& ctx, const Value& v, const std::string& label, SourcePos pos,
                    std::vector<Output>& out) {
    if (const auto* arr = std::get_if<ArrayVal>(&v.v)) {
        for (size_t i = 0; i < arr->elems->size(); ++i) {
            flatten_output(ctx, (*arr->elems)[i], label + "[" + std::to_string(i) + "]",
                           pos, out);
        }
        return;
    }
    Output o;
    o.label = label;
    if (const auto* beta = std::get_if<BetaVal>(&v.v)) {
        const BetaState& st = ctx.betas.at(beta->name);
        o.kind = Output::Kind::BetaPosterior;
        o.value = st.alpha;
        o.beta_total = st.total;
    } else if (is_boolish(v)) {
        o.kind = Output::Kind::Probability;
        o.formula = as_bool(v, ctx, pos);
    } else {
        o.kind = Output::Kind::Distribution;
        o.value = as_int(v, ctx, pos);
    }
    out.push_back(std::move(o));
}

}  // namespace

CompiledProgram compile(Manager& m, const Program& prog, Encoding encoding) {
    Ctx ctx{m, encoding, prog, {}, {}, {}, m.true_node(), m.true_node()};
    count_draws_stmts(prog.statements, 1, ctx.beta_draw_bound);
    for (const ExprPtr& r : prog.returns) count_draws_expr(*r, 1, ctx.beta_draw_bound);

    exec_stmts(prog.statements, ctx);

    CompiledProgram result;
    for (const ExprPtr& r : prog.returns) {
        Value v = eval(*r, ctx);
        flatten_output(ctx, v, prog.snippet(*r), r->pos, result.outputs);
    }
    result.evidence = ctx.evidence;
    return result;
}

RunResult run_parsed(const Program& prog, Encoding encoding, const RunOptions& options) {
    Manager m;
    CompiledProgram compiled = compile(m, prog, encoding);
    Evidence e(compiled.evidence);

    RunResult result;
    result.evidence_probability = m.wmc(compiled.evidence);
    if (result.evidence_probability <= 0.0) {
        throw Error(ErrorKind::UnsatisfiableEvidence, "evidence has zero probability");
    }

    std::vector<NodeRef> roots = {compiled.evidence};
    for (const Output& o : compiled.outputs) {
        QueryResult q;
        q.kind = o.kind;
        q.label = o.label;
        switch (o.kind) {
            case Output::Kind::Probability:
                q.probability = prob(o.formula, e);
                roots.push_back(o.formula);
                break;
            case Output::Kind::Distribution:
            case Output::Kind::BetaPosterior: {
                q.distribution = marginal_distribution(o.value, e);
                q.expectation = expectation(o.value, e);
                q.beta_total = o.beta_total;
                for (NodeRef b : o.value.bits()) roots.push_back(b);
                break;
            }
        }
        result.queries.push_back(std::move(q));
    }
    result.decision_nodes = m.node_count(roots);
    result.flip_count = m.var_count();
    if (options.dot != nullptr) m.dump_dot(*options.dot, roots);
    return result;
}

RunResult run_program(std::string_view source, Encoding encoding) {
    Program prog = parse(source);
    return run_parsed(prog, encoding);
}

}  // namespace probbits::lang
