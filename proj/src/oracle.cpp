#include "probbits/oracle.hpp"

#include <bit>
#include <cmath>
#include <memory>
#include <optional>
#include <variant>

#include "probbits/errors.hpp"

namespace probbits::oracle {

using namespace lang;

namespace {

[[noreturn]] void fail(SourcePos pos, ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg, pos.line, pos.column);
}

uint32_t value_width(int64_t v) {
    return v <= 1 ? 1 : static_cast<uint32_t>(std::bit_width(static_cast<uint64_t>(v)));
}

uint32_t covering_width(uint64_t n) {
    uint32_t w = 1;
    while (w < 64 && (uint64_t{1} << w) < n) ++w;
    return w;
}

// Values carry the same widths the circuits would have, and a static flag so
// that compile-time-only contexts (array indices, uniform bounds, pruned ifs)
// behave exactly like the engine.
struct OInt {
    uint64_t value;
    uint32_t width;
    bool is_static;
};
struct OBool {
    bool value;
    bool is_static;
};
struct OBeta {
    std::string name;
};
struct OValue;
struct OArray {
    std::shared_ptr<const std::vector<OValue>> elems;
};
struct OValue {
    std::variant<OInt, OBool, OBeta, OArray> v;
};

struct BetaCounts {
    int64_t alpha;
    int64_t total;
};

struct World {
    double weight = 1.0;
    std::map<std::string, OValue> env;
    std::map<std::string, BetaCounts> betas;
};

using Forks = std::vector<std::pair<OValue, World>>;

// Static pre-guard: the product of branch counts over all post-unroll choice
// sites, saturating. Uniform bounds are resolved through literals and loop
// variables where possible; unresolvable sites count conservatively low (the
// runtime cap still backstops them).
struct ChoiceCounter {
    static constexpr uint64_t kSat = ~uint64_t{0};
    std::map<std::string, int64_t> loop_env;

    static uint64_t sat_mul(uint64_t a, uint64_t b) {
        if (a == 0 || b == 0) return 0;
        if (a > kSat / b) return kSat;
        return a * b;
    }

    std::optional<int64_t> static_eval(const Expr& e) {
        if (const auto* lit = std::get_if<IntLitExpr>(&e.node)) return lit->value;
        if (const auto* var = std::get_if<VarExpr>(&e.node)) {
            auto it = loop_env.find(var->name);
            if (it != loop_env.end()) return it->second;
            return std::nullopt;
        }
        if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
            auto lhs = static_eval(*bin->lhs);
            auto rhs = static_eval(*bin->rhs);
            if (!lhs || !rhs) return std::nullopt;
            switch (bin->op) {
                case BinOp::Add: return *lhs + *rhs;
                case BinOp::Sub: return *lhs - *rhs;
                case BinOp::Mul: return *lhs * *rhs;
                case BinOp::Div: return *rhs == 0 ? 0 : *lhs / *rhs;
                case BinOp::Mod: return *rhs == 0 ? *lhs : *lhs % *rhs;
                default: return std::nullopt;
            }
        }
        return std::nullopt;
    }

    uint64_t expr_product(const Expr& e) {
        return std::visit(
            [&](const auto& node) -> uint64_t {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, FlipExpr>) {
                    return node.prob > 0.0 && node.prob < 1.0 ? 2 : 1;
                } else if constexpr (std::is_same_v<T, BetaFlipExpr>) {
                    return 2;
                } else if constexpr (std::is_same_v<T, DiscreteExpr>) {
                    uint64_t n = 0;
                    for (double p : node.weights) n += p > 0.0 ? 1 : 0;
                    return std::max<uint64_t>(n, 1);
                } else if constexpr (std::is_same_v<T, UniformExpr>) {
                    uint64_t inner = sat_mul(expr_product(*node.lo), expr_product(*node.hi));
                    auto lo = static_eval(*node.lo);
                    auto hi = static_eval(*node.hi);
                    if (lo && hi && *hi > *lo) {
                        return sat_mul(inner, static_cast<uint64_t>(*hi - *lo));
                    }
                    return sat_mul(inner, 2);
                } else if constexpr (std::is_same_v<T, ArrayExpr>) {
                    uint64_t p = 1;
                    for (const ExprPtr& el : node.elems) p = sat_mul(p, expr_product(*el));
                    return p;
                } else if constexpr (std::is_same_v<T, IndexExpr>) {
                    return expr_product(*node.index);
                } else if constexpr (std::is_same_v<T, CastExpr>) {
                    return expr_product(*node.value);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    return sat_mul(expr_product(*node.lhs), expr_product(*node.rhs));
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    return expr_product(*node.operand);
                } else if constexpr (std::is_same_v<T, IfExpr>) {
                    return sat_mul(expr_product(*node.cond),
                                   sat_mul(expr_product(*node.then_val),
                                           expr_product(*node.else_val)));
                } else {
                    return 1;
                }
            },
            e.node);
    }

    uint64_t stmts_product(const std::vector<StmtPtr>& stmts) {
        uint64_t p = 1;
        for (const StmtPtr& s : stmts) {
            std::visit(
                [&](const auto& node) {
                    using T = std::decay_t<decltype(node)>;
                    if constexpr (std::is_same_v<T, LetStmt>) {
                        p = sat_mul(p, expr_product(*node.value));
                    } else if constexpr (std::is_same_v<T, AssignStmt>) {
                        p = sat_mul(p, expr_product(*node.value));
                    } else if constexpr (std::is_same_v<T, ObserveStmt>) {
                        p = sat_mul(p, expr_product(*node.cond));
                    } else if constexpr (std::is_same_v<T, IfStmt>) {
                        p = sat_mul(p, expr_product(*node.cond));
                        p = sat_mul(p, stmts_product(node.then_body));
                        p = sat_mul(p, stmts_product(node.else_body));
                    } else if constexpr (std::is_same_v<T, ForStmt>) {
                        for (int64_t i = node.begin; i < node.end; ++i) {
                            loop_env[node.var] = i;
                            p = sat_mul(p, stmts_product(node.body));
                        }
                        loop_env.erase(node.var);
                    }
                },
                s->node);
        }
        return p;
    }

    uint64_t program_product(const Program& prog) {
        uint64_t p = stmts_product(prog.statements);
        for (const ExprPtr& r : prog.returns) p = sat_mul(p, expr_product(*r));
        return p;
    }
};

struct Enumerator {
    const Program& prog;
    uint64_t cap;
    double rejected = 0.0;

    void check_cap(size_t n, SourcePos pos) const {
        if (n > cap) {
            fail(pos, ErrorKind::EnumerationTooLarge,
                 "enumeration exceeds the path cap (" + std::to_string(cap) + ")");
        }
    }

    // --- expression evaluation (eager; forks on every random primitive) -----

    OInt as_oint(const OValue& x, SourcePos pos) {
        if (const auto* i = std::get_if<OInt>(&x.v)) return *i;
        if (const auto* b = std::get_if<OBool>(&x.v)) {
            return OInt{b->value ? uint64_t{1} : 0, 1, b->is_static};
        }
        fail(pos, ErrorKind::CompileError, "expected an integer value");
    }

    OBool as_obool(const OValue& x, SourcePos pos) {
        if (const auto* b = std::get_if<OBool>(&x.v)) return *b;
        fail(pos, ErrorKind::CompileError, "expected a boolean value");
    }

    int64_t as_static_int(const OValue& x, SourcePos pos, const char* what) {
        const auto* i = std::get_if<OInt>(&x.v);
        if (i == nullptr || !i->is_static) {
            fail(pos, ErrorKind::CompileError,
                 std::string(what) + " must be a compile-time integer");
        }
        return static_cast<int64_t>(i->value);
    }

    Forks eval(const Expr& e, World w) {
        return std::visit(
            [&](const auto& node) -> Forks {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IntLitExpr>) {
                    return one(OValue{OInt{static_cast<uint64_t>(node.value),
                                           value_width(node.value), true}},
                               std::move(w));
                } else if constexpr (std::is_same_v<T, FlipExpr>) {
                    if (!(node.prob >= 0.0 && node.prob <= 1.0)) {
                        fail(e.pos, ErrorKind::InvalidWeight,
                             "flip weight must be a probability in [0,1]");
                    }
                    Forks out;
                    if (node.prob > 0.0) {
                        World t = w;
                        t.weight *= node.prob;
                        out.emplace_back(OValue{OBool{true, false}}, std::move(t));
                    }
                    if (node.prob < 1.0) {
                        w.weight *= 1.0 - node.prob;
                        out.emplace_back(OValue{OBool{false, false}}, std::move(w));
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, DiscreteExpr>) {
                    double total = 0.0;
                    for (double p : node.weights) {
                        if (!std::isfinite(p) || p < 0.0) {
                            fail(e.pos, ErrorKind::InvalidVector,
                                 "probability vector entries must be finite and >= 0");
                        }
                        total += p;
                    }
                    if (node.weights.empty() || total <= 0.0) {
                        fail(e.pos, ErrorKind::InvalidVector, "unnormalizable vector");
                    }
                    uint32_t width = covering_width(node.weights.size());
                    Forks out;
                    for (size_t i = 0; i < node.weights.size(); ++i) {
                        if (node.weights[i] <= 0.0) continue;
                        World c = w;
                        c.weight *= node.weights[i] / total;
                        out.emplace_back(OValue{OInt{i, width, false}}, std::move(c));
                    }
                    check_cap(out.size(), e.pos);
                    return out;
                } else if constexpr (std::is_same_v<T, UniformExpr>) {
                    Forks lo_forks = eval(*node.lo, std::move(w));
                    Forks out;
                    for (auto& [lo_v, w1] : lo_forks) {
                        int64_t lo = as_static_int(lo_v, e.pos, "uniform bound");
                        for (auto& [hi_v, w2] : eval(*node.hi, std::move(w1))) {
                            int64_t hi = as_static_int(hi_v, e.pos, "uniform bound");
                            if (lo < 0 || hi <= lo) {
                                fail(e.pos, ErrorKind::InvalidRange,
                                     "uniform(lo, hi) requires 0 <= lo < hi");
                            }
                            uint32_t width = covering_width(static_cast<uint64_t>(hi));
                            uint64_t n = static_cast<uint64_t>(hi - lo);
                            check_cap(out.size() + n, e.pos);
                            for (uint64_t k = 0; k < n; ++k) {
                                World c = w2;
                                c.weight /= static_cast<double>(n);
                                out.emplace_back(
                                    OValue{OInt{static_cast<uint64_t>(lo) + k, width, false}},
                                    std::move(c));
                            }
                        }
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, BetaFlipExpr>) {
                    auto it = w.betas.find(node.name);
                    if (it == w.betas.end()) {
                        fail(e.pos, ErrorKind::CompileError,
                             "'" + node.name + "' is not a Beta-declared variable");
                    }
                    double p = static_cast<double>(it->second.alpha) /
                               static_cast<double>(it->second.total);
                    Forks out;
                    World t = w;
                    t.betas[node.name].alpha += 1;
                    t.betas[node.name].total += 1;
                    t.weight *= p;
                    out.emplace_back(OValue{OBool{true, false}}, std::move(t));
                    w.betas[node.name].total += 1;
                    w.weight *= 1.0 - p;
                    out.emplace_back(OValue{OBool{false, false}}, std::move(w));
                    return out;
                } else if constexpr (std::is_same_v<T, VarExpr>) {
                    auto it = w.env.find(node.name);
                    if (it != w.env.end()) return one(it->second, std::move(w));
                    if (w.betas.count(node.name)) {
                        return one(OValue{OBeta{node.name}}, std::move(w));
                    }
                    fail(e.pos, ErrorKind::CompileError,
                         "unknown identifier '" + node.name + "'");
                } else if constexpr (std::is_same_v<T, ArrayExpr>) {
                    Forks acc = one(OValue{OArray{
                                        std::make_shared<const std::vector<OValue>>()}},
                                    std::move(w));
                    for (const ExprPtr& el : node.elems) {
                        Forks next;
                        for (auto& [arr_v, aw] : acc) {
                            const auto& arr = std::get<OArray>(arr_v.v);
                            for (auto& [ev, ew] : eval(*el, std::move(aw))) {
                                std::vector<OValue> elems = *arr.elems;
                                elems.push_back(ev);
                                next.emplace_back(
                                    OValue{OArray{std::make_shared<
                                        const std::vector<OValue>>(std::move(elems))}},
                                    std::move(ew));
                            }
                        }
                        check_cap(next.size(), e.pos);
                        acc = std::move(next);
                    }
                    return acc;
                } else if constexpr (std::is_same_v<T, IndexExpr>) {
                    auto it = w.env.find(node.name);
                    if (it == w.env.end()) {
                        fail(e.pos, ErrorKind::CompileError,
                             "unknown identifier '" + node.name + "'");
                    }
                    OValue arr_value = it->second;
                    const auto* arr = std::get_if<OArray>(&arr_value.v);
                    if (arr == nullptr) {
                        fail(e.pos, ErrorKind::CompileError,
                             "'" + node.name + "' is not an array");
                    }
                    Forks out;
                    for (auto& [iv, iw] : eval(*node.index, std::move(w))) {
                        int64_t idx = as_static_int(iv, e.pos, "array index");
                        if (idx < 0 || static_cast<size_t>(idx) >= arr->elems->size()) {
                            fail(e.pos, ErrorKind::CompileError, "array index out of bounds");
                        }
                        out.emplace_back((*arr->elems)[static_cast<size_t>(idx)],
                                         std::move(iw));
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, CastExpr>) {
                    if (node.width < 1 || node.width > 62) {
                        fail(e.pos, ErrorKind::CompileError, "cast width must be in 1..62");
                    }
                    uint32_t width = static_cast<uint32_t>(node.width);
                    Forks out;
                    for (auto& [v, vw] : eval(*node.value, std::move(w))) {
                        OInt i = as_oint(v, e.pos);
                        if (i.width > width) {
                            fail(e.pos, ErrorKind::CompileError,
                                 "int(e, w) widens; it cannot narrow");
                        }
                        out.emplace_back(OValue{OInt{i.value, width, i.is_static}},
                                         std::move(vw));
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    Forks out;
                    for (auto& [lv, lw] : eval(*node.lhs, std::move(w))) {
                        for (auto& [rv, rw] : eval(*node.rhs, std::move(lw))) {
                            out.emplace_back(apply_binary(node.op, lv, rv, e.pos),
                                             std::move(rw));
                        }
                    }
                    check_cap(out.size(), e.pos);
                    return out;
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    Forks out;
                    for (auto& [v, vw] : eval(*node.operand, std::move(w))) {
                        OBool b = as_obool(v, e.pos);
                        out.emplace_back(OValue{OBool{!b.value, b.is_static}}, std::move(vw));
                    }
                    return out;
                } else {
                    static_assert(std::is_same_v<T, IfExpr>);
                    // eager, like the circuit mux: all three parts always evaluate
                    Forks out;
                    for (auto& [cv, cw] : eval(*node.cond, std::move(w))) {
                        OBool c = as_obool(cv, e.pos);
                        for (auto& [tv, tw] : eval(*node.then_val, std::move(cw))) {
                            for (auto& [fv, fw] : eval(*node.else_val, std::move(tw))) {
                                out.emplace_back(select(c, tv, fv, e.pos), std::move(fw));
                            }
                        }
                    }
                    check_cap(out.size(), e.pos);
                    return out;
                }
            },
            e.node);
    }

    static Forks one(OValue v, World w) {
        Forks out;
        out.emplace_back(std::move(v), std::move(w));
        return out;
    }

    // mux semantics: static condition selects as-is; a probabilistic condition
    // yields a dynamic value at the merged (max) width
    OValue select(OBool cond, const OValue& t, const OValue& f, SourcePos pos) {
        if (cond.is_static) return cond.value ? t : f;
        const auto* tb = std::get_if<OBool>(&t.v);
        const auto* fb = std::get_if<OBool>(&f.v);
        if (tb && fb) return OValue{OBool{cond.value ? tb->value : fb->value, false}};
        const auto* ta = std::get_if<OArray>(&t.v);
        const auto* fa = std::get_if<OArray>(&f.v);
        if (ta || fa) {
            if (!ta || !fa || ta->elems->size() != fa->elems->size()) {
                fail(pos, ErrorKind::CompileError, "cannot merge arrays of different shape");
            }
            std::vector<OValue> merged;
            for (size_t i = 0; i < ta->elems->size(); ++i) {
                merged.push_back(select(cond, (*ta->elems)[i], (*fa->elems)[i], pos));
            }
            return OValue{
                OArray{std::make_shared<const std::vector<OValue>>(std::move(merged))}};
        }
        if (std::holds_alternative<OBeta>(t.v) || std::holds_alternative<OBeta>(f.v)) {
            fail(pos, ErrorKind::CompileError, "Beta variables cannot be merged across branches");
        }
        OInt ti = as_oint(t, pos);
        OInt fi = as_oint(f, pos);
        return OValue{
            OInt{cond.value ? ti.value : fi.value, std::max(ti.width, fi.width), false}};
    }

    OValue apply_binary(BinOp op, const OValue& lhs, const OValue& rhs, SourcePos pos) {
        switch (op) {
            case BinOp::Or:
            case BinOp::And: {
                OBool a = as_obool(lhs, pos);
                OBool b = as_obool(rhs, pos);
                bool v = op == BinOp::Or ? (a.value || b.value) : (a.value && b.value);
                return OValue{OBool{v, a.is_static && b.is_static}};
            }
            case BinOp::Eq:
            case BinOp::Ne: {
                const auto* ab = std::get_if<OBool>(&lhs.v);
                const auto* bb = std::get_if<OBool>(&rhs.v);
                bool v;
                bool is_static;
                if (ab && bb) {
                    v = ab->value == bb->value;
                    is_static = ab->is_static && bb->is_static;
                } else {
                    OInt a = as_oint(lhs, pos);
                    OInt b = as_oint(rhs, pos);
                    v = a.value == b.value;
                    is_static = a.is_static && b.is_static;
                }
                return OValue{OBool{(op == BinOp::Eq) == v, is_static}};
            }
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge: {
                OInt a = as_oint(lhs, pos);
                OInt b = as_oint(rhs, pos);
                bool v = false;
                switch (op) {
                    case BinOp::Lt: v = a.value < b.value; break;
                    case BinOp::Le: v = a.value <= b.value; break;
                    case BinOp::Gt: v = a.value > b.value; break;
                    default: v = a.value >= b.value; break;
                }
                return OValue{OBool{v, a.is_static && b.is_static}};
            }
            default: break;
        }
        OInt a = as_oint(lhs, pos);
        OInt b = as_oint(rhs, pos);
        bool is_static = a.is_static && b.is_static;
        uint32_t wmax = std::max(a.width, b.width);
        auto mask = [](uint32_t w) { return w >= 64 ? ~uint64_t{0} : (uint64_t{1} << w) - 1; };
        switch (op) {
            case BinOp::Add: {
                uint32_t wt = wmax + 1;
                if (wt > 62) fail(pos, ErrorKind::CompileError, "width exceeds 62 bits");
                return OValue{OInt{a.value + b.value, wt, is_static}};
            }
            case BinOp::Sub:
                return OValue{OInt{(a.value - b.value) & mask(wmax), wmax, is_static}};
            case BinOp::Mul: {
                uint32_t wt = a.width + b.width;
                if (wt > 62) fail(pos, ErrorKind::CompileError, "width exceeds 62 bits");
                return OValue{OInt{a.value * b.value, wt, is_static}};
            }
            case BinOp::Div:
                return OValue{OInt{b.value == 0 ? 0 : a.value / b.value, wmax, is_static}};
            case BinOp::Mod:
                return OValue{OInt{b.value == 0 ? a.value : a.value % b.value, wmax, is_static}};
            default: break;
        }
        fail(pos, ErrorKind::CompileError, "internal: unhandled operator");
    }

    // --- statements ----------------------------------------------------------

    std::vector<World> exec_stmts(const std::vector<StmtPtr>& stmts, bool path,
                                  std::vector<World> worlds) {
        for (const StmtPtr& s : stmts) {
            std::vector<World> next;
            for (World& w : worlds) {
                auto produced = exec_stmt(*s, path, std::move(w));
                for (World& p : produced) next.push_back(std::move(p));
                check_cap(next.size(), s->pos);
            }
            worlds = std::move(next);
        }
        return worlds;
    }

    std::vector<World> exec_stmt(const Stmt& stmt, bool path, World w) {
        return std::visit(
            [&](const auto& node) -> std::vector<World> {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, LetStmt>) {
                    std::vector<World> out;
                    for (auto& [v, vw] : eval(*node.value, std::move(w))) {
                        World c = std::move(vw);
                        c.env[node.name] = v;
                        out.push_back(std::move(c));
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, BetaDeclStmt>) {
                    if (!path) {
                        fail(stmt.pos, ErrorKind::CompileError,
                             "Beta declarations must be unconditional");
                    }
                    w.betas[node.name] = BetaCounts{node.alpha, node.alpha + node.beta};
                    return single(std::move(w));
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    std::vector<World> out;
                    for (auto& [v, vw] : eval(*node.value, std::move(w))) {
                        World c = std::move(vw);
                        c.env[node.name] = v;
                        out.push_back(std::move(c));
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, ObserveStmt>) {
                    std::vector<World> out;
                    for (auto& [v, vw] : eval(*node.cond, std::move(w))) {
                        OBool c = as_obool(v, stmt.pos);
                        if (!path || c.value) {
                            out.push_back(std::move(vw));
                        } else {
                            rejected += vw.weight;
                        }
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    return exec_if(node, stmt.pos, path, std::move(w));
                } else if constexpr (std::is_same_v<T, ForStmt>) {
                    std::vector<World> worlds = single(std::move(w));
                    for (int64_t i = node.begin; i < node.end; ++i) {
                        std::vector<World> next;
                        for (World& cw : worlds) {
                            auto before_keys = keys_of(cw.env);
                            cw.env[node.var] =
                                OValue{OInt{static_cast<uint64_t>(i), value_width(i), true}};
                            for (World& rw :
                                 exec_stmts(node.body, path, single(std::move(cw)))) {
                                prune(rw.env, before_keys);
                                next.push_back(std::move(rw));
                            }
                        }
                        check_cap(next.size(), stmt.pos);
                        worlds = std::move(next);
                    }
                    return worlds;
                }
            },
            stmt.node);
    }

    std::vector<World> exec_if(const IfStmt& node, SourcePos pos, bool path, World w) {
        std::vector<World> out;
        for (auto& [cv, cw] : eval(*node.cond, std::move(w))) {
            OBool c = as_obool(cv, pos);
            if (c.is_static) {
                // statically resolved: only the taken branch exists
                World taken = std::move(cw);
                auto before_keys = keys_of(taken.env);
                for (World& rw : exec_stmts(c.value ? node.then_body : node.else_body, path,
                                            single(std::move(taken)))) {
                    prune(rw.env, before_keys);
                    out.push_back(std::move(rw));
                }
                continue;
            }
            // probabilistic condition: both branches run (their flips always
            // exist); observes apply only on the side whose guard holds, and
            // assignments merge by the concrete condition at merged width
            auto env_before = cw.env;
            for (World& mid : exec_stmts(node.then_body, path && c.value,
                                         single(std::move(cw)))) {
                auto env_then = std::move(mid.env);
                mid.env = env_before;
                for (World& fin : exec_stmts(node.else_body, path && !c.value,
                                             single(std::move(mid)))) {
                    std::map<std::string, OValue> merged;
                    for (auto& [name, before_value] : env_before) {
                        merged[name] =
                            select(c, env_then.at(name), fin.env.at(name), pos);
                    }
                    fin.env = std::move(merged);
                    out.push_back(std::move(fin));
                }
            }
        }
        check_cap(out.size(), pos);
        return out;
    }

    static std::vector<World> single(World w) {
        std::vector<World> out;
        out.push_back(std::move(w));
        return out;
    }

    static std::vector<std::string> keys_of(const std::map<std::string, OValue>& env) {
        std::vector<std::string> keys;
        keys.reserve(env.size());
        for (auto& [k, v] : env) keys.push_back(k);
        return keys;
    }

    static void prune(std::map<std::string, OValue>& env,
                      const std::vector<std::string>& keep) {
        std::map<std::string, OValue> pruned;
        for (const std::string& k : keep) {
            auto it = env.find(k);
            if (it != env.end()) pruned.emplace(k, std::move(it->second));
        }
        env = std::move(pruned);
    }
};

void accumulate_value(const OValue& v, const World& w, const std::string& label,
                      SourcePos pos, std::vector<OracleQuery>& queries, size_t& slot) {
    if (const auto* arr = std::get_if<OArray>(&v.v)) {
        for (size_t i = 0; i < arr->elems->size(); ++i) {
            accumulate_value((*arr->elems)[i], w, label + "[" + std::to_string(i) + "]",
                             pos, queries, slot);
        }
        return;
    }
    if (slot == queries.size()) {
        OracleQuery q;
        q.label = label;
        if (std::holds_alternative<OBool>(v.v)) {
            q.kind = OracleQuery::Kind::Probability;
        } else if (std::holds_alternative<OBeta>(v.v)) {
            q.kind = OracleQuery::Kind::BetaPosterior;
        } else {
            q.kind = OracleQuery::Kind::Distribution;
        }
        queries.push_back(std::move(q));
    }
    OracleQuery& q = queries[slot++];
    if (const auto* b = std::get_if<OBool>(&v.v)) {
        if (b->value) q.probability += w.weight;
    } else if (const auto* beta = std::get_if<OBeta>(&v.v)) {
        const BetaCounts& counts = w.betas.at(beta->name);
        q.distribution[static_cast<uint64_t>(counts.alpha)] += w.weight;
        q.beta_total = counts.total;
    } else {
        q.distribution[std::get<OInt>(v.v).value] += w.weight;
    }
}

}  // namespace

OracleResult enumerate(const Program& prog, uint64_t max_paths) {
    uint64_t product = ChoiceCounter().program_product(prog);
    if (product > max_paths) {
        throw Error(ErrorKind::EnumerationTooLarge,
                    "the product of branch counts exceeds the enumeration cap (" +
                        std::to_string(max_paths) + ")");
    }
    Enumerator en{prog, max_paths};
    std::vector<World> worlds = en.exec_stmts(prog.statements, true, {World{}});

    OracleResult result;
    double accepted = 0.0;

    // the return tuple behaves like a trailing block of evaluations
    struct Final {
        std::vector<OValue> values;
        World world;
    };
    std::vector<Final> finals;
    for (World& w : worlds) {
        std::vector<Final> partial;
        partial.push_back(Final{{}, std::move(w)});
        for (const ExprPtr& r : prog.returns) {
            std::vector<Final> next;
            for (Final& f : partial) {
                for (auto& [v, vw] : en.eval(*r, std::move(f.world))) {
                    Final nf;
                    nf.values = f.values;
                    nf.values.push_back(v);
                    nf.world = std::move(vw);
                    next.push_back(std::move(nf));
                }
            }
            en.check_cap(next.size(), r->pos);
            partial = std::move(next);
        }
        for (Final& f : partial) finals.push_back(std::move(f));
    }

    for (const Final& f : finals) accepted += f.world.weight;
    result.evidence_probability = accepted;
    result.rejected_mass = en.rejected;
    if (accepted <= 0.0) {
        throw Error(ErrorKind::UnsatisfiableEvidence, "evidence has zero probability");
    }

    for (const Final& f : finals) {
        size_t slot = 0;
        for (size_t i = 0; i < f.values.size(); ++i) {
            accumulate_value(f.values[i], f.world, prog.snippet(*prog.returns[i]),
                             prog.returns[i]->pos, result.queries, slot);
        }
    }
    for (OracleQuery& q : result.queries) {
        q.probability /= accepted;
        for (auto& [k, p] : q.distribution) p /= accepted;
        std::erase_if(q.distribution, [](const auto& kv) { return kv.second <= 0.0; });
    }
    return result;
}

}  // namespace probbits::oracle
