#include "probbits/arith.hpp"

#include <algorithm>

namespace probbits {

namespace {

Manager& common_manager(const ProbInt& a, const ProbInt& b) {
    Manager* m = a.manager();
    if (m == nullptr || b.manager() != m) {
        throw Error(ErrorKind::ManagerMismatch, "operands belong to different managers");
    }
    return *m;
}

struct Aligned {
    Manager* m;
    ProbInt a, b;
    uint32_t width;
};

Aligned align(const ProbInt& a, const ProbInt& b) {
    Manager& m = common_manager(a, b);
    uint32_t w = std::max(a.width(), b.width());
    return Aligned{&m, a.zero_extended(w), b.zero_extended(w), w};
}

// sum and carry-out of a full adder
struct AdderBit {
    NodeRef sum;
    NodeRef carry;
};

AdderBit full_adder(Manager& m, NodeRef a, NodeRef b, NodeRef c) {
    NodeRef axb = m.lxor(a, b);
    return AdderBit{m.lxor(axb, c), m.lor(m.land(a, b), m.land(c, axb))};
}

// shared ripple-carry core; wrap drops the final carry
ProbInt ripple_add(Manager& m, const ProbInt& a, const ProbInt& b, NodeRef carry_in,
                   bool keep_carry) {
    uint32_t w = a.width();
    std::vector<NodeRef> out;
    out.reserve(w + 1);
    NodeRef carry = carry_in;
    for (uint32_t i = 0; i < w; ++i) {
        AdderBit r = full_adder(m, a.bit(i), b.bit(i), carry);
        out.push_back(r.sum);
        carry = r.carry;
    }
    if (keep_carry) out.push_back(carry);
    return ProbInt(std::move(out));
}

ProbInt complement(Manager& m, const ProbInt& x) {
    std::vector<NodeRef> bits;
    bits.reserve(x.width());
    for (uint32_t i = 0; i < x.width(); ++i) bits.push_back(m.lnot(x.bit(i)));
    return ProbInt(std::move(bits));
}

}  // namespace

NodeRef lt(const ProbInt& a, const ProbInt& b) {
    Aligned x = align(a, b);
    Manager& m = *x.m;
    // MSB decides; on equal bits the comparison falls through to the rest
    NodeRef res = m.false_node();
    for (uint32_t i = 0; i < x.width; ++i) {
        NodeRef below = m.land(m.lnot(x.a.bit(i)), x.b.bit(i));
        NodeRef same = m.lxnor(x.a.bit(i), x.b.bit(i));
        res = m.lor(below, m.land(same, res));
    }
    return res;
}

NodeRef le(const ProbInt& a, const ProbInt& b) { return a.manager()->lnot(lt(b, a)); }
NodeRef gt(const ProbInt& a, const ProbInt& b) { return lt(b, a); }
NodeRef ge(const ProbInt& a, const ProbInt& b) { return a.manager()->lnot(lt(a, b)); }

NodeRef eq(const ProbInt& a, const ProbInt& b) {
    Aligned x = align(a, b);
    Manager& m = *x.m;
    NodeRef res = m.true_node();
    for (uint32_t i = x.width; i-- > 0;) {
        res = m.land(res, m.lxnor(x.a.bit(i), x.b.bit(i)));
    }
    return res;
}

NodeRef ne(const ProbInt& a, const ProbInt& b) { return a.manager()->lnot(eq(a, b)); }

ProbInt add(const ProbInt& a, const ProbInt& b) {
    Aligned x = align(a, b);
    return ripple_add(*x.m, x.a, x.b, x.m->false_node(), true);
}

ProbInt add_wrap(const ProbInt& a, const ProbInt& b) {
    Aligned x = align(a, b);
    return ripple_add(*x.m, x.a, x.b, x.m->false_node(), false);
}

ProbInt sub_wrap(const ProbInt& a, const ProbInt& b) {
    Aligned x = align(a, b);
    return ripple_add(*x.m, x.a, complement(*x.m, x.b), x.m->true_node(), false);
}

ProbInt mul(const ProbInt& a, const ProbInt& b) {
    Manager& m = common_manager(a, b);
    uint32_t wr = a.width() + b.width();
    ProbInt acc = const_int(m, 0, wr);
    for (uint32_t i = 0; i < b.width(); ++i) {
        std::vector<NodeRef> partial(wr, m.false_node());
        for (uint32_t j = 0; j < a.width(); ++j) {
            partial[j + i] = m.land(a.bit(j), b.bit(i));
        }
        // the true running sum is bounded by the final product, so a wrapping
        // add at the full result width loses nothing
        acc = add_wrap(acc, ProbInt(std::move(partial)));
    }
    return acc;
}

DivModResult divmod(const ProbInt& a, const ProbInt& b) {
    Aligned x = align(a, b);
    Manager& m = *x.m;
    uint32_t w = x.width;

    ProbInt b_wide = x.b.zero_extended(w + 1);
    std::vector<NodeRef> rem(w + 1, m.false_node());
    std::vector<NodeRef> q(w, m.false_node());
    for (uint32_t i = w; i-- > 0;) {
        // rem = (rem << 1) | a_i; the shifted-out top bit is zero on every
        // path with a nonzero divisor, and the zero-divisor path is patched
        // below
        std::vector<NodeRef> shifted(w + 1);
        shifted[0] = x.a.bit(i);
        for (uint32_t j = 0; j < w; ++j) shifted[j + 1] = rem[j];
        ProbInt r2 = ProbInt(std::move(shifted));
        NodeRef can_sub = ge(r2, b_wide);
        ProbInt diff = sub_wrap(r2, b_wide);
        ProbInt next = mux_int(can_sub, diff, r2);
        rem.assign(next.bits().begin(), next.bits().end());
        q[i] = can_sub;
    }

    NodeRef zero_div = eq(x.b, const_int(m, 0, w));
    ProbInt quotient = mux_int(zero_div, const_int(m, 0, w), ProbInt(std::move(q)));
    ProbInt remainder = mux_int(zero_div, x.a, ProbInt(rem).truncated(w));
    return DivModResult{std::move(quotient), std::move(remainder)};
}

ProbInt mux_int(NodeRef cond, const ProbInt& then_val, const ProbInt& else_val) {
    Aligned x = align(then_val, else_val);
    Manager& m = *x.m;
    if (cond.manager() != &m) {
        throw Error(ErrorKind::ManagerMismatch, "operands belong to different managers");
    }
    std::vector<NodeRef> bits;
    bits.reserve(x.width);
    for (uint32_t i = 0; i < x.width; ++i) {
        bits.push_back(m.ite(cond, x.a.bit(i), x.b.bit(i)));
    }
    return ProbInt(std::move(bits));
}

}  // namespace probbits
