#pragma once

#include "probbits/encodings.hpp"

namespace probbits {

/// Bit-level circuits over ProbInts. Operands of unequal width are
/// zero-extended to the wider width; mixed-manager operands are an error.

NodeRef lt(const ProbInt& a, const ProbInt& b);
NodeRef le(const ProbInt& a, const ProbInt& b);
NodeRef gt(const ProbInt& a, const ProbInt& b);
NodeRef ge(const ProbInt& a, const ProbInt& b);
NodeRef eq(const ProbInt& a, const ProbInt& b);
NodeRef ne(const ProbInt& a, const ProbInt& b);

/// Ripple-carry sum, width max(w_a, w_b) + 1; never overflows.
ProbInt add(const ProbInt& a, const ProbInt& b);
/// Modular sum, width max(w_a, w_b); the carry-out is dropped.
ProbInt add_wrap(const ProbInt& a, const ProbInt& b);
/// Two's-complement wrapping difference modulo 2^max(w_a, w_b).
ProbInt sub_wrap(const ProbInt& a, const ProbInt& b);
/// Shift-and-add product, width w_a + w_b; exact.
ProbInt mul(const ProbInt& a, const ProbInt& b);

struct DivModResult {
    ProbInt quotient;
    ProbInt remainder;
};

/// Restoring division. On the zero-divisor event the result is defined as
/// quotient = 0, remainder = a, so a = q*b + r holds on every path. Both
/// results have width max(w_a, w_b).
DivModResult divmod(const ProbInt& a, const ProbInt& b);

/// Bitwise if-then-else over the zero-extended operands.
ProbInt mux_int(NodeRef cond, const ProbInt& then_val, const ProbInt& else_val);

}  // namespace probbits
