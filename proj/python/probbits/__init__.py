"""Exact inference for binary-encoded integer distributions over BDDs.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from probbits._core import (  # noqa: F401
    Evidence,
    Manager,
    Node,
    ProbbitsError,
    ProbInt,
    add,
    add_wrap,
    bitwise_int,
    categ_int,
    const_int,
    eq,
    expectation,
    ge,
    gt,
    int_div,
    int_mod,
    le,
    lt,
    luhn_source,
    marginal,
    mul,
    mux_int,
    ne,
    oracle_enumerate,
    parse_check,
    probability,
    run_program,
    sub_wrap,
    uniform_int,
)

__version__ = "0.1.0"
