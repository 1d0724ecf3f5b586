#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "probbits/arith.hpp"
#include "probbits/ast.hpp"
#include "probbits/inference.hpp"
#include "probbits/parser.hpp"

namespace probbits::lang {

enum class Encoding { Bitwise, Categ };

inline const char* encoding_name(Encoding e) {
    return e == Encoding::Bitwise ? "bitwise" : "categ";
}

/// One compiled return expression.
struct Output {
    enum class Kind { Probability, Distribution, BetaPosterior };
    Kind kind;
    std::string label;
    NodeRef formula;         // Probability
    ProbInt value;           // Distribution; pseudocount alpha for BetaPosterior
    int64_t beta_total = 0;  // BetaPosterior: deterministic alpha+beta
};

struct CompiledProgram {
    std::vector<Output> outputs;
    NodeRef evidence;
};

/// Unrolls loops, evaluates statements in textual order (flips allocated
/// left-to-right), lowers `discrete` through the selected encoding, and
/// accumulates observations as one conjunction.
CompiledProgram compile(Manager& m, const Program& prog, Encoding encoding);

struct QueryResult {
    Output::Kind kind;
    std::string label;
    double probability = 0.0;   // Probability
    Distribution distribution;  // Distribution / BetaPosterior (over alpha)
    double expectation = 0.0;   // Distribution / BetaPosterior
    int64_t beta_total = 0;     // BetaPosterior
};

struct RunResult {
    std::vector<QueryResult> queries;
    double evidence_probability = 1.0;
    size_t decision_nodes = 0;
    uint32_t flip_count = 0;
};

struct RunOptions {
    std::ostream* dot = nullptr;  // when set, receives a DOT dump of the DAG
};

/// parse + compile + query in one call.
RunResult run_program(std::string_view source, Encoding encoding);
RunResult run_parsed(const Program& prog, Encoding encoding,
                     const RunOptions& options = {});

}  // namespace probbits::lang
