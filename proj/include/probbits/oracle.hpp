#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "probbits/ast.hpp"

namespace probbits::oracle {

/// Brute-force path enumeration over the same language. Interprets `discrete`
/// and `uniform` natively (no binary encoding) and shares no inference code
/// with the compiled engine; used as ground truth.

struct OracleQuery {
    enum class Kind { Probability, Distribution, BetaPosterior };
    Kind kind;
    std::string label;
    double probability = 0.0;                 // Probability
    std::map<uint64_t, double> distribution;  // Distribution / BetaPosterior
    int64_t beta_total = 0;                   // BetaPosterior
};

struct OracleResult {
    std::vector<OracleQuery> queries;
    double evidence_probability = 1.0;
    double rejected_mass = 0.0;  // accepted + rejected sums to 1
};

constexpr uint64_t kDefaultPathCap = uint64_t{1} << 24;

OracleResult enumerate(const lang::Program& prog, uint64_t max_paths = kDefaultPathCap);

}  // namespace probbits::oracle
