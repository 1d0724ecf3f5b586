#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace probbits::bench {

/// Fig.-5-style single-operation scaling sweeps and the Luhn sweep. Every cell
/// runs on its own thread with its own Manager; a cell that exceeds the
/// timeout is recorded as such (and the remaining larger cells are skipped),
/// never a crash.

struct SweepRow {
    uint32_t bits = 0;
    double wall_ms = 0.0;  // median over reps
    size_t node_count = 0;
    double value = 0.0;  // computed probability / expectation (sanity output)
    bool timed_out = false;
};

enum class SweepOp { Lt, Eq, PlusExpectation };

std::vector<SweepRow> sweep_op(SweepOp op, uint32_t max_bits, int reps,
                               double timeout_sec, uint64_t seed);

struct EncodingRow {
    uint32_t bits = 0;
    size_t categ_nodes = 0;
    size_t bitwise_nodes = 0;
    double categ_ms = 0.0;
    double bitwise_ms = 0.0;
};

/// Decision-node counts of one 2^b-value random distribution under each
/// encoding (the Theta(b 2^b) vs Theta(2^b) separation).
std::vector<EncodingRow> sweep_categ_vs_bitwise(const std::vector<uint32_t>& bits,
                                                uint64_t seed);

struct LuhnRow {
    uint32_t digits = 0;
    double wall_ms = 0.0;
    size_t node_count = 0;
    double max_abs_dev = 0.0;  // engine vs oracle on the digit marginals
    bool oracle_checked = false;
    bool timed_out = false;
};

std::vector<LuhnRow> sweep_luhn(uint32_t max_digits, int reps, double timeout_sec,
                                uint32_t oracle_max_digits = 4);

/// Source of the student-ID checksum program with the given total digit count
/// (check digit first). Used by the luhn sweep and tests.
std::string luhn_source(uint32_t total_digits);

}  // namespace probbits::bench
