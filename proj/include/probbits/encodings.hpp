#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "probbits/bdd.hpp"

namespace probbits {

/// Fixed-width unsigned random integer: an ordered tuple of BDD roots, one per
/// binary digit, least-significant bit first.
class ProbInt {
public:
    ProbInt() = default;
    explicit ProbInt(std::vector<NodeRef> bits);

    uint32_t width() const { return static_cast<uint32_t>(bits_.size()); }
    NodeRef bit(uint32_t i) const { return bits_.at(i); }
    std::span<const NodeRef> bits() const { return bits_; }
    Manager* manager() const { return bits_.empty() ? nullptr : bits_[0].manager(); }

    /// Widening by zero-extension; lossless. Narrower target width is an error.
    ProbInt zero_extended(uint32_t width) const;
    /// Keeps the given number of low bits. Callers are responsible for the
    /// dropped bits being semantically zero.
    ProbInt truncated(uint32_t width) const;

private:
    std::vector<NodeRef> bits_;
};

/// Minimal bit count covering values {0 .. n-1}; at least 1.
uint32_t width_for_count(uint64_t n);

/// Sequential if-else chain encoding of a categorical distribution
/// (conditional flip v[i]/sum(v[i:]) at step i, final branch flip-free).
ProbInt categ_int(Manager& m, std::span<const double> v);

/// Divide-and-conquer per-bit encoding; same distribution as categ_int with a
/// provably smaller BDD. Zero-mass halves fold and allocate no flips.
ProbInt bitwise_int(Manager& m, std::span<const double> v);

/// Uniform distribution over {0 .. n-1}: independent half-probability bits for
/// power-of-two ranges, a power-of-two mixture otherwise.
ProbInt uniform_int(Manager& m, uint64_t n);

/// Point mass at value, all bits terminal.
ProbInt const_int(Manager& m, uint64_t value, uint32_t width);

}  // namespace probbits
