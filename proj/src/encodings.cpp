#include "probbits/encodings.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace probbits {

ProbInt::ProbInt(std::vector<NodeRef> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) {
        throw Error(ErrorKind::InvalidRange, "ProbInt width must be at least 1");
    }
    Manager* m = bits_[0].manager();
    for (const NodeRef& b : bits_) {
        if (b.manager() != m || m == nullptr) {
            throw Error(ErrorKind::ManagerMismatch,
                        "ProbInt bits must belong to one manager");
        }
    }
}

ProbInt ProbInt::zero_extended(uint32_t width) const {
    if (width < this->width()) {
        throw Error(ErrorKind::Overflow, "zero extension cannot narrow");
    }
    std::vector<NodeRef> bits(bits_.begin(), bits_.end());
    bits.resize(width, manager()->false_node());
    return ProbInt(std::move(bits));
}

ProbInt ProbInt::truncated(uint32_t width) const {
    if (width == 0 || width > this->width()) {
        throw Error(ErrorKind::InvalidRange, "bad truncation width");
    }
    return ProbInt(std::vector<NodeRef>(bits_.begin(), bits_.begin() + width));
}

uint32_t width_for_count(uint64_t n) {
    uint32_t w = 1;
    while (w < 64 && (uint64_t{1} << w) < n) ++w;
    return w;
}

namespace {

void validate_vector(std::span<const double> v) {
    if (v.empty()) {
        throw Error(ErrorKind::InvalidVector, "empty probability vector");
    }
    bool any_positive = false;
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0) {
            throw Error(ErrorKind::InvalidVector,
                        "probability vector entries must be finite and >= 0");
        }
        any_positive |= x > 0.0;
    }
    if (!any_positive) {
        throw Error(ErrorKind::InvalidVector, "probability vector sums to zero");
    }
}

bool bit_of(uint64_t value, uint32_t i) { return (value >> i) & 1; }

}  // namespace

ProbInt categ_int(Manager& m, std::span<const double> v) {
    validate_vector(v);
    uint32_t width = width_for_count(v.size());

    std::vector<double> suffix(v.size() + 1, 0.0);
    for (size_t i = v.size(); i-- > 0;) suffix[i] = v[i] + suffix[i + 1];

    // Guards in evaluation order. The chain ends at the first branch whose
    // remaining tail carries no mass (the final branch is flip-free).
    std::vector<NodeRef> guards;
    size_t last = v.size() - 1;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i == v.size() - 1 || suffix[i + 1] <= 0.0) {
            last = i;
            break;
        }
        NodeRef g = m.fresh_var(v[i] / suffix[i]);
        if (g.is_true()) {
            last = i;
            break;
        }
        guards.push_back(g);
    }

    std::vector<NodeRef> bits;
    bits.reserve(width);
    for (uint32_t j = 0; j < width; ++j) {
        NodeRef acc = m.constant(bit_of(last, j));
        for (size_t i = guards.size(); i-- > 0;) {
            acc = m.ite(guards[i], m.constant(bit_of(i, j)), acc);
        }
        bits.push_back(acc);
    }
    return ProbInt(std::move(bits));
}

namespace {

// Recursive half of bitwise_int over the zero-padded slice [base, base + 2^k).
// Only called for slices with positive mass; zero-mass halves are never
// entered (their guard flip is constant).
std::vector<NodeRef> bitwise_build(Manager& m, std::span<const double> v,
                                   uint64_t base, uint32_t k) {
    if (k == 0) return {};
    auto slice_sum = [&](uint64_t from, uint64_t count) {
        double s = 0.0;
        for (uint64_t i = from; i < from + count && i < v.size(); ++i) s += v[i];
        return s;
    };
    uint64_t half = uint64_t{1} << (k - 1);
    double low = slice_sum(base, half);
    double high = slice_sum(base + half, half);
    NodeRef g = m.fresh_var(high / (low + high));

    std::vector<NodeRef> bits(k);
    bits[k - 1] = g;
    if (g.is_true()) {
        std::vector<NodeRef> hi_bits = bitwise_build(m, v, base + half, k - 1);
        for (uint32_t j = 0; j + 1 < k; ++j) bits[j] = hi_bits[j];
    } else if (g.is_false()) {
        std::vector<NodeRef> lo_bits = bitwise_build(m, v, base, k - 1);
        for (uint32_t j = 0; j + 1 < k; ++j) bits[j] = lo_bits[j];
    } else {
        // high-branch subtree is built (and its flips allocated) first
        std::vector<NodeRef> hi_bits = bitwise_build(m, v, base + half, k - 1);
        std::vector<NodeRef> lo_bits = bitwise_build(m, v, base, k - 1);
        for (uint32_t j = 0; j + 1 < k; ++j) bits[j] = m.ite(g, hi_bits[j], lo_bits[j]);
    }
    return bits;
}

}  // namespace

ProbInt bitwise_int(Manager& m, std::span<const double> v) {
    validate_vector(v);
    uint32_t width = width_for_count(v.size());
    if (v.size() == 1) return const_int(m, 0, 1);
    return ProbInt(bitwise_build(m, v, 0, width));
}

namespace {

// Bits of UNIFORM(n); empty for n == 1 (the caller pads to width >= 1).
std::vector<NodeRef> uniform_bits(Manager& m, uint64_t n) {
    if (n == 1) return {};
    uint32_t b = 63 - static_cast<uint32_t>(std::countl_zero(n));
    uint64_t pow = uint64_t{1} << b;
    if (n == pow) {
        std::vector<NodeRef> bits;
        bits.reserve(b);
        for (uint32_t i = 0; i < b; ++i) bits.push_back(m.fresh_var(0.5));
        return bits;
    }
    // guard chooses the power-of-two block {0 .. 2^b - 1}
    NodeRef g = m.fresh_var(static_cast<double>(pow) / static_cast<double>(n));
    std::vector<NodeRef> pow_bits;
    pow_bits.reserve(b);
    for (uint32_t i = 0; i < b; ++i) pow_bits.push_back(m.fresh_var(0.5));
    std::vector<NodeRef> rest = uniform_bits(m, n - pow);

    std::vector<NodeRef> bits(b + 1);
    bits[b] = m.lnot(g);
    for (uint32_t j = 0; j < b; ++j) {
        NodeRef low = j < rest.size() ? rest[j] : m.false_node();
        bits[j] = m.ite(g, pow_bits[j], low);
    }
    return bits;
}

}  // namespace

ProbInt uniform_int(Manager& m, uint64_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidRange, "uniform range must be positive");
    std::vector<NodeRef> bits = uniform_bits(m, n);
    if (bits.empty()) bits.push_back(m.false_node());
    return ProbInt(std::move(bits));
}

ProbInt const_int(Manager& m, uint64_t value, uint32_t width) {
    if (width == 0 || width > 63) {
        throw Error(ErrorKind::InvalidRange, "const width must be in 1..63");
    }
    if (value >> width) {
        throw Error(ErrorKind::Overflow, "constant does not fit the given width");
    }
    std::vector<NodeRef> bits;
    bits.reserve(width);
    for (uint32_t i = 0; i < width; ++i) bits.push_back(m.constant(bit_of(value, i)));
    return ProbInt(std::move(bits));
}

}  // namespace probbits
