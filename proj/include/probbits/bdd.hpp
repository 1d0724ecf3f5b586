#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "probbits/errors.hpp"

namespace probbits {

class Manager;

/// Handle to a node of a reduced ordered BDD. Cheap to copy; only valid while
/// the owning Manager is alive. Equal handles denote the same Boolean function.
class NodeRef {
public:
    NodeRef() = default;

    bool is_false() const;
    bool is_true() const;
    bool is_terminal() const;
    Manager* manager() const { return mgr_; }

    friend bool operator==(const NodeRef&, const NodeRef&) = default;

private:
    friend class Manager;
    NodeRef(Manager* mgr, uint32_t id) : mgr_(mgr), id_(id) {}

    Manager* mgr_ = nullptr;
    uint32_t id_ = 0;
};

namespace detail {

/// Open-addressed (k0,k1,k2) -> uint32 map. Backs both the unique table and
/// the ternary operation cache; grows, never evicts.
class TripleMap {
public:
    TripleMap();

    static constexpr uint32_t kNotFound = 0xFFFFFFFFu;

    uint32_t lookup(uint32_t a, uint32_t b, uint32_t c) const;
    void insert(uint32_t a, uint32_t b, uint32_t c, uint32_t value);
    size_t size() const { return count_; }

private:
    struct Slot {
        uint32_t a, b, c;
        uint32_t value;  // kNotFound marks an empty slot
    };

    static uint64_t hash(uint32_t a, uint32_t b, uint32_t c);
    void grow();

    std::vector<Slot> slots_;
    size_t count_ = 0;
    size_t mask_ = 0;
};

}  // namespace detail

/// Reduced ordered BDD manager with weighted variables. Variables are ordered
/// by allocation (evaluation) order and never reordered. Structurally equal
/// nodes are hash-consed, so handle equality is function equality.
///
/// A Manager is single-owner: operations on one Manager must be externally
/// serialized. Distinct Managers are independent; handles never cross.
class Manager {
public:
    Manager();
    Manager(const Manager&) = delete;
    Manager& operator=(const Manager&) = delete;

    NodeRef false_node() const { return NodeRef(const_cast<Manager*>(this), kFalseId); }
    NodeRef true_node() const { return NodeRef(const_cast<Manager*>(this), kTrueId); }
    NodeRef constant(bool value) const { return value ? true_node() : false_node(); }

    /// Allocates a fresh weighted variable and returns its positive literal.
    /// Weights of exactly 0 or 1 constant-fold to a terminal and allocate
    /// nothing.
    NodeRef fresh_var(double weight);

    /// Canonical reduced BDD of (cond ? then_branch : else_branch).
    NodeRef ite(NodeRef cond, NodeRef then_branch, NodeRef else_branch);

    NodeRef land(NodeRef a, NodeRef b) { return ite(a, b, false_node()); }
    NodeRef lor(NodeRef a, NodeRef b) { return ite(a, true_node(), b); }
    NodeRef lnot(NodeRef a) { return ite(a, false_node(), true_node()); }
    NodeRef lxor(NodeRef a, NodeRef b) { return ite(a, lnot(b), b); }
    NodeRef lxnor(NodeRef a, NodeRef b) { return ite(a, b, lnot(b)); }
    NodeRef implies(NodeRef a, NodeRef b) { return ite(a, b, true_node()); }

    /// Weighted model count: sum over satisfying assignments of the product of
    /// literal weights (negative literal weight = 1 - positive). One memoized
    /// bottom-up pass, linear in the reachable node count.
    double wmc(NodeRef root) const;

    /// Number of distinct decision nodes reachable from the union of roots.
    size_t node_count(std::span<const NodeRef> roots) const;

    uint32_t var_count() const { return static_cast<uint32_t>(weights_.size()); }
    double weight(uint32_t var) const;
    size_t total_nodes() const { return nodes_.size() - 2; }  // allocated decision nodes

    /// Audit walk over all stored nodes: reduced (lo != hi), ordered, and no
    /// duplicate (var, lo, hi) triples. Intended for tests.
    bool check_invariants() const;

    /// Graphviz-style dump of the subgraph reachable from roots.
    void dump_dot(std::ostream& out, std::span<const NodeRef> roots) const;

private:
    struct Node {
        uint32_t var;
        uint32_t lo;
        uint32_t hi;
    };

    static constexpr uint32_t kFalseId = 0;
    static constexpr uint32_t kTrueId = 1;
    static constexpr uint32_t kTerminalVar = 0xFFFFFFFFu;

    void check_owned(NodeRef ref) const;
    uint32_t make_node(uint32_t var, uint32_t lo, uint32_t hi);
    uint32_t ite_rec(uint32_t f, uint32_t g, uint32_t h);

    uint32_t var_of(uint32_t id) const { return nodes_[id].var; }

    std::vector<Node> nodes_;
    std::vector<double> weights_;
    detail::TripleMap unique_;
    detail::TripleMap ite_cache_;
};

inline bool NodeRef::is_false() const { return mgr_ != nullptr && id_ == 0; }
inline bool NodeRef::is_true() const { return mgr_ != nullptr && id_ == 1; }
inline bool NodeRef::is_terminal() const { return mgr_ != nullptr && id_ <= 1; }

}  // namespace probbits
