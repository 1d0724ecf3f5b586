#include "probbits/bdd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace probbits {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidWeight: return "invalid-weight";
        case ErrorKind::InvalidVector: return "invalid-vector";
        case ErrorKind::InvalidRange: return "invalid-range";
        case ErrorKind::Overflow: return "overflow";
        case ErrorKind::ManagerMismatch: return "manager-mismatch";
        case ErrorKind::SyntaxError: return "syntax";
        case ErrorKind::CompileError: return "compile";
        case ErrorKind::UnsatisfiableEvidence: return "unsatisfiable-evidence";
        case ErrorKind::EnumerationTooLarge: return "enumeration-too-large";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

namespace detail {

TripleMap::TripleMap() {
    slots_.assign(1u << 14, Slot{0, 0, 0, kNotFound});
    mask_ = slots_.size() - 1;
}

uint64_t TripleMap::hash(uint32_t a, uint32_t b, uint32_t c) {
    uint64_t x = (static_cast<uint64_t>(a) << 32) | b;
    x ^= static_cast<uint64_t>(c) * 0x9E3779B97F4A7C15ull;
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDull;
    x ^= x >> 33;
    x *= 0xC4CEB9FE1A85EC53ull;
    x ^= x >> 33;
    return x;
}

uint32_t TripleMap::lookup(uint32_t a, uint32_t b, uint32_t c) const {
    size_t i = hash(a, b, c) & mask_;
    while (true) {
        const Slot& s = slots_[i];
        if (s.value == kNotFound) return kNotFound;
        if (s.a == a && s.b == b && s.c == c) return s.value;
        i = (i + 1) & mask_;
    }
}

void TripleMap::insert(uint32_t a, uint32_t b, uint32_t c, uint32_t value) {
    assert(value != kNotFound);
    if ((count_ + 1) * 10 > slots_.size() * 7) grow();
    size_t i = hash(a, b, c) & mask_;
    while (true) {
        Slot& s = slots_[i];
        if (s.value == kNotFound) {
            s = Slot{a, b, c, value};
            ++count_;
            return;
        }
        if (s.a == a && s.b == b && s.c == c) {
            s.value = value;
            return;
        }
        i = (i + 1) & mask_;
    }
}

void TripleMap::grow() {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(old.size() * 2, Slot{0, 0, 0, kNotFound});
    mask_ = slots_.size() - 1;
    for (const Slot& s : old) {
        if (s.value == kNotFound) continue;
        size_t i = hash(s.a, s.b, s.c) & mask_;
        while (slots_[i].value != kNotFound) i = (i + 1) & mask_;
        slots_[i] = s;
    }
}

}  // namespace detail

Manager::Manager() {
    nodes_.push_back(Node{kTerminalVar, kFalseId, kFalseId});  // FALSE
    nodes_.push_back(Node{kTerminalVar, kTrueId, kTrueId});    // TRUE
}

void Manager::check_owned(NodeRef ref) const {
    if (ref.mgr_ != this) {
        throw Error(ErrorKind::ManagerMismatch,
                    "node does not belong to this manager");
    }
}

double Manager::weight(uint32_t var) const {
    if (var >= weights_.size()) {
        throw Error(ErrorKind::InvalidRange, "no such variable");
    }
    return weights_[var];
}

NodeRef Manager::fresh_var(double w) {
    if (!(w >= 0.0 && w <= 1.0)) {  // also rejects NaN
        throw Error(ErrorKind::InvalidWeight,
                    "flip weight must be a finite probability in [0,1]");
    }
    if (w == 0.0) return false_node();
    if (w == 1.0) return true_node();
    uint32_t var = static_cast<uint32_t>(weights_.size());
    weights_.push_back(w);
    return NodeRef(this, make_node(var, kFalseId, kTrueId));
}

uint32_t Manager::make_node(uint32_t var, uint32_t lo, uint32_t hi) {
    if (lo == hi) return lo;
    uint32_t found = unique_.lookup(var, lo, hi);
    if (found != detail::TripleMap::kNotFound) return found;
    uint32_t id = static_cast<uint32_t>(nodes_.size());
    nodes_.push_back(Node{var, lo, hi});
    unique_.insert(var, lo, hi, id);
    return id;
}

NodeRef Manager::ite(NodeRef cond, NodeRef then_branch, NodeRef else_branch) {
    check_owned(cond);
    check_owned(then_branch);
    check_owned(else_branch);
    return NodeRef(this, ite_rec(cond.id_, then_branch.id_, else_branch.id_));
}

uint32_t Manager::ite_rec(uint32_t f, uint32_t g, uint32_t h) {
    if (f == kTrueId) return g;
    if (f == kFalseId) return h;
    if (g == h) return g;
    if (f == g) g = kTrueId;
    if (f == h) h = kFalseId;
    if (g == kTrueId && h == kFalseId) return f;

    uint32_t cached = ite_cache_.lookup(f, g, h);
    if (cached != detail::TripleMap::kNotFound) return cached;

    uint32_t level = std::min({var_of(f), var_of(g), var_of(h)});
    auto cof = [&](uint32_t id, bool high) {
        const Node& n = nodes_[id];
        if (n.var != level) return id;
        return high ? n.hi : n.lo;
    };
    uint32_t t = ite_rec(cof(f, true), cof(g, true), cof(h, true));
    uint32_t e = ite_rec(cof(f, false), cof(g, false), cof(h, false));
    uint32_t r = (t == e) ? t : make_node(level, e, t);
    ite_cache_.insert(f, g, h, r);
    return r;
}

double Manager::wmc(NodeRef root) const {
    check_owned(root);
    if (root.id_ == kFalseId) return 0.0;
    if (root.id_ == kTrueId) return 1.0;

    std::unordered_map<uint32_t, double> memo;
    auto value_of = [&](uint32_t id, double* out) {
        if (id == kFalseId) { *out = 0.0; return true; }
        if (id == kTrueId) { *out = 1.0; return true; }
        auto it = memo.find(id);
        if (it == memo.end()) return false;
        *out = it->second;
        return true;
    };

    std::vector<uint32_t> stack = {root.id_};
    while (!stack.empty()) {
        uint32_t id = stack.back();
        if (memo.count(id)) {
            stack.pop_back();
            continue;
        }
        const Node& n = nodes_[id];
        double lo_val, hi_val;
        bool lo_ok = value_of(n.lo, &lo_val);
        bool hi_ok = value_of(n.hi, &hi_val);
        if (lo_ok && hi_ok) {
            double w = weights_[n.var];
            memo[id] = (1.0 - w) * lo_val + w * hi_val;
            stack.pop_back();
        } else {
            if (!lo_ok) stack.push_back(n.lo);
            if (!hi_ok) stack.push_back(n.hi);
        }
    }
    return memo[root.id_];
}

size_t Manager::node_count(std::span<const NodeRef> roots) const {
    std::unordered_set<uint32_t> seen;
    std::vector<uint32_t> stack;
    for (NodeRef r : roots) {
        check_owned(r);
        if (r.id_ > kTrueId && seen.insert(r.id_).second) stack.push_back(r.id_);
    }
    while (!stack.empty()) {
        uint32_t id = stack.back();
        stack.pop_back();
        const Node& n = nodes_[id];
        if (n.lo > kTrueId && seen.insert(n.lo).second) stack.push_back(n.lo);
        if (n.hi > kTrueId && seen.insert(n.hi).second) stack.push_back(n.hi);
    }
    return seen.size();
}

bool Manager::check_invariants() const {
    for (uint32_t id = 2; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        if (n.lo == n.hi) return false;
        if (n.var >= weights_.size()) return false;
        if (n.var >= var_of(n.lo) || n.var >= var_of(n.hi)) return false;
        // lookup resolving to this id rules out duplicate keys in the table
        if (unique_.lookup(n.var, n.lo, n.hi) != id) return false;
    }
    return true;
}

void Manager::dump_dot(std::ostream& out, std::span<const NodeRef> roots) const {
    std::unordered_set<uint32_t> seen;
    std::vector<uint32_t> stack;
    out << "digraph bdd {\n";
    out << "  n0 [shape=box,label=\"F\"];\n  n1 [shape=box,label=\"T\"];\n";
    for (size_t i = 0; i < roots.size(); ++i) {
        check_owned(roots[i]);
        out << "  r" << i << " [shape=plaintext,label=\"root " << i << "\"];\n";
        out << "  r" << i << " -> n" << roots[i].id_ << ";\n";
        if (roots[i].id_ > kTrueId && seen.insert(roots[i].id_).second) {
            stack.push_back(roots[i].id_);
        }
    }
    while (!stack.empty()) {
        uint32_t id = stack.back();
        stack.pop_back();
        const Node& n = nodes_[id];
        out << "  n" << id << " [label=\"x" << n.var << " (" << weights_[n.var]
            << ")\"];\n";
        out << "  n" << id << " -> n" << n.lo << " [style=dotted];\n";
        out << "  n" << id << " -> n" << n.hi << ";\n";
        if (n.lo > kTrueId && seen.insert(n.lo).second) stack.push_back(n.lo);
        if (n.hi > kTrueId && seen.insert(n.hi).second) stack.push_back(n.hi);
    }
    out << "}\n";
}

}  // namespace probbits
