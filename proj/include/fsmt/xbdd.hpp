#pragma once

// Ordered, reduced decision diagrams over literal slots (Booleans and atoms),
// circuit-output probability by a forward pass and its gradient by a backward
// pass, plus the count-based dynamic program for symmetric constraints.
//
// Edge convention: `hi` is taken when the slot literal is True, with
// probability p[slot]; `lo` otherwise.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsmt/errors.hpp"
#include "fsmt/model.hpp"

namespace fsmt {

inline constexpr std::uint32_t kFalseNode = 0;
inline constexpr std::uint32_t kTrueNode = 1;
inline constexpr std::uint32_t kTerminalSlot = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::size_t kDefaultNodeCap = 1'000'000;

struct XbddNode {
    std::uint32_t slot = kTerminalSlot;
    std::uint32_t lo = kFalseNode;
    std::uint32_t hi = kFalseNode;

    friend bool operator==(const XbddNode&, const XbddNode&) = default;
};

/// nodes[0] / nodes[1] are the FALSE / TRUE terminals. Decision nodes follow
/// in topological order (non-decreasing slot), so the root, if not a
/// terminal, is node 2. Slot ids equal levels: `slots[s]` is tested at level s.
struct Xbdd {
    std::vector<Slot> slots;
    std::vector<XbddNode> nodes;
    std::uint32_t root = kFalseNode;

    std::size_t decision_count() const { return nodes.size() - 2; }
    bool is_terminal(std::uint32_t v) const { return v < 2; }

    /// Follows the unique path for a slot valuation.
    bool evaluate(std::span<const bool> slot_true) const {
        std::uint32_t v = root;
        while (v >= 2) v = slot_true[nodes[v].slot] ? nodes[v].hi : nodes[v].lo;
        return v == kTrueNode;
    }

    friend bool operator==(const Xbdd&, const Xbdd&) = default;
};

namespace detail {

class BddBuilder {
public:
    BddBuilder(std::size_t n_levels, std::size_t cap) : n_levels_(n_levels), cap_(cap) {
        nodes_.push_back({kTerminalSlot, kFalseNode, kFalseNode});
        nodes_.push_back({kTerminalSlot, kTrueNode, kTrueNode});
    }

    std::uint32_t mk(std::uint32_t level, std::uint32_t lo, std::uint32_t hi) {
        if (lo == hi) return lo;
        const Key key{level, lo, hi};
        if (auto it = unique_.find(key); it != unique_.end()) return it->second;
        if (nodes_.size() - 2 >= cap_)
            throw NodeBudgetExceeded("decision diagram exceeds the node budget of " + std::to_string(cap_));
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({level, lo, hi});
        unique_.emplace(key, id);
        return id;
    }

    enum class Op : std::uint32_t { And, Or, Xor };

    std::uint32_t apply(Op op, std::uint32_t u, std::uint32_t v) {
        if (u > v) std::swap(u, v);  // all three are commutative
        switch (op) {
            case Op::And:
                if (u == kFalseNode) return kFalseNode;
                if (u == kTrueNode) return v;
                if (u == v) return u;
                break;
            case Op::Or:
                if (u == kTrueNode) return kTrueNode;
                if (u == kFalseNode) return v;
                if (u == v) return u;
                break;
            case Op::Xor:
                if (u == kFalseNode) return v;
                if (u == v) return kFalseNode;
                if (u == kTrueNode && v == kTrueNode) return kFalseNode;
                break;
        }
        const Key key{static_cast<std::uint32_t>(op), u, v};
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const std::uint32_t lu = level(u), lv = level(v);
        const std::uint32_t top = std::min(lu, lv);
        const std::uint32_t u0 = lu == top ? nodes_[u].lo : u, u1 = lu == top ? nodes_[u].hi : u;
        const std::uint32_t v0 = lv == top ? nodes_[v].lo : v, v1 = lv == top ? nodes_[v].hi : v;
        const std::uint32_t lo = apply(op, u0, v0);
        const std::uint32_t hi = apply(op, u1, v1);
        const std::uint32_t r = mk(top, lo, hi);
        cache_.emplace(key, r);
        return r;
    }

    std::uint32_t level(std::uint32_t v) const {
        return v < 2 ? static_cast<std::uint32_t>(n_levels_) : nodes_[v].slot;
    }

    /// Reachable nodes renumbered into topological order.
    Xbdd extract(std::vector<Slot> slots, std::uint32_t root) const {
        Xbdd d;
        d.slots = std::move(slots);
        d.nodes = {nodes_[0], nodes_[1]};
        if (root < 2) {
            d.root = root;
            return d;
        }
        std::vector<std::uint32_t> reach;
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<std::uint32_t> stack{root};
        seen[root] = 1;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            reach.push_back(v);
            for (auto c : {nodes_[v].lo, nodes_[v].hi})
                if (c >= 2 && !seen[c]) {
                    seen[c] = 1;
                    stack.push_back(c);
                }
        }
        std::sort(reach.begin(), reach.end(), [&](std::uint32_t l, std::uint32_t r) {
            return nodes_[l].slot != nodes_[r].slot ? nodes_[l].slot < nodes_[r].slot : l < r;
        });
        std::vector<std::uint32_t> remap(nodes_.size(), 0);
        remap[1] = 1;
        for (std::size_t i = 0; i < reach.size(); ++i) remap[reach[i]] = static_cast<std::uint32_t>(i + 2);
        for (auto v : reach) d.nodes.push_back({nodes_[v].slot, remap[nodes_[v].lo], remap[nodes_[v].hi]});
        d.root = 2;
        return d;
    }

private:
    struct Key {
        std::uint32_t a, b, c;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::uint64_t h = (std::uint64_t{k.a} * 0x9e3779b97f4a7c15ULL) ^ (std::uint64_t{k.b} << 32 | k.c);
            h ^= h >> 29;
            h *= 0xbf58476d1ce4e5b9ULL;
            return static_cast<std::size_t>(h ^ (h >> 32));
        }
    };

    std::size_t n_levels_;
    std::size_t cap_;
    std::vector<XbddNode> nodes_;
    std::unordered_map<Key, std::uint32_t, KeyHash> unique_;
    std::unordered_map<Key, std::uint32_t, KeyHash> cache_;
};

inline std::uint32_t build_expr(BddBuilder& b, const Expr& e, const std::vector<Slot>& slots) {
    using Op = BddBuilder::Op;
    switch (e.op) {
        case Expr::Op::Leaf: {
            const auto it = std::find_if(slots.begin(), slots.end(),
                                         [&](const Slot& s) { return s.lit.same_variable(e.lit); });
            const auto level = static_cast<std::uint32_t>(it - slots.begin());
            const bool flip = e.lit.negated != it->lit.negated;
            return flip ? b.mk(level, kTrueNode, kFalseNode) : b.mk(level, kFalseNode, kTrueNode);
        }
        case Expr::Op::Not: return b.apply(Op::Xor, kTrueNode, build_expr(b, e.args.front(), slots));
        default: break;
    }
    const Op op = e.op == Expr::Op::And ? Op::And : e.op == Expr::Op::Or ? Op::Or : Op::Xor;
    std::uint32_t acc = build_expr(b, e.args.front(), slots);
    for (std::size_t i = 1; i < e.args.size(); ++i) acc = b.apply(op, acc, build_expr(b, e.args[i], slots));
    return acc;
}

inline std::uint32_t build_symmetric(BddBuilder& b, const Symmetric& s, const std::vector<Slot>& slots) {
    const std::size_t total = s.literals.size();
    // layer[c]: node for "count so far is c" at the current level.
    std::vector<std::uint32_t> next(total + 1);
    for (std::size_t c = 0; c <= total; ++c)
        next[c] = symmetric_holds(s.kind, s.threshold, c, total) ? kTrueNode : kFalseNode;
    // counts beyond the prefix maximum are unreachable
    std::vector<std::size_t> max_prefix(slots.size() + 1, 0);
    for (std::size_t i = 0; i < slots.size(); ++i)
        max_prefix[i + 1] = max_prefix[i] + std::max(slots[i].on_true, slots[i].on_false);
    for (std::size_t i = slots.size(); i-- > 0;) {
        const std::size_t reach = std::min(total, max_prefix[i]);
        std::vector<std::uint32_t> cur(reach + 1);
        for (std::size_t c = 0; c <= reach; ++c)
            cur[c] = b.mk(static_cast<std::uint32_t>(i), next[c + slots[i].on_false], next[c + slots[i].on_true]);
        next = std::move(cur);
    }
    return next[0];
}

}  // namespace detail

/// Compiles a constraint. `order` lists default-order slot indices from the
/// top level down; empty means the default order.
inline Xbdd compile(const Constraint& c, std::span<const std::uint32_t> order = {},
                    std::size_t node_cap = kDefaultNodeCap) {
    auto base = constraint_slots(c);
    std::vector<Slot> slots;
    if (order.empty()) {
        slots = std::move(base);
    } else {
        if (order.size() != base.size()) throw InvalidArgument("slot order has the wrong length");
        std::vector<char> used(base.size(), 0);
        for (auto i : order) {
            if (i >= base.size() || used[i]) throw InvalidArgument("slot order is not a permutation");
            used[i] = 1;
            slots.push_back(base[i]);
        }
    }
    detail::BddBuilder b(slots.size(), node_cap);
    const std::uint32_t root =
        c.is_symmetric() ? detail::build_symmetric(b, c.symmetric(), slots) : detail::build_expr(b, c.expr(), slots);
    return b.extract(std::move(slots), root);
}

struct Messages {
    std::vector<double> m_td;
    std::vector<double> m_bu;
    std::vector<double> p;  // probabilities the messages were computed with
};

struct ForwardResult {
    Messages messages;
    double sat_prob = 0.0;
};

/// Top-down pass: m_td[v] is the probability that the random path visits v.
inline ForwardResult forward(const Xbdd& d, std::span<const double> p) {
    if (p.size() != d.slots.size()) throw InvalidArgument("probability vector does not match diagram slots");
    ForwardResult r;
    auto& td = r.messages.m_td;
    td.assign(d.nodes.size(), 0.0);
    td[d.root] = 1.0;
    for (std::size_t v = 2; v < d.nodes.size(); ++v) {
        const auto& n = d.nodes[v];
        const double m = td[v];
        const double pv = p[n.slot];
        td[n.hi] += pv * m;
        td[n.lo] += (1.0 - pv) * m;
    }
    r.messages.p.assign(p.begin(), p.end());
    r.sat_prob = td[kTrueNode];
    return r;
}

/// Bottom-up pass: returns d sat_prob / d p[slot]; fills msgs.m_bu.
inline std::vector<double> backward(const Xbdd& d, Messages& msgs, std::span<const double> p) {
    if (msgs.m_td.size() != d.nodes.size() || !std::equal(p.begin(), p.end(), msgs.p.begin(), msgs.p.end()))
        throw InvalidArgument("stale messages: forward was not run with these probabilities");
    auto& bu = msgs.m_bu;
    bu.assign(d.nodes.size(), 0.0);
    bu[kTrueNode] = 1.0;
    std::vector<double> grad(d.slots.size(), 0.0);
    for (std::size_t v = d.nodes.size(); v-- > 2;) {
        const auto& n = d.nodes[v];
        const double pv = p[n.slot];
        bu[v] = pv * bu[n.hi] + (1.0 - pv) * bu[n.lo];
        grad[n.slot] += msgs.m_td[v] * (bu[n.hi] - bu[n.lo]);
    }
    return grad;
}

struct CopResult {
    double sat_prob = 0.0;
    std::vector<double> grad;  // d sat_prob / d p[slot]
};

/// Count-distribution DP. Slot i adds on_true[i] to the count when its
/// literal is True and on_false[i] otherwise; `total` is the literal count.
inline CopResult symmetric_cop(SymKind kind, std::uint32_t threshold, std::size_t total, std::span<const Slot> slots,
                               std::span<const double> p) {
    if (p.size() != slots.size()) throw InvalidArgument("probability vector does not match slots");
    const std::size_t L = slots.size();
    const std::size_t width = total + 1;
    // value[i*width + c]: P[satisfied | count after the first i slots is c]
    std::vector<double> value((L + 1) * width, 0.0);
    for (std::size_t c = 0; c <= total; ++c)
        value[L * width + c] = symmetric_holds(kind, threshold, c, total) ? 1.0 : 0.0;
    std::vector<std::size_t> max_prefix(L + 1, 0);
    for (std::size_t i = 0; i < L; ++i)
        max_prefix[i + 1] = max_prefix[i] + std::max(slots[i].on_true, slots[i].on_false);
    for (std::size_t i = L; i-- > 0;) {
        const double* nxt = &value[(i + 1) * width];
        double* cur = &value[i * width];
        const std::size_t reach = std::min(total, max_prefix[i]);
        for (std::size_t c = 0; c <= reach; ++c)
            cur[c] = p[i] * nxt[c + slots[i].on_true] + (1.0 - p[i]) * nxt[c + slots[i].on_false];
    }
    CopResult r;
    r.sat_prob = value[0];
    r.grad.assign(L, 0.0);
    std::vector<double> prefix(width, 0.0), nprefix(width, 0.0);
    prefix[0] = 1.0;
    for (std::size_t i = 0; i < L; ++i) {
        const double* nxt = &value[(i + 1) * width];
        const std::size_t reach = std::min(total, max_prefix[i]);
        double g = 0.0;
        std::fill(nprefix.begin(), nprefix.end(), 0.0);
        for (std::size_t c = 0; c <= reach; ++c) {
            const double pc = prefix[c];
            if (pc == 0.0) continue;
            g += pc * (nxt[c + slots[i].on_true] - nxt[c + slots[i].on_false]);
            nprefix[c + slots[i].on_true] += p[i] * pc;
            nprefix[c + slots[i].on_false] += (1.0 - p[i]) * pc;
        }
        r.grad[i] = g;
        std::swap(prefix, nprefix);
    }
    return r;
}

inline CopResult symmetric_cop(const Symmetric& s, std::span<const Slot> slots, std::span<const double> p) {
    return symmetric_cop(s.kind, s.threshold, s.literals.size(), slots, p);
}

/// Graphviz rendering; dashed edges are `lo`.
inline std::string to_dot(const Xbdd& d, const std::string& name = "xbdd") {
    std::ostringstream os;
    os << "digraph " << name << " {\n  n0 [shape=box,label=\"F\"];\n  n1 [shape=box,label=\"T\"];\n";
    for (std::size_t v = 2; v < d.nodes.size(); ++v) {
        const auto& n = d.nodes[v];
        const auto& l = d.slots[n.slot].lit;
        os << "  n" << v << " [label=\"" << (l.negated ? "~" : "") << (l.kind == VarKind::Bool ? 'b' : 'a') << l.index
           << "\"];\n";
        os << "  n" << v << " -> n" << n.hi << ";\n";
        os << "  n" << v << " -> n" << n.lo << " [style=dashed];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace fsmt
