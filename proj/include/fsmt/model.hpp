#pragma once

// Problem-instance data model for mixed Boolean / linear-real constraints.
//
// Truth convention: a Boolean value is carried as an int in {-1, +1} where -1
// means True and +1 means False. The constant lives in `kTrueValue`; every
// conversion in the library goes through `to_value` / `is_true`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fsmt/errors.hpp"

namespace fsmt {

inline constexpr int kTrueValue = -1;
inline constexpr int kFalseValue = -kTrueValue;

constexpr int to_value(bool truth) noexcept { return truth ? kTrueValue : kFalseValue; }
constexpr bool is_true(int value) noexcept { return value == kTrueValue; }

// ---------------------------------------------------------------------------
// Atoms

enum class Relation { Le, Lt, Ge, Gt };

/// Linear inequality `coeffs . y <= rhs` (or `<` when strict). Stored only in
/// canonical form; `>`/`>=` inputs are negated on construction.
struct Atom {
    std::uint32_t id = 0;
    std::vector<std::pair<std::uint32_t, double>> coeffs;  // sorted by variable, no zeros
    double rhs = 0.0;
    bool strict = false;

    double dot(std::span<const double> y) const {
        double s = 0.0;
        for (const auto& [j, q] : coeffs) s += q * y[j];
        return s;
    }
    double norm() const {
        double s = 0.0;
        for (const auto& [j, q] : coeffs) s += q * q;
        return std::sqrt(s);
    }
    Relation relation() const { return strict ? Relation::Lt : Relation::Le; }

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Builds a canonical atom. Duplicate variable indices are summed, zero
/// coefficients dropped. Throws if nothing remains.
inline Atom make_atom(std::uint32_t id, std::vector<std::pair<std::uint32_t, double>> coeffs, Relation rel,
                      double rhs) {
    std::sort(coeffs.begin(), coeffs.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    Atom atom;
    atom.id = id;
    for (const auto& [j, q] : coeffs) {
        if (!std::isfinite(q)) throw InvalidArgument("atom " + std::to_string(id) + ": non-finite coefficient");
        if (!atom.coeffs.empty() && atom.coeffs.back().first == j)
            atom.coeffs.back().second += q;
        else
            atom.coeffs.emplace_back(j, q);
    }
    std::erase_if(atom.coeffs, [](const auto& c) { return c.second == 0.0; });
    if (atom.coeffs.empty()) throw InvalidArgument("atom " + std::to_string(id) + ": no non-zero coefficient");
    if (!std::isfinite(rhs)) throw InvalidArgument("atom " + std::to_string(id) + ": non-finite right-hand side");
    const bool flip = rel == Relation::Ge || rel == Relation::Gt;
    atom.strict = rel == Relation::Lt || rel == Relation::Gt;
    atom.rhs = flip ? -rhs : rhs;
    if (flip)
        for (auto& c : atom.coeffs) c.second = -c.second;
    return atom;
}

/// Re-canonicalizes an atom (identity on canonical input).
inline Atom canonicalize(const Atom& atom) { return make_atom(atom.id, atom.coeffs, atom.relation(), atom.rhs); }

/// Exact indicator: kTrueValue iff the inequality holds in floating point.
inline int eval_atom(const Atom& atom, std::span<const double> y) {
    const double lhs = atom.dot(y);
    return to_value(atom.strict ? lhs < atom.rhs : lhs <= atom.rhs);
}

// ---------------------------------------------------------------------------
// Literals, expressions, constraints

enum class VarKind : std::uint8_t { Bool, Atom };

struct Literal {
    VarKind kind = VarKind::Bool;
    std::uint32_t index = 0;
    bool negated = false;

    static Literal boolean(std::uint32_t i, bool neg = false) { return {VarKind::Bool, i, neg}; }
    static Literal atom(std::uint32_t i, bool neg = false) { return {VarKind::Atom, i, neg}; }
    Literal operator~() const { return {kind, index, !negated}; }
    bool same_variable(const Literal& o) const { return kind == o.kind && index == o.index; }

    friend bool operator==(const Literal&, const Literal&) = default;
};

/// Boolean expression tree over literals.
struct Expr {
    enum class Op : std::uint8_t { Leaf, Not, And, Or, Xor };

    Op op = Op::Leaf;
    Literal lit{};           // Leaf only
    std::vector<Expr> args;  // everything else

    static Expr leaf(Literal l) { return Expr{Op::Leaf, l, {}}; }
    /// Folds into leaves and cancels double negation, so equal text means equal trees.
    static Expr negate(Expr e) {
        if (e.op == Op::Leaf) return leaf(~e.lit);
        if (e.op == Op::Not) return std::move(e.args.front());
        return Expr{Op::Not, {}, {std::move(e)}};
    }
    static Expr nary(Op op, std::vector<Expr> args) { return Expr{op, {}, std::move(args)}; }

    friend bool operator==(const Expr&, const Expr&) = default;
};

enum class SymKind : std::uint8_t { Or, Card, Nae, Xor };

/// Constraint whose truth depends only on how many literals are true.
struct Symmetric {
    SymKind kind = SymKind::Or;
    std::uint32_t threshold = 0;  // CARD only: satisfied iff #true <= threshold
    std::vector<Literal> literals;

    friend bool operator==(const Symmetric&, const Symmetric&) = default;
};

/// Satisfaction of a symmetric body given the number of true literals.
constexpr bool symmetric_holds(SymKind kind, std::uint32_t threshold, std::size_t count, std::size_t total) {
    switch (kind) {
        case SymKind::Or: return count >= 1;
        case SymKind::Card: return count <= threshold;
        case SymKind::Nae: return count > 0 && count < total;
        case SymKind::Xor: return count % 2 == 1;
    }
    return false;
}

struct Constraint {
    std::variant<Symmetric, Expr> body;
    double weight = 1.0;

    bool is_symmetric() const { return std::holds_alternative<Symmetric>(body); }
    const Symmetric& symmetric() const { return std::get<Symmetric>(body); }
    const Expr& expr() const { return std::get<Expr>(body); }

    /// Atom id when the constraint is exactly one positive atom literal.
    std::optional<std::uint32_t> unit_atom() const {
        if (const auto* s = std::get_if<Symmetric>(&body)) {
            if (s->literals.size() == 1 && (s->kind == SymKind::Or || s->kind == SymKind::Xor)) {
                const Literal& l = s->literals.front();
                if (l.kind == VarKind::Atom && !l.negated) return l.index;
            }
            return std::nullopt;
        }
        const Expr* e = &std::get<Expr>(body);
        while (e->op != Expr::Op::Leaf && e->op != Expr::Op::Not && e->args.size() == 1) e = &e->args.front();
        if (e->op == Expr::Op::Leaf && e->lit.kind == VarKind::Atom && !e->lit.negated) return e->lit.index;
        return std::nullopt;
    }

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

inline Constraint make_symmetric(SymKind kind, std::vector<Literal> lits, double weight = 1.0,
                                 std::uint32_t threshold = 0) {
    return Constraint{Symmetric{kind, threshold, std::move(lits)}, weight};
}
inline Constraint make_expr(Expr e, double weight = 1.0) { return Constraint{std::move(e), weight}; }

/// Optional human-readable names; empty vectors mean "use b<i>/y<j>".
struct SymbolTable {
    std::vector<std::string> bools;
    std::vector<std::string> reals;

    bool empty() const { return bools.empty() && reals.empty(); }
    friend bool operator==(const SymbolTable&, const SymbolTable&) = default;
};

struct Formula {
    std::uint32_t n_bool = 0;
    std::uint32_t n_real = 0;
    std::vector<Atom> atoms;
    std::vector<Constraint> constraints;
    SymbolTable names;

    std::uint32_t n_atoms() const { return static_cast<std::uint32_t>(atoms.size()); }
    double total_weight() const {
        double s = 0.0;
        for (const auto& c : constraints) s += c.weight;
        return s;
    }

    friend bool operator==(const Formula&, const Formula&) = default;
};

struct Assignment {
    std::vector<int> x;     // kTrueValue / kFalseValue per Boolean
    std::vector<double> y;  // one per real

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void check_literal(const Formula& f, const Literal& l, std::size_t c) {
    const auto limit = l.kind == VarKind::Bool ? f.n_bool : f.n_atoms();
    if (l.index >= limit)
        throw InvalidArgument("constraint " + std::to_string(c) + ": " +
                              (l.kind == VarKind::Bool ? "Boolean" : "atom") + " index " + std::to_string(l.index) +
                              " out of range");
}

inline void check_expr(const Formula& f, const Expr& e, std::size_t c) {
    switch (e.op) {
        case Expr::Op::Leaf: check_literal(f, e.lit, c); return;
        case Expr::Op::Not:
            if (e.args.size() != 1) throw InvalidArgument("constraint " + std::to_string(c) + ": not takes one argument");
            break;
        default:
            if (e.args.empty()) throw InvalidArgument("constraint " + std::to_string(c) + ": empty operator");
    }
    for (const auto& a : e.args) check_expr(f, a, c);
}

}  // namespace detail

/// Throws InvalidArgument when any structural invariant is violated.
inline void validate(const Formula& f) {
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
        const Atom& a = f.atoms[i];
        if (a.id != i) throw InvalidArgument("atom ids must be dense; expected " + std::to_string(i));
        if (a.coeffs.empty()) throw InvalidArgument("atom " + std::to_string(i) + " has no coefficients");
        for (const auto& [j, q] : a.coeffs) {
            if (j >= f.n_real) throw InvalidArgument("atom " + std::to_string(i) + ": real index out of range");
            if (q == 0.0 || !std::isfinite(q)) throw InvalidArgument("atom " + std::to_string(i) + ": bad coefficient");
        }
    }
    for (std::size_t c = 0; c < f.constraints.size(); ++c) {
        const Constraint& con = f.constraints[c];
        if (!(con.weight > 0.0) || !std::isfinite(con.weight))
            throw InvalidArgument("constraint " + std::to_string(c) + ": weight must be positive");
        if (const auto* s = std::get_if<Symmetric>(&con.body)) {
            if (s->literals.empty()) throw InvalidArgument("constraint " + std::to_string(c) + ": no literals");
            if (s->kind == SymKind::Card && s->threshold > s->literals.size())
                throw InvalidArgument("constraint " + std::to_string(c) + ": cardinality bound exceeds length");
            for (const auto& l : s->literals) detail::check_literal(f, l, c);
        } else {
            detail::check_expr(f, con.expr(), c);
        }
    }
    if (!f.names.bools.empty() && f.names.bools.size() != f.n_bool)
        throw InvalidArgument("symbol table size does not match Boolean count");
    if (!f.names.reals.empty() && f.names.reals.size() != f.n_real)
        throw InvalidArgument("symbol table size does not match real count");
}

// ---------------------------------------------------------------------------
// Exact evaluation

/// Evaluates an expression given a truth oracle for positive literals.
template <class LitTrue>
bool holds(const Expr& e, const LitTrue& lit_true) {
    switch (e.op) {
        case Expr::Op::Leaf: return lit_true(e.lit);
        case Expr::Op::Not: return !holds(e.args.front(), lit_true);
        case Expr::Op::And:
            return std::all_of(e.args.begin(), e.args.end(), [&](const Expr& a) { return holds(a, lit_true); });
        case Expr::Op::Or:
            return std::any_of(e.args.begin(), e.args.end(), [&](const Expr& a) { return holds(a, lit_true); });
        case Expr::Op::Xor: {
            bool acc = false;
            for (const auto& a : e.args) acc ^= holds(a, lit_true);
            return acc;
        }
    }
    return false;
}

/// `lit_true(l)` must return the truth of literal `l` including its negation.
template <class LitTrue>
bool holds(const Constraint& c, const LitTrue& lit_true) {
    if (const auto* s = std::get_if<Symmetric>(&c.body)) {
        std::size_t count = 0;
        for (const auto& l : s->literals) count += lit_true(l) ? 1 : 0;
        return symmetric_holds(s->kind, s->threshold, count, s->literals.size());
    }
    return holds(c.expr(), lit_true);
}

/// Truth oracle backed by a discrete Boolean vector and precomputed atom values.
struct DiscreteValuation {
    std::span<const int> x;
    std::span<const int> delta;  // eval_atom result per atom

    bool operator()(const Literal& l) const {
        const int v = l.kind == VarKind::Bool ? x[l.index] : delta[l.index];
        return is_true(v) != l.negated;
    }
};

inline std::vector<int> eval_atoms(std::span<const Atom> atoms, std::span<const double> y) {
    std::vector<int> delta(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) delta[i] = eval_atom(atoms[i], y);
    return delta;
}

inline int eval_constraint(const Constraint& c, std::span<const Atom> atoms, std::span<const int> x,
                           std::span<const double> y) {
    const auto delta = eval_atoms(atoms, y);
    return to_value(holds(c, DiscreteValuation{x, delta}));
}

struct FormulaEval {
    double objective = 0.0;
    std::vector<bool> satisfied;

    bool all_satisfied() const { return std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; }); }
    std::size_t unsat_count() const {
        return static_cast<std::size_t>(std::count(satisfied.begin(), satisfied.end(), false));
    }
};

inline void check_dimensions(const Formula& f, const Assignment& asg) {
    if (asg.x.size() != f.n_bool || asg.y.size() != f.n_real)
        throw InvalidArgument("assignment dimensions (" + std::to_string(asg.x.size()) + ", " +
                              std::to_string(asg.y.size()) + ") do not match formula (" + std::to_string(f.n_bool) +
                              ", " + std::to_string(f.n_real) + ")");
    for (int v : asg.x)
        if (v != kTrueValue && v != kFalseValue) throw InvalidArgument("Boolean values must be -1 or +1");
}

/// Weighted sum of constraint values; equals -total_weight() iff every constraint holds.
inline FormulaEval eval_formula(const Formula& f, const Assignment& asg) {
    check_dimensions(f, asg);
    const auto delta = eval_atoms(f.atoms, asg.y);
    const DiscreteValuation val{asg.x, delta};
    FormulaEval out;
    out.satisfied.reserve(f.constraints.size());
    for (const auto& c : f.constraints) {
        const bool ok = holds(c, val);
        out.satisfied.push_back(ok);
        out.objective += c.weight * to_value(ok);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Literal slots

/// One distinct variable inside a constraint. `lit` carries the polarity the
/// slot probability refers to. For symmetric bodies, `on_true`/`on_false`
/// count how many of the constraint's literals become true when `lit` is true
/// or false (normally 1/0; larger when a variable is repeated).
struct Slot {
    Literal lit;
    std::uint32_t on_true = 1;
    std::uint32_t on_false = 0;

    friend bool operator==(const Slot&, const Slot&) = default;
};

namespace detail {

inline void collect_vars(const Expr& e, std::vector<Literal>& out) {
    if (e.op == Expr::Op::Leaf) {
        out.push_back(Literal{e.lit.kind, e.lit.index, false});
        return;
    }
    for (const auto& a : e.args) collect_vars(a, out);
}

inline bool slot_less(const Literal& l, const Literal& r) {
    if (l.kind != r.kind) return l.kind == VarKind::Bool;
    return l.index < r.index;
}

}  // namespace detail

/// Slots of a constraint in default order: Booleans first, then atoms, each
/// ascending by index.
inline std::vector<Slot> constraint_slots(const Constraint& c) {
    std::vector<Slot> slots;
    if (const auto* s = std::get_if<Symmetric>(&c.body)) {
        for (const auto& l : s->literals) {
            auto it = std::find_if(slots.begin(), slots.end(), [&](const Slot& sl) { return sl.lit.same_variable(l); });
            if (it == slots.end()) {
                slots.push_back(Slot{l, 1, 0});
            } else if (it->lit.negated == l.negated) {
                ++it->on_true;
            } else {
                ++it->on_false;
            }
        }
    } else {
        std::vector<Literal> vars;
        detail::collect_vars(c.expr(), vars);
        for (const auto& v : vars)
            if (std::none_of(slots.begin(), slots.end(), [&](const Slot& sl) { return sl.lit.same_variable(v); }))
                slots.push_back(Slot{v, 1, 0});
    }
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Slot& l, const Slot& r) { return detail::slot_less(l.lit, r.lit); });
    return slots;
}

/// Evaluates a constraint given the truth of each slot's literal.
inline bool holds_on_slots(const Constraint& c, std::span<const Slot> slots, std::span<const bool> slot_true) {
    if (const auto* s = std::get_if<Symmetric>(&c.body)) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < slots.size(); ++i) count += slot_true[i] ? slots[i].on_true : slots[i].on_false;
        return symmetric_holds(s->kind, s->threshold, count, s->literals.size());
    }
    return holds(c.expr(), [&](const Literal& l) {
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i].lit.same_variable(l)) return slot_true[i] != (l.negated != slots[i].lit.negated);
        throw InvalidArgument("literal not covered by slot list");
    });
}

}  // namespace fsmt
