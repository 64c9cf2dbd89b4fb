#pragma once

// Shared test helpers: random instances and brute-force oracles that do not
// reuse the library code paths they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "fsmt/fsmt.hpp"

namespace fsmt::test {

inline Literal random_literal(Rng& rng, std::uint32_t n_bool, std::uint32_t n_atoms) {
    const bool neg = rng.coin();
    if (n_atoms == 0 || (n_bool > 0 && rng.coin())) return Literal::boolean(static_cast<std::uint32_t>(rng.below(n_bool)), neg);
    return Literal::atom(static_cast<std::uint32_t>(rng.below(n_atoms)), neg);
}

inline Expr random_expr(Rng& rng, std::uint32_t n_bool, std::uint32_t n_atoms, int depth) {
    if (depth == 0 || rng.coin(0.3)) return Expr::leaf(random_literal(rng, n_bool, n_atoms));
    const auto pick = rng.below(4);
    if (pick == 0) return Expr::negate(random_expr(rng, n_bool, n_atoms, depth - 1));
    const Expr::Op op = pick == 1 ? Expr::Op::And : pick == 2 ? Expr::Op::Or : Expr::Op::Xor;
    std::vector<Expr> args;
    const auto k = 2 + rng.below(2);
    for (std::uint64_t i = 0; i < k; ++i) args.push_back(random_expr(rng, n_bool, n_atoms, depth - 1));
    return Expr::nary(op, std::move(args));
}

inline Constraint random_symmetric(Rng& rng, std::uint32_t n_bool, std::uint32_t n_atoms, std::uint32_t max_len,
                                   bool distinct = false) {
    const auto kind = static_cast<SymKind>(rng.below(4));
    const auto len = static_cast<std::uint32_t>(1 + rng.below(max_len));
    std::vector<Literal> lits;
    while (lits.size() < len) {
        const Literal l = random_literal(rng, n_bool, n_atoms);
        if (distinct && std::any_of(lits.begin(), lits.end(), [&](const Literal& o) { return o.same_variable(l); })) {
            if (lits.size() >= n_bool + n_atoms) break;
            continue;
        }
        lits.push_back(l);
    }
    const auto k = static_cast<std::uint32_t>(rng.below(lits.size() + 1));
    return make_symmetric(kind, std::move(lits), 0.5 + rng.uniform(), kind == SymKind::Card ? k : 0);
}

inline Atom random_atom(Rng& rng, std::uint32_t id, std::uint32_t n_real, std::uint32_t max_terms = 3) {
    std::vector<std::pair<std::uint32_t, double>> q;
    const auto terms = 1 + rng.below(std::min<std::uint32_t>(max_terms, n_real));
    while (q.size() < terms) {
        const auto j = static_cast<std::uint32_t>(rng.below(n_real));
        if (std::any_of(q.begin(), q.end(), [&](const auto& e) { return e.first == j; })) continue;
        double c = static_cast<double>(1 + rng.below(3)) * (rng.coin() ? 1.0 : -1.0);
        if (rng.coin(0.3)) c = rng.uniform(-2.0, 2.0);
        if (c == 0.0) c = 1.0;
        q.emplace_back(j, c);
    }
    const auto rel = static_cast<Relation>(rng.below(4));
    return make_atom(id, std::move(q), rel, rng.uniform(-1.0, 1.0));
}

/// Random formula with every kind of constraint mixed in.
inline Formula random_formula(Rng& rng, std::uint32_t n_bool, std::uint32_t n_real, std::uint32_t n_atoms,
                              std::uint32_t n_cons, std::uint32_t max_len = 4) {
    Formula f;
    f.n_bool = n_bool;
    f.n_real = n_real;
    for (std::uint32_t i = 0; i < n_atoms; ++i) f.atoms.push_back(random_atom(rng, i, n_real));
    for (std::uint32_t c = 0; c < n_cons; ++c) {
        if (rng.coin()) {
            f.constraints.push_back(random_symmetric(rng, n_bool, n_atoms, max_len));
        } else {
            f.constraints.push_back(make_expr(random_expr(rng, n_bool, n_atoms, 3), 0.5 + rng.uniform()));
        }
    }
    validate(f);
    return f;
}

/// Direct truth of a constraint from per-variable truth values, written
/// without the library's slot machinery.
inline bool truth(const Constraint& c, const std::vector<bool>& bool_true, const std::vector<bool>& atom_true) {
    auto lit = [&](const Literal& l) {
        const bool v = l.kind == VarKind::Bool ? bool_true[l.index] : atom_true[l.index];
        return v != l.negated;
    };
    std::function<bool(const Expr&)> ev = [&](const Expr& e) -> bool {
        switch (e.op) {
            case Expr::Op::Leaf: return lit(e.lit);
            case Expr::Op::Not: return !ev(e.args[0]);
            case Expr::Op::And: {
                bool r = true;
                for (const auto& a : e.args) r = r && ev(a);
                return r;
            }
            case Expr::Op::Or: {
                bool r = false;
                for (const auto& a : e.args) r = r || ev(a);
                return r;
            }
            case Expr::Op::Xor: {
                bool r = false;
                for (const auto& a : e.args) r = r != ev(a);
                return r;
            }
        }
        return false;
    };
    if (!c.is_symmetric()) return ev(c.expr());
    const auto& s = c.symmetric();
    std::size_t k = 0;
    for (const auto& l : s.literals) k += lit(l);
    switch (s.kind) {
        case SymKind::Or: return k >= 1;
        case SymKind::Card: return k <= s.threshold;
        case SymKind::Nae: return k != 0 && k != s.literals.size();
        case SymKind::Xor: return k % 2 == 1;
    }
    return false;
}

/// Distinct variables of a constraint, as (kind, index) with positive polarity.
inline std::vector<Literal> variables(const Constraint& c) {
    std::vector<Literal> out;
    auto add = [&](const Literal& l) {
        const Literal v{l.kind, l.index, false};
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    if (c.is_symmetric()) {
        for (const auto& l : c.symmetric().literals) add(l);
    } else {
        std::function<void(const Expr&)> walk = [&](const Expr& e) {
            if (e.op == Expr::Op::Leaf) add(e.lit);
            for (const auto& a : e.args) walk(a);
        };
        walk(c.expr());
    }
    return out;
}

/// P[constraint satisfied] when variable v is True with probability pv[v]
/// independently, by summing over every outcome.
inline double exhaustive_sat_prob(const Constraint& c, const std::vector<double>& p_bool,
                                  const std::vector<double>& p_atom) {
    const auto vars = variables(c);
    std::vector<bool> bt(p_bool.size()), at(p_atom.size());
    double total = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars.size()); ++m) {
        double w = 1.0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            const bool t = (m >> i) & 1;
            const double p = vars[i].kind == VarKind::Bool ? p_bool[vars[i].index] : p_atom[vars[i].index];
            w *= t ? p : 1.0 - p;
            (vars[i].kind == VarKind::Bool ? bt : at)[vars[i].index] = t;
        }
        if (w != 0.0 && truth(c, bt, at)) total += w;
    }
    return total;
}

/// Objective of a formula by exhaustive enumeration per constraint: the
/// relaxed values a (Booleans) and d (atoms) map to P[True] = (1 - v) / 2.
inline double exhaustive_objective(const Formula& f, const std::vector<double>& a, const std::vector<double>& b,
                                   double sigma, std::span<const double> w) {
    std::vector<double> pb(f.n_bool), pa(f.n_atoms());
    for (std::uint32_t i = 0; i < f.n_bool; ++i) pb[i] = (1.0 - a[i]) / 2.0;
    for (std::uint32_t i = 0; i < f.n_atoms(); ++i) {
        const auto& at = f.atoms[i];
        double z = -at.rhs, nq = 0.0;
        for (const auto& [j, q] : at.coeffs) {
            z += q * b[j];
            nq += q * q;
        }
        const double d = std::erf(z / (std::sqrt(2.0 * nq) * sigma));
        pa[i] = (1.0 - d) / 2.0;
    }
    double s = 0.0;
    for (std::size_t c = 0; c < f.constraints.size(); ++c)
        s += w[c] * (1.0 - 2.0 * exhaustive_sat_prob(f.constraints[c], pb, pa));
    return s;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

}  // namespace fsmt::test
