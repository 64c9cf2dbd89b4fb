#pragma once

// Ground-truth oracles: exact extended Walsh-Fourier coefficients by
// enumeration, their multilinear expectation, Monte-Carlo estimates of the
// smoothed expectation, Fourier-Motzkin feasibility and brute-force
// satisfiability. Everything here is exponential and guarded by size limits.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsmt/errors.hpp"
#include "fsmt/model.hpp"
#include "fsmt/rng.hpp"

namespace fsmt {

inline constexpr std::size_t kMaxWfeSlots = 20;

/// Sparse coefficient table. Bit i of a mask refers to `slots[i]`; Boolean
/// slots occupy the low `n_bool_slots` bits (the S part), atom slots the rest
/// (the T part). Coefficients refer to the slot literal values, so a negated
/// literal's slot value is the negated variable value.
struct WfeTable {
    std::vector<Slot> slots;
    std::uint32_t n_bool_slots = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;  // non-zero only, ascending mask

    std::uint32_t n_atom_slots() const { return static_cast<std::uint32_t>(slots.size()) - n_bool_slots; }
    std::uint32_t bool_part(std::uint32_t mask) const { return mask & ((1u << n_bool_slots) - 1u); }
    std::uint32_t atom_part(std::uint32_t mask) const { return mask >> n_bool_slots; }

    double coefficient(std::uint32_t mask) const {
        const auto it = std::lower_bound(entries.begin(), entries.end(), mask,
                                         [](const auto& e, std::uint32_t m) { return e.first < m; });
        return it != entries.end() && it->first == mask ? it->second : 0.0;
    }
};

/// Coefficients from the expectation formula over all slot valuations,
/// evaluated with a fast Walsh-Hadamard transform of the +-1 truth table.
inline WfeTable wfe_coefficients(const Constraint& c) {
    WfeTable table;
    table.slots = constraint_slots(c);
    const std::size_t L = table.slots.size();
    if (L > kMaxWfeSlots)
        throw LimitExceeded("constraint has " + std::to_string(L) + " slots; enumeration limit is " +
                            std::to_string(kMaxWfeSlots));
    table.n_bool_slots = static_cast<std::uint32_t>(
        std::count_if(table.slots.begin(), table.slots.end(), [](const Slot& s) { return s.lit.kind == VarKind::Bool; }));

    const std::size_t size = std::size_t{1} << L;
    std::vector<double> f(size);
    bool tv[kMaxWfeSlots];
    for (std::size_t idx = 0; idx < size; ++idx) {
        for (std::size_t s = 0; s < L; ++s) tv[s] = (idx >> s) & 1u;  // bit set: literal True (-1)
        f[idx] = to_value(holds_on_slots(c, table.slots, std::span<const bool>(tv, L)));
    }
    // Sum_idx f(idx) * prod_{s in S} z_s with z_s = -1 exactly when bit s is set.
    for (std::size_t len = 1; len < size; len <<= 1)
        for (std::size_t i = 0; i < size; i += len << 1)
            for (std::size_t j = i; j < i + len; ++j) {
                const double u = f[j];
                const double v = f[j + len];
                f[j] = u + v;
                f[j + len] = u - v;
            }
    const double inv = 1.0 / static_cast<double>(size);
    for (std::size_t m = 0; m < size; ++m)
        if (f[m] != 0.0) table.entries.emplace_back(static_cast<std::uint32_t>(m), f[m] * inv);
    return table;
}

/// Sum over (S,T) of coef * prod a_slots[S] * prod d_slots[T].
inline double xwfe_expectation(const WfeTable& table, std::span<const double> a_slots,
                               std::span<const double> d_slots) {
    if (a_slots.size() != table.n_bool_slots || d_slots.size() != table.n_atom_slots())
        throw InvalidArgument("slot vector sizes do not match the coefficient table");
    double total = 0.0;
    for (const auto& [mask, coef] : table.entries) {
        double term = coef;
        for (std::uint32_t s = table.bool_part(mask); s != 0; s &= s - 1) term *= a_slots[std::countr_zero(s)];
        for (std::uint32_t t = table.atom_part(mask); t != 0; t &= t - 1) term *= d_slots[std::countr_zero(t)];
        total += term;
    }
    return total;
}

/// Relaxed slot values of a table from variable-level values (a per Boolean,
/// d per atom); negated literals flip sign.
inline std::pair<std::vector<double>, std::vector<double>> table_slot_values(const WfeTable& table,
                                                                             std::span<const double> a,
                                                                             std::span<const double> d) {
    std::vector<double> as, ds;
    for (const auto& s : table.slots) {
        const double v = s.lit.kind == VarKind::Bool ? a[s.lit.index] : d[s.lit.index];
        (s.lit.kind == VarKind::Bool ? as : ds).push_back(s.lit.negated ? -v : v);
    }
    return {as, ds};
}

// ---------------------------------------------------------------------------
// Monte-Carlo

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Sample mean of f_c(R(a), y) with y ~ N(b, sigma^2 I). Only the variables the
/// constraint touches are sampled. Deterministic given `seed`.
inline McEstimate mc_expectation(const Formula& f, const Constraint& c, std::span<const double> a,
                                 std::span<const double> b, double sigma, std::size_t samples, std::uint64_t seed) {
    if (sigma < 0.0) throw InvalidArgument("sigma must be non-negative");
    if (samples == 0) throw InvalidArgument("need at least one sample");
    if (a.size() != f.n_bool || b.size() != f.n_real) throw InvalidArgument("point dimensions do not match formula");
    const auto slots = constraint_slots(c);
    std::vector<std::uint32_t> bools, atoms, reals;
    for (const auto& s : slots) (s.lit.kind == VarKind::Bool ? bools : atoms).push_back(s.lit.index);
    for (auto id : atoms)
        for (const auto& [j, q] : f.atoms[id].coeffs)
            if (std::find(reals.begin(), reals.end(), j) == reals.end()) reals.push_back(j);

    Rng rng(seed);
    std::vector<int> x(f.n_bool, kFalseValue);
    std::vector<int> delta(f.n_atoms(), kFalseValue);
    std::vector<double> y(b.begin(), b.end());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 1; k <= samples; ++k) {
        for (auto i : bools) x[i] = to_value(rng.uniform() < (1.0 - a[i]) / 2.0);
        if (sigma > 0.0)
            for (auto j : reals) y[j] = b[j] + sigma * rng.normal();
        for (auto id : atoms) delta[id] = eval_atom(f.atoms[id], y);
        const double v = to_value(holds(c, DiscreteValuation{x, delta}));
        const double diff = v - mean;
        mean += diff / static_cast<double>(k);
        m2 += diff * (v - mean);
    }
    const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(samples))};
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin

inline constexpr std::size_t kMaxFmVariables = 12;

/// coeffs . y <= rhs (or < when strict); coeffs is dense over all variables.
struct LinearIneq {
    std::vector<double> coeffs;
    double rhs = 0.0;
    bool strict = false;
};

struct FmResult {
    bool feasible = false;
    std::vector<double> witness;  // set when feasible
};

namespace detail {

inline constexpr double kFmZero = 1e-12;
inline constexpr std::size_t kFmMaxRows = 200000;

inline double row_scale(const LinearIneq& r) {
    double s = std::fabs(r.rhs);
    for (double c : r.coeffs) s = std::max(s, std::fabs(c));
    return s;
}

inline void clean_row(LinearIneq& r) {
    double s = 0.0;
    for (double c : r.coeffs) s = std::max(s, std::fabs(c));
    for (double& c : r.coeffs)
        if (std::fabs(c) <= kFmZero * s) c = 0.0;
}

inline bool constant_row_ok(const LinearIneq& r) {
    const double tol = 1e-9 * std::max(1.0, row_scale(r));
    return r.strict ? r.rhs > tol : r.rhs >= -tol;
}

inline bool is_constant(const LinearIneq& r) {
    return std::all_of(r.coeffs.begin(), r.coeffs.end(), [](double c) { return c == 0.0; });
}

}  // namespace detail

/// Sound and complete feasibility for small systems. The witness is checked
/// against the inequalities exactly as written.
inline FmResult fm_feasible(std::span<const LinearIneq> ineqs, std::size_t n_vars) {
    if (n_vars > kMaxFmVariables)
        throw LimitExceeded(std::to_string(n_vars) + " real variables exceed the elimination limit of " +
                            std::to_string(kMaxFmVariables));
    std::vector<std::vector<LinearIneq>> systems(n_vars + 1);
    auto& top = systems[n_vars];
    for (const auto& r : ineqs) {
        if (r.coeffs.size() != n_vars) throw InvalidArgument("inequality width does not match variable count");
        LinearIneq row = r;
        detail::clean_row(row);
        if (detail::is_constant(row)) {
            if (!detail::constant_row_ok(row)) return {};
            continue;
        }
        top.push_back(std::move(row));
    }
    // systems[k] mentions only variables 0..k-1.
    for (std::size_t k = n_vars; k-- > 0;) {
        const auto& cur = systems[k + 1];
        auto& next = systems[k];
        std::vector<const LinearIneq*> pos, neg;
        for (const auto& r : cur) {
            if (r.coeffs[k] > 0.0)
                pos.push_back(&r);
            else if (r.coeffs[k] < 0.0)
                neg.push_back(&r);
            else
                next.push_back(r);
        }
        if (pos.size() * neg.size() + next.size() > detail::kFmMaxRows)
            throw LimitExceeded("Fourier-Motzkin elimination exceeded the row limit");
        for (const auto* p : pos)
            for (const auto* n : neg) {
                const double sp = 1.0 / p->coeffs[k];
                const double sn = -1.0 / n->coeffs[k];
                LinearIneq row;
                row.coeffs.resize(n_vars);
                for (std::size_t j = 0; j < k; ++j) row.coeffs[j] = p->coeffs[j] * sp + n->coeffs[j] * sn;
                row.rhs = p->rhs * sp + n->rhs * sn;
                row.strict = p->strict || n->strict;
                detail::clean_row(row);
                if (detail::is_constant(row)) {
                    if (!detail::constant_row_ok(row)) return {};
                    continue;
                }
                next.push_back(std::move(row));
            }
    }

    FmResult res;
    res.feasible = true;
    res.witness.assign(n_vars, 0.0);
    for (std::size_t k = 0; k < n_vars; ++k) {
        double lo = -INFINITY, hi = INFINITY;
        for (const auto& r : systems[k + 1]) {
            const double ck = r.coeffs[k];
            if (ck == 0.0) continue;
            double rest = r.rhs;
            for (std::size_t j = 0; j < k; ++j) rest -= r.coeffs[j] * res.witness[j];
            const double bound = rest / ck;
            if (ck > 0.0)
                hi = std::min(hi, bound);
            else
                lo = std::max(lo, bound);
        }
        double v;
        if (std::isfinite(lo) && std::isfinite(hi))
            v = lo == hi ? lo : lo + (hi - lo) / 2.0;
        else if (std::isfinite(lo))
            v = lo + 1.0;
        else if (std::isfinite(hi))
            v = hi - 1.0;
        else
            v = 0.0;
        res.witness[k] = v;
    }
    return res;
}

/// True when `y` satisfies every inequality in exact floating-point evaluation.
inline bool satisfies(std::span<const LinearIneq> ineqs, std::span<const double> y) {
    for (const auto& r : ineqs) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) lhs += r.coeffs[j] * y[j];
        if (r.strict ? !(lhs < r.rhs) : !(lhs <= r.rhs)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Brute force

inline constexpr std::uint32_t kMaxBruteBools = 16;
inline constexpr std::uint32_t kMaxBruteReals = 12;
inline constexpr std::uint32_t kMaxBruteAtoms = 16;

struct BruteForceResult {
    bool sat = false;
    Assignment witness;  // set when sat
};

/// Enumerates Boolean vectors and atom truth patterns; a pattern that
/// satisfies every constraint is accepted when its signed atom system is
/// LRA-feasible and the witness checks exactly.
inline BruteForceResult brute_force_sat(const Formula& f) {
    if (f.n_bool > kMaxBruteBools || f.n_real > kMaxBruteReals || f.n_atoms() > kMaxBruteAtoms)
        throw LimitExceeded("instance exceeds brute-force limits (" + std::to_string(kMaxBruteBools) + " Booleans, " +
                            std::to_string(kMaxBruteReals) + " reals, " + std::to_string(kMaxBruteAtoms) + " atoms)");
    // Only atoms that some constraint mentions matter.
    std::vector<std::uint32_t> used;
    for (const auto& c : f.constraints)
        for (const auto& s : constraint_slots(c))
            if (s.lit.kind == VarKind::Atom &&
                std::find(used.begin(), used.end(), s.lit.index) == used.end())
                used.push_back(s.lit.index);
    std::sort(used.begin(), used.end());

    std::vector<int> x(f.n_bool);
    std::vector<int> delta(f.n_atoms(), kFalseValue);
    const std::uint64_t n_patterns = std::uint64_t{1} << used.size();
    const std::uint64_t n_x = std::uint64_t{1} << f.n_bool;
    for (std::uint64_t pat = 0; pat < n_patterns; ++pat) {
        for (std::size_t i = 0; i < used.size(); ++i) delta[used[i]] = to_value((pat >> i) & 1u);
        for (std::uint64_t xv = 0; xv < n_x; ++xv) {
            for (std::uint32_t i = 0; i < f.n_bool; ++i) x[i] = to_value((xv >> i) & 1u);
            const DiscreteValuation val{x, delta};
            if (!std::all_of(f.constraints.begin(), f.constraints.end(), [&](const Constraint& c) { return holds(c, val); }))
                continue;
            std::vector<LinearIneq> system;
            for (auto id : used) {
                const Atom& a = f.atoms[id];
                LinearIneq r;
                r.coeffs.assign(f.n_real, 0.0);
                for (const auto& [j, q] : a.coeffs) r.coeffs[j] = q;
                r.rhs = a.rhs;
                r.strict = a.strict;
                if (!is_true(delta[id])) {  // negation: q.y > rhs (or >= for a strict atom)
                    for (double& q : r.coeffs) q = -q;
                    r.rhs = -r.rhs;
                    r.strict = !a.strict;
                }
                system.push_back(std::move(r));
            }
            const auto fm = fm_feasible(system, f.n_real);
            if (fm.feasible) {
                Assignment asg{x, fm.witness};
                if (eval_formula(f, asg).all_satisfied()) return {true, std::move(asg)};
            }
            break;  // the pattern's LRA verdict does not depend on x
        }
    }
    return {};
}

}  // namespace fsmt
