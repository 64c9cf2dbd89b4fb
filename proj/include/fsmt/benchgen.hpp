#pragma once

// Deterministic generators for random hybrid (CARD/NAE/XOR) instances,
// continuous-time scheduling and 3D placement, plus domain-level verifiers
// for the last two that decode the Booleanized indices directly.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsmt/errors.hpp"
#include "fsmt/model.hpp"
#include "fsmt/rng.hpp"

namespace fsmt {

// ---------------------------------------------------------------------------
// Random hybrid constraints

struct RandomSpec {
    std::uint32_t n = 100;
    std::uint64_t seed = 0;
    std::uint32_t atom_arity = 3;  // reals per atom
    int max_coeff = 3;             // q_j drawn from {+-1, ..., +-max_coeff}
    std::optional<std::uint32_t> card_threshold;  // default floor(l/2)
    double negation_prob = 0.5;

    std::uint32_t m_card() const { return n / 5; }
    std::uint32_t m_nae() const { return n / 5; }
    std::uint32_t m_xor() const { return n / 50; }
    std::uint32_t l_card() const { return std::min<std::uint32_t>(50, n / 5); }
    std::uint32_t l_nae() const { return std::min<std::uint32_t>(50, n / 5); }
    std::uint32_t l_xor() const { return 50; }
};

namespace detail {

/// `k` distinct values from [0, n), in draw order.
inline std::vector<std::uint32_t> sample_distinct(Rng& rng, std::uint32_t n, std::uint32_t k) {
    std::vector<std::uint32_t> out;
    out.reserve(k);
    while (out.size() < k) {
        const auto v = static_cast<std::uint32_t>(rng.below(n));
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

inline std::uint32_t log2_exact(std::uint32_t v, const char* what) {
    if (v == 0 || !std::has_single_bit(v)) throw InvalidArgument(std::string(what) + " must be a power of two");
    return static_cast<std::uint32_t>(std::countr_zero(v));
}

/// Literal true iff bit `i` of `value` is the given bit: True encodes 1.
inline Literal bit_literal(std::uint32_t var, bool bit_is_one) { return Literal::boolean(var, !bit_is_one); }

inline Expr xor2(std::uint32_t u, std::uint32_t v) {
    return Expr::nary(Expr::Op::Xor, {Expr::leaf(Literal::boolean(u)), Expr::leaf(Literal::boolean(v))});
}

inline Constraint unit(std::uint32_t atom) { return make_symmetric(SymKind::Or, {Literal::atom(atom)}); }

class FormulaBuilder {
public:
    Formula f;

    std::uint32_t atom(std::vector<std::pair<std::uint32_t, double>> coeffs, Relation rel, double rhs) {
        const auto id = f.n_atoms();
        f.atoms.push_back(make_atom(id, std::move(coeffs), rel, rhs));
        return id;
    }
};

}  // namespace detail

inline Formula gen_random(const RandomSpec& spec) {
    if (spec.n < 50) throw InvalidArgument("random instances need n >= 50");
    if (spec.atom_arity == 0 || spec.atom_arity > spec.n) throw InvalidArgument("atom arity out of range");
    if (spec.max_coeff < 1) throw InvalidArgument("max_coeff must be positive");
    Rng rng(spec.seed);
    detail::FormulaBuilder b;
    b.f.n_bool = spec.n;
    b.f.n_real = spec.n;
    for (std::uint32_t i = 0; i < spec.n; ++i) {
        std::vector<std::pair<std::uint32_t, double>> coeffs;
        for (auto j : detail::sample_distinct(rng, spec.n, spec.atom_arity)) {
            const double mag = static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(spec.max_coeff)));
            coeffs.emplace_back(j, rng.coin() ? mag : -mag);
        }
        b.atom(std::move(coeffs), Relation::Le, rng.uniform(-1.0, 1.0));
    }
    auto literals = [&](std::uint32_t len) {
        std::vector<Literal> lits;
        for (auto s : detail::sample_distinct(rng, 2 * spec.n, len)) {
            const bool neg = rng.coin(spec.negation_prob);
            lits.push_back(s < spec.n ? Literal::boolean(s, neg) : Literal::atom(s - spec.n, neg));
        }
        return lits;
    };
    for (std::uint32_t c = 0; c < spec.m_card(); ++c) {
        const auto l = spec.l_card();
        b.f.constraints.push_back(
            make_symmetric(SymKind::Card, literals(l), 1.0, std::min(l, spec.card_threshold.value_or(l / 2))));
    }
    for (std::uint32_t c = 0; c < spec.m_nae(); ++c)
        b.f.constraints.push_back(make_symmetric(SymKind::Nae, literals(spec.l_nae())));
    for (std::uint32_t c = 0; c < spec.m_xor(); ++c)
        b.f.constraints.push_back(make_symmetric(SymKind::Xor, literals(std::min(spec.l_xor(), 2 * spec.n))));
    validate(b.f);
    return b.f;
}

// ---------------------------------------------------------------------------
// Scheduling

struct SchedulingSpec {
    std::uint32_t n_w = 4;
    std::uint32_t r = 2;
    std::uint64_t seed = 0;
    double dependency_prob = 0.5;
    int time_bits = 16;  // d and t are multiples of 2^-time_bits
    double slack = 0.0;  // added to the greedy cutoff
    bool implied_bounds = true;  // unit atoms min_w d_w <= y_j <= max_w (d_w + T - t_j)

    std::uint32_t n_j() const { return r * n_w; }
};

struct SchedulingMeta {
    std::uint32_t n_w = 0;
    std::uint32_t n_j = 0;
    std::uint32_t bits = 0;
    std::vector<double> d;  // worker start times
    std::vector<double> t;  // job run times
    std::vector<std::pair<std::uint32_t, std::uint32_t>> deps;  // (j, j'): j runs after j'
    double T = 0.0;
    std::vector<std::uint32_t> greedy_worker;
    std::vector<double> greedy_start;
    bool implied_bounds = false;

    std::uint32_t bool_index(std::uint32_t bit, std::uint32_t job) const { return job * bits + bit; }
};

struct GeneratedScheduling {
    Formula formula;
    SchedulingMeta meta;
};

namespace detail {

/// Jobs in index order (every dependency points backwards), each on the worker
/// that can start it earliest; ties go to the lowest worker index.
inline void greedy_schedule(SchedulingMeta& m) {
    std::vector<double> avail(m.n_w);
    for (std::uint32_t w = 0; w < m.n_w; ++w) avail[w] = m.d[w];
    m.greedy_worker.assign(m.n_j, 0);
    m.greedy_start.assign(m.n_j, 0.0);
    for (std::uint32_t j = 0; j < m.n_j; ++j) {
        double ready = 0.0;
        for (const auto& [a, b] : m.deps)
            if (a == j) ready = std::max(ready, m.greedy_start[b] + m.t[b]);
        std::uint32_t best = 0;
        double best_start = INFINITY;
        for (std::uint32_t w = 0; w < m.n_w; ++w) {
            const double s = std::max(avail[w], ready);
            if (s < best_start) {
                best_start = s;
                best = w;
            }
        }
        m.greedy_worker[j] = best;
        m.greedy_start[j] = best_start;
        avail[best] = best_start + m.t[j];
    }
    double T = 0.0;
    for (std::uint32_t j = 0; j < m.n_j; ++j)
        T = std::max(T, m.greedy_start[j] + m.t[j] - m.d[m.greedy_worker[j]]);
    m.T = T;
}

inline double dyadic_uniform(Rng& rng, int bits) {
    if (bits <= 0) return rng.uniform();
    // (0, 1], never exactly 0 so every job takes time
    return std::ldexp(static_cast<double>(rng.below(std::uint64_t{1} << bits) + 1), -bits);
}

}  // namespace detail

inline Assignment scheduling_witness(const SchedulingMeta& m) {
    Assignment asg;
    asg.x.assign(std::size_t{m.n_j} * m.bits, kFalseValue);
    for (std::uint32_t j = 0; j < m.n_j; ++j)
        for (std::uint32_t i = 0; i < m.bits; ++i)
            asg.x[m.bool_index(i, j)] = to_value((m.greedy_worker[j] >> i) & 1u);
    asg.y = m.greedy_start;
    return asg;
}

inline GeneratedScheduling gen_scheduling(const SchedulingSpec& spec) {
    const std::uint32_t bits = detail::log2_exact(spec.n_w, "worker count");
    if (spec.r == 0) throw InvalidArgument("jobs per worker must be positive");
    if (spec.time_bits < 0 || spec.time_bits > 30) throw InvalidArgument("time_bits must lie in [0, 30]");
    if (!(spec.slack >= 0.0)) throw InvalidArgument("slack must be non-negative");
    Rng rng(spec.seed);
    SchedulingMeta m;
    m.implied_bounds = spec.implied_bounds;
    m.n_w = spec.n_w;
    m.n_j = spec.n_j();
    m.bits = bits;
    for (std::uint32_t w = 0; w < m.n_w; ++w) m.d.push_back(detail::dyadic_uniform(rng, spec.time_bits));
    for (std::uint32_t j = 0; j < m.n_j; ++j) m.t.push_back(detail::dyadic_uniform(rng, spec.time_bits));
    for (std::uint32_t j = 1; j < m.n_j; ++j)
        if (rng.coin(spec.dependency_prob)) m.deps.emplace_back(j, static_cast<std::uint32_t>(rng.below(j)));
    detail::greedy_schedule(m);
    m.T += spec.slack;

    auto build = [&](const SchedulingMeta& mm) {
        detail::FormulaBuilder b;
        Formula& f = b.f;
        f.n_bool = mm.n_j * mm.bits;
        f.n_real = mm.n_j;
        for (std::uint32_t j = 0; j < mm.n_j; ++j)
            for (std::uint32_t i = 0; i < mm.bits; ++i) f.names.bools.push_back("x_" + std::to_string(i) + "_" + std::to_string(j));
        for (std::uint32_t j = 0; j < mm.n_j; ++j) f.names.reals.push_back("y_" + std::to_string(j));
        if (mm.bits == 0) f.names.bools.clear();

        for (const auto& [j, jp] : mm.deps)  // y_j >= y_j' + t_j'
            f.constraints.push_back(detail::unit(b.atom({{j, 1.0}, {jp, -1.0}}, Relation::Ge, mm.t[jp])));
        for (std::uint32_t j = 0; j < mm.n_j; ++j)
            for (std::uint32_t jp = j + 1; jp < mm.n_j; ++jp) {
                std::vector<Expr> args;
                for (std::uint32_t i = 0; i < mm.bits; ++i) args.push_back(detail::xor2(mm.bool_index(i, j), mm.bool_index(i, jp)));
                args.push_back(Expr::leaf(Literal::atom(b.atom({{j, 1.0}, {jp, -1.0}}, Relation::Ge, mm.t[jp]))));
                args.push_back(Expr::leaf(Literal::atom(b.atom({{jp, 1.0}, {j, -1.0}}, Relation::Ge, mm.t[j]))));
                f.constraints.push_back(make_expr(Expr::nary(Expr::Op::Or, std::move(args))));
            }
        if (mm.implied_bounds)  // implied by the window clauses; they keep y out of flat erf tails
            for (std::uint32_t j = 0; j < mm.n_j; ++j) {
                double lo = INFINITY, hi = -INFINITY;
                for (std::uint32_t w = 0; w < mm.n_w; ++w) {
                    lo = std::min(lo, mm.d[w]);
                    hi = std::max(hi, mm.d[w] + mm.T - mm.t[j]);
                }
                f.constraints.push_back(detail::unit(b.atom({{j, 1.0}}, Relation::Ge, lo)));
                f.constraints.push_back(detail::unit(b.atom({{j, 1.0}}, Relation::Le, hi)));
            }
        for (std::uint32_t j = 0; j < mm.n_j; ++j)
            for (std::uint32_t w = 0; w < mm.n_w; ++w) {
                std::vector<Expr> args;
                for (std::uint32_t i = 0; i < mm.bits; ++i)  // true when job j's bit i differs from w's
                    args.push_back(Expr::leaf(detail::bit_literal(mm.bool_index(i, j), !((w >> i) & 1u))));
                const auto lo = b.atom({{j, 1.0}}, Relation::Ge, mm.d[w]);
                const auto hi = b.atom({{j, 1.0}}, Relation::Le, mm.d[w] + mm.T - mm.t[j]);
                Expr window = Expr::nary(Expr::Op::And, {Expr::leaf(Literal::atom(lo)), Expr::leaf(Literal::atom(hi))});
                if (args.empty()) {
                    f.constraints.push_back(make_expr(std::move(window)));
                } else {
                    args.push_back(std::move(window));
                    f.constraints.push_back(make_expr(Expr::nary(Expr::Op::Or, std::move(args))));
                }
            }
        validate(f);
        return f;
    };
    Formula f = build(m);
    // Float rounding in d + T - t may cut the greedy witness off by an ulp.
    for (int guard = 0; !eval_formula(f, scheduling_witness(m)).all_satisfied(); ++guard) {
        if (guard == 64) throw Error("greedy witness does not satisfy the generated scheduling instance");
        m.T = std::nextafter(m.T, INFINITY);
        f = build(m);
    }
    return {std::move(f), std::move(m)};
}

// ---------------------------------------------------------------------------
// Placement

/// Lengths are in grid units of 0.05 nm, so every size and the macro side are
/// integers and touching rectangles compare exactly.
inline constexpr double kPlacementUnit = 0.05;
inline constexpr double kMacroSide = 20.0;

enum class ModuleKind { LargePe, SmallPe, LargeMem, SmallMem };

struct PlacementModule {
    ModuleKind kind = ModuleKind::LargePe;
    double w = 0.0;
    double h = 0.0;
};

struct PlacementSpec {
    std::uint32_t n_m = 2;
    std::uint32_t n_l = 2;
    std::uint64_t seed = 0;
};

struct PlacementMeta {
    std::uint32_t n_m = 0;
    std::uint32_t n_l = 0;
    std::uint32_t mbits = 0;
    std::uint32_t lbits = 0;
    double side = kMacroSide;
    std::vector<PlacementModule> modules;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // routing-associated modules

    std::uint32_t bits_per_module() const { return mbits + lbits; }
    std::uint32_t macro_bit(std::uint32_t i, std::uint32_t j) const { return j * bits_per_module() + i; }
    std::uint32_t layer_bit(std::uint32_t i, std::uint32_t j) const { return j * bits_per_module() + mbits + i; }
    static std::uint32_t x_index(std::uint32_t j) { return 2 * j; }
    static std::uint32_t y_index(std::uint32_t j) { return 2 * j + 1; }
};

struct GeneratedPlacement {
    Formula formula;
    PlacementMeta meta;
};

inline GeneratedPlacement gen_placement(const PlacementSpec& spec) {
    PlacementMeta m;
    m.n_m = spec.n_m;
    m.n_l = spec.n_l;
    m.mbits = detail::log2_exact(spec.n_m, "macro count");
    m.lbits = detail::log2_exact(spec.n_l, "layer count");
    if (spec.n_m * spec.n_l < 2) throw InvalidArgument("placement needs n_m * n_l >= 2");
    Rng rng(spec.seed);
    const std::uint32_t n_small_pe = spec.n_m * spec.n_l;
    const std::uint32_t n_small_mem = n_small_pe / 2;
    for (std::uint32_t i = 0; i < spec.n_m; ++i) m.modules.push_back({ModuleKind::LargePe, 8, 8});
    for (std::uint32_t i = 0; i < n_small_pe; ++i) m.modules.push_back({ModuleKind::SmallPe, 4, 4});
    for (std::uint32_t i = 0; i < spec.n_m; ++i) m.modules.push_back({ModuleKind::LargeMem, 2, 2});
    const bool flip = rng.coin();
    for (std::uint32_t i = 0; i < n_small_mem; ++i) {
        const bool along_x = ((i & 1u) != 0) != flip;
        m.modules.push_back({ModuleKind::SmallMem, along_x ? 2.0 : 1.0, along_x ? 1.0 : 2.0});
    }
    const std::uint32_t small_pe0 = spec.n_m;
    const std::uint32_t large_mem0 = small_pe0 + n_small_pe;
    const std::uint32_t small_mem0 = large_mem0 + spec.n_m;
    for (std::uint32_t i = 0; i < spec.n_m; ++i) m.pairs.emplace_back(i, large_mem0 + i);
    for (std::uint32_t i = 0; i < n_small_pe; ++i) {
        const std::uint32_t a = (2 * i) % n_small_mem, b = (2 * i + 1) % n_small_mem;
        m.pairs.emplace_back(small_pe0 + i, small_mem0 + a);
        if (b != a) m.pairs.emplace_back(small_pe0 + i, small_mem0 + b);
    }

    detail::FormulaBuilder b;
    Formula& f = b.f;
    const auto nmod = static_cast<std::uint32_t>(m.modules.size());
    f.n_bool = nmod * m.bits_per_module();
    f.n_real = 2 * nmod;
    for (std::uint32_t j = 0; j < nmod; ++j) {
        for (std::uint32_t i = 0; i < m.mbits; ++i) f.names.bools.push_back("m_" + std::to_string(i) + "_" + std::to_string(j));
        for (std::uint32_t i = 0; i < m.lbits; ++i) f.names.bools.push_back("l_" + std::to_string(i) + "_" + std::to_string(j));
    }
    for (std::uint32_t j = 0; j < nmod; ++j) {
        f.names.reals.push_back("x_" + std::to_string(j));
        f.names.reals.push_back("y_" + std::to_string(j));
    }
    if (f.n_bool == 0) f.names.bools.clear();
    const auto X = PlacementMeta::x_index;
    const auto Y = PlacementMeta::y_index;

    for (const auto& [j, jp] : m.pairs) {
        for (std::uint32_t i = 0; i < m.mbits; ++i)
            f.constraints.push_back(make_expr(Expr::negate(detail::xor2(m.macro_bit(i, j), m.macro_bit(i, jp)))));
        const auto& a = m.modules[j];
        const auto& c = m.modules[jp];
        f.constraints.push_back(detail::unit(b.atom({{X(j), 1.0}, {X(jp), -1.0}}, Relation::Le, c.w)));
        f.constraints.push_back(detail::unit(b.atom({{X(jp), 1.0}, {X(j), -1.0}}, Relation::Le, a.w)));
        f.constraints.push_back(detail::unit(b.atom({{Y(j), 1.0}, {Y(jp), -1.0}}, Relation::Le, c.h)));
        f.constraints.push_back(detail::unit(b.atom({{Y(jp), 1.0}, {Y(j), -1.0}}, Relation::Le, a.h)));
    }
    for (std::uint32_t j = 0; j < nmod; ++j)
        for (std::uint32_t jp = j + 1; jp < nmod; ++jp) {
            std::vector<Expr> args;
            for (std::uint32_t i = 0; i < m.mbits; ++i) args.push_back(detail::xor2(m.macro_bit(i, j), m.macro_bit(i, jp)));
            for (std::uint32_t i = 0; i < m.lbits; ++i) args.push_back(detail::xor2(m.layer_bit(i, j), m.layer_bit(i, jp)));
            const auto& a = m.modules[j];
            const auto& c = m.modules[jp];
            args.push_back(Expr::leaf(Literal::atom(b.atom({{X(j), 1.0}, {X(jp), -1.0}}, Relation::Ge, c.w))));
            args.push_back(Expr::leaf(Literal::atom(b.atom({{X(jp), 1.0}, {X(j), -1.0}}, Relation::Ge, a.w))));
            args.push_back(Expr::leaf(Literal::atom(b.atom({{Y(j), 1.0}, {Y(jp), -1.0}}, Relation::Ge, c.h))));
            args.push_back(Expr::leaf(Literal::atom(b.atom({{Y(jp), 1.0}, {Y(j), -1.0}}, Relation::Ge, a.h))));
            f.constraints.push_back(make_expr(Expr::nary(Expr::Op::Or, std::move(args))));
        }
    for (std::uint32_t j = 0; j < nmod; ++j) {
        const auto& a = m.modules[j];
        f.constraints.push_back(detail::unit(b.atom({{X(j), 1.0}}, Relation::Ge, 0.0)));
        f.constraints.push_back(detail::unit(b.atom({{X(j), 1.0}}, Relation::Le, m.side - a.w)));
        f.constraints.push_back(detail::unit(b.atom({{Y(j), 1.0}}, Relation::Ge, 0.0)));
        f.constraints.push_back(detail::unit(b.atom({{Y(j), 1.0}}, Relation::Le, m.side - a.h)));
    }
    validate(f);
    return {std::move(f), std::move(m)};
}

// ---------------------------------------------------------------------------
// Domain verification

struct DomainReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::uint32_t decode_index(const Assignment& asg, std::uint32_t first, std::uint32_t bits) {
    std::uint32_t id = 0;
    for (std::uint32_t i = 0; i < bits; ++i)
        if (is_true(asg.x[first + i])) id |= 1u << i;
    return id;
}

/// Same floating-point expression as the corresponding atom, so the two
/// checkers round identically: fl(u - v) >= c.
inline bool diff_ge(double u, double v, double c) { return u - v >= c; }
inline bool diff_le(double u, double v, double c) { return u - v <= c; }

}  // namespace detail

inline DomainReport verify_scheduling(const SchedulingMeta& m, const Assignment& asg) {
    if (asg.x.size() != std::size_t{m.n_j} * m.bits || asg.y.size() != m.n_j)
        throw InvalidArgument("assignment does not match the scheduling instance");
    DomainReport rep;
    std::vector<std::uint32_t> worker(m.n_j);
    for (std::uint32_t j = 0; j < m.n_j; ++j) worker[j] = detail::decode_index(asg, m.bool_index(0, j), m.bits);
    const auto& y = asg.y;
    for (const auto& [j, jp] : m.deps)
        if (!detail::diff_ge(y[j], y[jp], m.t[jp]))
            rep.violations.push_back("dependency: job " + std::to_string(j) + " starts before job " +
                                     std::to_string(jp) + " finishes");
    for (std::uint32_t j = 0; j < m.n_j; ++j)
        for (std::uint32_t jp = j + 1; jp < m.n_j; ++jp)
            if (worker[j] == worker[jp] && !detail::diff_ge(y[j], y[jp], m.t[jp]) &&
                !detail::diff_ge(y[jp], y[j], m.t[j]))
                rep.violations.push_back("overlap: jobs " + std::to_string(j) + " and " + std::to_string(jp) +
                                         " on worker " + std::to_string(worker[j]));
    for (std::uint32_t j = 0; j < m.n_j; ++j) {
        const auto w = worker[j];
        if (!(y[j] >= m.d[w] && y[j] <= m.d[w] + m.T - m.t[j]))
            rep.violations.push_back("window: job " + std::to_string(j) + " outside the active window of worker " +
                                     std::to_string(w));
    }
    return rep;
}

inline DomainReport verify_placement(const PlacementMeta& m, const Assignment& asg) {
    const auto nmod = static_cast<std::uint32_t>(m.modules.size());
    if (asg.x.size() != std::size_t{nmod} * m.bits_per_module() || asg.y.size() != 2 * std::size_t{nmod})
        throw InvalidArgument("assignment does not match the placement instance");
    DomainReport rep;
    std::vector<std::uint32_t> macro(nmod), layer(nmod);
    for (std::uint32_t j = 0; j < nmod; ++j) {
        macro[j] = detail::decode_index(asg, m.macro_bit(0, j), m.mbits);
        layer[j] = detail::decode_index(asg, m.layer_bit(0, j), m.lbits);
    }
    auto x = [&](std::uint32_t j) { return asg.y[PlacementMeta::x_index(j)]; };
    auto y = [&](std::uint32_t j) { return asg.y[PlacementMeta::y_index(j)]; };
    for (const auto& [j, jp] : m.pairs) {
        const auto& a = m.modules[j];
        const auto& c = m.modules[jp];
        if (macro[j] != macro[jp])
            rep.violations.push_back("routing: modules " + std::to_string(j) + " and " + std::to_string(jp) +
                                     " in different macros");
        if (!(detail::diff_le(x(j), x(jp), c.w) && detail::diff_le(x(jp), x(j), a.w) &&
              detail::diff_le(y(j), y(jp), c.h) && detail::diff_le(y(jp), y(j), a.h)))
            rep.violations.push_back("routing: modules " + std::to_string(j) + " and " + std::to_string(jp) +
                                     " are not adjacent");
    }
    for (std::uint32_t j = 0; j < nmod; ++j)
        for (std::uint32_t jp = j + 1; jp < nmod; ++jp) {
            if (macro[j] != macro[jp] || layer[j] != layer[jp]) continue;
            const auto& a = m.modules[j];
            const auto& c = m.modules[jp];
            if (!(detail::diff_ge(x(j), x(jp), c.w) || detail::diff_ge(x(jp), x(j), a.w) ||
                  detail::diff_ge(y(j), y(jp), c.h) || detail::diff_ge(y(jp), y(j), a.h)))
                rep.violations.push_back("overlap: modules " + std::to_string(j) + " and " + std::to_string(jp) +
                                         " on macro " + std::to_string(macro[j]) + ", layer " +
                                         std::to_string(layer[j]));
        }
    for (std::uint32_t j = 0; j < nmod; ++j) {
        const auto& a = m.modules[j];
        if (!(x(j) >= 0.0 && x(j) <= m.side - a.w && y(j) >= 0.0 && y(j) <= m.side - a.h))
            rep.violations.push_back("bounds: module " + std::to_string(j) + " leaves the macro");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// JSON sidecars

inline nlohmann::json to_json(const SchedulingMeta& m) {
    nlohmann::json j;
    j["family"] = "scheduling";
    j["n_w"] = m.n_w;
    j["n_j"] = m.n_j;
    j["bits"] = m.bits;
    j["d"] = m.d;
    j["t"] = m.t;
    j["deps"] = m.deps;
    j["T"] = m.T;
    j["greedy_worker"] = m.greedy_worker;
    j["greedy_start"] = m.greedy_start;
    j["implied_bounds"] = m.implied_bounds;
    return j;
}

inline nlohmann::json to_json(const PlacementMeta& m) {
    nlohmann::json j;
    j["family"] = "placement";
    j["n_m"] = m.n_m;
    j["n_l"] = m.n_l;
    j["mbits"] = m.mbits;
    j["lbits"] = m.lbits;
    j["side"] = m.side;
    j["unit_nm"] = kPlacementUnit;
    static constexpr const char* kKinds[] = {"large_pe", "small_pe", "large_mem", "small_mem"};
    for (const auto& mod : m.modules)
        j["modules"].push_back({{"kind", kKinds[static_cast<int>(mod.kind)]}, {"w", mod.w}, {"h", mod.h}});
    j["pairs"] = m.pairs;
    return j;
}

inline SchedulingMeta scheduling_meta_from_json(const nlohmann::json& j) {
    SchedulingMeta m;
    try {
        m.n_w = j.at("n_w");
        m.n_j = j.at("n_j");
        m.bits = j.at("bits");
        m.d = j.at("d").get<std::vector<double>>();
        m.t = j.at("t").get<std::vector<double>>();
        m.deps = j.at("deps").get<std::vector<std::pair<std::uint32_t, std::uint32_t>>>();
        m.T = j.at("T");
        m.greedy_worker = j.at("greedy_worker").get<std::vector<std::uint32_t>>();
        m.greedy_start = j.at("greedy_start").get<std::vector<double>>();
        m.implied_bounds = j.value("implied_bounds", false);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad scheduling metadata: ") + e.what());
    }
    if (m.d.size() != m.n_w || m.t.size() != m.n_j) throw InvalidArgument("bad scheduling metadata: sizes");
    return m;
}

inline PlacementMeta placement_meta_from_json(const nlohmann::json& j) {
    PlacementMeta m;
    try {
        m.n_m = j.at("n_m");
        m.n_l = j.at("n_l");
        m.mbits = j.at("mbits");
        m.lbits = j.at("lbits");
        m.side = j.at("side");
        for (const auto& mod : j.at("modules")) {
            const std::string k = mod.at("kind");
            const ModuleKind kind = k == "large_pe"    ? ModuleKind::LargePe
                                    : k == "small_pe"  ? ModuleKind::SmallPe
                                    : k == "large_mem" ? ModuleKind::LargeMem
                                                       : ModuleKind::SmallMem;
            m.modules.push_back({kind, mod.at("w").get<double>(), mod.at("h").get<double>()});
        }
        m.pairs = j.at("pairs").get<std::vector<std::pair<std::uint32_t, std::uint32_t>>>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad placement metadata: ") + e.what());
    }
    return m;
}

/// Dispatches on the sidecar's "family" field.
inline DomainReport verify_domain(const nlohmann::json& meta, const Assignment& asg) {
    const std::string family = meta.value("family", "");
    if (family == "scheduling") return verify_scheduling(scheduling_meta_from_json(meta), asg);
    if (family == "placement") return verify_placement(placement_meta_from_json(meta), asg);
    throw InvalidArgument("unknown benchmark family '" + family + "'");
}

}  // namespace fsmt
