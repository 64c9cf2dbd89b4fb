#pragma once

// Smoothed weighted objective C_sigma(a, b) = sum_c w_c (1 - 2 P[c satisfied]),
// its gradient, projected gradient descent to an eps-critical point, and the
// annealing loop with recency-weighted constraint reweighting.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsmt/errors.hpp"
#include "fsmt/model.hpp"
#include "fsmt/parallel.hpp"
#include "fsmt/projection.hpp"
#include "fsmt/rng.hpp"
#include "fsmt/smoothing.hpp"
#include "fsmt/xbdd.hpp"

namespace fsmt {

enum class Backend { Auto, Xbdd, Symmetric };
enum class EtaMode { Fixed, Lipschitz, Backtracking };

/// sigma values for 1/sigma = from, from + step, ..., to (inclusive, to within
/// half a step).
inline std::vector<double> sigma_schedule(double inv_from, double inv_to, double inv_step) {
    if (!(inv_from > 0.0) || !(inv_step > 0.0) || inv_to < inv_from)
        throw InvalidArgument("schedule needs 0 < from <= to and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((inv_to - inv_from) / inv_step + 0.5));
    std::vector<double> out;
    for (std::size_t i = 0; i <= n; ++i) out.push_back(1.0 / (inv_from + static_cast<double>(i) * inv_step));
    return out;
}

inline std::vector<double> default_schedule() { return sigma_schedule(0.1, 2.0, 0.1); }

struct SolverConfig {
    double eta = 0.1;  // fixed step, or the initial step when backtracking
    EtaMode eta_mode = EtaMode::Lipschitz;
    double eps = 1e-2;
    std::vector<double> schedule = default_schedule();
    std::size_t max_inner_iters = 1000;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;
    double time_limit_s = 0.0;  // 0: none
    double rho = 0.5;
    double gamma = 2.0;
    std::uint32_t tau = 1;
    double erwa_reset_to = 1.0;
    double weight_cap = 1e12;
    Backend backend = Backend::Auto;
    bool unit_atoms_in_objective = true;
    int snap_bits = 20;  // also try y snapped to a 2^-snap_bits grid when rounding; 0 disables
    std::size_t threads = 1;
    std::size_t node_cap = kDefaultNodeCap;

    void validate() const {
        if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
        if (schedule.empty()) throw InvalidArgument("schedule must not be empty");
        for (std::size_t i = 0; i < schedule.size(); ++i) {
            if (!(schedule[i] > 0.0)) throw InvalidArgument("schedule sigmas must be positive");
            if (i > 0 && !(schedule[i] < schedule[i - 1])) throw InvalidArgument("sigma schedule must strictly decrease");
        }
        if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in (0, 1)");
        if (!(gamma > 1.0)) throw InvalidArgument("gamma must exceed 1");
        if (tau == 0) throw InvalidArgument("tau must be positive");
        if (eta_mode == EtaMode::Fixed && !(eta > 0.0)) throw InvalidArgument("eta must be positive");
        if (max_inner_iters == 0) throw InvalidArgument("max_inner_iters must be positive");
        if (restarts == 0) throw InvalidArgument("restarts must be positive");
        if (snap_bits < 0 || snap_bits > 60) throw InvalidArgument("snap_bits must lie in [0, 60]");
        if (!(weight_cap > 1.0)) throw InvalidArgument("weight cap must exceed 1");
    }
};

struct Point {
    std::vector<double> a;
    std::vector<double> b;

    friend bool operator==(const Point&, const Point&) = default;
};

struct WeightState {
    std::vector<double> w;
    std::vector<double> h;

    explicit WeightState(std::size_t n = 0) : w(n, 1.0), h(n, 0.0) {}
};

struct LipschitzConstants {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double rho = 0.0;
    double L = 0.0;
};

struct Gradient {
    std::vector<double> ga;
    std::vector<double> gb;
};

/// A formula prepared for repeated evaluation: diagrams compiled once,
/// unit-atom halfspaces collected, a worker pool for per-constraint work.
class CompiledFormula {
public:
    explicit CompiledFormula(Formula f, Backend backend = Backend::Auto, bool unit_atoms_in_objective = true,
                             std::size_t threads = 1, std::size_t node_cap = kDefaultNodeCap)
        : f_(std::move(f)), pool_(std::make_unique<WorkerPool>(threads)) {
        validate(f_);
        std::vector<Halfspace> hs;
        std::size_t offset = 0;
        for (const auto& c : f_.constraints) {
            Entry e;
            e.slots = constraint_slots(c);
            e.offset = offset;
            offset += e.slots.size();
            const auto unit = c.unit_atom();
            if (unit) hs.push_back(halfspace_of(f_.atoms[*unit]));
            e.in_objective = unit_atoms_in_objective || !unit;
            e.use_dp = c.is_symmetric() && backend != Backend::Xbdd;
            if (!e.use_dp) {
                e.bdd = compile(c, {}, node_cap);
                e.slots = e.bdd.slots;
            }
            entries_.push_back(std::move(e));
        }
        slot_total_ = offset;
        projector_ = HalfspaceProjector(std::move(hs));
        beta_ = compute_beta();
    }

    const Formula& formula() const { return f_; }
    const HalfspaceProjector& projector() const { return projector_; }
    std::size_t threads() const { return pool_->threads(); }
    std::size_t dimension() const { return std::size_t{f_.n_bool} + f_.n_real; }
    bool in_objective(std::size_t c) const { return entries_[c].in_objective; }
    const Xbdd* diagram(std::size_t c) const { return entries_[c].use_dp ? nullptr : &entries_[c].bdd; }

    /// C_sigma at `pt`; sigma == 0 evaluates atoms exactly.
    double value(const Point& pt, double sigma, std::span<const double> w) const {
        return evaluate(pt, sigma, w, nullptr);
    }

    double value_and_gradient(const Point& pt, double sigma, std::span<const double> w, Gradient& g) const {
        if (!(sigma > 0.0)) throw InvalidArgument("gradient needs sigma > 0");
        return evaluate(pt, sigma, w, &g);
    }

    /// Projection onto the box and the unit-atom halfspaces, in place.
    ProjectionReport project(Point& pt) const {
        clamp_box(pt.a);
        return projector_.project(pt.b);
    }

    /// Largest real-variable multiplicity among the atoms of one constraint.
    double beta() const { return beta_; }

    LipschitzConstants lipschitz(double sigma, std::span<const double> w) const {
        if (!(sigma > 0.0)) throw InvalidArgument("Lipschitz constants need sigma > 0");
        LipschitzConstants k;
        for (std::size_t c = 0; c < entries_.size(); ++c)
            if (entries_[c].in_objective) k.alpha += w[c];
        k.beta = beta_;
        k.gamma = std::numbers::sqrt2 * k.beta / (std::sqrt(std::numbers::pi) * sigma);
        const double n = f_.n_bool, m = f_.n_real;
        k.rho = k.alpha * std::sqrt(n + m) * std::max(1.0, k.gamma);
        k.L = std::sqrt(n + m * k.gamma * k.gamma) * k.rho;
        return k;
    }

private:
    struct Entry {
        std::vector<Slot> slots;
        std::size_t offset = 0;
        bool in_objective = true;
        bool use_dp = false;
        Xbdd bdd;
    };

    double compute_beta() const {
        double beta = 0.0;
        std::vector<std::uint32_t> count(f_.n_real, 0);
        for (const auto& e : entries_) {
            std::vector<std::uint32_t> touched;
            for (const auto& s : e.slots) {
                if (s.lit.kind != VarKind::Atom) continue;
                for (const auto& [j, q] : f_.atoms[s.lit.index].coeffs) {
                    if (count[j]++ == 0) touched.push_back(j);
                    beta = std::max(beta, static_cast<double>(count[j]));
                }
            }
            for (auto j : touched) count[j] = 0;
        }
        return beta;
    }

    double evaluate(const Point& pt, double sigma, std::span<const double> w, Gradient* g) const {
        if (pt.a.size() != f_.n_bool || pt.b.size() != f_.n_real)
            throw InvalidArgument("point dimensions do not match formula");
        if (w.size() != entries_.size()) throw InvalidArgument("weight vector does not match constraint count");
        if (sigma < 0.0) throw InvalidArgument("sigma must be non-negative");
        const std::size_t k = f_.atoms.size();
        std::vector<double> d(k), scale(g ? k : 0);
        pool_->parallel_for(k, [&](std::size_t i) {
            const Atom& at = f_.atoms[i];
            if (sigma == 0.0) {
                d[i] = eval_atom(at, pt.b);
                return;
            }
            const double norm = at.norm();
            const double z = at.dot(pt.b) - at.rhs;
            const double s = std::numbers::sqrt2 * norm * sigma;
            d[i] = std::erf(z / s);
            if (g) scale[i] = 2.0 / (std::sqrt(std::numbers::pi) * s) * std::exp(-(z / s) * (z / s));
        });

        const std::size_t nc = entries_.size();
        std::vector<double> expect(nc, 0.0);
        std::vector<double> dvar(g ? slot_total_ : 0);  // dE_c / d(variable value) per slot
        pool_->parallel_for(nc, [&](std::size_t c) {
            const Entry& e = entries_[c];
            if (!e.in_objective) return;
            thread_local std::vector<double> p;
            p.resize(e.slots.size());
            for (std::size_t s = 0; s < e.slots.size(); ++s) {
                const Literal& l = e.slots[s].lit;
                p[s] = literal_prob(l.kind == VarKind::Bool ? pt.a[l.index] : d[l.index], l.negated);
            }
            if (e.use_dp) {
                const auto r = symmetric_cop(f_.constraints[c].symmetric(), e.slots, p);
                expect[c] = 1.0 - 2.0 * r.sat_prob;
                if (g)
                    for (std::size_t s = 0; s < e.slots.size(); ++s)
                        dvar[e.offset + s] = e.slots[s].lit.negated ? -r.grad[s] : r.grad[s];
            } else {
                auto fw = forward(e.bdd, p);
                expect[c] = 1.0 - 2.0 * fw.sat_prob;
                if (g) {
                    const auto gp = backward(e.bdd, fw.messages, p);
                    for (std::size_t s = 0; s < e.slots.size(); ++s)
                        dvar[e.offset + s] = e.slots[s].lit.negated ? -gp[s] : gp[s];
                }
            }
        });

        double total = 0.0;
        for (std::size_t c = 0; c < nc; ++c)
            if (entries_[c].in_objective) total += w[c] * expect[c];
        if (!g) return total;

        g->ga.assign(f_.n_bool, 0.0);
        g->gb.assign(f_.n_real, 0.0);
        std::vector<double> datom(k, 0.0);
        for (std::size_t c = 0; c < nc; ++c) {
            const Entry& e = entries_[c];
            if (!e.in_objective) continue;
            for (std::size_t s = 0; s < e.slots.size(); ++s) {
                const Literal& l = e.slots[s].lit;
                (l.kind == VarKind::Bool ? g->ga : datom)[l.index] += w[c] * dvar[e.offset + s];
            }
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (datom[i] == 0.0) continue;
            const double f = datom[i] * scale[i];
            for (const auto& [j, q] : f_.atoms[i].coeffs) g->gb[j] += f * q;
        }
        return total;
    }

    Formula f_;
    std::unique_ptr<WorkerPool> pool_;
    std::vector<Entry> entries_;
    std::size_t slot_total_ = 0;
    HalfspaceProjector projector_;
    double beta_ = 0.0;
};

// ---------------------------------------------------------------------------
// Free-function surface

inline double objective(const Formula& f, const Point& pt, double sigma, std::span<const double> w) {
    return CompiledFormula(f).value(pt, sigma, w);
}

inline Gradient gradient(const Formula& f, const Point& pt, double sigma, std::span<const double> w) {
    Gradient g;
    CompiledFormula(f).value_and_gradient(pt, sigma, w, g);
    return g;
}

inline LipschitzConstants lipschitz_constants(const Formula& f, double sigma, std::span<const double> w) {
    return CompiledFormula(f).lipschitz(sigma, w);
}

inline Point project(const Point& raw, const HalfspaceProjector& unit_atoms) {
    Point pt = raw;
    clamp_box(pt.a);
    unit_atoms.project(pt.b);
    return pt;
}

/// (pt - proj(pt - eta grad)) / eta, Booleans first then reals.
inline std::vector<double> grad_mapping(const CompiledFormula& cf, const Point& pt, double sigma,
                                        std::span<const double> w, double eta) {
    if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
    Gradient g;
    cf.value_and_gradient(pt, sigma, w, g);
    Point trial = pt;
    for (std::size_t i = 0; i < trial.a.size(); ++i) trial.a[i] -= eta * g.ga[i];
    for (std::size_t j = 0; j < trial.b.size(); ++j) trial.b[j] -= eta * g.gb[j];
    cf.project(trial);
    std::vector<double> out;
    out.reserve(cf.dimension());
    for (std::size_t i = 0; i < pt.a.size(); ++i) out.push_back((pt.a[i] - trial.a[i]) / eta);
    for (std::size_t j = 0; j < pt.b.size(); ++j) out.push_back((pt.b[j] - trial.b[j]) / eta);
    return out;
}

using Clock = std::chrono::steady_clock;

struct PgdOptions {
    double eta = 0.1;
    double eps = 1e-2;
    std::size_t max_iters = 1000;
    std::optional<Clock::time_point> deadline;
    std::function<void(const Point&, double)> on_step;  // called after every accepted step
    // Backtracking: halve eta until the projected step satisfies the
    // sufficient-decrease test, never below eta_min; then try doubling it on
    // the next iteration.
    bool backtrack = false;
    double eta_min = 0.0;
};

struct PgdResult {
    Point pt;
    std::size_t iters = 0;  // gradient evaluations
    bool converged = false;
    bool timed_out = false;
    double grad_norm = 0.0;  // |g| at the last evaluated point
    double objective = 0.0;  // C_sigma at the returned point
    double eta = 0.0;        // last step size used
};

/// Projected gradient descent from `start` (projected first).
inline PgdResult pgd(const CompiledFormula& cf, Point start, double sigma, std::span<const double> w,
                     const PgdOptions& opt) {
    if (!(opt.eta > 0.0)) throw InvalidArgument("eta must be positive");
    PgdResult r;
    r.pt = std::move(start);
    cf.project(r.pt);
    const double eps2 = opt.eps * opt.eps;
    double eta = opt.eta;
    Gradient g;
    Point trial;
    auto step = [&](double e) {
        trial = r.pt;
        for (std::size_t i = 0; i < trial.a.size(); ++i) trial.a[i] -= e * g.ga[i];
        for (std::size_t j = 0; j < trial.b.size(); ++j) trial.b[j] -= e * g.gb[j];
        cf.project(trial);
    };
    for (;;) {
        r.objective = cf.value_and_gradient(r.pt, sigma, w, g);
        ++r.iters;
        double trial_value = 0.0;
        for (;;) {
            step(eta);
            if (!opt.backtrack || eta <= opt.eta_min) break;
            // C(x+) <= C(x) + <grad, x+ - x> + |x+ - x|^2 / (2 eta)
            double lin = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < trial.a.size(); ++i) {
                const double dx = trial.a[i] - r.pt.a[i];
                lin += g.ga[i] * dx;
                sq += dx * dx;
            }
            for (std::size_t j = 0; j < trial.b.size(); ++j) {
                const double dx = trial.b[j] - r.pt.b[j];
                lin += g.gb[j] * dx;
                sq += dx * dx;
            }
            trial_value = cf.value(trial, sigma, w);
            if (trial_value <= r.objective + lin + sq / (2.0 * eta) + 1e-12 * std::fabs(r.objective)) break;
            eta = std::max(eta / 2.0, opt.eta_min);
        }
        r.eta = eta;
        double n2 = 0.0;
        for (std::size_t i = 0; i < trial.a.size(); ++i) {
            const double v = (r.pt.a[i] - trial.a[i]) / eta;
            n2 += v * v;
        }
        for (std::size_t j = 0; j < trial.b.size(); ++j) {
            const double v = (r.pt.b[j] - trial.b[j]) / eta;
            n2 += v * v;
        }
        r.grad_norm = std::sqrt(n2);
        if (n2 <= eps2) {
            r.converged = true;
            return r;
        }
        if (r.iters >= opt.max_iters) break;
        if (opt.deadline && Clock::now() >= *opt.deadline) {
            r.timed_out = true;
            break;
        }
        std::swap(r.pt, trial);
        if (opt.on_step) opt.on_step(r.pt, cf.value(r.pt, sigma, w));
        if (opt.backtrack) eta *= 2.0;
    }
    r.objective = cf.value(r.pt, sigma, w);
    return r;
}

// ---------------------------------------------------------------------------
// Annealing

enum class Status { Sat, Unknown };

struct StageRecord {
    std::size_t restart = 0;
    std::size_t stage = 0;  // 1-based
    double sigma = 0.0;
    double eta = 0.0;
    std::size_t iters = 0;
    bool converged = false;
    double grad_norm = 0.0;
    double objective = 0.0;
    std::size_t unsat_count = 0;
    std::string weights_digest;
    double wall_ms = 0.0;
};

struct SolveResult {
    Status status = Status::Unknown;
    Assignment assignment;  // the certified model, or the best rounded point
    std::size_t unsat_count = 0;
    std::size_t restarts_run = 0;
    std::size_t stages_run = 0;
    std::size_t total_iters = 0;
    bool timed_out = false;
    double seconds = 0.0;
};

using StageLogger = std::function<void(const StageRecord&)>;

/// FNV-1a over the weight bit patterns, as 16 hex digits.
inline std::string weights_digest(std::span<const double> w) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : w) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = kHex[h & 0xfu];
    return s;
}

/// sgn with sgn(0) = +1 (False).
inline std::vector<int> round_booleans(std::span<const double> a) {
    std::vector<int> x(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) x[i] = a[i] < 0.0 ? -1 : 1;
    return x;
}

inline std::vector<double> snap_to_grid(std::span<const double> b, int bits) {
    std::vector<double> out(b.begin(), b.end());
    for (double& v : out) v = std::ldexp(std::nearbyint(std::ldexp(v, bits)), -bits);
    return out;
}

/// a ~ U(-1, 1), b ~ N(0, 1), then projected.
inline Point random_start(const CompiledFormula& cf, Rng& rng) {
    Point pt;
    pt.a.resize(cf.formula().n_bool);
    pt.b.resize(cf.formula().n_real);
    for (double& v : pt.a) v = rng.uniform(-1.0, 1.0);
    for (double& v : pt.b) v = rng.normal();
    cf.project(pt);
    return pt;
}

namespace detail {

struct RoundOutcome {
    Assignment asg;
    FormulaEval eval;
};

/// Rounds (sgn(a), b); also tries the grid-snapped b. Returns the candidate
/// with fewer violated constraints, preferring the unsnapped one on ties.
inline RoundOutcome round_point(const Formula& f, const Point& pt, int snap_bits) {
    RoundOutcome best{{round_booleans(pt.a), pt.b}, {}};
    best.eval = eval_formula(f, best.asg);
    if (snap_bits > 0 && !best.eval.all_satisfied()) {
        Assignment s{best.asg.x, snap_to_grid(pt.b, snap_bits)};
        auto ev = eval_formula(f, s);
        if (ev.unsat_count() < best.eval.unsat_count()) best = {std::move(s), std::move(ev)};
    }
    return best;
}

}  // namespace detail

/// One annealing pass from `start` with fresh weights. Stops at the first
/// certified stage. `restart` only labels log records.
inline SolveResult anneal_from(const CompiledFormula& cf, Point start, const SolverConfig& cfg,
                               std::size_t restart = 0, const StageLogger& log = {},
                               std::optional<Clock::time_point> deadline = std::nullopt) {
    cfg.validate();
    const Formula& f = cf.formula();
    const auto t0 = Clock::now();
    WeightState ws(f.constraints.size());
    SolveResult res;
    res.unsat_count = std::numeric_limits<std::size_t>::max();
    Point pt = std::move(start);
    std::size_t t = 0;
    for (double sigma : cfg.schedule) {
        ++t;
        const double L = cf.lipschitz(sigma, ws.w).L;
        const double inv_l = L > 0.0 ? 1.0 / L : 1.0;
        const double eta = cfg.eta_mode == EtaMode::Lipschitz ? inv_l : cfg.eta;
        PgdOptions po{eta, cfg.eps, cfg.max_inner_iters, deadline, {}};
        if (cfg.eta_mode == EtaMode::Backtracking) {
            po.backtrack = true;
            po.eta_min = std::min(inv_l, cfg.eta);
        }
        auto pr = pgd(cf, std::move(pt), sigma, ws.w, po);
        pt = std::move(pr.pt);
        res.total_iters += pr.iters;
        ++res.stages_run;

        auto ro = detail::round_point(f, pt, cfg.snap_bits);
        const std::size_t unsat = ro.eval.unsat_count();
        if (unsat < res.unsat_count) {
            res.unsat_count = unsat;
            res.assignment = ro.asg;
        }
        // u_c = (f_c + 1) / 2: 1 for a violated constraint, 0 otherwise.
        for (std::size_t c = 0; c < ws.h.size(); ++c)
            ws.h[c] = cfg.rho * ws.h[c] + (ro.eval.satisfied[c] ? 0.0 : 1.0);
        if (unsat != 0 && t % cfg.tau == 0) {
            double wmax = 0.0;
            for (std::size_t c = 0; c < ws.w.size(); ++c) {
                ws.w[c] *= std::pow(cfg.gamma, ws.h[c]);
                ws.h[c] = cfg.erwa_reset_to;
                wmax = std::max(wmax, ws.w[c]);
            }
            if (wmax > cfg.weight_cap)
                for (double& w : ws.w) w = std::max(w / wmax, std::numeric_limits<double>::min());
        }
        if (log) {
            StageRecord rec;
            rec.restart = restart;
            rec.stage = t;
            rec.sigma = sigma;
            rec.eta = pr.eta;
            rec.iters = pr.iters;
            rec.converged = pr.converged;
            rec.grad_norm = pr.grad_norm;
            rec.objective = pr.objective;
            rec.unsat_count = unsat;
            rec.weights_digest = weights_digest(ws.w);
            rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
            log(rec);
        }
        if (unsat == 0) {
            res.status = Status::Sat;
            res.assignment = std::move(ro.asg);
            break;
        }
        if (pr.timed_out || (deadline && Clock::now() >= *deadline)) {
            res.timed_out = true;
            break;
        }
    }
    res.restarts_run = 1;
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return res;
}

/// Restarted annealing; the first certified assignment wins.
inline SolveResult anneal_solve(const CompiledFormula& cf, const SolverConfig& cfg, const StageLogger& log = {}) {
    cfg.validate();
    const auto t0 = Clock::now();
    std::optional<Clock::time_point> deadline;
    if (cfg.time_limit_s > 0.0)
        deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_limit_s));
    const Rng base(cfg.seed);
    SolveResult best;
    best.unsat_count = std::numeric_limits<std::size_t>::max();
    std::size_t stages = 0, iters = 0, runs = 0;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        Rng rng = base.split(r);
        auto res = anneal_from(cf, random_start(cf, rng), cfg, r, log, deadline);
        ++runs;
        stages += res.stages_run;
        iters += res.total_iters;
        const bool timed_out = res.timed_out;
        if (res.status == Status::Sat || res.unsat_count < best.unsat_count) best = std::move(res);
        if (best.status == Status::Sat) break;
        if (timed_out) {
            best.timed_out = true;
            break;
        }
    }
    best.restarts_run = runs;
    best.stages_run = stages;
    best.total_iters = iters;
    best.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (best.status == Status::Sat && !eval_formula(cf.formula(), best.assignment).all_satisfied())
        throw Error("internal error: certified assignment failed exact evaluation");
    return best;
}

inline SolveResult anneal_solve(const Formula& f, const SolverConfig& cfg, const StageLogger& log = {}) {
    const CompiledFormula cf(f, cfg.backend, cfg.unit_atoms_in_objective, cfg.threads, cfg.node_cap);
    return anneal_solve(cf, cfg, log);
}

}  // namespace fsmt
