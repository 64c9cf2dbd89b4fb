#pragma once

// Euclidean projection onto [-1,1]^n x {b : q_i . b <= q0_i for every unit atom}.
// The problem separates: the box part is a clamp, the real part is an
// intersection of halfspaces handled analytically for one halfspace and by
// Dykstra's alternating projections otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fsmt/model.hpp"

namespace fsmt {

struct Halfspace {
    std::vector<std::pair<std::uint32_t, double>> q;  // sparse, sorted
    double rhs = 0.0;

    double dot(std::span<const double> b) const {
        double s = 0.0;
        for (const auto& [j, c] : q) s += c * b[j];
        return s;
    }
    double norm2() const {
        double s = 0.0;
        for (const auto& [j, c] : q) s += c * c;
        return s;
    }
    friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

/// Closure of an atom's feasible side.
inline Halfspace halfspace_of(const Atom& a) { return Halfspace{a.coeffs, a.rhs}; }

inline void clamp_box(std::span<double> a) {
    for (double& v : a) v = std::clamp(v, -1.0, 1.0);
}

/// Analytic projection onto one halfspace, in place.
inline void project_halfspace(const Halfspace& h, std::span<double> b) {
    const double viol = h.dot(b) - h.rhs;
    if (viol <= 0.0) return;
    const double mu = viol / h.norm2();
    for (const auto& [j, c] : h.q) b[j] -= mu * c;
}

struct DykstraOptions {
    double tol = 1e-10;
    std::size_t max_sweeps = 10'000;
};

struct ProjectionReport {
    bool converged = true;
    std::size_t sweeps = 0;
};

class HalfspaceProjector {
public:
    HalfspaceProjector() = default;

    /// Duplicate halfspaces (equal after scaling to unit normal) are merged.
    explicit HalfspaceProjector(std::vector<Halfspace> hs, DykstraOptions opt = {}) : opt_(opt) {
        for (auto& h : hs) {
            const double n = std::sqrt(h.norm2());
            if (!(n > 0.0)) continue;
            Halfspace u = h;
            for (auto& [j, c] : u.q) c /= n;
            u.rhs /= n;
            if (std::any_of(unit_.begin(), unit_.end(), [&](const Halfspace& o) { return same_halfspace(o, u); }))
                continue;
            unit_.push_back(u);
            spaces_.push_back(std::move(h));
        }
        for (const auto& h : spaces_) norm2_.push_back(h.norm2());
    }

    std::size_t size() const { return spaces_.size(); }
    const std::vector<Halfspace>& halfspaces() const { return spaces_; }

    /// Largest violation q.b - q0 over all halfspaces, scaled by 1/|q|.
    double max_violation(std::span<const double> b) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < spaces_.size(); ++i)
            worst = std::max(worst, (spaces_[i].dot(b) - spaces_[i].rhs) / std::sqrt(norm2_[i]));
        return worst;
    }

    /// Projects `b` in place.
    ProjectionReport project(std::span<double> b) const {
        ProjectionReport rep;
        if (spaces_.empty()) return rep;
        if (spaces_.size() == 1) {
            project_halfspace(spaces_.front(), b);
            return rep;
        }
        if (max_violation(b) <= 0.0) return rep;

        // Dykstra with halfspace increments p_i = lambda_i * q_i.
        std::vector<double> lambda(spaces_.size(), 0.0);
        const double tol2 = opt_.tol * opt_.tol;
        for (rep.sweeps = 1; rep.sweeps <= opt_.max_sweeps; ++rep.sweeps) {
            double moved2 = 0.0;
            for (std::size_t i = 0; i < spaces_.size(); ++i) {
                const auto& h = spaces_[i];
                // z = b + lambda_i q ; new lambda = max(0, (q.z - q0) / |q|^2)
                const double qz = h.dot(b) + lambda[i] * norm2_[i];
                const double nl = std::max(0.0, (qz - h.rhs) / norm2_[i]);
                const double step = lambda[i] - nl;
                if (step != 0.0) {
                    for (const auto& [j, c] : h.q) b[j] += step * c;
                    moved2 += step * step * norm2_[i];
                }
                lambda[i] = nl;
            }
            if (moved2 <= tol2 && max_violation(b) <= opt_.tol) return rep;
        }
        rep.converged = false;
        rep.sweeps = opt_.max_sweeps;
        return rep;
    }

private:
    static bool same_halfspace(const Halfspace& x, const Halfspace& y) {
        constexpr double tol = 1e-12;
        if (x.q.size() != y.q.size() || std::fabs(x.rhs - y.rhs) > tol * std::max(1.0, std::fabs(x.rhs))) return false;
        for (std::size_t k = 0; k < x.q.size(); ++k)
            if (x.q[k].first != y.q[k].first || std::fabs(x.q[k].second - y.q[k].second) > tol) return false;
        return true;
    }

    DykstraOptions opt_;
    std::vector<Halfspace> spaces_;
    std::vector<Halfspace> unit_;
    std::vector<double> norm2_;
};

}  // namespace fsmt
