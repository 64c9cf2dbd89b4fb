#pragma once

// Relaxed variables -> slot probabilities.
//
// Booleans: randomized rounding, P[True] = (1 - a) / 2.
// Atoms:    Gaussian smoothing of the +-1 indicator under y ~ N(b, sigma^2 I),
//           d(b) = erf((q.b - q0) / (sqrt(2) |q| sigma)).
// Strictness plays no role here: the boundary has measure zero.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "fsmt/errors.hpp"
#include "fsmt/model.hpp"

namespace fsmt {

/// Probability that a relaxed Boolean rounds to True.
inline double round_prob(double a) {
    if (!(a >= -1.0 && a <= 1.0)) throw InvalidArgument("relaxed Boolean outside [-1, 1]");
    return (1.0 - a) / 2.0;
}

/// Probability that a literal whose relaxed value is `v` is True.
inline double literal_prob(double v, bool negated) { return (1.0 - (negated ? -v : v)) / 2.0; }

/// E[delta(y)] for y ~ N(b, sigma^2 I). sigma == 0 switches to the exact indicator.
inline double atom_smooth(const Atom& atom, std::span<const double> b, double sigma) {
    if (sigma < 0.0) throw InvalidArgument("sigma must be non-negative");
    if (sigma == 0.0) return static_cast<double>(eval_atom(atom, b));
    const double z = atom.dot(b) - atom.rhs;
    return std::erf(z / (std::numbers::sqrt2 * atom.norm() * sigma));
}

using SparseGrad = std::vector<std::pair<std::uint32_t, double>>;

/// d/db_j of atom_smooth; support equals the atom's support.
inline SparseGrad atom_smooth_grad(const Atom& atom, std::span<const double> b, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("smoothed gradient needs sigma > 0");
    const double norm = atom.norm();
    const double z = atom.dot(b) - atom.rhs;
    const double scale = std::numbers::sqrt2 / (std::sqrt(std::numbers::pi) * sigma * norm) *
                         std::exp(-(z * z) / (2.0 * sigma * sigma * norm * norm));
    SparseGrad g;
    g.reserve(atom.coeffs.size());
    for (const auto& [j, q] : atom.coeffs) g.emplace_back(j, q * scale);
    return g;
}

/// Half-width, in units of |q.b - q0| / |q|, of the band around an atom's
/// hyperplane where a unit-coefficient gradient component exceeds 1/beta.
/// Zero when the peak gradient sqrt(2/pi)/sigma is already <= 1/beta.
inline double transition_halfwidth(double sigma, double beta) {
    const double arg = 2.0 * beta * beta / (std::numbers::pi * sigma * sigma);
    return arg <= 1.0 ? 0.0 : sigma * std::sqrt(std::log(arg));
}

}  // namespace fsmt
