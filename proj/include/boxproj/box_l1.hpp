#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "boxproj/common.hpp"
#include "boxproj/projection.hpp"

namespace boxproj {

// ── Types ───────────────────────────────────────────────────────────

/// Euclidean projection onto { x : ||x||_1 <= budget, lower <= x <= upper }.
/// Bounds may be infinite; the target must be finite.
template <class Real = double>
struct BoxL1Problem {
    std::vector<Real> target;
    std::vector<Real> lower;
    std::vector<Real> upper;
    Real budget = 0;
};

enum class IntervalCase : std::uint8_t {
    negative,       // [lower, upper] entirely below zero: sign flip + shift
    positive,       // entirely above zero: shift by the lower bound
    zero_spanning,  // contains zero: restrict to the orthant of the target
};

/// Per-coordinate record of the reduction to nonnegative upper-bounded form:
/// canonical = sign * original - shift, original = sign * (canonical + shift).
template <class Real = double>
struct CanonicalTransform {
    struct Coord {
        Real sign;
        Real shift;
        IntervalCase kind;
    };
    std::vector<Coord> coords;
    Real adjusted_budget = 0;  // budget minus the norm already spent by the shifts

    std::vector<Real> to_canonical(std::span<const Real> x) const {
        std::vector<Real> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = coords[i].sign * x[i] - coords[i].shift;
        return out;
    }
    std::vector<Real> from_canonical(std::span<const Real> xc) const {
        std::vector<Real> out(xc.size());
        for (std::size_t i = 0; i < xc.size(); ++i) out[i] = coords[i].sign * (xc[i] + coords[i].shift);
        return out;
    }
};

template <class Real = double>
struct BoxL1Result {
    std::vector<Real> x;                 // solution in the original coordinates
    ProjectionResult<Real> canonical;    // solve of the reduced problem
    CanonicalTransform<Real> transform;
};

// ── Operations ──────────────────────────────────────────────────────

namespace detail {

template <class Real>
void validate_box_problem(std::span<const Real> v, std::span<const Real> lo, std::span<const Real> hi,
                          Real z) {
    if (v.size() != lo.size() || v.size() != hi.size())
        throw ShapeError("box_l1: target and bound lengths differ");
    if (v.empty()) throw ShapeError("box_l1: empty problem");
    if (std::isnan(z)) throw InvalidInputError("box_l1: budget is NaN");
    if (z < Real(0)) throw InvalidBudgetError("box_l1: negative budget");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw InvalidInputError("box_l1: target entry " + std::to_string(i) + " is not finite");
        if (std::isnan(lo[i]) || std::isnan(hi[i]))
            throw InvalidInputError("box_l1: bound entry " + std::to_string(i) + " is NaN");
        if (!(lo[i] <= hi[i]))
            throw InvalidInputError("box_l1: lower bound exceeds upper bound at entry " +
                                    std::to_string(i));
    }
}

}  // namespace detail

/// Reduces the general box-constrained problem to nonnegative upper-bounded
/// form, one coordinate at a time:
///   * interval below zero — flip the sign (distances and the L1 norm are
///     preserved), then shift by the flipped lower bound;
///   * interval above zero — shift by the lower bound;
///   * interval containing zero — the optimum shares the target's sign, so
///     keep only the one-sided range toward that sign.
/// Shifts consume budget: adjusted = budget - sum |shift|. A target lying
/// below its interval maps to canonical target 0 (the threshold is never
/// negative, so the reduced coordinate stays at zero either way).
template <class Real>
std::pair<ProjectionProblem<Real>, CanonicalTransform<Real>> canonicalize(const BoxL1Problem<Real>& p) {
    std::span<const Real> v(p.target);
    std::span<const Real> lo(p.lower);
    std::span<const Real> hi(p.upper);
    detail::validate_box_problem(v, lo, hi, p.budget);

    const std::size_t n = v.size();
    ProjectionProblem<Real> canon;
    canon.target.resize(n);
    canon.bound.resize(n);
    CanonicalTransform<Real> tf;
    tf.coords.resize(n);

    long double spent = 0;
    for (std::size_t i = 0; i < n; ++i) {
        typename CanonicalTransform<Real>::Coord c{};
        if (hi[i] < Real(0)) {
            c.kind = IntervalCase::negative;
            c.sign = Real(-1);
            c.shift = -hi[i];  // lower bound of the flipped interval
            canon.target[i] = std::max(Real(0), -v[i] - c.shift);
            canon.bound[i] = -lo[i] - c.shift;
        } else if (lo[i] > Real(0)) {
            c.kind = IntervalCase::positive;
            c.sign = Real(1);
            c.shift = lo[i];
            canon.target[i] = std::max(Real(0), v[i] - c.shift);
            canon.bound[i] = hi[i] - c.shift;
        } else {
            c.kind = IntervalCase::zero_spanning;
            c.sign = v[i] < Real(0) ? Real(-1) : Real(1);
            c.shift = Real(0);
            canon.target[i] = std::abs(v[i]);
            canon.bound[i] = v[i] < Real(0) ? -lo[i] : hi[i];
        }
        spent += std::abs(c.shift);
        tf.coords[i] = c;
    }

    const long double remaining = static_cast<long double>(p.budget) - spent;
    if (remaining < 0)
        throw InfeasibleError("box_l1: minimal attainable norm exceeds the budget");
    tf.adjusted_budget = static_cast<Real>(remaining);
    canon.budget = tf.adjusted_budget;
    return {std::move(canon), std::move(tf)};
}

/// Full pipeline: canonicalize, solve the reduced problem with the linear
/// solver, map back, and clamp into the box to guard reconstruction rounding.
template <class Real>
BoxL1Result<Real> project_box_l1_full(const BoxL1Problem<Real>& p) {
    auto [canon, tf] = canonicalize(p);
    BoxL1Result<Real> r;
    r.canonical = project_ub_simplex_linear(canon);
    r.x = tf.from_canonical(std::span<const Real>(r.canonical.x));
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const Real xi = std::clamp(r.x[i], p.lower[i], p.upper[i]);
        r.x[i] = xi == Real(0) ? Real(0) : xi;  // normalize -0 from flipped coordinates
    }
    r.transform = std::move(tf);
    return r;
}

template <class Real>
std::vector<Real> project_box_l1(const BoxL1Problem<Real>& p) {
    return project_box_l1_full(p).x;
}

}  // namespace boxproj
