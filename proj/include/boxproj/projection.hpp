#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "boxproj/common.hpp"
#include "boxproj/select.hpp"

namespace boxproj {

// ── Types ───────────────────────────────────────────────────────────

/// Euclidean projection onto { x : sum(x) <= budget, 0 <= x_i <= bound_i }.
/// Targets must be nonnegative; bounds may contain +inf ("unbounded").
template <class Real = double>
struct ProjectionProblem {
    std::vector<Real> target;  // point being projected
    std::vector<Real> bound;   // per-coordinate upper bounds
    Real budget = 0;           // norm budget
};

enum class BreakKind : std::uint8_t {
    lower,  // threshold at which the coordinate reaches zero (value: v_i)
    upper,  // threshold below which it sits at its bound     (value: v_i - b_i)
};

/// One slope change of the threshold map theta -> attainable sum.
template <class Real = double>
struct Breakpoint {
    Real value;
    std::uint32_t index;
    BreakKind kind;
};

/// Running state of the breakpoint bisection. sum_lower/sum_upper only grow:
/// they hold coordinates already confirmed at zero / at their bound.
template <class Real = double>
struct ThetaSearchState {
    Real theta_lo;            // current uncertainty interval [lo, hi]
    Real theta_hi;
    Real sum_all;             // sum of targets in play
    Real sum_lower;           // sum of v_i over confirmed-zero coordinates
    Real sum_upper;           // sum of (v_i - b_i) over confirmed-at-bound coordinates
    std::size_t count_lower;
    std::size_t count_upper;
};

template <class Real = double>
struct ProjectionResult {
    std::vector<Real> x;
    Real theta = 0;             // threshold; multiplier of the budget constraint
    bool norm_inactive = false; // true when the clamp alone already fits the budget
    std::vector<std::uint32_t> lower_set;  // x_i = 0
    std::vector<std::uint32_t> upper_set;  // x_i = bound_i (effective)
    std::vector<std::uint32_t> free_set;   // 0 < x_i < bound_i
    std::vector<Real> lower_multipliers;   // for x >= 0
    std::vector<Real> upper_multipliers;   // for x <= bound
};

// ── Elementary operations ───────────────────────────────────────────

/// Per-coordinate min(bound_i, target_i): the largest value coordinate i can
/// take in any optimum, so downstream steps may assume bound <= target.
template <class Real>
std::vector<Real> effective_bounds(std::span<const Real> target, std::span<const Real> bound) {
    if (target.size() != bound.size())
        throw ShapeError("effective_bounds: target and bound lengths differ");
    std::vector<Real> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) out[i] = std::min(bound[i], target[i]);
    return out;
}

/// Solution induced by a threshold: x_i = clamp(v_i - theta, 0, b_i), with the
/// tie conventions v_i <= theta -> 0 and v_i - b_i >= theta -> b_i.
/// `bound` must already be effective.
template <class Real>
std::vector<Real> x_from_theta(std::span<const Real> target, std::span<const Real> bound, Real theta) {
    if (target.size() != bound.size())
        throw ShapeError("x_from_theta: target and bound lengths differ");
    std::vector<Real> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] <= theta)
            out[i] = Real(0);
        else if (target[i] - bound[i] >= theta)
            out[i] = bound[i];
        else
            out[i] = target[i] - theta;
    }
    return out;
}

/// Attainable sum at a threshold: sum_i x_from_theta(...)_i. Nonincreasing
/// and piecewise linear in theta, with slope changes at v_i and v_i - b_i.
template <class Real>
Real sum_from_theta(std::span<const Real> target, std::span<const Real> bound, Real theta) {
    if (target.size() != bound.size())
        throw ShapeError("sum_from_theta: target and bound lengths differ");
    long double acc = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] <= theta) continue;
        if (target[i] - bound[i] >= theta)
            acc += bound[i];
        else
            acc += target[i] - theta;
    }
    return static_cast<Real>(acc);
}

// ── Solver internals ────────────────────────────────────────────────

namespace detail {

template <class Real>
void validate_problem(std::span<const Real> v, std::span<const Real> b, Real z) {
    if (v.size() != b.size()) throw ShapeError("projection: target and bound lengths differ");
    if (v.empty()) throw ShapeError("projection: empty problem");
    if (std::isnan(z)) throw InvalidInputError("projection: budget is NaN");
    if (z < Real(0)) throw InvalidBudgetError("projection: negative budget");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= Real(0)) || std::isinf(v[i]))
            throw InvalidInputError("projection: target entry " + std::to_string(i) +
                                    " is not finite and nonnegative");
        if (std::isnan(b[i]) || b[i] < Real(0))
            throw InvalidInputError("projection: bound entry " + std::to_string(i) +
                                    " is negative or NaN");
    }
}

// Classify every coordinate at the final threshold and recover the KKT
// multipliers from stationarity: zeta_i = max(0, theta - v_i),
// gamma_i = max(0, v_i - b_i - theta).
template <class Real>
ProjectionResult<Real> assemble_result(std::span<const Real> v, std::span<const Real> b_eff,
                                       Real theta, bool norm_inactive) {
    const std::size_t n = v.size();
    ProjectionResult<Real> r;
    r.theta = theta;
    r.norm_inactive = norm_inactive;
    r.x.resize(n);
    r.lower_multipliers.assign(n, Real(0));
    r.upper_multipliers.assign(n, Real(0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::uint32_t>(i);
        if (v[i] <= theta) {
            r.x[i] = Real(0);
            r.lower_multipliers[i] = theta - v[i];
            r.lower_set.push_back(idx);
        } else if (v[i] - b_eff[i] >= theta) {
            r.x[i] = b_eff[i];
            r.upper_multipliers[i] = v[i] - b_eff[i] - theta;
            r.upper_set.push_back(idx);
        } else {
            r.x[i] = v[i] - theta;
            r.free_set.push_back(idx);
        }
    }
    return r;
}

// Breakpoint bisection on the merged v / (v - b) array.
//
// Invariants across rounds, with window = merged[win_lo, win_hi):
//   * every element left of the window has value <= theta_lo, every element
//     right of it has value >= theta_hi, and the window holds exactly the
//     breakpoints strictly inside (theta_lo, theta_hi);
//   * sum_lower counts v_i over lower breakpoints left of the window
//     (coordinates guaranteed zero), sum_upper counts (v_i - b_i) over upper
//     breakpoints right of it (coordinates guaranteed at their bound);
//   * the optimal threshold lies in (theta_lo, theta_hi).
//
// Each round selects the window median with worst-case linear selection,
// evaluates the attainable sum there from the running sums plus two
// corrections gathered during the partition pass itself, and discards half
// the window. Total work is therefore linear.
template <class Real, class RoundObserver>
Real theta_search_linear(std::span<const Real> v, std::span<const Real> b_eff, Real z,
                         RoundObserver&& observe) {
    std::vector<Breakpoint<Real>> merged;
    std::size_t active = 0;
    long double sum_all = 0;
    Real theta_lo = std::numeric_limits<Real>::infinity();
    Real theta_hi = -std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (b_eff[i] <= Real(0)) continue;  // degenerate: pinned at zero either way
        const auto idx = static_cast<std::uint32_t>(i);
        const Real gap = v[i] - b_eff[i];
        merged.push_back({v[i], idx, BreakKind::lower});
        merged.push_back({gap, idx, BreakKind::upper});
        sum_all += v[i];
        theta_lo = std::min(theta_lo, gap);
        theta_hi = std::max(theta_hi, v[i]);
        ++active;
    }

    long double sum_lower = 0, sum_upper = 0;
    std::size_t count_lower = 0, count_upper = 0;
    std::size_t win_lo = 0, win_hi = merged.size();
    constexpr auto key = [](const Breakpoint<Real>& e) { return e.value; };

    while (win_lo < win_hi) {
        std::span<Breakpoint<Real>> window(merged.data() + win_lo, win_hi - win_lo);
        const Real pivot = select_kth(window, window.size() / 2, key).value;

        // Partition the window around the pivot while accumulating the two
        // correction sums: lower breakpoints at or below it and upper
        // breakpoints at or above it.
        long double low_sum = 0, up_sum = 0;
        std::size_t low_cnt = 0, up_cnt = 0;
        std::size_t lt = 0, i = 0, gt = window.size();
        while (i < gt) {
            const Breakpoint<Real>& e = window[i];
            if (e.kind == BreakKind::lower) {
                if (e.value <= pivot) { low_sum += e.value; ++low_cnt; }
            } else {
                if (e.value >= pivot) { up_sum += e.value; ++up_cnt; }
            }
            if (e.value < pivot) {
                std::swap(window[i++], window[lt++]);
            } else if (e.value > pivot) {
                std::swap(window[i], window[--gt]);
            } else {
                ++i;
            }
        }

        const auto free_cnt = static_cast<long double>(active - count_lower - count_upper);
        const long double z_pivot = sum_all - sum_lower - sum_upper - free_cnt * pivot -
                                    (up_sum - static_cast<long double>(up_cnt) * pivot) -
                                    (low_sum - static_cast<long double>(low_cnt) * pivot);

        if (z_pivot > static_cast<long double>(z)) {
            // Threshold is strictly above the pivot; everything at or below it
            // on the lower side is confirmed zero.
            sum_lower += low_sum;
            count_lower += low_cnt;
            win_lo += gt;
            theta_lo = pivot;
        } else if (z_pivot < static_cast<long double>(z)) {
            sum_upper += up_sum;
            count_upper += up_cnt;
            win_hi = win_lo + lt;
            theta_hi = pivot;
        } else {
            observe(ThetaSearchState<Real>{pivot, pivot, static_cast<Real>(sum_all),
                                           static_cast<Real>(sum_lower), static_cast<Real>(sum_upper),
                                           count_lower, count_upper});
            return pivot;  // exact hit on a breakpoint
        }
        observe(ThetaSearchState<Real>{theta_lo, theta_hi, static_cast<Real>(sum_all),
                                       static_cast<Real>(sum_lower), static_cast<Real>(sum_upper),
                                       count_lower, count_upper});
    }

    // No breakpoints left inside (theta_lo, theta_hi): the bracketing segment
    // is a single linear piece.
    const std::size_t free_cnt = active - count_lower - count_upper;
    if (free_cnt == 0) return theta_lo;  // flat segment; left endpoint
    const long double theta =
        (sum_all - sum_lower - sum_upper - static_cast<long double>(z)) /
        static_cast<long double>(free_cnt);
    return std::clamp(static_cast<Real>(theta), theta_lo, theta_hi);
}

template <class Real, class RoundObserver>
ProjectionResult<Real> project_linear_impl(const ProjectionProblem<Real>& p, RoundObserver&& observe) {
    std::span<const Real> v(p.target);
    std::span<const Real> b(p.bound);
    validate_problem(v, b, p.budget);

    const std::vector<Real> b_eff = effective_bounds(v, b);
    long double clamp_sum = 0;
    for (Real be : b_eff) clamp_sum += be;
    if (static_cast<long double>(p.budget) >= clamp_sum)
        return assemble_result<Real>(v, b_eff, Real(0), true);

    const Real theta = theta_search_linear<Real>(v, b_eff, p.budget, observe);
    return assemble_result<Real>(v, b_eff, theta, false);
}

}  // namespace detail

// ── Solvers ─────────────────────────────────────────────────────────

/// Worst-case linear-time projection. When the clamp min(v, b) already fits
/// the budget the constraint is inactive and theta is reported as 0;
/// otherwise the returned x sums to the budget exactly.
template <class Real>
ProjectionResult<Real> project_ub_simplex_linear(const ProjectionProblem<Real>& p) {
    return detail::project_linear_impl(p, [](const ThetaSearchState<Real>&) {});
}

/// O(n log n) baseline with the identical contract: sort the 2n breakpoints,
/// walk the segments of the attainable-sum map until the budget is
/// bracketed, and solve the bracketing linear piece. Kept as an independent
/// implementation for differential testing.
template <class Real>
ProjectionResult<Real> project_ub_simplex_sorted(const ProjectionProblem<Real>& p) {
    std::span<const Real> v(p.target);
    std::span<const Real> b(p.bound);
    detail::validate_problem(v, b, p.budget);

    const std::vector<Real> b_eff = effective_bounds(v, b);
    long double clamp_sum = 0;
    for (Real be : b_eff) clamp_sum += be;
    if (static_cast<long double>(p.budget) >= clamp_sum)
        return detail::assemble_result<Real>(v, b_eff, Real(0), true);

    std::vector<Breakpoint<Real>> bps;
    bps.reserve(2 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (b_eff[i] <= Real(0)) continue;
        const auto idx = static_cast<std::uint32_t>(i);
        bps.push_back({v[i], idx, BreakKind::lower});
        bps.push_back({v[i] - b_eff[i], idx, BreakKind::upper});
    }
    std::sort(bps.begin(), bps.end(),
              [](const Breakpoint<Real>& a, const Breakpoint<Real>& c) { return a.value > c.value; });

    // Sweep theta downward. Between breakpoints the attainable sum is
    // at_bound_sum + free_sum - free_cnt * theta; crossing a lower breakpoint
    // moves its coordinate into the free group, crossing an upper breakpoint
    // moves it onto its bound.
    long double free_sum = 0, at_bound_sum = 0;
    std::size_t free_cnt = 0;
    Real prev = std::numeric_limits<Real>::infinity();
    std::size_t i = 0;
    while (i < bps.size()) {
        const Real t = bps[i].value;
        const long double sum_at_t = at_bound_sum + free_sum - static_cast<long double>(free_cnt) * t;
        if (sum_at_t >= static_cast<long double>(p.budget)) {
            // Bracketed on [t, prev].
            Real theta;
            if (free_cnt > 0) {
                theta = static_cast<Real>(
                    (at_bound_sum + free_sum - static_cast<long double>(p.budget)) /
                    static_cast<long double>(free_cnt));
                theta = std::clamp(theta, t, prev);
            } else {
                theta = t;  // flat segment; left endpoint
            }
            return detail::assemble_result<Real>(v, b_eff, theta, false);
        }
        for (; i < bps.size() && bps[i].value == t; ++i) {
            const Breakpoint<Real>& e = bps[i];
            if (e.kind == BreakKind::lower) {
                free_sum += v[e.index];
                ++free_cnt;
            } else {
                free_sum -= v[e.index];
                --free_cnt;
                at_bound_sum += b_eff[e.index];
            }
        }
        prev = t;
    }
    // Unreachable: below the smallest breakpoint the attainable sum is the
    // full clamp sum, which exceeds the budget on this path.
    throw std::logic_error("project_ub_simplex_sorted: budget not bracketed");
}

}  // namespace boxproj
