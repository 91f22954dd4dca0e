#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "boxproj/common.hpp"
#include "boxproj/projection.hpp"

namespace boxproj {

// ── Brute-force active-set oracle ───────────────────────────────────

/// Exhaustive reference solver for the upper-bounded projection: enumerates
/// every assignment of coordinates to {zero, at-bound, free}, derives the
/// threshold each assignment implies, keeps the candidates that are
/// self-consistent and feasible, and returns the one with the smallest
/// objective. Exponential (3^n); intended as an independent test oracle and
/// deliberately shares no machinery with the production solvers.
template <class Real>
std::vector<Real> brute_force_project(std::span<const Real> target, std::span<const Real> bound,
                                      Real budget) {
    const std::size_t n = target.size();
    if (n != bound.size()) throw ShapeError("brute_force_project: length mismatch");
    if (n == 0) throw ShapeError("brute_force_project: empty problem");
    if (n > 12) throw ShapeError("brute_force_project: more than 12 coordinates");
    if (std::isnan(budget)) throw InvalidInputError("brute_force_project: budget is NaN");
    if (budget < Real(0)) throw InvalidBudgetError("brute_force_project: negative budget");

    std::vector<Real> cap(n);
    Real scale = std::isfinite(budget) ? std::max(Real(1), std::abs(budget)) : Real(1);
    for (std::size_t i = 0; i < n; ++i) {
        cap[i] = std::min(bound[i], target[i]);
        scale = std::max(scale, target[i]);
    }
    const Real tol = Real(1e-12) * scale;

    enum : std::uint8_t { kZero, kAtBound, kFree };
    std::vector<std::uint8_t> group(n, kZero);
    std::vector<Real> candidate(n), best_x;
    long double best_obj = std::numeric_limits<long double>::infinity();

    // Depth-first over assignments with running sums for the implied threshold.
    auto visit = [&](auto&& self, std::size_t depth, long double bound_sum, long double free_sum,
                     std::size_t free_cnt) -> void {
        if (depth == n) {
            Real theta;
            if (free_cnt > 0) {
                theta = static_cast<Real>((bound_sum + free_sum - static_cast<long double>(budget)) /
                                          static_cast<long double>(free_cnt));
            } else {
                // No free coordinate pins the threshold; any value separating
                // the two groups works, so take one and let the checks below
                // reject assignments with no separating threshold.
                Real lo_need = -std::numeric_limits<Real>::infinity();
                Real hi_need = std::numeric_limits<Real>::infinity();
                for (std::size_t i = 0; i < n; ++i) {
                    if (group[i] == kZero) lo_need = std::max(lo_need, target[i]);
                    else hi_need = std::min(hi_need, target[i] - cap[i]);
                }
                if (lo_need > hi_need + tol) return;
                theta = std::min(std::max(Real(0), lo_need), hi_need);
            }

            long double sum = 0, obj = 0;
            for (std::size_t i = 0; i < n; ++i) {
                Real xi;
                switch (group[i]) {
                    case kZero:
                        xi = Real(0);
                        if (target[i] > theta + tol) return;
                        break;
                    case kAtBound:
                        xi = cap[i];
                        if (target[i] - cap[i] < theta - tol) return;
                        break;
                    default:
                        xi = target[i] - theta;
                        if (theta < target[i] - cap[i] - tol || theta > target[i] + tol) return;
                        break;
                }
                if (xi < -tol || xi > cap[i] + tol) return;
                sum += xi;
                const long double d = static_cast<long double>(xi) - target[i];
                obj += d * d;
                candidate[i] = xi;
            }
            if (sum > static_cast<long double>(budget) + tol) return;
            if (obj < best_obj) {
                best_obj = obj;
                best_x = candidate;
            }
            return;
        }
        group[depth] = kZero;
        self(self, depth + 1, bound_sum, free_sum, free_cnt);
        group[depth] = kAtBound;
        self(self, depth + 1, bound_sum + cap[depth], free_sum, free_cnt);
        group[depth] = kFree;
        self(self, depth + 1, bound_sum, free_sum + target[depth], free_cnt + 1);
    };
    visit(visit, 0, 0, 0, 0);

    // The all-zero assignment is always feasible, so a candidate exists.
    return best_x;
}

// ── KKT certificate ─────────────────────────────────────────────────

/// Residuals of the first-order optimality system for the upper-bounded
/// projection. All residual fields are nonnegative; dual_feasibility is the
/// most negative multiplier (>= -tol for a pass).
template <class Real = double>
struct KktReport {
    Real stationarity_residual = 0;  // max |x_i - v_i + theta - zeta_i + gamma_i|
    Real primal_violation = 0;       // max bound / budget violation
    Real comp_slack_residual = 0;    // max |mult * slack| over all constraints
    Real dual_feasibility = 0;       // min over all multipliers (incl. theta)
    bool pass = false;
};

/// Checks a solver result against the problem it claims to solve. The
/// threshold and multipliers are taken from the result. Complementary
/// slackness of the budget constraint, theta * (budget - sum x), is folded
/// into comp_slack_residual so a wrong-threshold solution cannot pass.
template <class Real>
KktReport<Real> kkt_check(std::span<const Real> target, std::span<const Real> bound, Real budget,
                          const ProjectionResult<Real>& result, Real tol) {
    const std::size_t n = target.size();
    if (n != bound.size() || n != result.x.size() || n != result.lower_multipliers.size() ||
        n != result.upper_multipliers.size())
        throw ShapeError("kkt_check: length mismatch");

    KktReport<Real> rep;
    Real min_mult = result.theta;
    long double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Real x = result.x[i];
        const Real zeta = result.lower_multipliers[i];
        const Real gamma = result.upper_multipliers[i];
        sum += x;

        const Real stat = x - target[i] + result.theta - zeta + gamma;
        rep.stationarity_residual = std::max(rep.stationarity_residual, std::abs(stat));

        rep.primal_violation = std::max(rep.primal_violation, -x);
        if (std::isfinite(bound[i]))
            rep.primal_violation = std::max(rep.primal_violation, x - bound[i]);

        rep.comp_slack_residual = std::max(rep.comp_slack_residual, std::abs(zeta * x));
        if (gamma != Real(0))  // guard 0 * inf for unbounded coordinates
            rep.comp_slack_residual =
                std::max(rep.comp_slack_residual, std::abs(gamma * (bound[i] - x)));

        min_mult = std::min({min_mult, zeta, gamma});
    }
    rep.primal_violation = std::max(rep.primal_violation, static_cast<Real>(sum - budget));
    if (result.theta != Real(0))
        rep.comp_slack_residual = std::max(
            rep.comp_slack_residual, std::abs(result.theta * static_cast<Real>(budget - sum)));
    rep.dual_feasibility = min_mult;

    rep.pass = rep.stationarity_residual <= tol && rep.primal_violation <= tol &&
               rep.comp_slack_residual <= tol && rep.dual_feasibility >= -tol;
    return rep;
}

// ── Duality-gap certificate for the penalized problem ───────────────

/// Gap report for min ||x - v||^2 + sum w_i |x_i| + zeta^T (l - x)
///                                + gamma^T (x - b),
/// evaluated against the dual value at a feasible dual point mu (mu_i <= w_i).
template <class Real = double>
struct GapReport {
    Real primal_value = 0;
    Real dual_value = 0;
    Real gap = 0;     // primal - dual; nonnegative by weak duality
    Real gap_l1 = 0;  // gap of the same problem without the bound terms
    bool sufficient_condition_holds = false;  // mu >= gamma / 2 elementwise
};

template <class Real>
GapReport<Real> duality_gap(std::span<const Real> target, std::span<const Real> weights,
                            std::span<const Real> lower, std::span<const Real> upper,
                            std::span<const Real> x, std::span<const Real> lower_mult,
                            std::span<const Real> upper_mult, std::span<const Real> dual) {
    const std::size_t n = target.size();
    if (n == 0) throw ShapeError("duality_gap: empty problem");
    if (weights.size() != n || lower.size() != n || upper.size() != n || x.size() != n ||
        lower_mult.size() != n || upper_mult.size() != n || dual.size() != n)
        throw ShapeError("duality_gap: length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (lower_mult[i] < Real(0) || upper_mult[i] < Real(0))
            throw InvalidInputError("duality_gap: bound multipliers must be nonnegative");
        // The dual function is -inf unless |mu_i| <= weight_i: the inner
        // minimization of w|x| + mu x is unbounded otherwise.
        if (std::abs(dual[i]) > weights[i])
            throw InvalidInputError("duality_gap: dual point infeasible (|mu_i| > weight_i)");
    }

    long double primal = 0, primal_l1 = 0;
    long double dual_quad = 0, dual_lin = 0, cross = 0, diff_quad = 0, diff_lin = 0, const_bounds = 0;
    bool sufficient = true;
    for (std::size_t i = 0; i < n; ++i) {
        const long double d = static_cast<long double>(x[i]) - target[i];
        const long double diff = static_cast<long double>(lower_mult[i]) - upper_mult[i];
        primal_l1 += d * d + weights[i] * std::abs(x[i]);
        if (lower_mult[i] != Real(0)) primal += lower_mult[i] * (lower[i] - x[i]);
        if (upper_mult[i] != Real(0)) primal += upper_mult[i] * (x[i] - upper[i]);

        dual_quad += static_cast<long double>(dual[i]) * dual[i];
        dual_lin += static_cast<long double>(dual[i]) * target[i];
        cross += static_cast<long double>(dual[i]) * diff;
        diff_quad += diff * diff;
        diff_lin += diff * target[i];
        if (lower_mult[i] != Real(0)) const_bounds += static_cast<long double>(lower_mult[i]) * lower[i];
        if (upper_mult[i] != Real(0)) const_bounds -= static_cast<long double>(upper_mult[i]) * upper[i];

        if (!(dual[i] >= upper_mult[i] / Real(2))) sufficient = false;
    }
    primal += primal_l1;

    const long double dual_value =
        -dual_quad / 4 - dual_lin - cross / 2 - diff_quad / 4 - diff_lin + const_bounds;

    GapReport<Real> rep;
    rep.primal_value = static_cast<Real>(primal);
    rep.dual_value = static_cast<Real>(dual_value);
    rep.gap = static_cast<Real>(primal - dual_value);
    rep.gap_l1 = static_cast<Real>(primal_l1 + dual_quad / 4 + dual_lin);
    rep.sufficient_condition_holds = sufficient;
    return rep;
}

}  // namespace boxproj
