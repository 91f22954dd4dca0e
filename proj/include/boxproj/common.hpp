#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace boxproj {

// ── Error taxonomy ──────────────────────────────────────────────────
//
// The CLI maps these onto distinct exit codes, so keep the hierarchy
// coarse: what went wrong, not where.

// Mismatched or empty dimensions.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// NaN targets, negative bounds, and similar domain violations.
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Negative norm budget.
struct InvalidBudgetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Rank outside the slice passed to select_kth.
struct RankError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// The feasible set is empty (minimal attainable norm exceeds the budget).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed numeric file; carries the 1-based offending line.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line_number)
        : std::runtime_error(what), line(line_number) {}
    std::size_t line;
};

/// Numeric comparison tolerance used by the bench agreement check and the
/// test suites. Overridable through the BOXPROJ_TOL environment variable.
inline double default_tolerance() {
    if (const char* env = std::getenv("BOXPROJ_TOL")) {
        char* end = nullptr;
        double tol = std::strtod(env, &end);
        if (end != env && tol > 0) return tol;
    }
    return 1e-9;
}

}  // namespace boxproj
