#pragma once

#include <stdexcept>
#include <string>

namespace ldpcsec {

// Girth-restricted rejection sampling gave up: the target sub-ensemble is
// too thin at this (g, n).
struct TriesExhausted : std::runtime_error {
    explicit TriesExhausted(const std::string& what) : std::runtime_error(what) {}
};

// An exhaustive enumeration ran out of its node-expansion budget.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Not enough usable data points for a stable fit.
struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

// Brute-force enumeration requested beyond its hard size limit.
struct TooLarge : std::runtime_error {
    explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

// An iterative optimizer failed to reach its tolerance.
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ldpcsec
