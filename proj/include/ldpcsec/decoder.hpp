#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldpcsec/ensemble.hpp"
#include "ldpcsec/errors.hpp"
#include "ldpcsec/rng.hpp"

namespace ldpcsec {

/// Set of erased variable positions. Indices are sorted and unique.
struct ErasurePattern {
    int n = 0;
    std::vector<int> erased;

    void validate() const {
        for (std::size_t i = 0; i < erased.size(); ++i) {
            if (erased[i] < 0 || erased[i] >= n)
                throw std::invalid_argument("erasure index out of range");
            if (i > 0 && erased[i] <= erased[i - 1])
                throw std::invalid_argument("erasure indices must be sorted and unique");
        }
    }
};

/// BEC(eps): each position erased independently with probability eps.
inline ErasurePattern sample_erasures(int n, double eps, std::uint64_t seed) {
    if (eps < 0 || eps > 1) throw std::invalid_argument("eps must be in [0,1]");
    ErasurePattern p;
    p.n = n;
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        if (rng.bernoulli(eps)) p.erased.push_back(i);
    return p;
}

struct DecodeResult {
    bool success = false;
    std::vector<int> residual;  // sorted; empty iff success
};

/// Scratch buffers for peel(); reuse across calls in Monte Carlo loops.
class PeelWorkspace {
public:
    void reset(const TannerGraph& g) {
        erased_count_.assign(g.n_checks(), 0);
        edge_xor_.assign(g.n_checks(), 0);
        is_erased_.assign(g.n_vars(), 0);
        unit_checks_.clear();
    }
    std::vector<int> erased_count_;
    std::vector<int> edge_xor_;
    std::vector<char> is_erased_;
    std::vector<int> unit_checks_;
};

/// Iterative erasure decoding: repeatedly resolve a check with exactly one
/// erased socket (parallel edges count with multiplicity, so a check seeing
/// one erased variable through a double edge is not a unit check). The
/// fixpoint is order-independent; the worklist makes it O(|E|). The residual
/// is the maximal stopping set contained in the erasure set.
inline DecodeResult peel(const TannerGraph& g, const ErasurePattern& pattern,
                         PeelWorkspace& ws) {
    if (pattern.n != g.n_vars())
        throw std::invalid_argument("erasure pattern length does not match graph");
    ws.reset(g);
    auto& count = ws.erased_count_;
    auto& exor = ws.edge_xor_;
    auto& erased = ws.is_erased_;
    auto& work = ws.unit_checks_;

    int remaining = 0;
    for (int v : pattern.erased) {
        erased[v] = 1;
        ++remaining;
        for (int e = g.var_edges_begin(v); e < g.var_edges_end(v); ++e) {
            const int c = g.edge_check_node(e);
            ++count[c];
            exor[c] ^= e;
        }
    }
    for (int c = 0; c < g.n_checks(); ++c)
        if (count[c] == 1) work.push_back(c);

    while (!work.empty()) {
        const int c = work.back();
        work.pop_back();
        if (count[c] != 1) continue;  // stale entry
        const int e = exor[c];        // xor of a single edge id is the id itself
        const int v = g.edge_var_node(e);
        if (!erased[v]) continue;
        erased[v] = 0;
        --remaining;
        for (int f = g.var_edges_begin(v); f < g.var_edges_end(v); ++f) {
            const int cc = g.edge_check_node(f);
            --count[cc];
            exor[cc] ^= f;
            if (count[cc] == 1) work.push_back(cc);
        }
    }

    DecodeResult result;
    result.success = remaining == 0;
    if (!result.success) {
        result.residual.reserve(remaining);
        for (int v : pattern.erased)
            if (erased[v]) result.residual.push_back(v);
    }
    return result;
}

inline DecodeResult peel(const TannerGraph& g, const ErasurePattern& pattern) {
    PeelWorkspace ws;
    return peel(g, pattern, ws);
}

/// Definitional stopping-set test: every check adjacent to U has induced
/// degree >= 2, counting parallel edges with multiplicity. The empty set is
/// a stopping set by convention.
inline bool is_stopping_set(const TannerGraph& g, std::span<const int> vars) {
    std::vector<int> induced(g.n_checks(), 0);
    for (int v : vars) {
        if (v < 0 || v >= g.n_vars()) throw std::invalid_argument("variable index out of range");
        for (int e = g.var_edges_begin(v); e < g.var_edges_end(v); ++e)
            ++induced[g.edge_check_node(e)];
    }
    for (int c = 0; c < g.n_checks(); ++c)
        if (induced[c] == 1) return false;
    return true;
}

inline constexpr std::int64_t kDefaultEnumBudget = 50'000'000;

namespace detail {

// Lexicographic include/exclude DFS over variables with check-violation
// pruning. A check is violated once it has exactly one chosen socket and no
// undecided socket left. `on_stopping` is called for every stopping set of
// size <= max_size (including the empty set).
template <typename Fn>
void enumerate_stopping_sets_impl(const TannerGraph& g, int max_size,
                                  std::int64_t budget, Fn&& on_stopping) {
    const int n = g.n_vars();
    const int nc = g.n_checks();
    std::vector<int> chosen_deg(nc, 0);
    std::vector<int> undecided_deg(nc, 0);
    for (int c = 0; c < nc; ++c) undecided_deg[c] = g.check_degree(c);
    std::vector<int> chosen;
    std::int64_t expansions = 0;

    // pending[c]: chosen_deg == 1; such a check must eventually gain a
    // second chosen socket, which is impossible once undecided_deg == 0.
    int violated = 0;  // checks with chosen_deg == 1 && undecided_deg == 0
    int pending = 0;   // checks with chosen_deg == 1

    auto adjust = [&](int c, int dc_chosen, int dc_undec) {
        const bool was_viol = chosen_deg[c] == 1 && undecided_deg[c] == 0;
        const bool was_pend = chosen_deg[c] == 1;
        chosen_deg[c] += dc_chosen;
        undecided_deg[c] += dc_undec;
        const bool is_viol = chosen_deg[c] == 1 && undecided_deg[c] == 0;
        const bool is_pend = chosen_deg[c] == 1;
        violated += int(is_viol) - int(was_viol);
        pending += int(is_pend) - int(was_pend);
    };

    auto rec = [&](auto&& self, int idx) -> void {
        if (++expansions > budget)
            throw BudgetExceeded("stopping-set enumeration budget exhausted (" +
                                 std::to_string(budget) + " nodes)");
        if (violated > 0) return;
        if (idx == n) {
            if (pending == 0) on_stopping(std::span<const int>(chosen));
            return;
        }
        // exclude idx
        for (int e = g.var_edges_begin(idx); e < g.var_edges_end(idx); ++e)
            adjust(g.edge_check_node(e), 0, -1);
        self(self, idx + 1);
        for (int e = g.var_edges_begin(idx); e < g.var_edges_end(idx); ++e)
            adjust(g.edge_check_node(e), 0, +1);

        // include idx
        if (static_cast<int>(chosen.size()) < max_size) {
            for (int e = g.var_edges_begin(idx); e < g.var_edges_end(idx); ++e)
                adjust(g.edge_check_node(e), +1, -1);
            chosen.push_back(idx);
            self(self, idx + 1);
            chosen.pop_back();
            for (int e = g.var_edges_begin(idx); e < g.var_edges_end(idx); ++e)
                adjust(g.edge_check_node(e), -1, +1);
        }
    };
    rec(rec, 0);
}

}  // namespace detail

/// Exact count of stopping sets per size s = 0..max_size. counts[0] is 1
/// (the empty set).
inline std::vector<std::uint64_t> enumerate_stopping_sets(
    const TannerGraph& g, int max_size, std::int64_t budget = kDefaultEnumBudget) {
    if (max_size < 0 || max_size > g.n_vars())
        throw std::invalid_argument("max_size out of range");
    std::vector<std::uint64_t> counts(max_size + 1, 0);
    detail::enumerate_stopping_sets_impl(
        g, max_size, budget,
        [&](std::span<const int> s) { ++counts[s.size()]; });
    return counts;
}

inline constexpr int kNoStoppingSet = INT_MAX;

/// Size of the smallest nonempty stopping set, by iterative deepening;
/// kNoStoppingSet if none exists.
inline int stopping_number(const TannerGraph& g, std::int64_t budget = kDefaultEnumBudget) {
    for (int s = 1; s <= g.n_vars(); ++s) {
        bool found = false;
        struct Found {};
        try {
            detail::enumerate_stopping_sets_impl(g, s, budget, [&](std::span<const int> set) {
                if (!set.empty()) {
                    found = true;
                    throw Found{};
                }
            });
        } catch (const Found&) {
        }
        if (found) return s;
    }
    return kNoStoppingSet;
}

}  // namespace ldpcsec
