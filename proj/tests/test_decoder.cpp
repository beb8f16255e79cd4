#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "ldpcsec/decoder.hpp"
#include "ldpcsec/ensemble.hpp"
#include "ldpcsec/rng.hpp"

using namespace ldpcsec;

namespace {

DegreeDistribution regular(int l, int r) {
    return DegreeDistribution({{l, 1}}, {{r, 1}});
}

// H = [[1,1,0],[0,1,1]] as a Tanner graph: v0-c0, v1-{c0,c1}, v2-c1.
TannerGraph chain_graph() { return TannerGraph({1, 2, 1}, {2, 2}, {0, 1, 2, 3}); }

ErasurePattern pattern_of(int n, std::vector<int> erased) {
    ErasurePattern p{n, std::move(erased)};
    p.validate();
    return p;
}

ErasurePattern pattern_from_mask(int n, std::uint32_t mask) {
    ErasurePattern p{n, {}};
    for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1) p.erased.push_back(i);
    return p;
}

// Ground truth for "pattern contains a nonempty stopping set" by subset DP.
std::vector<char> stopping_containment_table(const TannerGraph& g) {
    const int n = g.n_vars();
    const std::uint32_t total = std::uint32_t(1) << n;
    std::vector<char> contains(total, 0);
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        const auto p = pattern_from_mask(n, mask);
        if (is_stopping_set(g, p.erased)) {
            contains[mask] = 1;
            continue;
        }
        for (int v = 0; v < n && !contains[mask]; ++v)
            if ((mask >> v) & 1) contains[mask] |= contains[mask ^ (1u << v)];
    }
    return contains;
}

}  // namespace

TEST_CASE("peeling hand traces", "[decoder]") {
    const TannerGraph g = chain_graph();
    PeelWorkspace ws;

    CHECK(peel(g, pattern_of(3, {}), ws).success);

    const DecodeResult all = peel(g, pattern_of(3, {0, 1, 2}), ws);
    CHECK_FALSE(all.success);
    CHECK(all.residual == std::vector<int>{0, 1, 2});

    const DecodeResult two = peel(g, pattern_of(3, {0, 1}), ws);
    CHECK(two.success);
    CHECK(two.residual.empty());
}

TEST_CASE("stopping set predicate", "[decoder]") {
    const TannerGraph g = chain_graph();
    CHECK(is_stopping_set(g, std::vector<int>{}));
    CHECK_FALSE(is_stopping_set(g, std::vector<int>{0, 1}));
    CHECK(is_stopping_set(g, std::vector<int>{0, 1, 2}));

    // one variable tied to a single check by a double edge: induced degree 2
    const TannerGraph doubled({2}, {2}, {0, 1});
    CHECK(is_stopping_set(doubled, std::vector<int>{0}));
    const DecodeResult r = peel(doubled, pattern_of(1, {0}));
    CHECK_FALSE(r.success);
    CHECK(r.residual == std::vector<int>{0});
}

TEST_CASE("peel failure iff the pattern contains a stopping set (exhaustive)", "[decoder]") {
    PeelWorkspace ws;
    for (int trial = 0; trial < 5; ++trial) {
        const TannerGraph g =
            sample_graph({10, regular(3, 6), 0}, derive_seed({0xd0, (std::uint64_t)trial}));
        const auto contains = stopping_containment_table(g);
        for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
            const DecodeResult r = peel(g, pattern_from_mask(10, mask), ws);
            CHECK(r.success == !(mask && contains[mask]));
        }
    }
}

TEST_CASE("residual maximality and monotonicity", "[decoder]") {
    PeelWorkspace ws;
    Rng rng(0xd1);
    for (int trial = 0; trial < 200; ++trial) {
        const TannerGraph g =
            sample_graph({14, regular(3, 6), 0}, derive_seed({0xd2, (std::uint64_t)trial}));
        const ErasurePattern p = sample_erasures(14, 0.5, rng.next_u64());
        const DecodeResult r = peel(g, p, ws);
        if (!r.success) {
            CHECK(is_stopping_set(g, r.residual));
            // peeling the residual alone leaves it unchanged
            ErasurePattern pr{14, r.residual};
            const DecodeResult again = peel(g, pr, ws);
            CHECK_FALSE(again.success);
            CHECK(again.residual == r.residual);
        }
        // monotonicity: drop one erasure from a decodable superset
        if (r.success && !p.erased.empty()) {
            ErasurePattern sub = p;
            sub.erased.erase(sub.erased.begin() +
                             static_cast<long>(rng.below(sub.erased.size())));
            CHECK(peel(g, sub, ws).success);
        }
    }
}

TEST_CASE("stopping set enumeration matches a full subset scan", "[decoder]") {
    for (int trial = 0; trial < 3; ++trial) {
        const TannerGraph g =
            sample_graph({12, regular(3, 6), 0}, derive_seed({0xd3, (std::uint64_t)trial}));
        const auto counts = enumerate_stopping_sets(g, 12);
        std::vector<std::uint64_t> brute(13, 0);
        for (std::uint32_t mask = 0; mask < (1u << 12); ++mask) {
            const auto p = pattern_from_mask(12, mask);
            if (is_stopping_set(g, p.erased)) ++brute[p.erased.size()];
        }
        CHECK(counts == brute);
    }
}

TEST_CASE("enumeration conventions and single-check example", "[decoder]") {
    const TannerGraph tiny = sample_graph({2, regular(3, 6), 0}, 3);
    const auto counts = enumerate_stopping_sets(tiny, 2);
    REQUIRE(counts.size() == 3);
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 2);  // each single variable has all 3 sockets on the one check
    CHECK(counts[2] == 1);
    CHECK(enumerate_stopping_sets(tiny, 0) == std::vector<std::uint64_t>{1});
    CHECK(stopping_number(tiny) == 1);

    CHECK_THROWS_AS(enumerate_stopping_sets(tiny, 2, 2), BudgetExceeded);
}

TEST_CASE("stopping number of a graph with degree-1 checks everywhere", "[decoder]") {
    // v0 - {c0 (degree 1), c2}, v1 - {c1 (degree 1), c2}: no nonempty
    // stopping set exists.
    const TannerGraph g({2, 2}, {1, 1, 2}, {0, 2, 1, 3});
    CHECK(stopping_number(g) == kNoStoppingSet);
}

TEST_CASE("girth bound: s* >= k on girth-restricted samples", "[decoder]") {
    // girth >= 6 with l_min = 3 implies stopping number >= 3
    const EnsembleSpec spec{30, regular(3, 3), 6};
    for (int i = 0; i < 60; ++i) {
        auto s = sample_girth_restricted(spec, derive_seed({0xd4, (std::uint64_t)i}), 200000);
        CHECK(stopping_number(s.graph) >= 3);
    }
}

TEST_CASE("erasure sampling", "[decoder]") {
    CHECK(sample_erasures(50, 0.0, 1).erased.empty());
    CHECK(sample_erasures(50, 1.0, 1).erased.size() == 50);

    const ErasurePattern a = sample_erasures(100, 0.3, 9);
    const ErasurePattern b = sample_erasures(100, 0.3, 9);
    CHECK(a.erased == b.erased);

    // binomial band: 4 sigma around n*eps
    const int n = 10000;
    const double eps = 0.3;
    const double sigma = std::sqrt(n * eps * (1 - eps));
    for (int seed = 0; seed < 50; ++seed) {
        const auto p = sample_erasures(n, eps, derive_seed({0xd5, (std::uint64_t)seed}));
        CHECK(std::abs(double(p.erased.size()) - n * eps) < 4 * sigma);
    }

    CHECK_THROWS_AS(sample_erasures(10, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_erasures(10, 1.1, 1), std::invalid_argument);
}
