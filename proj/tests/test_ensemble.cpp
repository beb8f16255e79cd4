#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <vector>

#include "ldpcsec/ensemble.hpp"
#include "ldpcsec/json_io.hpp"
#include "ldpcsec/rng.hpp"

using namespace ldpcsec;

namespace {

DegreeDistribution regular(int l, int r) {
    return DegreeDistribution({{l, 1}}, {{r, 1}});
}

Rational q(const char* s) { return parse_rational(s); }

// Node-adjacency girth oracle, complete up to length 6.
int oracle_girth_up_to_6(const TannerGraph& g) {
    const int nv = g.n_vars();
    std::vector<std::set<int>> checks_of(nv);
    for (int v = 0; v < nv; ++v) {
        std::map<int, int> mult;
        for (int e = g.var_edges_begin(v); e < g.var_edges_end(v); ++e)
            ++mult[g.edge_check_node(e)];
        for (auto [c, m] : mult) {
            if (m >= 2) return 2;
            checks_of[v].insert(c);
        }
    }
    for (int u = 0; u < nv; ++u)
        for (int v = u + 1; v < nv; ++v) {
            int shared = 0;
            for (int c : checks_of[u]) shared += checks_of[v].count(c);
            if (shared >= 2) return 4;
        }
    auto adjacent = [&](int u, int v, int excluded) {
        for (int c : checks_of[u])
            if (c != excluded && checks_of[v].count(c)) return c;
        return -1;
    };
    for (int a = 0; a < nv; ++a)
        for (int b = a + 1; b < nv; ++b)
            for (int c = b + 1; c < nv; ++c) {
                for (int cab : checks_of[a]) {
                    if (!checks_of[b].count(cab)) continue;
                    const int cbc = adjacent(b, c, cab);
                    if (cbc < 0) continue;
                    for (int cca : checks_of[c])
                        if (cca != cab && cca != cbc && checks_of[a].count(cca)) return 6;
                }
            }
    return kGirthInfinity;
}

}  // namespace

TEST_CASE("node fractions", "[ensemble]") {
    CHECK(regular(3, 6).lambda_node() == std::vector<DegreeTerm>{{3, 1}});
    CHECK(regular(3, 6).rho_node() == std::vector<DegreeTerm>{{6, 1}});

    DegreeDistribution mixed({{2, q("1/2")}, {3, q("1/2")}}, {{6, 1}});
    const auto lt = mixed.lambda_node();
    REQUIRE(lt.size() == 2);
    CHECK(lt[0] == DegreeTerm{2, q("3/5")});
    CHECK(lt[1] == DegreeTerm{3, q("2/5")});
    Rational sum = 0;
    for (const auto& t : lt) sum += t.weight;
    CHECK(sum == 1);
    CHECK(mixed.avg_var_degree() == q("12/5"));
}

TEST_CASE("degree distribution validation", "[ensemble]") {
    CHECK_THROWS_AS(DegreeDistribution({{3, q("1/2")}}, {{6, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution({{3, 1}}, {{6, q("-1")}, {5, 2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution({{3, q("1/2")}, {3, q("1/2")}}, {{6, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution({{0, 1}}, {{6, 1}}), std::invalid_argument);
}

TEST_CASE("valid sizes", "[ensemble]") {
    CHECK(valid_sizes(regular(3, 6)) == 2);
    CHECK(valid_sizes(regular(3, 3)) == 1);
    CHECK(valid_sizes(regular(4, 4)) == 1);
    // node perspective (3/5, 2/5) over degrees {2,3} with all checks degree 4:
    // edge perspective lambda_2 = lambda_3 = 1/2. Smallest n with integral
    // counts on both sides is 5 (vars 3+2, |E| = 12, three degree-4 checks).
    DegreeDistribution mixed({{2, q("1/2")}, {3, q("1/2")}}, {{4, 1}});
    CHECK(mixed.lambda_node() == std::vector<DegreeTerm>{{2, q("3/5")}, {3, q("2/5")}});
    CHECK(valid_sizes(mixed) == 5);
    const EnsembleSpec spec{5, mixed, 0};
    spec.validate();
    CHECK(spec.edge_count() == 12);
    CHECK(spec.check_node_count() == 3);
}

TEST_CASE("ensemble spec counts and validation", "[ensemble]") {
    const EnsembleSpec spec{12, regular(3, 6), 0};
    spec.validate();
    CHECK(spec.var_counts() == std::vector<std::pair<int, std::int64_t>>{{3, 12}});
    CHECK(spec.check_counts() == std::vector<std::pair<int, std::int64_t>>{{6, 6}});
    CHECK(spec.edge_count() == 36);
    CHECK_THROWS_AS((EnsembleSpec{3, regular(3, 6), 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((EnsembleSpec{12, regular(3, 6), 3}).validate(), std::invalid_argument);
}

TEST_CASE("sampling is deterministic and conserves sockets", "[ensemble]") {
    const EnsembleSpec spec{8, regular(3, 6), 0};
    const TannerGraph a = sample_graph(spec, 42);
    const TannerGraph b = sample_graph(spec, 42);
    CHECK(a.edge_pairs() == b.edge_pairs());
    const TannerGraph c = sample_graph(spec, 43);
    CHECK(a.edge_pairs() != c.edge_pairs());

    std::vector<char> used(a.n_edges(), 0);
    for (auto [vs, cs] : a.edge_pairs()) {
        CHECK(!used[cs]);
        used[cs] = 1;
    }

    // n=2 forces a single degree-6 check
    const TannerGraph tiny = sample_graph({2, regular(3, 6), 0}, 7);
    CHECK(tiny.n_checks() == 1);
    CHECK(tiny.n_edges() == 6);
}

TEST_CASE("sampled matchings are uniform (exhaustive at |E|=6)", "[ensemble]") {
    // 2 variables and 2 checks of degree 3: all 6! = 720 socket matchings
    // are distinguishable. Chi-square over the full outcome space.
    const EnsembleSpec spec{2, regular(3, 3), 0};
    const long samples = 200000;
    std::map<std::vector<std::pair<int, int>>, long> counts;
    for (long i = 0; i < samples; ++i)
        ++counts[sample_graph(spec, derive_seed({0xf00d, (std::uint64_t)i})).edge_pairs()];
    CHECK(counts.size() == 720);
    const double expected = double(samples) / 720;
    double chi2 = 0;
    for (const auto& [key, c] : counts)
        chi2 += (c - expected) * (c - expected) / expected;
    // df = 719; 0.999 quantile ~ 842
    CHECK(chi2 < 845.0);
}

TEST_CASE("sampled matchings are uniform (marginals at n=4 (3,6))", "[ensemble]") {
    const EnsembleSpec spec{4, regular(3, 6), 0};
    const long samples = 20000;
    std::vector<long> first(12, 0);
    std::vector<long> pairs(12 * 12, 0);
    for (long i = 0; i < samples; ++i) {
        const TannerGraph g = sample_graph(spec, derive_seed({0xbeef, (std::uint64_t)i}));
        const int cs0 = g.edge_check_socket(0);
        const int cs1 = g.edge_check_socket(1);
        ++first[cs0];
        ++pairs[cs0 * 12 + cs1];
    }
    double chi2 = 0;
    for (long c : first) {
        const double e = double(samples) / 12;
        chi2 += (c - e) * (c - e) / e;
    }
    CHECK(chi2 < 31.3);  // df = 11, 0.999 quantile

    double chi2p = 0;
    for (int a = 0; a < 12; ++a)
        for (int b = 0; b < 12; ++b) {
            if (a == b) {
                CHECK(pairs[a * 12 + b] == 0);  // a socket cannot repeat
                continue;
            }
            const double e = double(samples) / 132;
            const long c = pairs[a * 12 + b];
            chi2p += (c - e) * (c - e) / e;
        }
    CHECK(chi2p < 190.0);  // df = 131, 0.999 quantile
}

TEST_CASE("girth of hand-built graphs", "[ensemble]") {
    // two variables joined to the same two checks by simple edges
    const TannerGraph square({2, 2}, {2, 2}, {0, 2, 1, 3});
    CHECK(girth(square) == 4);

    // parallel edge
    const TannerGraph doubled({2}, {2}, {0, 1});
    CHECK(girth(doubled) == 2);

    // path: acyclic
    const TannerGraph path({1, 1}, {2}, {0, 1});
    CHECK(girth(path) == kGirthInfinity);

    // hexagon
    const TannerGraph hexagon({2, 2, 2}, {2, 2, 2}, {0, 2, 3, 4, 5, 1});
    CHECK(girth(hexagon) == 6);
    CHECK(girth(hexagon, 4) == kGirthInfinity);  // capped search
    CHECK(girth(hexagon, 6) == 6);
}

TEST_CASE("girth matches a node-adjacency oracle on random graphs", "[ensemble]") {
    for (int trial = 0; trial < 400; ++trial) {
        const TannerGraph g =
            sample_graph({8, regular(3, 3), 0}, derive_seed({0x917, (std::uint64_t)trial}));
        const int expected = oracle_girth_up_to_6(g);
        const int got = girth(g);
        if (expected <= 6)
            CHECK(got == expected);
        else
            CHECK(got > 6);
    }
    DegreeDistribution mixed({{2, q("1/2")}, {3, q("1/2")}}, {{4, 1}});
    for (int trial = 0; trial < 200; ++trial) {
        const TannerGraph g =
            sample_graph({10, mixed, 0}, derive_seed({0x918, (std::uint64_t)trial}));
        const int expected = oracle_girth_up_to_6(g);
        const int got = girth(g);
        if (expected <= 6)
            CHECK(got == expected);
        else
            CHECK(got > 6);
    }
}

TEST_CASE("regular girth fraction formula", "[ensemble]") {
    CHECK_THAT(regular_girth_fraction(3, 2),
               Catch::Matchers::WithinRel(std::exp(-2.0), 1e-12));
    CHECK_THAT(regular_girth_fraction(3, 4),
               Catch::Matchers::WithinRel(std::exp(-6.0), 1e-12));
    CHECK_THAT(regular_girth_fraction(4, 2),
               Catch::Matchers::WithinRel(std::exp(-4.5), 1e-12));
    CHECK_THROWS_AS(regular_girth_fraction(2, 4), std::invalid_argument);
    CHECK_THROWS_AS(regular_girth_fraction(3, 3), std::invalid_argument);
}

TEST_CASE("girth-restricted rejection sampling", "[ensemble]") {
    // no restriction: first try always accepted
    auto unrestricted = sample_girth_restricted({8, regular(3, 6), 2}, 5, 10);
    CHECK(unrestricted.tries_used == 1);

    // girth >= 4 on (3,3): acceptance ~ exp(-2)
    const EnsembleSpec spec{60, regular(3, 3), 4};
    long total_tries = 0;
    const int samples = 300;
    for (int i = 0; i < samples; ++i) {
        auto s = sample_girth_restricted(spec, derive_seed({0x6a, (std::uint64_t)i}), 100000);
        CHECK(girth(s.graph) >= 4);
        total_tries += s.tries_used;
    }
    const double mean_tries = double(total_tries) / samples;
    CHECK(mean_tries > 4.0);  // 1/exp(-2) ~ 7.4 asymptotically
    CHECK(mean_tries < 13.0);

    CHECK_THROWS_AS(sample_girth_restricted({50, regular(3, 6), 8}, 1, 40), TriesExhausted);
}

TEST_CASE("girth fraction agrees with the McKay formula at small scale", "[ensemble]") {
    // (3,3) at n=100: fraction of girth > 2 within 20% of exp(-2)
    const EnsembleSpec spec{100, regular(3, 3), 0};
    const int samples = 3000;
    int no_two_cycle = 0;
    for (int i = 0; i < samples; ++i) {
        const TannerGraph g = sample_graph(spec, derive_seed({0x7e57, (std::uint64_t)i}));
        no_two_cycle += girth(g, 2) == kGirthInfinity;
    }
    const double frac = double(no_two_cycle) / samples;
    CHECK(frac > std::exp(-2.0) * 0.8);
    CHECK(frac < std::exp(-2.0) * 1.2);
}

TEST_CASE("grouping to a regular ensemble", "[ensemble]") {
    // already (3,3)-regular: grouping with d = 3 keeps the node structure
    const TannerGraph reg = sample_graph({6, regular(3, 3), 0}, 11);
    const TannerGraph grouped = group_to_regular(reg);
    CHECK(grouped.n_vars() == reg.n_vars());
    CHECK(grouped.n_checks() == reg.n_checks());
    CHECK(grouped.n_edges() == reg.n_edges());
    auto node_multiset = [](const TannerGraph& g) {
        std::multiset<std::pair<int, int>> edges;
        for (int e = 0; e < g.n_edges(); ++e)
            edges.insert({g.edge_var_node(e), g.edge_check_node(e)});
        return edges;
    };
    CHECK(node_multiset(grouped) == node_multiset(reg));

    // half degree-2, half degree-4 variables, all checks degree 4: d = 4,
    // variable count drops to |E|/4
    DegreeDistribution half({{2, q("1/3")}, {4, q("2/3")}}, {{4, 1}});
    CHECK(half.lambda_node() == std::vector<DegreeTerm>{{2, q("1/2")}, {4, q("1/2")}});
    const EnsembleSpec spec{8, half, 0};
    spec.validate();
    CHECK(spec.edge_count() == 24);
    for (int trial = 0; trial < 50; ++trial) {
        const TannerGraph g = sample_graph(spec, derive_seed({0x6e0, (std::uint64_t)trial}));
        const TannerGraph r = group_to_regular(g);
        CHECK(r.n_edges() == g.n_edges());
        CHECK(r.n_vars() == 6);  // 24 / 4
        CHECK(r.n_checks() == 6);
        for (int v = 0; v < r.n_vars(); ++v) CHECK(r.var_degree(v) == 4);
    }

    // indivisible counts: a single degree-2 variable cannot be grouped to d=4
    const TannerGraph odd({2, 4, 4}, {4, 4, 2}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK_THROWS_AS(group_to_regular(odd), std::invalid_argument);
}

TEST_CASE("grouping never increases girth on random irregular samples", "[ensemble]") {
    DegreeDistribution mixed({{2, q("1/2")}, {3, q("1/2")}}, {{4, 1}});
    for (int trial = 0; trial < 200; ++trial) {
        const TannerGraph g =
            sample_graph({10, mixed, 0}, derive_seed({0x6e1, (std::uint64_t)trial}));
        const TannerGraph r = group_to_regular(g);
        CHECK(r.n_edges() == g.n_edges());
        CHECK(girth(r) <= girth(g));
    }
}

TEST_CASE("graph json round trip", "[ensemble]") {
    const TannerGraph g = sample_graph({8, regular(3, 6), 0}, 99);
    const json j = graph_to_json(g, 99);
    CHECK(j.at("n") == 8);
    CHECK(j.at("seed") == 99);
    const TannerGraph back = graph_from_json(j);
    CHECK(back.edge_pairs() == g.edge_pairs());
    CHECK(back.var_degrees() == g.var_degrees());

    json bad = j;
    bad["edges"][0] = {0, 0};  // duplicates another edge's check socket
    CHECK_THROWS_AS(graph_from_json(bad), std::invalid_argument);
}

TEST_CASE("degree polynomial parsing", "[ensemble]") {
    auto terms = parse_degree_polynomial("x^2");
    REQUIRE(terms.size() == 1);
    CHECK(terms[0] == DegreeTerm{3, 1});

    terms = parse_degree_polynomial("0.5x + 0.5x^2");
    REQUIRE(terms.size() == 2);
    CHECK(terms[0] == DegreeTerm{2, q("1/2")});
    CHECK(terms[1] == DegreeTerm{3, q("1/2")});

    terms = parse_degree_polynomial("1/4x+3/4x^3");
    REQUIRE(terms.size() == 2);
    CHECK(terms[0] == DegreeTerm{2, q("1/4")});
    CHECK(terms[1] == DegreeTerm{4, q("3/4")});

    CHECK_THROWS_AS(parse_degree_polynomial(""), std::invalid_argument);
    CHECK_THROWS(parse_degree_polynomial("x^"));
    CHECK_THROWS_AS(parse_degree_polynomial("y"), std::invalid_argument);
}

TEST_CASE("rng streams are deterministic and unbiased at the edges", "[ensemble]") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng r(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
        CHECK_FALSE(r.bernoulli(0.0));
        CHECK(r.bernoulli(1.0));
    }
    CHECK(derive_seed({1, 2, 3}) != derive_seed({1, 3, 2}));
}
