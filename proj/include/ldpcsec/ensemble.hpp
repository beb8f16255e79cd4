#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldpcsec/errors.hpp"
#include "ldpcsec/rational.hpp"
#include "ldpcsec/rng.hpp"

namespace ldpcsec {

struct DegreeTerm {
    int degree;
    Rational weight;

    bool operator==(const DegreeTerm& o) const {
        return degree == o.degree && weight == o.weight;
    }
};

/// Edge-perspective degree distribution pair (lambda, rho). lambda_i is the
/// fraction of edges attached to degree-i variable nodes. All bookkeeping is
/// exact rational arithmetic so node counts and edge balances are integers,
/// not approximations.
class DegreeDistribution {
public:
    DegreeDistribution(std::vector<DegreeTerm> lambda, std::vector<DegreeTerm> rho)
        : lambda_(normalize(std::move(lambda), "lambda")),
          rho_(normalize(std::move(rho), "rho")) {}

    const std::vector<DegreeTerm>& lambda() const { return lambda_; }
    const std::vector<DegreeTerm>& rho() const { return rho_; }

    /// Node-perspective variable fractions: lt_i = (lambda_i/i) / sum_j(lambda_j/j).
    std::vector<DegreeTerm> lambda_node() const { return node_perspective(lambda_); }
    std::vector<DegreeTerm> rho_node() const { return node_perspective(rho_); }

    /// Average variable degree r1 = |E|/n = 1 / sum_i lambda_i / i.
    Rational avg_var_degree() const { return 1 / inv_degree_sum(lambda_); }
    Rational avg_check_degree() const { return 1 / inv_degree_sum(rho_); }

    /// r0 = m/n.
    Rational check_density() const { return avg_var_degree() * inv_degree_sum(rho_); }

    Rational design_rate() const { return 1 - check_density(); }

    int l_min() const { return lambda_.front().degree; }
    int l_max() const { return lambda_.back().degree; }
    int r_min() const { return rho_.front().degree; }
    int r_max() const { return rho_.back().degree; }

    bool single_var_degree() const { return lambda_.size() == 1; }

    /// lambda(y) = sum_i lambda_i y^{i-1}.
    double lambda_eval(double y) const { return poly_eval(lambda_, y); }
    double rho_eval(double y) const { return poly_eval(rho_, y); }

    bool operator==(const DegreeDistribution&) const = default;

private:
    static std::vector<DegreeTerm> normalize(std::vector<DegreeTerm> terms,
                                             const char* side) {
        std::sort(terms.begin(), terms.end(),
                  [](const DegreeTerm& a, const DegreeTerm& b) { return a.degree < b.degree; });
        Rational total = 0;
        std::vector<DegreeTerm> kept;
        for (const auto& t : terms) {
            if (t.degree < 1)
                throw std::invalid_argument(std::string(side) + ": degrees must be >= 1");
            if (t.weight < 0)
                throw std::invalid_argument(std::string(side) + ": weights must be >= 0");
            if (!kept.empty() && kept.back().degree == t.degree)
                throw std::invalid_argument(std::string(side) + ": duplicate degree");
            total += t.weight;
            if (t.weight > 0) kept.push_back(t);
        }
        if (total != 1)
            throw std::invalid_argument(std::string(side) + ": weights must sum to 1");
        if (kept.empty()) throw std::invalid_argument(std::string(side) + ": empty");
        return kept;
    }

    static Rational inv_degree_sum(const std::vector<DegreeTerm>& terms) {
        Rational s = 0;
        for (const auto& t : terms) s += t.weight / t.degree;
        return s;
    }

    static std::vector<DegreeTerm> node_perspective(const std::vector<DegreeTerm>& terms) {
        const Rational denom = inv_degree_sum(terms);
        std::vector<DegreeTerm> out;
        out.reserve(terms.size());
        for (const auto& t : terms) out.push_back({t.degree, (t.weight / t.degree) / denom});
        return out;
    }

    static double poly_eval(const std::vector<DegreeTerm>& terms, double y) {
        double acc = 0;
        for (const auto& t : terms) acc += to_double(t.weight) * std::pow(y, t.degree - 1);
        return acc;
    }

    std::vector<DegreeTerm> lambda_;
    std::vector<DegreeTerm> rho_;
};

inline std::pair<std::vector<DegreeTerm>, std::vector<DegreeTerm>> node_fractions(
    const DegreeDistribution& dist) {
    return {dist.lambda_node(), dist.rho_node()};
}

/// Smallest a such that every n = a*t yields integer variable-node counts
/// n*lt_i and integer check-node counts per degree.
inline std::int64_t valid_sizes(const DegreeDistribution& dist) {
    BigInt a = 1;
    for (const auto& t : dist.lambda_node())
        a = boost::multiprecision::lcm(a, boost::multiprecision::denominator(t.weight));
    const Rational r1 = dist.avg_var_degree();
    for (const auto& t : dist.rho()) {
        const Rational checks_per_n = r1 * t.weight / t.degree;
        a = boost::multiprecision::lcm(a, boost::multiprecision::denominator(checks_per_n));
    }
    if (a > BigInt(INT64_MAX)) throw std::overflow_error("valid_sizes: step too large");
    return a.convert_to<std::int64_t>();
}

/// An ensemble G(n, lambda, rho), optionally girth-restricted to G_{2k}.
/// min_girth = 0 means unrestricted; parallel edges count as 2-cycles, so
/// min_girth >= 4 already expurgates multi-edges.
struct EnsembleSpec {
    int n;
    DegreeDistribution dist;
    int min_girth = 0;

    void validate() const {
        if (n <= 0) throw std::invalid_argument("n must be positive");
        const std::int64_t a = valid_sizes(dist);
        if (n % a != 0)
            throw std::invalid_argument("n = " + std::to_string(n) +
                                        " is not a multiple of the ensemble size step " +
                                        std::to_string(a));
        if (min_girth < 0 || min_girth % 2 != 0)
            throw std::invalid_argument("min_girth must be a nonnegative even integer");
    }

    /// (degree, count) per variable degree, ascending.
    std::vector<std::pair<int, std::int64_t>> var_counts() const {
        std::vector<std::pair<int, std::int64_t>> out;
        for (const auto& t : dist.lambda_node()) {
            const Rational c = t.weight * n;
            out.push_back({t.degree, exact_int(c, "variable count")});
        }
        return out;
    }

    std::vector<std::pair<int, std::int64_t>> check_counts() const {
        const Rational r1 = dist.avg_var_degree();
        std::vector<std::pair<int, std::int64_t>> out;
        for (const auto& t : dist.rho()) {
            const Rational c = r1 * n * t.weight / t.degree;
            out.push_back({t.degree, exact_int(c, "check count")});
        }
        return out;
    }

    std::int64_t edge_count() const {
        std::int64_t e = 0;
        for (auto [deg, cnt] : var_counts()) e += std::int64_t(deg) * cnt;
        return e;
    }

    std::int64_t check_node_count() const {
        std::int64_t m = 0;
        for (auto [deg, cnt] : check_counts()) m += cnt;
        return m;
    }

private:
    static std::int64_t exact_int(const Rational& q, const char* what) {
        if (boost::multiprecision::denominator(q) != 1)
            throw std::invalid_argument(std::string(what) + " is not an integer at this n");
        return boost::multiprecision::numerator(q).convert_to<std::int64_t>();
    }
};

/// Bipartite multigraph realized as a perfect matching of variable sockets
/// to check sockets. Variable socket ids double as edge ids; edge e connects
/// variable socket e to check socket cs_of_edge[e]. Immutable after
/// construction and safe to share across threads.
class TannerGraph {
public:
    TannerGraph(std::vector<int> var_degrees, std::vector<int> check_degrees,
                std::vector<int> cs_of_edge)
        : var_degrees_(std::move(var_degrees)),
          check_degrees_(std::move(check_degrees)),
          cs_of_edge_(std::move(cs_of_edge)) {
        build_derived(true);
    }

    /// Reconstruct from explicit (var_socket, check_socket) pairs, e.g. from
    /// a serialized graph. Pairs may be listed in any order.
    static TannerGraph from_edge_pairs(std::vector<int> var_degrees,
                                       std::vector<int> check_degrees,
                                       const std::vector<std::pair<int, int>>& pairs) {
        std::vector<int> cs(pairs.size(), -1);
        for (const auto& [vs, csk] : pairs) {
            if (vs < 0 || vs >= static_cast<int>(pairs.size()) || cs[vs] != -1)
                throw std::invalid_argument("edge list is not a matching of variable sockets");
            cs[vs] = csk;
        }
        return TannerGraph(std::move(var_degrees), std::move(check_degrees), std::move(cs));
    }

    int n_vars() const { return static_cast<int>(var_degrees_.size()); }
    int n_checks() const { return static_cast<int>(check_degrees_.size()); }
    int n_edges() const { return static_cast<int>(cs_of_edge_.size()); }

    const std::vector<int>& var_degrees() const { return var_degrees_; }
    const std::vector<int>& check_degrees() const { return check_degrees_; }

    int var_degree(int v) const { return var_degrees_[v]; }
    int check_degree(int c) const { return check_degrees_[c]; }

    /// Half-open edge-id range of variable v.
    int var_edges_begin(int v) const { return var_off_[v]; }
    int var_edges_end(int v) const { return var_off_[v + 1]; }

    int edge_var_node(int e) const { return var_node_of_socket_[e]; }
    int edge_check_socket(int e) const { return cs_of_edge_[e]; }
    int edge_check_node(int e) const { return check_node_of_socket_[cs_of_edge_[e]]; }

    /// Edge ids incident to check c.
    std::pair<const int*, const int*> check_edges(int c) const {
        return {check_edges_.data() + check_edges_off_[c],
                check_edges_.data() + check_edges_off_[c + 1]};
    }

    std::vector<std::pair<int, int>> edge_pairs() const {
        std::vector<std::pair<int, int>> out(cs_of_edge_.size());
        for (int e = 0; e < n_edges(); ++e) out[e] = {e, cs_of_edge_[e]};
        return out;
    }

private:
    void build_derived(bool validate) {
        const std::size_t E = cs_of_edge_.size();
        std::int64_t vsum = 0, csum = 0;
        for (int d : var_degrees_) vsum += d;
        for (int d : check_degrees_) csum += d;
        if (vsum != csum || vsum != static_cast<std::int64_t>(E))
            throw std::invalid_argument("socket counts do not match edge count");

        var_off_.assign(var_degrees_.size() + 1, 0);
        for (std::size_t v = 0; v < var_degrees_.size(); ++v)
            var_off_[v + 1] = var_off_[v] + var_degrees_[v];
        check_off_.assign(check_degrees_.size() + 1, 0);
        for (std::size_t c = 0; c < check_degrees_.size(); ++c)
            check_off_[c + 1] = check_off_[c] + check_degrees_[c];

        var_node_of_socket_.resize(E);
        for (std::size_t v = 0; v < var_degrees_.size(); ++v)
            for (int s = var_off_[v]; s < var_off_[v + 1]; ++s)
                var_node_of_socket_[s] = static_cast<int>(v);
        check_node_of_socket_.resize(E);
        for (std::size_t c = 0; c < check_degrees_.size(); ++c)
            for (int s = check_off_[c]; s < check_off_[c + 1]; ++s)
                check_node_of_socket_[s] = static_cast<int>(c);

        if (validate) {
            std::vector<char> seen(E, 0);
            for (int cs : cs_of_edge_) {
                if (cs < 0 || cs >= static_cast<int>(E) || seen[cs])
                    throw std::invalid_argument("check sockets do not form a perfect matching");
                seen[cs] = 1;
            }
        }

        // CSR of edges per check, in edge-id order.
        check_edges_off_.assign(check_degrees_.size() + 1, 0);
        for (int e = 0; e < static_cast<int>(E); ++e)
            ++check_edges_off_[check_node_of_socket_[cs_of_edge_[e]] + 1];
        for (std::size_t c = 0; c < check_degrees_.size(); ++c)
            check_edges_off_[c + 1] += check_edges_off_[c];
        check_edges_.resize(E);
        std::vector<int> cursor(check_edges_off_.begin(), check_edges_off_.end() - 1);
        for (int e = 0; e < static_cast<int>(E); ++e) {
            const int c = check_node_of_socket_[cs_of_edge_[e]];
            check_edges_[cursor[c]++] = e;
        }
    }

    std::vector<int> var_degrees_, check_degrees_;
    std::vector<int> cs_of_edge_;
    std::vector<int> var_off_, check_off_;
    std::vector<int> var_node_of_socket_, check_node_of_socket_;
    std::vector<int> check_edges_off_, check_edges_;
};

/// Degree sequences of the spec in node order (degrees ascending).
inline std::vector<int> degree_sequence(const std::vector<std::pair<int, std::int64_t>>& counts) {
    std::vector<int> out;
    for (auto [deg, cnt] : counts)
        for (std::int64_t i = 0; i < cnt; ++i) out.push_back(deg);
    return out;
}

/// Draw one graph from the configuration ensemble G(n, lambda, rho): a
/// uniformly random permutation of the |E| check sockets. min_girth in the
/// spec is ignored here.
inline TannerGraph sample_graph(const EnsembleSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::vector<int> vdeg = degree_sequence(spec.var_counts());
    std::vector<int> cdeg = degree_sequence(spec.check_counts());
    const std::int64_t E = spec.edge_count();
    std::vector<int> perm(E);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::int64_t i = E - 1; i > 0; --i) {
        const std::uint64_t j = rng.below(static_cast<std::uint64_t>(i) + 1);
        std::swap(perm[i], perm[j]);
    }
    return TannerGraph(std::move(vdeg), std::move(cdeg), std::move(perm));
}

inline constexpr int kGirthInfinity = INT_MAX;

/// Length of the shortest cycle (a parallel edge pair is a 2-cycle), or
/// kGirthInfinity if the graph is acyclic. With cap > 0 the search stops
/// looking for cycles longer than cap and reports kGirthInfinity for them:
/// truncated BFS from every variable node, which is exact because every
/// cycle in a bipartite graph passes through a variable node.
inline int girth(const TannerGraph& g, int cap = 0) {
    const int nv = g.n_vars();
    const int nc = g.n_checks();
    int best = kGirthInfinity;

    std::vector<int> vdist(nv, -1), cdist(nc, -1);
    std::vector<int> vparent(nv, -1), cparent(nc, -1);
    std::vector<int> vstamp(nv, -1), cstamp(nc, -1);
    // queue entries: node encoded as v or nv + c
    std::vector<int> queue;
    queue.reserve(static_cast<std::size_t>(nv + nc));

    for (int root = 0; root < nv; ++root) {
        int target = best == kGirthInfinity ? (cap > 0 ? cap : INT_MAX - 2) : best - 2;
        if (cap > 0) target = std::min(target, cap);
        if (target < 2) break;
        int expand_limit = target / 2 - 1;

        queue.clear();
        queue.push_back(root);
        vdist[root] = 0;
        vparent[root] = -1;
        vstamp[root] = root;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int id = queue[head];
            const bool is_check = id >= nv;
            const int node = is_check ? id - nv : id;
            const int dist = is_check ? cdist[node] : vdist[node];
            if (dist > expand_limit) break;
            const int parent_edge = is_check ? cparent[node] : vparent[node];

            auto visit = [&](int e, int other, bool other_is_check) {
                if (e == parent_edge) return;
                int& ostamp = other_is_check ? cstamp[other] : vstamp[other];
                int& odist = other_is_check ? cdist[other] : vdist[other];
                if (ostamp != root) {
                    ostamp = root;
                    odist = dist + 1;
                    (other_is_check ? cparent[other] : vparent[other]) = e;
                    queue.push_back(other_is_check ? nv + other : other);
                } else {
                    const int cycle = dist + odist + 1;
                    if (cycle < best) {
                        best = cycle;
                        target = (cap > 0 ? std::min(best - 2, cap) : best - 2);
                        expand_limit = target / 2 - 1;
                    }
                }
            };

            if (is_check) {
                auto [b, e] = g.check_edges(node);
                for (const int* p = b; p != e; ++p) visit(*p, g.edge_var_node(*p), false);
            } else {
                for (int e = g.var_edges_begin(node); e < g.var_edges_end(node); ++e)
                    visit(e, g.edge_check_node(e), true);
            }
            if (best == 2) return 2;
        }
    }
    if (cap > 0 && best > cap) return kGirthInfinity;
    return best;
}

/// McKay asymptotic fraction of (d,d)-regular bipartite graphs with girth
/// strictly greater than g: exp(-sum_{s=1}^{g/2} (d-1)^{2s} / 2s).
inline double regular_girth_fraction(int d, int g) {
    if (d < 3) throw std::invalid_argument("regular_girth_fraction requires d >= 3");
    if (g < 2 || g % 2 != 0)
        throw std::invalid_argument("regular_girth_fraction requires even g >= 2");
    double sum = 0;
    for (int s = 1; s <= g / 2; ++s)
        sum += std::pow(double(d - 1), 2 * s) / (2 * s);
    return std::exp(-sum);
}

struct GirthRestrictedSample {
    TannerGraph graph;
    long tries_used;
};

/// Rejection-sample from the girth-restricted sub-ensemble G_{min_girth}.
/// Conditional on acceptance the law is exactly uniform over the
/// sub-ensemble. Throws TriesExhausted when max_tries graphs in a row fail
/// the girth test, which signals that the sub-ensemble fraction is too
/// small for rejection at this (g, n).
inline GirthRestrictedSample sample_girth_restricted(const EnsembleSpec& spec,
                                                     std::uint64_t seed, long max_tries) {
    spec.validate();
    for (long t = 1; t <= max_tries; ++t) {
        TannerGraph g = sample_graph(spec, derive_seed({seed, static_cast<std::uint64_t>(t)}));
        if (spec.min_girth <= 2) return {std::move(g), t};
        if (girth(g, spec.min_girth - 2) == kGirthInfinity) return {std::move(g), t};
    }
    throw TriesExhausted("no graph of girth >= " + std::to_string(spec.min_girth) +
                         " found in " + std::to_string(max_tries) + " tries (n=" +
                         std::to_string(spec.n) + ")");
}

/// Lemma-3 node grouping: merge d/i degree-i nodes (d = lcm of all degrees
/// present) into one degree-d node on each side. Preserves the edge count
/// and cannot increase the girth.
inline TannerGraph group_to_regular(const TannerGraph& g) {
    std::int64_t d = 1;
    for (int deg : g.var_degrees()) d = std::lcm<std::int64_t>(d, deg);
    for (int deg : g.check_degrees()) d = std::lcm<std::int64_t>(d, deg);

    auto group_side = [&](const std::vector<int>& degrees, const char* side) {
        std::vector<int> mapping(degrees.size());
        int next_group = 0;
        std::vector<int> fill_of_degree(static_cast<std::size_t>(d) + 1, 0);
        std::vector<int> group_of_degree(static_cast<std::size_t>(d) + 1, -1);
        for (std::size_t i = 0; i < degrees.size(); ++i) {
            const int deg = degrees[i];
            const int per_group = static_cast<int>(d / deg);
            if (group_of_degree[deg] < 0) {
                group_of_degree[deg] = next_group++;
                fill_of_degree[deg] = 0;
            }
            mapping[i] = group_of_degree[deg];
            if (++fill_of_degree[deg] == per_group) group_of_degree[deg] = -1;
        }
        for (std::size_t deg = 1; deg < group_of_degree.size(); ++deg)
            if (group_of_degree[deg] >= 0)
                throw std::invalid_argument(std::string(side) +
                                            " node counts are not divisible for grouping");
        return std::pair<std::vector<int>, int>{std::move(mapping), next_group};
    };

    auto [vmap, nv_new] = group_side(g.var_degrees(), "variable");
    auto [cmap, nc_new] = group_side(g.check_degrees(), "check");

    // Rebuild socket layout: new var sockets grouped by new node in edge-id
    // order, new check sockets assigned by per-node cursors.
    const int E = g.n_edges();
    std::vector<int> new_vdeg(nv_new, static_cast<int>(d));
    std::vector<int> new_cdeg(nc_new, static_cast<int>(d));
    std::vector<int> var_cursor(nv_new, 0), check_cursor(nc_new, 0);
    std::vector<int> var_base(nv_new), check_base(nc_new);
    for (int i = 0; i < nv_new; ++i) var_base[i] = static_cast<int>(i * d);
    for (int i = 0; i < nc_new; ++i) check_base[i] = static_cast<int>(i * d);
    std::vector<int> cs(E);
    for (int e = 0; e < E; ++e) {
        const int nv_node = vmap[g.edge_var_node(e)];
        const int nc_node = cmap[g.edge_check_node(e)];
        const int vs = var_base[nv_node] + var_cursor[nv_node]++;
        cs[vs] = check_base[nc_node] + check_cursor[nc_node]++;
    }
    return TannerGraph(std::move(new_vdeg), std::move(new_cdeg), std::move(cs));
}

}  // namespace ldpcsec
