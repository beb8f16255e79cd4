#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ldpcsec/ensemble.hpp"
#include "ldpcsec/errors.hpp"
#include "ldpcsec/gf2.hpp"
#include "ldpcsec/rng.hpp"

namespace ldpcsec {

/// Parity-check matrix of the LDPC code defined by a Tanner graph. Parallel
/// edges cancel mod 2, so a double edge contributes a zero entry (peeling
/// still treats it as two sockets; the two views agree on decodability).
inline BitMatrix parity_check_matrix(const TannerGraph& g) {
    BitMatrix h(g.n_checks(), g.n_vars());
    for (int e = 0; e < g.n_edges(); ++e) {
        const int c = g.edge_check_node(e);
        const int v = g.edge_var_node(e);
        h.set(c, v, !h.get(c, v));
    }
    return h;
}

/// Coset coding scheme over the dual of an LDPC code with parity-check
/// matrix H_L: the transmitted code C is the row space of H_L (generator G),
/// and the k-bit message is the syndrome under Hsec, a basis of the LDPC
/// code itself. G * Hsec^T = 0, rank(G) = n-k, rank(Hsec) = k = n - rank(H_L).
struct CosetCode {
    int n = 0;
    int k = 0;
    BitMatrix G;     // (n-k) x n, generator of C
    BitMatrix Hsec;  // k x n, parity check of C / generator of the LDPC code
};

inline CosetCode build_coset_code(const BitMatrix& h_ldpc) {
    CosetCode code;
    code.n = static_cast<int>(h_ldpc.cols());
    code.G = h_ldpc.row_basis();
    code.Hsec = h_ldpc.nullspace_basis();
    code.k = code.n - static_cast<int>(code.G.rows());
    if (code.G.rows() == 0)
        throw std::invalid_argument("build_coset_code: H has rank 0");
    return code;
}

/// Transmit a k-bit message as a uniformly random member of the coset
/// {x : Hsec x = message}.
inline BitVector encode(const CosetCode& code, const BitVector& message, Rng& rng) {
    if (static_cast<int>(message.size()) != code.k)
        throw std::invalid_argument("encode: message length != k");
    auto x = code.Hsec.solve(message);
    // Hsec has full row rank, so every syndrome is reachable.
    BitVector word = std::move(*x);
    for (std::size_t r = 0; r < code.G.rows(); ++r)
        if (rng.next_u64() & 1) {
            BitVector row = code.G.row_vector(r);
            word.xor_with(row);
        }
    return word;
}

inline BitVector encode(const CosetCode& code, const BitVector& message, std::uint64_t seed) {
    Rng rng(seed);
    return encode(code, message, rng);
}

/// Bob's decoder: the syndrome of the received word.
inline BitVector decode_bob(const CosetCode& code, const BitVector& word) {
    if (word.size() != static_cast<std::size_t>(code.n))
        throw std::invalid_argument("decode_bob: word length != n");
    return code.Hsec.multiply(word);
}

/// Mask with bit i set iff i is in `indices`.
inline BitVector index_mask(int n, std::span<const int> indices) {
    BitVector mask(static_cast<std::size_t>(n));
    for (int i : indices) {
        if (i < 0 || i >= n) throw std::out_of_range("index out of range");
        mask.set(static_cast<std::size_t>(i), true);
    }
    return mask;
}

/// Ozarow-Wyner test: the eavesdropper with these unerased positions learns
/// nothing (H(M|z) = k) iff the corresponding columns of G have full rank.
inline bool gmu_full_rank(const CosetCode& code, const BitVector& unerased_mask) {
    return code.G.rank_of_masked_columns(unerased_mask) == code.G.rows();
}

/// Exact eavesdropper equivocation H(M|z) in bits for an erasure pattern:
/// the rank of the erased columns of Hsec. Because the transmitted word is
/// uniform on {0,1}^n, M given the observation is uniform on an affine space
/// of exactly this dimension. Validated against leakage_brute_force.
inline int equivocation_exact(const CosetCode& code, const BitVector& erased_mask) {
    return static_cast<int>(code.Hsec.rank_of_masked_columns(erased_mask));
}

/// Exact leakage I(M; Z) in bits for a fixed erasure pattern by enumerating
/// all 2^n transmitted words. Oracle only; n <= 24.
inline double leakage_brute_force(const CosetCode& code, const BitVector& erased_mask) {
    if (code.n > 24) throw TooLarge("leakage_brute_force limited to n <= 24");
    std::uint64_t unerased = 0;
    for (int i = 0; i < code.n; ++i)
        if (!erased_mask.get(i)) unerased |= std::uint64_t(1) << i;
    std::vector<std::uint64_t> hsec_rows(code.k);
    for (int r = 0; r < code.k; ++r)
        hsec_rows[r] = code.Hsec.row(r)[0];

    // z-observation -> message -> count
    std::map<std::uint64_t, std::map<std::uint64_t, std::uint64_t>> table;
    const std::uint64_t total = std::uint64_t(1) << code.n;
    for (std::uint64_t x = 0; x < total; ++x) {
        std::uint64_t msg = 0;
        for (int r = 0; r < code.k; ++r)
            msg |= std::uint64_t(__builtin_parityll(hsec_rows[r] & x)) << r;
        ++table[x & unerased][msg];
    }
    double cond_entropy = 0;  // H(M|Z) in bits
    for (const auto& [z, msgs] : table) {
        std::uint64_t zcount = 0;
        for (const auto& [m, c] : msgs) zcount += c;
        double hz = 0;
        for (const auto& [m, c] : msgs) {
            const double p = double(c) / double(zcount);
            hz -= p * std::log2(p);
        }
        cond_entropy += (double(zcount) / double(total)) * hz;
    }
    return double(code.k) - cond_entropy;
}

struct LeakageEstimate {
    long trials = 0;
    int k = 0;
    double leakage_bits = 0;  // mean of k - rank(Hsec on erased)
    double stderr_bits = 0;
    double p_nf = 0;  // frequency of non-full-rank G_mu (equivalently leakage > 0)
};

/// Monte-Carlo leakage over i.i.d. BEC(eps) eavesdropper erasure patterns.
/// Per-trial seeds derive from (seed, trial), so the estimate is independent
/// of the worker count.
inline LeakageEstimate leakage_mc(const CosetCode& code, double eps, long trials,
                                  std::uint64_t seed, int jobs = 1) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (jobs < 1) jobs = 1;
    struct Acc {
        std::int64_t sum = 0, sum_sq = 0, nf = 0;
    };
    std::vector<Acc> acc(jobs);
    auto worker = [&](int w, long lo, long hi) {
        Acc a;
        BitVector mask(static_cast<std::size_t>(code.n));
        for (long t = lo; t < hi; ++t) {
            Rng rng(derive_seed({seed, static_cast<std::uint64_t>(t), 0x5ec5u}));
            for (int i = 0; i < code.n; ++i) mask.set(i, rng.bernoulli(eps));
            const int leak = code.k - equivocation_exact(code, mask);
            a.sum += leak;
            a.sum_sq += std::int64_t(leak) * leak;
            a.nf += leak > 0;
        }
        acc[w] = a;
    };
    if (jobs == 1) {
        worker(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (trials + jobs - 1) / jobs;
        for (int w = 0; w < jobs; ++w) {
            const long lo = std::min<long>(trials, w * chunk);
            const long hi = std::min<long>(trials, lo + chunk);
            pool.emplace_back(worker, w, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    Acc total;
    for (const auto& a : acc) {
        total.sum += a.sum;
        total.sum_sq += a.sum_sq;
        total.nf += a.nf;
    }
    LeakageEstimate est;
    est.trials = trials;
    est.k = code.k;
    est.leakage_bits = double(total.sum) / double(trials);
    const double var =
        (double(total.sum_sq) - double(total.sum) * est.leakage_bits) /
        std::max<double>(1, double(trials) - 1);
    est.stderr_bits = std::sqrt(std::max(0.0, var) / double(trials));
    est.p_nf = double(total.nf) / double(trials);
    return est;
}

}  // namespace ldpcsec
