#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ldpcsec/analysis.hpp"
#include "ldpcsec/decoder.hpp"
#include "ldpcsec/ensemble.hpp"
#include "ldpcsec/errors.hpp"
#include "ldpcsec/rng.hpp"

namespace ldpcsec {

struct BudgetCaps {
    long max_tries = 1'000'000;  // girth-rejection tries per graph
    std::int64_t enum_nodes = kDefaultEnumBudget;
};

/// One reproducible experiment: everything downstream is a pure function of
/// this struct (including master_seed), independent of the worker count.
struct ExperimentConfig {
    DegreeDistribution dist;
    int min_girth = 0;
    std::vector<int> n_list;
    std::vector<double> eps_list;
    long trials = 1000;
    std::uint64_t master_seed = 1;
    BudgetCaps budget;
    bool fixed_graph = false;  // per-code P_B instead of the ensemble average

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (n_list.empty()) throw std::invalid_argument("n list is empty");
        for (int n : n_list) EnsembleSpec{n, dist, min_girth}.validate();
        for (double e : eps_list)
            if (e < 0 || e > 1) throw std::invalid_argument("eps must be in [0,1]");
    }
};

struct BlockErrorEstimate {
    int n = 0;
    double eps = 0;
    long trials = 0;
    long failures = 0;
    double p_hat = 0;
    double ci_lo = 0;
    double ci_hi = 0;
    std::uint64_t seed = 0;
};

/// Wilson 95% interval; for zero failures the upper end is the one-sided
/// rule-of-three bound 3/trials.
inline std::pair<double, double> wilson_interval(long failures, long trials) {
    if (trials <= 0) throw std::invalid_argument("trials must be positive");
    if (failures == 0) return {0.0, std::min(1.0, 3.0 / double(trials))};
    constexpr double z = 1.959963984540054;
    const double t = double(trials);
    const double p = double(failures) / t;
    const double denom = 1 + z * z / t;
    const double center = (p + z * z / (2 * t)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / t + z * z / (4 * t * t)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

template <typename Fn>
void parallel_chunks(long count, int jobs, Fn&& body) {
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || count < 2) {
        body(0, 0L, count);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (count + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
        const long lo = std::min<long>(count, w * chunk);
        const long hi = std::min<long>(count, lo + chunk);
        if (lo < hi) pool.emplace_back(body, w, lo, hi);
    }
    for (auto& th : pool) th.join();
}

// Seed-stream tags so graph, erasure and secrecy draws never collide.
inline constexpr std::uint64_t kGraphStream = 0x67726170;
inline constexpr std::uint64_t kErasureStream = 0x65726173;

}  // namespace detail

/// Ensemble block-error Monte Carlo. By default a fresh girth-restricted
/// graph is drawn per trial, which estimates the sub-ensemble average of
/// P_B^IT — the quantity the decay bound speaks about; with fixed_graph one
/// code per (n, eps) cell is reused. TriesExhausted from the sampler is
/// rethrown with the offending (n, eps) attached.
inline std::vector<BlockErrorEstimate> block_error_mc(const ExperimentConfig& config,
                                                      int jobs = 1) {
    config.validate();
    std::vector<BlockErrorEstimate> out;
    for (int n : config.n_list) {
        const EnsembleSpec spec{n, config.dist, config.min_girth};
        for (double eps : config.eps_list) {
            std::optional<TannerGraph> shared_graph;
            if (config.fixed_graph) {
                const std::uint64_t gseed = derive_seed({config.master_seed,
                                                         static_cast<std::uint64_t>(n),
                                                         double_bits(eps),
                                                         detail::kGraphStream});
                shared_graph = sample_girth_restricted(spec, gseed, config.budget.max_tries)
                                   .graph;
            }
            std::vector<long> fail_per_worker(std::max(1, jobs), 0);
            std::atomic<bool> aborted{false};
            std::string abort_what;
            detail::parallel_chunks(config.trials, jobs, [&](int w, long lo, long hi) {
                PeelWorkspace ws;
                long failures = 0;
                try {
                    for (long t = lo; t < hi && !aborted.load(std::memory_order_relaxed);
                         ++t) {
                        const ErasurePattern pattern = sample_erasures(
                            n, eps,
                            derive_seed({config.master_seed, static_cast<std::uint64_t>(n),
                                         double_bits(eps), static_cast<std::uint64_t>(t),
                                         detail::kErasureStream}));
                        DecodeResult res;
                        if (config.fixed_graph) {
                            res = peel(*shared_graph, pattern, ws);
                        } else {
                            const std::uint64_t gseed = derive_seed(
                                {config.master_seed, static_cast<std::uint64_t>(n),
                                 double_bits(eps), static_cast<std::uint64_t>(t),
                                 detail::kGraphStream});
                            const TannerGraph g =
                                sample_girth_restricted(spec, gseed, config.budget.max_tries)
                                    .graph;
                            res = peel(g, pattern, ws);
                        }
                        failures += !res.success;
                    }
                } catch (const TriesExhausted& e) {
                    bool expected = false;
                    if (aborted.compare_exchange_strong(expected, true))
                        abort_what = e.what();
                }
                fail_per_worker[w] = failures;
            });
            if (aborted.load())
                throw TriesExhausted(abort_what + " [block_error_mc cell n=" +
                                     std::to_string(n) + " eps=" + std::to_string(eps) + "]");
            long failures = 0;
            for (long f : fail_per_worker) failures += f;
            BlockErrorEstimate est;
            est.n = n;
            est.eps = eps;
            est.trials = config.trials;
            est.failures = failures;
            est.p_hat = double(failures) / double(config.trials);
            std::tie(est.ci_lo, est.ci_hi) = wilson_interval(failures, config.trials);
            est.seed = config.master_seed;
            out.push_back(est);
        }
    }
    return out;
}

struct FitResult {
    double slope = 0;
    double stderr_slope = 0;
    std::pair<double, double> ci95{0, 0};
    int points_used = 0;
};

/// Weighted least-squares fit of ln p_hat against ln n at fixed eps, with
/// binomial variance weights Var(ln p_hat) ~ (1-p)/(trials*p). Zero-failure
/// cells are excluded. The 95% CI uses the normal quantile on the WLS slope
/// standard error.
inline FitResult exponent_fit(std::span<const BlockErrorEstimate> estimates) {
    std::vector<double> x, y, w;
    for (const auto& e : estimates) {
        if (e.failures == 0) continue;
        x.push_back(std::log(double(e.n)));
        y.push_back(std::log(e.p_hat));
        const double var = (1 - e.p_hat) / (double(e.trials) * e.p_hat);
        w.push_back(var > 0 ? 1.0 / var : 1.0);
    }
    if (x.size() < 3)
        throw InsufficientData("exponent_fit needs >= 3 block lengths with failures, got " +
                               std::to_string(x.size()));
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx <= 0) throw InsufficientData("exponent_fit: degenerate design (single n)");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.stderr_slope = std::sqrt(1.0 / sxx);
    constexpr double z = 1.959963984540054;
    fit.ci95 = {fit.slope - z * fit.stderr_slope, fit.slope + z * fit.stderr_slope};
    fit.points_used = static_cast<int>(x.size());
    return fit;
}

struct StoppingScanRow {
    int n = 0;
    int s = 0;
    double mean = 0;
    double stderr_mean = 0;
    double exact_unrestricted = 0;  // exact E(s) over the unrestricted ensemble
    double remark_bound = 0;        // E(s) / p_hat(acceptance): upper bound on the
                                    // girth-restricted mean
};

/// Monte-Carlo mean counts of stopping sets of size s <= s_max versus n.
/// For girth-restricted ensembles the acceptance rate measured during
/// rejection provides the (1/p)-scaled unrestricted-E(s) upper bound on the
/// restricted mean.
inline std::vector<StoppingScanRow> small_stopping_scan(const ExperimentConfig& config,
                                                        int s_max, int jobs = 1) {
    config.validate();
    if (s_max < 0) throw std::invalid_argument("s_max must be >= 0");
    std::vector<StoppingScanRow> rows;
    for (int n : config.n_list) {
        const EnsembleSpec spec{n, config.dist, config.min_girth};
        struct Acc {
            std::vector<std::uint64_t> sum, sum_sq;
            std::int64_t tries = 0;
        };
        std::vector<Acc> acc(std::max(1, jobs));
        std::atomic<bool> aborted{false};
        std::string abort_what;
        detail::parallel_chunks(config.trials, jobs, [&](int w, long lo, long hi) {
            Acc a;
            a.sum.assign(s_max + 1, 0);
            a.sum_sq.assign(s_max + 1, 0);
            try {
                for (long t = lo; t < hi && !aborted.load(std::memory_order_relaxed); ++t) {
                    const std::uint64_t gseed = derive_seed(
                        {config.master_seed, static_cast<std::uint64_t>(n),
                         static_cast<std::uint64_t>(t), detail::kGraphStream});
                    auto sample = sample_girth_restricted(spec, gseed, config.budget.max_tries);
                    a.tries += sample.tries_used;
                    const auto counts =
                        enumerate_stopping_sets(sample.graph, s_max, config.budget.enum_nodes);
                    for (int s = 0; s <= s_max; ++s) {
                        a.sum[s] += counts[s];
                        a.sum_sq[s] += counts[s] * counts[s];
                    }
                }
            } catch (const TriesExhausted& e) {
                bool expected = false;
                if (aborted.compare_exchange_strong(expected, true)) abort_what = e.what();
            } catch (const BudgetExceeded& e) {
                bool expected = false;
                if (aborted.compare_exchange_strong(expected, true)) abort_what = e.what();
            }
            acc[w] = std::move(a);
        });
        if (aborted.load())
            throw BudgetExceeded(abort_what + " [small_stopping_scan n=" + std::to_string(n) +
                                 "]");
        std::vector<std::uint64_t> sum(s_max + 1, 0), sum_sq(s_max + 1, 0);
        std::int64_t tries = 0;
        for (const auto& a : acc) {
            if (a.sum.empty()) continue;
            for (int s = 0; s <= s_max; ++s) {
                sum[s] += a.sum[s];
                sum_sq[s] += a.sum_sq[s];
            }
            tries += a.tries;
        }
        const double acceptance = double(config.trials) / double(std::max<std::int64_t>(1, tries));
        const EnsembleSpec unrestricted{n, config.dist, 0};
        for (int s = 0; s <= s_max; ++s) {
            StoppingScanRow row;
            row.n = n;
            row.s = s;
            row.mean = double(sum[s]) / double(config.trials);
            const double var =
                (double(sum_sq[s]) - double(sum[s]) * row.mean) /
                std::max<double>(1, double(config.trials) - 1);
            row.stderr_mean = std::sqrt(std::max(0.0, var) / double(config.trials));
            row.exact_unrestricted = to_double(expected_stopping_sets_exact(unrestricted, s));
            row.remark_bound = row.exact_unrestricted / acceptance;
            rows.push_back(row);
        }
    }
    return rows;
}

/// Assemble the threshold/secrecy-region report for an ensemble: design
/// rate, eps_th, eps_ef, alpha*, the weak-secrecy interval
/// (1 - eps_th, 1 - eps_ef) and the strong-secrecy region eps > 1 - eps_ef.
inline ThresholdReport secrecy_region(const DegreeDistribution& dist, double tol = 1e-4) {
    ThresholdReport report;
    report.eps_th = de_threshold(dist, std::min(tol, 1e-6));
    report.eps_ef = eps_ef(dist, tol);
    report.alpha_star = alpha_star(dist, std::min(tol, 1e-6));
    report.design_rate = to_double(dist.design_rate());
    report.weak_interval = {1 - report.eps_th, 1 - report.eps_ef};
    report.strong_from = 1 - report.eps_ef;
    return report;
}

}  // namespace ldpcsec
