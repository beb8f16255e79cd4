#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldpcsec/ensemble.hpp"
#include "ldpcsec/errors.hpp"
#include "ldpcsec/rational.hpp"

namespace ldpcsec {

/// Binary entropy in nats; h(0) = h(1) = 0.
inline double binary_entropy_nats(double x) {
    if (x < 0 || x > 1) throw std::domain_error("binary_entropy_nats: x outside [0,1]");
    if (x == 0 || x == 1) return 0;
    return -x * std::log(x) - (1 - x) * std::log(1 - x);
}

namespace detail {

// Deterministic derivative-free minimizer on [lo, hi].
inline double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              double tol, double* arg = nullptr) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    if (arg) *arg = f1 < fm ? x1 : (f2 < fm ? x2 : xm);
    return std::min({f1, f2, fm});
}

// Grid scan + golden refinement of max_x f(x) over [lo, hi].
inline double grid_maximize(const std::function<double(double)>& f, double lo, double hi,
                            int grid, double tol) {
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i <= grid; ++i) {
        const double x = lo + (hi - lo) * i / grid;
        const double v = f(x);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double a = lo + (hi - lo) * std::max(best_i - 1, 0) / grid;
    const double b = lo + (hi - lo) * std::min(best_i + 1, grid) / grid;
    const double refined = -golden_minimize([&](double x) { return -f(x); }, a, b, tol);
    return std::max(best, refined);
}

}  // namespace detail

/// Density-evolution erasure threshold: sup of eps such that
/// eps * lambda(1 - rho(1 - x)) < x for all x in (0, 1]. Bisection with a
/// dense inner grid plus golden refinement around the binding x.
inline double de_threshold(const DegreeDistribution& dist, double tol = 1e-6) {
    auto excess = [&](double eps) {
        return detail::grid_maximize(
            [&](double x) {
                if (x <= 0) return 0.0;
                return eps * dist.lambda_eval(1 - dist.rho_eval(1 - x)) - x;
            },
            1.0 / 4096, 1.0, 4096, 1e-12);
    };
    auto ok = [&](double eps) { return excess(eps) <= 1e-12; };
    if (ok(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// --- exact stopping-set combinatorics ---

namespace detail {

inline std::vector<BigInt> poly_mul_trunc(const std::vector<BigInt>& a,
                                          const std::vector<BigInt>& b, int wmax) {
    std::vector<BigInt> out(wmax + 1, BigInt(0));
    for (int i = 0; i <= wmax && i < static_cast<int>(a.size()); ++i) {
        if (a[i] == 0) continue;
        const int jmax = std::min(wmax - i, static_cast<int>(b.size()) - 1);
        for (int j = 0; j <= jmax; ++j) {
            if (b[j] == 0) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

inline std::vector<BigInt> poly_pow_trunc(std::vector<BigInt> base, std::int64_t e, int wmax) {
    std::vector<BigInt> acc(wmax + 1, BigInt(0));
    acc[0] = 1;
    while (e > 0) {
        if (e & 1) acc = poly_mul_trunc(acc, base, wmax);
        e >>= 1;
        if (e) base = poly_mul_trunc(base, base, wmax);
    }
    return acc;
}

}  // namespace detail

/// Coefficients up to degree wmax of prod_d ((1+x)^d - d x)^{m_d}, the
/// generating function of socket subsets in which every check receives
/// either no socket or at least two.
inline std::vector<BigInt> check_gen_poly(
    std::span<const std::pair<int, std::int64_t>> check_counts, int wmax) {
    std::vector<BigInt> poly(wmax + 1, BigInt(0));
    poly[0] = 1;
    for (const auto& [d, m] : check_counts) {
        if (m == 0) continue;
        std::vector<BigInt> base(wmax + 1, BigInt(0));
        base[0] = 1;
        for (int t = 2; t <= d && t <= wmax; ++t) base[t] = binomial(d, t);
        poly = detail::poly_mul_trunc(poly, detail::poly_pow_trunc(std::move(base), m, wmax),
                                      wmax);
    }
    return poly;
}

/// Exact coefficient of x^w in the check generating function.
inline BigInt check_gen_poly_coef(std::span<const std::pair<int, std::int64_t>> check_counts,
                                  int w) {
    return check_gen_poly(check_counts, w)[w];
}

/// ln of the closed-form coefficient bound
/// C(m + floor(w/2) - ceil(w/r_max), floor(w/2)) * (2 r_max - 3)^w.
inline double coef_upper_bound_log(std::int64_t m, std::int64_t w, int r_max) {
    if (r_max <= 2) throw std::invalid_argument("coef_upper_bound requires r_max > 2");
    auto lchoose = [](double n, double k) {
        if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
        return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
    };
    const double half = std::floor(double(w) / 2);
    const double ceil_term = std::ceil(double(w) / r_max);
    return lchoose(double(m) + half - ceil_term, half) +
           double(w) * std::log(double(2 * r_max - 3));
}

inline double coef_upper_bound(std::int64_t m, std::int64_t w, int r_max) {
    return std::exp(coef_upper_bound_log(m, w, r_max));
}

/// Ensemble-average number of stopping sets of size s, exactly:
///   E(s) = sum over compositions {i_j} of s across variable degrees of
///          prod_j C(n*lt_j, i_j) * coef(G, x^w) / C(|E|, w),  w = sum j*i_j,
/// with G the generating function of the true check-degree multiset.
inline Rational expected_stopping_sets_exact(const EnsembleSpec& spec, int s) {
    spec.validate();
    if (s < 0 || s > spec.n) throw std::invalid_argument("s out of range");
    if (s == 0) return 1;
    const auto vc = spec.var_counts();
    const auto cc = spec.check_counts();
    const std::int64_t E = spec.edge_count();
    const int l_max = vc.back().first;
    const int wmax = std::min<std::int64_t>(static_cast<std::int64_t>(s) * l_max, E);
    const std::vector<BigInt> poly = check_gen_poly(cc, static_cast<int>(wmax));

    Rational total = 0;
    std::vector<int> alloc(vc.size(), 0);
    auto rec = [&](auto&& self, std::size_t idx, int left, BigInt ways, std::int64_t w) -> void {
        if (idx == vc.size()) {
            if (left == 0 && w <= wmax && poly[w] != 0)
                total += Rational(ways * poly[w], binomial(E, w));
            return;
        }
        const auto [deg, cnt] = vc[idx];
        const int hi = std::min<std::int64_t>(left, cnt);
        for (int take = 0; take <= hi; ++take)
            self(self, idx + 1, left - take, ways * binomial(cnt, take),
                 w + static_cast<std::int64_t>(deg) * take);
    };
    rec(rec, 0, s, BigInt(1), 0);
    return total;
}

/// E(s) for all s = 0..s_max, sharing one generating-function expansion.
inline std::vector<Rational> expected_stopping_sets_range(const EnsembleSpec& spec, int s_max) {
    std::vector<Rational> out;
    out.reserve(s_max + 1);
    for (int s = 0; s <= s_max; ++s) out.push_back(expected_stopping_sets_exact(spec, s));
    return out;
}

// --- normalized stopping set distribution gamma(alpha) ---

struct GammaOptions {
    double inner_lo = -40;    // bracket for t = ln x
    double inner_hi = 40;
    double inner_tol = 1e-10;
    double ascent_tol = 1e-8;
    int max_sweeps = 200;
};

namespace detail {

// ln((1+x)^d - d x) at x = e^t, stable for large |t|.
inline double log_check_factor(int d, double t) {
    const double l1 = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    const double u = d * l1;
    const double z = std::exp(std::log(double(d)) + t - u);
    return u + std::log1p(-z);
}

struct GammaContext {
    std::vector<std::pair<int, double>> lt;      // variable degree -> node fraction
    std::vector<std::pair<int, double>> m_dens;  // check degree -> nodes per n
    double r1;

    explicit GammaContext(const DegreeDistribution& dist) {
        for (const auto& term : dist.lambda_node())
            lt.push_back({term.degree, to_double(term.weight)});
        const Rational r1q = dist.avg_var_degree();
        r1 = to_double(r1q);
        for (const auto& term : dist.rho())
            m_dens.push_back({term.degree, to_double(r1q * term.weight / term.degree)});
    }

    // inf_{t} sum_d m_d ln((1+e^t)^d - d e^t) - omega t
    double inner_inf(double omega, const GammaOptions& opt) const {
        if (omega <= 0) return 0;
        return golden_minimize(
            [&](double t) {
                double acc = -omega * t;
                for (const auto& [d, md] : m_dens) acc += md * log_check_factor(d, t);
                return acc;
            },
            opt.inner_lo, opt.inner_hi, opt.inner_tol);
    }

    double objective(std::span<const double> beta, const GammaOptions& opt) const {
        double omega = 0, entropy = 0;
        for (std::size_t j = 0; j < lt.size(); ++j) {
            omega += lt[j].first * beta[j];
            entropy += lt[j].second * binary_entropy_nats(beta[j] / lt[j].second);
        }
        return entropy + inner_inf(omega, opt) - r1 * binary_entropy_nats(omega / r1);
    }
};

}  // namespace detail

/// gamma(alpha) = lim (1/n) log E(alpha n): the normalized log of the
/// ensemble-average stopping-set count at size alpha*n, evaluated by the
/// saddle-point expression. For irregular ensembles the allocation of alpha
/// across variable degrees is optimized by projected pairwise coordinate
/// ascent from the proportional starting point.
inline double gamma(const DegreeDistribution& dist, double alpha,
                    const GammaOptions& opt = {}) {
    if (alpha <= 0 || alpha >= 1)
        throw std::domain_error("gamma: alpha must be in (0,1)");
    detail::GammaContext ctx(dist);
    std::vector<double> beta(ctx.lt.size());
    for (std::size_t j = 0; j < beta.size(); ++j) beta[j] = alpha * ctx.lt[j].second;
    double best = ctx.objective(beta, opt);
    if (beta.size() == 1) return best;

    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        double gain = 0;
        for (std::size_t a = 0; a < beta.size(); ++a) {
            for (std::size_t b = a + 1; b < beta.size(); ++b) {
                const double lo = std::max(-beta[a], beta[b] - ctx.lt[b].second);
                const double hi = std::min(beta[b], ctx.lt[a].second - beta[a]);
                if (hi - lo < 1e-14) continue;
                double arg = 0;
                std::vector<double> trial(beta);
                const double neg = detail::golden_minimize(
                    [&](double delta) {
                        trial[a] = beta[a] + delta;
                        trial[b] = beta[b] - delta;
                        return -ctx.objective(trial, opt);
                    },
                    lo, hi, 1e-12, &arg);
                if (-neg > best + 1e-15) {
                    gain += -neg - best;
                    best = -neg;
                    beta[a] += arg;
                    beta[b] -= arg;
                }
            }
        }
        if (gain < opt.ascent_tol) return best;
    }
    throw NonConvergence("gamma allocation ascent did not settle; last sweep gain above " +
                         std::to_string(opt.ascent_tol));
}

/// Critical exponent stopping ratio alpha* = inf{alpha > 0 : gamma(alpha) >= 0}.
/// Returns 0 when gamma is already nonnegative at the smallest probe.
inline double alpha_star(const DegreeDistribution& dist, double tol = 1e-6) {
    const double probe = 1e-4;
    if (gamma(dist, probe) >= 0) return 0;
    double lo = probe, hi = 0;
    bool found = false;
    for (double a = probe + 0.005; a < 0.999; a += 0.005) {
        if (gamma(dist, a) >= 0) {
            hi = a;
            found = true;
            break;
        }
        lo = a;
    }
    if (!found)
        throw NonConvergence("alpha_star: gamma(alpha) < 0 on the whole probe grid");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (gamma(dist, mid) >= 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Effective threshold
///   eps_ef = sup{eps : max_{alpha in (0, eps]}
///                (gamma(alpha) + (1-alpha) h((eps-alpha)/(1-alpha)) - h(eps)) <= 0},
/// entropies in nats. The alpha -> 0 boundary value is identically zero, so
/// the inner maximization is taken over (0, eps].
inline double eps_ef(const DegreeDistribution& dist, double tol = 1e-4) {
    // gamma is the expensive inner call; memoize on the bit pattern of alpha.
    std::vector<std::pair<std::uint64_t, double>> cache;
    auto gamma_cached = [&](double a) {
        const std::uint64_t key = double_bits(a);
        for (const auto& [k, v] : cache)
            if (k == key) return v;
        const double v = gamma(dist, a);
        cache.push_back({key, v});
        return v;
    };

    auto inner_max = [&](double eps) {
        auto psi = [&](double a) {
            return gamma_cached(a) +
                   (1 - a) * binary_entropy_nats((eps - a) / (1 - a)) -
                   binary_entropy_nats(eps);
        };
        constexpr int kGrid = 512;
        double best = -std::numeric_limits<double>::infinity();
        int best_i = 1;
        for (int i = 1; i <= kGrid; ++i) {
            const double a = eps * i / kGrid;
            const double v = psi(a);
            if (v > best) {
                best = v;
                best_i = i;
            }
        }
        const double lo = eps * std::max(best_i - 1, 1) / kGrid;
        const double hi = eps * std::min(best_i + 1, kGrid) / kGrid;
        const double refined =
            -detail::golden_minimize([&](double a) { return -psi(a); }, lo, hi, 1e-12);
        return std::max(best, refined);
    };

    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (inner_max(mid) <= 1e-10 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Decay exponent of Theorem-2 type bounds: ceil(l_min*k/2) - k.
inline int exponent_bound(int l_min, int k) {
    if (l_min < 1 || k < 2) throw std::invalid_argument("exponent_bound: l_min >= 1, k >= 2");
    return static_cast<int>((static_cast<std::int64_t>(l_min) * k + 1) / 2) - k;
}

namespace detail {
inline Rational rational_from_double(double x) {
    if (x == 0) return 0;
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    int e2 = 0;
    const double mant = std::frexp(x, &e2);
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
    Rational r(scaled);
    const int shift = e2 - 53;
    if (shift >= 0)
        r *= Rational(BigInt(1) << shift);
    else
        r /= Rational(BigInt(1) << -shift);
    return r;
}
}  // namespace detail

/// Small-stopping-set union bound term: sum_{i=k}^{i_max} E(i) eps^i with
/// k = min_girth/2 (k = 1 when unrestricted), evaluated in exact rational
/// arithmetic and returned as a double. This is only the dominant small-set
/// term of the block-error bound; the large-set tail is covered empirically.
inline double union_bound_prediction(const EnsembleSpec& spec, double eps, int i_max) {
    if (eps < 0 || eps > 1) throw std::invalid_argument("eps must be in [0,1]");
    const int k = std::max(1, spec.min_girth / 2);
    const Rational eq = detail::rational_from_double(eps);
    Rational total = 0;
    Rational epow = 1;
    for (int i = 1; i < k; ++i) epow *= eq;
    for (int i = k; i <= i_max; ++i) {
        epow *= eq;
        total += expected_stopping_sets_exact(spec, i) * epow;
    }
    return to_double(total);
}

/// Computed thresholds and the secrecy regions they imply for the dual
/// coset scheme: weak secrecy on (1 - eps_th, 1 - eps_ef), strong secrecy
/// for eavesdropper erasure above 1 - eps_ef.
struct ThresholdReport {
    double eps_th = 0;
    double eps_ef = 0;
    double alpha_star = 0;
    double design_rate = 0;
    std::pair<double, double> weak_interval{0, 0};
    double strong_from = 0;
};

}  // namespace ldpcsec
