#pragma once
// Worst-case expectations over a chi-square uncertainty ball.
//
// The ambiguity set around the empirical distribution of n samples is
//      P(rho, n) = { p in simplex(n) : (1/2) * ||n*p - 1||^2 <= rho },
// i.e. distributions whose chi-square divergence from uniform is at most
// rho. This header provides the exact linear minimization oracle over that
// set, Euclidean projection onto it, and the closed-form variance expansions
// and regularity constants attached to it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace drsm {

using numvec = std::vector<double>;

/// Numeric tolerances used across the library. Fixed defaults; callers that
/// need different slack pass their own instance.
struct Tolerances {
    double kkt = 1e-8;          // stationarity / complementarity residuals
    double equivalence = 1e-10; // agreement between equivalent formulas
    double simplex = 1e-12;     // simplex membership / normalization drift
};

inline constexpr Tolerances default_tolerances{};

/// Chi-square ball of radius rho around the uniform distribution on n atoms.
struct Chi2Ball {
    double rho = 0.0;
    std::size_t n = 0;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const numvec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline void validate_ball(const Chi2Ball& ball) {
    require(ball.n >= 1, "chi2 ball needs at least one atom");
    require(std::isfinite(ball.rho) && ball.rho >= 0.0, "chi2 radius must be finite and nonnegative");
}

}  // namespace detail

/// (1/2) * ||n*p - 1||^2, the chi-square cost of p relative to uniform.
inline double chi2_cost(const numvec& p) {
    const double n = static_cast<double>(p.size());
    double acc = 0.0;
    for (double pi : p) {
        const double d = n * pi - 1.0;
        acc += d * d;
    }
    return 0.5 * acc;
}

/// Membership test: p in simplex(n) and chi-square cost at most rho,
/// both within tol.
inline bool contains(const Chi2Ball& ball, const numvec& p, double tol = default_tolerances.simplex) {
    detail::validate_ball(ball);
    if (p.size() != ball.n || !detail::all_finite(p)) return false;
    double sum = 0.0;
    for (double pi : p) {
        if (pi < -tol) return false;
        sum += pi;
    }
    if (std::abs(sum - 1.0) > tol * static_cast<double>(ball.n)) return false;
    return chi2_cost(p) <= ball.rho + tol;
}

/// Support-size feasibility margin alpha(m, n, rho) = 2*rho*m/n^2 + m/n - 1.
/// A uniform distribution on m of the n atoms lies in the ball iff
/// alpha >= 0; candidate supports with alpha <= 0 admit no feasible dual.
inline double alpha(std::size_t m, const Chi2Ball& ball) {
    detail::validate_ball(ball);
    detail::require(m >= 1 && m <= ball.n, "support size out of range");
    const double n = static_cast<double>(ball.n);
    const double md = static_cast<double>(m);
    return (2.0 * ball.rho * md) / (n * n) + md / n - 1.0;
}

/// Values sorted with prefix statistics. order maps sorted position to the
/// original index; prefix_mean[j], prefix_sumsq[j], prefix_var[j] cover the
/// first j+1 sorted values (variance is the biased 1/m convention).
struct SortedSample {
    numvec values;                  // original order
    std::vector<std::size_t> order; // sorted position -> original index
    numvec prefix_mean;
    numvec prefix_sumsq;
    numvec prefix_var;
    bool ascending = true;

    double sorted(std::size_t j) const { return values[order[j]]; }

    static SortedSample build(const numvec& values, bool ascending) {
        detail::require(!values.empty(), "empty sample");
        detail::require(detail::all_finite(values), "sample values must be finite");
        SortedSample s;
        s.values = values;
        s.ascending = ascending;
        s.order.resize(values.size());
        std::iota(s.order.begin(), s.order.end(), std::size_t{0});
        std::stable_sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
            return ascending ? values[a] < values[b] : values[a] > values[b];
        });
        const std::size_t n = values.size();
        s.prefix_mean.resize(n);
        s.prefix_sumsq.resize(n);
        s.prefix_var.resize(n);
        double sum = 0.0;
        double sumsq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = s.sorted(j);
            sum += v;
            sumsq += v * v;
            const double m = static_cast<double>(j + 1);
            s.prefix_mean[j] = sum / m;
            s.prefix_sumsq[j] = sumsq;
            s.prefix_var[j] = std::max(0.0, sumsq / m - s.prefix_mean[j] * s.prefix_mean[j]);
        }
        return s;
    }
};

/// Solution of min_{p in P(rho,n)} <z, p>.
///  p      minimizer (original coordinate order)
///  m      support size: p is positive exactly on the m smallest values
///  lambda dual of the chi-square constraint, theta dual of sum(p) = 1
///  value  <z, p>
///  tight  whether the chi-square constraint is active at the solution
struct OracleSolution {
    numvec p;
    std::size_t m = 0;
    double lambda = 0.0;
    double theta = 0.0;
    double value = 0.0;
    bool tight = false;
};

/**
 * @brief Exact linear minimization oracle over the chi-square ball.
 *
 * Solves   min_p  <z, p>
 *          s.t.   p in simplex(n),  (1/2) * ||n*p - 1||^2 <= rho
 * in O(n log n).
 *
 * If the uniform distribution on the minimum-value group of z (size k) lies
 * inside the ball, i.e. rho >= n(n-k)/(2k), it is optimal and the constraint
 * is slack. Otherwise the constraint is tight and the solution places mass
 * on the m smallest values for some m. For each candidate support size m
 * with alpha(m, n, rho) > 0 the tight-constraint dual is
 *      lambda_m = (1/n^2) * max{ sqrt(m^2 s_m^2 / alpha(m,n,rho)),
 *                                m (z_(m) - zbar_m) }
 * (the max keeps the boundary coordinate nonnegative), with objective
 *      v_m = zbar_m - m s_m^2 / (lambda_m n^2),
 * where zbar_m and s_m^2 are the mean and biased variance of the m smallest
 * values. The minimizing m yields
 *      theta = (1 - n/m) lambda n - zbar_m,
 *      p_i   = (1/n) max(0, 1 - (z_i + theta) / (lambda n)).
 * Objective ties across m within 1e-12 resolve to the smallest support.
 *
 * @throws std::invalid_argument on size mismatch, non-finite input, or
 *         negative radius.
 */
inline OracleSolution linear_oracle(const numvec& z, const Chi2Ball& ball,
                                    const Tolerances& tol = default_tolerances) {
    detail::validate_ball(ball);
    detail::require(z.size() == ball.n, "value vector size must match the ball");
    detail::require(detail::all_finite(z), "values must be finite");

    const std::size_t n = ball.n;
    const double nd = static_cast<double>(n);
    const SortedSample s = SortedSample::build(z, /*ascending=*/true);

    OracleSolution sol;
    sol.p.assign(n, 0.0);

    // Size of the minimum-value group (exact ties).
    std::size_t k = 1;
    while (k < n && s.sorted(k) == s.sorted(0)) ++k;

    const double uniform_k_cost = nd * static_cast<double>(n - k) / (2.0 * static_cast<double>(k));
    if (ball.rho >= uniform_k_cost) {
        // Uniform on the minimum-value group is feasible, hence optimal.
        for (std::size_t j = 0; j < k; ++j) sol.p[s.order[j]] = 1.0 / static_cast<double>(k);
        sol.m = k;
        sol.lambda = 0.0;
        sol.theta = -s.sorted(0);
        sol.value = s.sorted(0);
        sol.tight = uniform_k_cost >= ball.rho - tol.kkt;
        return sol;
    }

    // Constraint is tight; scan candidate support sizes.
    constexpr double alpha_slack = 1e-15;
    constexpr double tie_window = 1e-12;
    double best_v = std::numeric_limits<double>::infinity();
    std::size_t best_m = 0;
    double best_lam_n2 = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const double a = alpha(m, ball);
        if (a <= alpha_slack) continue;
        const double md = static_cast<double>(m);
        const double s2 = s.prefix_var[m - 1];
        const double zbar = s.prefix_mean[m - 1];
        const double lam_n2 = std::max(std::sqrt(md * md * s2 / a), md * (s.sorted(m - 1) - zbar));
        const double v = lam_n2 > 0.0 ? zbar - md * s2 / lam_n2 : zbar;
        if (v < best_v - tie_window) {
            best_v = v;
            best_m = m;
            best_lam_n2 = lam_n2;
        }
    }

    if (best_m == 0) {
        // rho is zero to machine precision: the ball degenerates to the
        // uniform distribution. Dual variables are not meaningful here.
        sol.p.assign(n, 1.0 / nd);
        sol.m = n;
        sol.lambda = 0.0;
        sol.theta = -s.prefix_mean[n - 1];
        sol.value = s.prefix_mean[n - 1];
        sol.tight = true;
        return sol;
    }

    const double md = static_cast<double>(best_m);
    const double lam_n = best_lam_n2 / nd; // lambda * n
    sol.m = best_m;
    sol.lambda = best_lam_n2 / (nd * nd);
    sol.theta = (1.0 - nd / md) * lam_n - s.prefix_mean[best_m - 1];
    sol.tight = true;

    numvec p_sorted(n, 0.0);
    if (lam_n > 0.0) {
        for (std::size_t j = 0; j < best_m; ++j) {
            p_sorted[j] = std::max(0.0, 1.0 - (s.sorted(j) + sol.theta) / lam_n) / nd;
        }
    } else {
        for (std::size_t j = 0; j < best_m; ++j) p_sorted[j] = 1.0 / md;
    }
    double sum = std::accumulate(p_sorted.begin(), p_sorted.end(), 0.0);
    if (std::abs(sum - 1.0) > tol.simplex * nd) {
        throw std::logic_error("linear_oracle: normalization drift exceeds tolerance");
    }
    double value = 0.0;
    for (std::size_t j = 0; j < best_m; ++j) {
        p_sorted[j] /= sum;
        value += s.sorted(j) * p_sorted[j];
    }
    for (std::size_t j = 0; j < n; ++j) sol.p[s.order[j]] = p_sorted[j];
    sol.value = value;
    return sol;
}

/// Max KKT violation of an oracle solution: stationarity of
/// z + lambda*n*(n*p - 1) + theta*1 - eta with eta recovered as the positive
/// part, complementary slackness eta .* p, and simplex drift.
inline double kkt_residual(const numvec& z, const Chi2Ball& ball, const OracleSolution& sol) {
    detail::validate_ball(ball);
    detail::require(z.size() == ball.n && sol.p.size() == ball.n, "size mismatch");
    const double nd = static_cast<double>(ball.n);
    double res = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < ball.n; ++i) {
        const double g = z[i] + sol.lambda * nd * (nd * sol.p[i] - 1.0) + sol.theta;
        const double eta = std::max(0.0, g);
        res = std::max(res, eta - g);            // negative part of g
        res = std::max(res, std::abs(eta * sol.p[i]));
        res = std::max(res, std::max(0.0, -sol.p[i]));
        sum += sol.p[i];
    }
    res = std::max(res, std::abs(sum - 1.0));
    res = std::max(res, std::max(0.0, chi2_cost(sol.p) - ball.rho));
    if (sol.tight) res = std::max(res, std::abs(chi2_cost(sol.p) - ball.rho));
    return res;
}

/**
 * @brief Euclidean projection onto the chi-square ball.
 *
 * Solves   min_p  (1/2) * ||p - w||^2
 *          s.t.   p in simplex(n),  (1/2) * ||n*p - 1||^2 <= rho
 * in O(n log n). w may fall outside the simplex (negative entries included).
 *
 * On a support of the m largest entries of w the solution has the form
 *      p_i = beta * (w_i - wbar_m) + 1/m,     beta = 1 / (1 + lambda n^2),
 * so beta ranges over (0, 1]. For each m, beta is capped by three bounds:
 * the chi-square constraint beta <= sqrt(alpha(m,n,rho)) / (m s_m), the
 * boundary coordinate beta <= 1 / (m (wbar_m - w_(m))) when w_(m) < wbar_m,
 * and dual feasibility beta <= 1 (lambda >= 0). The squared distance
 *      v_m = (1/2) beta^2 m s_m^2 - beta m s_m^2 + 1/(2m) - wbar_m + const
 * is decreasing in beta on [0, 1], so each candidate takes the largest
 * admissible beta and the optimum is the candidate minimizing v_m. Supports
 * with alpha(m, n, rho) < 0 are infeasible and skipped.
 *
 * @throws std::invalid_argument on size mismatch, non-finite input, or
 *         negative radius.
 */
inline numvec project(const numvec& w, const Chi2Ball& ball,
                      const Tolerances& tol = default_tolerances) {
    detail::validate_ball(ball);
    detail::require(w.size() == ball.n, "point size must match the ball");
    detail::require(detail::all_finite(w), "point must be finite");
    if (contains(ball, w, tol.simplex)) return w;

    const std::size_t n = ball.n;
    const double nd = static_cast<double>(n);
    const SortedSample s = SortedSample::build(w, /*ascending=*/false);

    double best_v = std::numeric_limits<double>::infinity();
    std::size_t best_m = 0;
    double best_beta = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const double a = alpha(m, ball);
        if (a < -1e-15) continue;
        const double md = static_cast<double>(m);
        const double s2 = s.prefix_var[m - 1];
        const double wbar = s.prefix_mean[m - 1];
        double beta = 1.0;
        if (s2 > 0.0) beta = std::min(beta, std::sqrt(std::max(a, 0.0) / (md * md * s2)));
        const double wm = s.sorted(m - 1);
        if (wm < wbar) beta = std::min(beta, 1.0 / (md * (wbar - wm)));
        const double v = 0.5 * beta * beta * md * s2 - beta * md * s2 + 0.5 / md - wbar;
        if (v < best_v) {
            best_v = v;
            best_m = m;
            best_beta = beta;
        }
    }
    if (best_m == 0) throw std::logic_error("project: no feasible support");

    const double md = static_cast<double>(best_m);
    const double wbar = s.prefix_mean[best_m - 1];
    numvec p(n, 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < best_m; ++j) {
        const double pj = std::max(0.0, best_beta * (s.sorted(j) - wbar) + 1.0 / md);
        p[s.order[j]] = pj;
        sum += pj;
    }
    if (std::abs(sum - 1.0) > tol.simplex * nd) {
        throw std::logic_error("project: normalization drift exceeds tolerance");
    }
    for (double& pi : p) pi /= sum;
    return p;
}

/**
 * @brief Closed-form worst-case value when every support size is feasible.
 *
 * Requires pairwise-distinct z and rho < n(n-1)/2. Returns
 *      min_m  zbar_m - min{ sqrt(alpha(m,n,rho) s_m^2),
 *                           s_m^2 / (z_(m) - zbar_m) }
 * over support sizes m with alpha(m, n, rho) > 0; the second branch is
 * +infinity when z_(m) = zbar_m (m = 1). Agrees with linear_oracle(z).value.
 *
 * @throws std::invalid_argument on duplicate values or rho >= n(n-1)/2.
 */
inline double closed_form_value(const numvec& z, const Chi2Ball& ball) {
    detail::validate_ball(ball);
    detail::require(z.size() == ball.n, "value vector size must match the ball");
    detail::require(detail::all_finite(z), "values must be finite");
    const std::size_t n = ball.n;
    const double nd = static_cast<double>(n);
    detail::require(ball.rho < nd * (nd - 1.0) / 2.0, "radius must satisfy rho < n(n-1)/2");
    const SortedSample s = SortedSample::build(z, /*ascending=*/true);
    for (std::size_t j = 1; j < n; ++j) {
        detail::require(s.sorted(j) != s.sorted(j - 1), "values must be pairwise distinct");
    }

    constexpr double alpha_slack = 1e-15;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= n; ++m) {
        const double a = alpha(m, ball);
        if (a <= alpha_slack) continue;
        const double s2 = s.prefix_var[m - 1];
        const double zbar = s.prefix_mean[m - 1];
        const double gap = s.sorted(m - 1) - zbar;
        double drop = std::sqrt(a * s2);
        if (gap > 0.0) drop = std::min(drop, s2 / gap);
        best = std::min(best, zbar - drop);
    }
    return best;
}

/// Mean-versus-worst-case decomposition of a value vector over the ball.
///  empirical_mean  zbar_n
///  robust_value    min over the ball of <z, p>
///  upper_gap       sqrt(2 rho s_n^2 / n)       (mean - robust <= upper_gap)
///  lower_gap       (upper_gap - 2 B rho / n)+  (mean - robust >= lower_gap)
///  exact           s_n^2 >= 2 rho (max z - zbar)^2 / n, in which case
///                  robust_value = mean - upper_gap holds exactly
struct VarianceExpansion {
    double empirical_mean = 0.0;
    double robust_value = 0.0;
    double lower_gap = 0.0;
    double upper_gap = 0.0;
    bool exact = false;
};

/// Variance expansion of the worst-case value; requires z in [0, B].
inline VarianceExpansion variance_expansion(const numvec& z, const Chi2Ball& ball, double bound) {
    detail::validate_ball(ball);
    detail::require(z.size() == ball.n, "value vector size must match the ball");
    detail::require(std::isfinite(bound) && bound >= 0.0, "value bound must be finite and nonnegative");
    for (double zi : z) {
        detail::require(std::isfinite(zi) && zi >= -1e-12 && zi <= bound + 1e-12,
                        "values must lie in [0, B]");
    }
    const double nd = static_cast<double>(ball.n);
    double mean = 0.0;
    double maxz = -std::numeric_limits<double>::infinity();
    for (double zi : z) {
        mean += zi;
        maxz = std::max(maxz, zi);
    }
    mean /= nd;
    double var = 0.0;
    for (double zi : z) var += (zi - mean) * (zi - mean);
    var /= nd;

    VarianceExpansion out;
    out.empirical_mean = mean;
    out.robust_value = linear_oracle(z, ball).value;
    out.upper_gap = std::sqrt(2.0 * ball.rho * var / nd);
    out.lower_gap = std::max(0.0, out.upper_gap - 2.0 * bound * ball.rho / nd);
    const double spread = maxz - mean;
    out.exact = var >= 2.0 * ball.rho * spread * spread / nd;
    return out;
}

/// Mean minus c1 * sqrt(variance / n), the concentration-style surrogate the
/// worst-case value expands into (biased 1/n variance convention).
inline double variance_regularized_value(const numvec& z, double c1) {
    detail::require(!z.empty(), "empty sample");
    detail::require(detail::all_finite(z) && std::isfinite(c1), "inputs must be finite");
    const double nd = static_cast<double>(z.size());
    double mean = 0.0;
    for (double zi : z) mean += zi;
    mean /= nd;
    double var = 0.0;
    for (double zi : z) var += (zi - mean) * (zi - mean);
    var /= nd;
    return mean - c1 * std::sqrt(var / nd);
}

/// Constants of the Bernstein-style deviation bound at confidence delta for
/// values bounded by B: c1 = sqrt(2 log(1/delta)), c2 = (2B/3) log(1/delta).
struct BernsteinConstants {
    double c1 = 0.0;
    double c2 = 0.0;
};

inline BernsteinConstants bernstein_constants(double delta, double bound) {
    detail::require(delta > 0.0 && delta < 1.0, "confidence level must lie in (0, 1)");
    detail::require(std::isfinite(bound) && bound >= 0.0, "value bound must be finite and nonnegative");
    const double log_term = std::log(1.0 / delta);
    return {std::sqrt(2.0 * log_term), (2.0 * bound / 3.0) * log_term};
}

/// Sample-variance level (B/sqrt(n)) * max{ sqrt(32 rho / 7),
/// sqrt(36 (log(1/delta) + |V| log(25 k))) } above which the worst-case
/// objective is provably smooth uniformly over size-k supports.
inline double high_variance_threshold(const Chi2Ball& ball, double bound, double delta,
                                      std::size_t ground, std::size_t k) {
    detail::validate_ball(ball);
    detail::require(delta > 0.0 && delta < 1.0, "confidence level must lie in (0, 1)");
    detail::require(std::isfinite(bound) && bound > 0.0, "value bound must be finite and positive");
    detail::require(ground >= 1 && k >= 1, "ground set and cardinality must be positive");
    const double a = std::sqrt(32.0 * ball.rho / 7.0);
    const double b = std::sqrt(36.0 * (std::log(1.0 / delta) +
                                       static_cast<double>(ground) * std::log(25.0 * static_cast<double>(k))));
    return bound / std::sqrt(static_cast<double>(ball.n)) * std::max(a, b);
}

/// Whether z sits in the high-variance regime s_n^2 >= 2 rho B^2 / n where
/// the worst-case weight map is smooth.
inline bool high_variance_regime(const numvec& z, const Chi2Ball& ball, double bound) {
    detail::validate_ball(ball);
    detail::require(z.size() == ball.n, "value vector size must match the ball");
    const double nd = static_cast<double>(ball.n);
    double mean = 0.0;
    for (double zi : z) mean += zi;
    mean /= nd;
    double var = 0.0;
    for (double zi : z) var += (zi - mean) * (zi - mean);
    var /= nd;
    return var >= 2.0 * ball.rho * bound * bound / nd;
}

/// Lipschitz constants in the high-variance regime.
///  weight_map        L with ||p(z) - p(z')|| <= L ||z - z'||:
///                    L = 2 sqrt(2 rho) / n^(3/2) + 2 / (B n)
///  robust_objective  smoothness constant of the worst-case objective
///                    given a grad_lipschitz bound L_F and singleton bound b:
///                    L_F + 2 b sqrt(2 rho |V|) / n + 2 b sqrt(|V|) / (B sqrt(n))
struct SmoothnessConstants {
    double weight_map = 0.0;
    double robust_objective = 0.0;
};

inline SmoothnessConstants smoothness_constants(const Chi2Ball& ball, double bound,
                                                double singleton_bound, std::size_t ground,
                                                double grad_lipschitz) {
    detail::validate_ball(ball);
    detail::require(std::isfinite(bound) && bound > 0.0, "value bound must be finite and positive");
    detail::require(singleton_bound >= 0.0 && grad_lipschitz >= 0.0, "constants must be nonnegative");
    const double nd = static_cast<double>(ball.n);
    SmoothnessConstants out;
    out.weight_map = 2.0 * std::sqrt(2.0 * ball.rho) / std::pow(nd, 1.5) + 2.0 / (bound * nd);
    out.robust_objective = grad_lipschitz +
                           2.0 * singleton_bound * std::sqrt(2.0 * ball.rho * static_cast<double>(ground)) / nd +
                           2.0 * singleton_bound * std::sqrt(static_cast<double>(ground)) / (bound * std::sqrt(nd));
    return out;
}

/// Largest distance between two points of the ball: ||p - q|| <= 2 sqrt(2 rho) / n.
inline double ball_diameter(const Chi2Ball& ball) {
    detail::validate_ball(ball);
    return 2.0 * std::sqrt(2.0 * ball.rho) / static_cast<double>(ball.n);
}

}  // namespace drsm
