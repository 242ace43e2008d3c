#pragma once
// Continuous maximizers for the worst-case objective
//      G(x) = min_{p in P(rho,n)} sum_i p_i F_i(x)
// over the cardinality polytope {x in [0,1]^V : sum x <= k}, plus the
// online-gradient-descent best-response baseline that works directly with
// sets. All solvers are deterministic given their seed.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <queue>
#include <tuple>

#include "drsm/chi2.hpp"
#include "drsm/rng.hpp"
#include "drsm/submodular.hpp"

namespace drsm {

/// Momentum schedule rho_t = numerator / (t + offset)^exponent, clamped to
/// (0, 1]. The default 4 / (t + 8)^(2/3) is the standard choice for
/// momentum Frank-Wolfe.
struct StepSchedule {
    double numerator = 4.0;
    double offset = 8.0;
    double exponent = 2.0 / 3.0;

    double operator()(std::size_t t) const {
        const double v = numerator / std::pow(static_cast<double>(t) + offset, exponent);
        return std::min(1.0, std::max(v, 1e-12));
    }

    static StepSchedule constant(double c) { return {c, 0.0, 0.0}; }
};

struct SolverConfig {
    std::size_t iterations = 100;  // T
    std::size_t cardinality = 1;   // k
    std::size_t batch = 1;         // gradient samples per iteration
    StepSchedule momentum;
    std::uint64_t seed = 0;
    std::size_t value_samples = 200;  // MC sets per value estimate above the cutoff
    std::size_t exact_cutoff = 20;    // largest ground set evaluated exactly
    std::size_t grad_inner = 1;       // draws averaged inside one gradient estimate
    double smoothing_radius = 0.05;   // u (smoothed variant only)
    std::size_t smoothing_samples = 10;
    bool record_iterates = false;
    bool record_gradients = false;
};

/// Per-iteration record: robust value estimate and worst-case weights at the
/// pre-step point, and the norm of the direction estimate d.
struct IterationStat {
    double value = 0.0;
    double direction_norm = 0.0;
    numvec worst_p;
};

struct SolverRun {
    numvec x;  // final fractional point, sum(x) = k
    std::vector<IterationStat> trajectory;
    std::vector<numvec> iterates;   // pre-step points, when record_iterates
    std::vector<numvec> gradients;  // raw estimates, when record_gradients
    double wall_time_sec = 0.0;
};

/// argmax_{v in {0,1}^V, sum v = k} <d, v>: indicator of the k largest
/// entries, ties resolved toward the lowest index. k negatives still get
/// selected when nothing better exists.
inline numvec lmo_topk(const numvec& d, std::size_t k) {
    detail::require(k >= 1 && k <= d.size(), "cardinality out of range");
    detail::require(detail::all_finite(d), "direction must be finite");
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (d[a] != d[b]) return d[a] > d[b];
                          return a < b;
                      });
    numvec v(d.size(), 0.0);
    for (std::size_t j = 0; j < k; ++j) v[idx[j]] = 1.0;
    return v;
}

namespace detail {

enum class FwVariant { momentum, plain, smoothed };

// Stream ids; distinct concerns draw from distinct streams so variants stay
// bitwise comparable when one concern is disabled.
inline constexpr std::uint64_t kValueStream = 1;
inline constexpr std::uint64_t kBatchStream = 2;
inline constexpr std::uint64_t kGradStream = 3;
inline constexpr std::uint64_t kSmoothStream = 4;

inline numvec estimate_values(const SampledObjective& obj, const numvec& x, Rng& value_rng,
                              const SolverConfig& cfg) {
    if (obj.ground_size() <= cfg.exact_cutoff) {
        numvec z(obj.num_samples());
        for (std::size_t i = 0; i < obj.num_samples(); ++i) z[i] = obj.multilinear_exact(i, x);
        return z;
    }
    numvec z(obj.num_samples(), 0.0);
    for (std::size_t s = 0; s < cfg.value_samples; ++s) {
        const index_list members = sample_included(x, value_rng);
        for (std::size_t i = 0; i < obj.num_samples(); ++i) z[i] += obj.eval(i, members);
    }
    for (double& zi : z) zi /= static_cast<double>(cfg.value_samples);
    return z;
}

// Importance-weighted gradient (n/c) sum_l p[i_l] grad F_{i_l} over a fixed
// batch of sample indices; an unbiased estimate of grad of sum_i p_i F_i at
// x. The caller draws the batch so that every solver variant spends exactly
// cfg.batch function samples per iteration.
inline numvec batch_gradient(const SampledObjective& obj, const numvec& x, const numvec& p,
                             const std::vector<std::size_t>& batch, Rng& grad_rng,
                             const SolverConfig& cfg) {
    const std::size_t n = obj.num_samples();
    numvec g(obj.ground_size(), 0.0);
    for (const std::size_t i : batch) {
        const numvec gi = obj.grad_estimate(i, x, grad_rng, cfg.grad_inner);
        const double w = p[i] * static_cast<double>(n) / static_cast<double>(batch.size());
        for (std::size_t j = 0; j < g.size(); ++j) g[j] += w * gi[j];
    }
    return g;
}

inline double norm2(const numvec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

inline SolverRun run_frank_wolfe(const SampledObjective& obj, const Chi2Ball& ball,
                                 const SolverConfig& cfg, FwVariant variant) {
    require(ball.n == obj.num_samples(), "ball dimension must match the sample count");
    require(cfg.iterations >= 1, "need at least one iteration");
    require(cfg.cardinality >= 1 && cfg.cardinality <= obj.ground_size(), "cardinality out of range");
    require(cfg.batch >= 1, "batch must be positive");
    if (variant == FwVariant::smoothed) {
        require(cfg.smoothing_radius >= 0.0 && cfg.smoothing_samples >= 1, "invalid smoothing settings");
    }
    const auto t0 = std::chrono::steady_clock::now();

    const std::size_t ground = obj.ground_size();
    const double T = static_cast<double>(cfg.iterations);
    Rng value_rng = Rng::stream(cfg.seed, kValueStream);
    Rng batch_rng = Rng::stream(cfg.seed, kBatchStream);
    Rng grad_rng = Rng::stream(cfg.seed, kGradStream);
    Rng smooth_rng = Rng::stream(cfg.seed, kSmoothStream);

    // Selection counts keep iterates exactly representable: x_j = counts_j/T,
    // so x stays in [0,1]^V with sum = t*k/T at every iteration.
    std::vector<std::uint32_t> counts(ground, 0);
    numvec x(ground, 0.0);
    numvec d(ground, 0.0);
    std::vector<std::size_t> batch(cfg.batch);
    SolverRun run;
    run.trajectory.reserve(cfg.iterations);

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        for (std::size_t j = 0; j < ground; ++j) x[j] = static_cast<double>(counts[j]) / T;
        if (cfg.record_iterates) run.iterates.push_back(x);

        const numvec z = estimate_values(obj, x, value_rng, cfg);
        OracleSolution worst = linear_oracle(z, ball);
        for (auto& i : batch) i = batch_rng.next_index(obj.num_samples());

        numvec gtilde;
        if (variant == FwVariant::smoothed) {
            gtilde.assign(ground, 0.0);
            numvec xp(ground);
            for (std::size_t s = 0; s < cfg.smoothing_samples; ++s) {
                for (std::size_t j = 0; j < ground; ++j) {
                    const double pj = x[j] + smooth_rng.uniform(-cfg.smoothing_radius, cfg.smoothing_radius);
                    xp[j] = std::min(1.0, std::max(0.0, pj));
                }
                const numvec zp = estimate_values(obj, xp, value_rng, cfg);
                const OracleSolution wp = linear_oracle(zp, ball);
                const numvec gs = batch_gradient(obj, xp, wp.p, batch, grad_rng, cfg);
                for (std::size_t j = 0; j < ground; ++j) gtilde[j] += gs[j];
            }
            for (double& gj : gtilde) gj /= static_cast<double>(cfg.smoothing_samples);
        } else {
            gtilde = batch_gradient(obj, x, worst.p, batch, grad_rng, cfg);
        }
        if (cfg.record_gradients) run.gradients.push_back(gtilde);

        if (variant == FwVariant::plain) {
            d = gtilde;
        } else {
            const double rho_t = cfg.momentum(t);
            for (std::size_t j = 0; j < ground; ++j) d[j] = (1.0 - rho_t) * d[j] + rho_t * gtilde[j];
        }

        const numvec v = lmo_topk(d, cfg.cardinality);
        for (std::size_t j = 0; j < ground; ++j) {
            if (v[j] > 0.0) ++counts[j];
        }
        run.trajectory.push_back({worst.value, norm2(d), std::move(worst.p)});
    }

    run.x.resize(ground);
    for (std::size_t j = 0; j < ground; ++j) run.x[j] = static_cast<double>(counts[j]) / T;
    if (variant == FwVariant::smoothed) {
        for (double& xj : run.x) xj = std::min(1.0, std::max(0.0, xj - cfg.smoothing_radius));
    }
    run.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

}  // namespace detail

/**
 * @brief Momentum Frank-Wolfe for the worst-case objective.
 *
 * Starting from x = 0: each iteration takes the exact worst-case weights p
 * at the current point (per-sample values evaluated exactly for ground sets
 * up to the cutoff, otherwise by shared-pool Monte-Carlo), forms the
 * importance-weighted stochastic gradient (n/c) sum_l p[i_l] grad F_{i_l},
 * folds it into the momentum average d_t = (1 - rho_t) d_{t-1} + rho_t g_t,
 * and moves by v/T toward the best cardinality-k vertex v = argmax <d, v>.
 * After T iterations sum(x) = k exactly.
 */
inline SolverRun mfw(const SampledObjective& obj, const Chi2Ball& ball, const SolverConfig& cfg) {
    return detail::run_frank_wolfe(obj, ball, cfg, detail::FwVariant::momentum);
}

/// Frank-Wolfe without momentum: the step direction is the raw stochastic
/// gradient of the current worst-case mixture. Equivalent to mfw with a
/// constant schedule rho_t = 1.
inline SolverRun fw_plain(const SampledObjective& obj, const Chi2Ball& ball, const SolverConfig& cfg) {
    return detail::run_frank_wolfe(obj, ball, cfg, detail::FwVariant::plain);
}

/// Randomized-smoothing Frank-Wolfe: every gradient query averages
/// smoothing_samples perturbations x + z, z ~ Unif[-u, u]^V (clamped into
/// [0,1]^V for evaluation), with worst-case weights recomputed at each
/// perturbed point. The perturbations share the iteration's batch samples,
/// so each iteration spends the same function-sample budget as the other
/// variants. The returned point is shifted down by u and clamped so it stays
/// feasible. With u = 0 and one smoothing sample the run matches mfw draw
/// for draw.
inline SolverRun fw_smoothed(const SampledObjective& obj, const Chi2Ball& ball, const SolverConfig& cfg) {
    return detail::run_frank_wolfe(obj, ball, cfg, detail::FwVariant::smoothed);
}

/**
 * @brief Lazy greedy maximization of g(S) = sum_i weights_i f_i(S) subject
 * to |S| = k, with exact marginal gains and stale-value reevaluation.
 * Deterministic; gain ties resolve toward the lowest index. Samples with
 * nonpositive weight are skipped entirely.
 */
inline index_list lazy_greedy(const SampledObjective& obj, const numvec& weights, std::size_t k) {
    detail::require(weights.size() == obj.num_samples(), "one weight per sample");
    detail::require(k >= 1 && k <= obj.ground_size(), "cardinality out of range");
    detail::require(detail::all_finite(weights), "weights must be finite");
    const std::size_t ground = obj.ground_size();
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) active.push_back(i);
    }

    // Incremental per-sample state: best reward so far, or reached node sets.
    numvec cur;                             // facility
    std::vector<std::vector<char>> reached; // influence
    if (obj.is_facility()) {
        cur.assign(active.size(), 0.0);
    } else {
        reached.assign(active.size(), std::vector<char>(ground, 0));
    }

    auto gain_of = [&](std::uint32_t j) {
        double gain = 0.0;
        if (obj.is_facility()) {
            const auto& samples = obj.facility_samples();
            for (std::size_t a = 0; a < active.size(); ++a) {
                const double r = samples[active[a]].rewards[j];
                if (r > cur[a]) gain += weights[active[a]] * (r - cur[a]);
            }
        } else {
            for (std::size_t a = 0; a < active.size(); ++a) {
                gain += weights[active[a]] *
                        static_cast<double>(obj.sample_reach(active[a], j, reached[a], false));
            }
        }
        return gain;
    };
    auto commit = [&](std::uint32_t j) {
        if (obj.is_facility()) {
            const auto& samples = obj.facility_samples();
            for (std::size_t a = 0; a < active.size(); ++a) {
                cur[a] = std::max(cur[a], samples[active[a]].rewards[j]);
            }
        } else {
            for (std::size_t a = 0; a < active.size(); ++a) {
                obj.sample_reach(active[a], j, reached[a], true);
            }
        }
    };

    // Max-heap of (gain, element, round the gain was computed in).
    using Entry = std::tuple<double, std::uint32_t, std::size_t>;
    auto cmp = [](const Entry& a, const Entry& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) > std::get<1>(b);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (std::uint32_t j = 0; j < ground; ++j) heap.push({gain_of(j), j, 0});

    index_list chosen;
    std::vector<char> in_set(ground, 0);
    for (std::size_t round = 1; chosen.size() < k; ++round) {
        for (;;) {
            auto [gain, j, computed] = heap.top();
            heap.pop();
            if (in_set[j]) continue;
            if (computed + 1 == round || heap.empty()) {
                chosen.push_back(j);
                in_set[j] = 1;
                commit(j);
                break;
            }
            heap.push({gain_of(j), j, round - 1});
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

struct OgdConfig {
    std::size_t iterations = 100;  // T
    std::size_t cardinality = 1;   // k
    // eta_t = eta0 / sqrt(t); NaN derives eta0 = D/G from the ball diameter
    // D = 2 sqrt(2 rho)/n and the payoff-gradient bound G = B sqrt(n).
    double eta0 = std::numeric_limits<double>::quiet_NaN();
};

struct OgdRun {
    std::vector<index_list> subsets;  // one best response per round, uniform weight
    numvec round_values;              // sum_i p_i f_i(S_t) per round
    numvec final_weights;             // adversary state after the last update
    double wall_time_sec = 0.0;
};

/**
 * @brief Online gradient descent over the ball against best-responding sets.
 *
 * The adversary maintains weights p; each round the maximizer best-responds
 * with lazy greedy on sum_i p_i f_i, and the adversary takes a projected
 * gradient step p <- project(p - eta_t z) where z_i = f_i(S_t). The returned
 * solution is the uniform distribution over the T best responses. With
 * rho = 0 the projection pins p at uniform and every round repeats greedy on
 * the sample mean.
 */
inline OgdRun ogd_best_response(const SampledObjective& obj, const Chi2Ball& ball,
                                const OgdConfig& cfg) {
    detail::require(ball.n == obj.num_samples(), "ball dimension must match the sample count");
    detail::require(cfg.iterations >= 1, "need at least one iteration");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = obj.num_samples();
    double eta0 = cfg.eta0;
    if (std::isnan(eta0)) {
        const double diameter = ball_diameter(ball);
        const double grad_bound = obj.value_bound() * std::sqrt(static_cast<double>(n));
        eta0 = grad_bound > 0.0 ? diameter / grad_bound : 0.0;
    }
    detail::require(std::isfinite(eta0) && eta0 >= 0.0, "step size must be finite and nonnegative");

    numvec p(n, 1.0 / static_cast<double>(n));
    OgdRun run;
    run.subsets.reserve(cfg.iterations);
    numvec z(n);
    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        index_list s = lazy_greedy(obj, p, cfg.cardinality);
        double payoff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = obj.eval(i, s);
            payoff += p[i] * z[i];
        }
        run.round_values.push_back(payoff);
        run.subsets.push_back(std::move(s));
        const double eta = eta0 / std::sqrt(static_cast<double>(t));
        numvec target(n);
        for (std::size_t i = 0; i < n; ++i) target[i] = p[i] - eta * z[i];
        p = project(target, ball);
    }
    run.final_weights = std::move(p);
    run.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

}  // namespace drsm
