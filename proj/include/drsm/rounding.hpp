#pragma once
// Dependent rounding of fractional points in the cardinality polytope.
//
// A point x with sum(x) = k decomposes into a convex combination of size-k
// sets; merging the bases pairwise with weight-proportional swaps yields one
// random set whose inclusion marginals equal x and whose expected value
// under any submodular f dominates the multilinear extension F(x). Repeated
// draws build an empirical distribution whose worst-case value over the
// chi-square ball is then evaluated exactly.

#include <cstdint>
#include <map>

#include "drsm/chi2.hpp"
#include "drsm/rng.hpp"
#include "drsm/submodular.hpp"

namespace drsm {

/// Convex combination of cardinality-k indicator vectors.
struct BaseDecomposition {
    std::vector<index_list> bases;
    numvec weights;
};

/// Distribution over size-k sets (duplicates allowed; weights sum to one).
struct SetDistribution {
    std::vector<index_list> subsets;
    numvec weights;
};

namespace detail {

inline void validate_fractional_point(const numvec& x, std::size_t k) {
    require(!x.empty(), "empty point");
    require(k >= 1 && k <= x.size(), "cardinality out of range");
    double sum = 0.0;
    for (double xi : x) {
        require(std::isfinite(xi) && xi >= -1e-9 && xi <= 1.0 + 1e-9, "coordinates must lie in [0,1]");
        sum += xi;
    }
    require(std::abs(sum - static_cast<double>(k)) <= 1e-9, "coordinate mass must equal the cardinality");
}

}  // namespace detail

/**
 * @brief Greedy Caratheodory decomposition of x (sum = k, tolerance 1e-9)
 * into at most 2|V| weighted size-k sets.
 *
 * Maintains a residual y with remaining weight W and the invariant
 * y_i <= W. Each step takes the k largest residual coordinates as a base
 * and peels off weight
 *      gamma = min{ min_{i in S} y_i, W - max_{i not in S} y_i },
 * chosen so the invariant survives: every step either zeroes a coordinate of
 * S or pins an outside coordinate to the ceiling y_i = W (after which it
 * stays inside every future base), so the loop finishes within 2|V| steps.
 */
inline BaseDecomposition decompose_to_bases(const numvec& x, std::size_t k) {
    detail::validate_fractional_point(x, k);
    const std::size_t ground = x.size();
    numvec y(ground);
    double sum = 0.0;
    for (double xi : x) sum += std::min(1.0, std::max(0.0, xi));
    for (std::size_t j = 0; j < ground; ++j) {
        y[j] = std::min(1.0, std::max(0.0, x[j])) * (static_cast<double>(k) / sum);
    }
    double remaining = 1.0;

    BaseDecomposition out;
    std::vector<std::size_t> idx(ground);
    const std::size_t max_steps = 2 * ground + 4;
    for (std::size_t step = 0; remaining > 1e-12; ++step) {
        if (step >= max_steps) throw std::logic_error("decompose_to_bases: did not terminate");
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (y[a] != y[b]) return y[a] > y[b];
                              return a < b;
                          });
        index_list base(k);
        double min_inside = remaining;
        for (std::size_t j = 0; j < k; ++j) {
            base[j] = static_cast<std::uint32_t>(idx[j]);
            min_inside = std::min(min_inside, y[idx[j]]);
        }
        double max_outside = 0.0;
        for (std::size_t j = k; j < ground; ++j) max_outside = std::max(max_outside, y[idx[j]]);
        double gamma = std::min(min_inside, remaining - max_outside);
        gamma = std::min(gamma, remaining);
        if (gamma <= 0.0) throw std::logic_error("decompose_to_bases: stalled");
        std::sort(base.begin(), base.end());
        for (std::uint32_t j : base) y[j] = std::max(0.0, y[j] - gamma);
        remaining -= gamma;
        out.weights.push_back(gamma);
        out.bases.push_back(std::move(base));
    }
    // Put the trailing tolerance back on the weights.
    double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    for (double& w : out.weights) w /= total;
    return out;
}

/**
 * @brief Swap rounding: one random size-k set with P[j in S] = x_j and
 * E[f(S)] >= F(x) for every submodular f.
 *
 * The base decomposition is merged left to right: while the running base C
 * (weight wc) differs from the next base B (weight wb), the lowest-index
 * elements i in C\B and j in B\C are swapped — with probability wc/(wc+wb)
 * B adopts i, otherwise C adopts j — and the weights add once the bases
 * coincide. Integral x short-circuits to its support.
 */
inline index_list swap_round(const numvec& x, std::size_t k, Rng& rng) {
    detail::validate_fractional_point(x, k);
    bool integral = true;
    index_list support;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] > 1.0 - 1e-9) {
            support.push_back(static_cast<std::uint32_t>(j));
        } else if (x[j] > 1e-9) {
            integral = false;
            break;
        }
    }
    if (integral && support.size() == k) return support;

    BaseDecomposition dec = decompose_to_bases(x, k);
    std::vector<char> in_c(x.size(), 0);
    std::vector<char> in_b(x.size(), 0);
    for (std::uint32_t j : dec.bases.front()) in_c[j] = 1;
    double wc = dec.weights.front();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    for (std::size_t l = 1; l < dec.bases.size(); ++l) {
        std::fill(in_b.begin(), in_b.end(), 0);
        for (std::uint32_t j : dec.bases[l]) in_b[j] = 1;
        const double wb = dec.weights[l];
        for (;;) {
            std::size_t ci = none;
            std::size_t bj = none;
            for (std::size_t j = 0; j < x.size(); ++j) {
                if (ci == none && in_c[j] && !in_b[j]) ci = j;
                if (bj == none && in_b[j] && !in_c[j]) bj = j;
            }
            if (ci == none) break;  // C == B
            if (rng.next_double() < wc / (wc + wb)) {
                in_b[bj] = 0;  // B adopts ci in place of bj
                in_b[ci] = 1;
            } else {
                in_c[ci] = 0;
                in_c[bj] = 1;
            }
        }
        wc += wb;
    }
    index_list c;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (in_c[j]) c.push_back(static_cast<std::uint32_t>(j));
    }
    return c;
}

/// Number of independent rounded draws that estimates every sample's
/// expected value to additive accuracy eps*B with probability 1 - delta,
/// uniformly over n samples: ceil(log(n/delta) / eps^3).
inline std::size_t recommended_sample_count(std::size_t n, double eps = 0.1, double delta = 0.05) {
    detail::require(n >= 1 && eps > 0.0 && delta > 0.0 && delta < 1.0, "invalid accuracy settings");
    return static_cast<std::size_t>(
        std::ceil(std::log(static_cast<double>(n) / delta) / (eps * eps * eps)));
}

/// Empirical distribution of `count` independent swap-rounded sets.
inline SetDistribution build_distribution(const numvec& x, std::size_t k, std::size_t count, Rng& rng) {
    detail::require(count >= 1, "need at least one draw");
    SetDistribution dist;
    dist.subsets.reserve(count);
    for (std::size_t s = 0; s < count; ++s) dist.subsets.push_back(swap_round(x, k, rng));
    dist.weights.assign(count, 1.0 / static_cast<double>(count));
    return dist;
}

/// Per-sample expected values E_{S~dist}[f_i(S)], evaluated exactly over the
/// finite support. Duplicate subsets are grouped before evaluation.
inline numvec distribution_values(const SetDistribution& dist, const SampledObjective& obj) {
    detail::require(dist.subsets.size() == dist.weights.size() && !dist.subsets.empty(),
                    "distribution needs matching subsets and weights");
    double wsum = 0.0;
    for (double w : dist.weights) {
        detail::require(std::isfinite(w) && w >= 0.0, "weights must be nonnegative");
        wsum += w;
    }
    detail::require(std::abs(wsum - 1.0) <= 1e-9, "weights must sum to one");

    std::map<index_list, double> grouped;
    for (std::size_t s = 0; s < dist.subsets.size(); ++s) grouped[dist.subsets[s]] += dist.weights[s];

    numvec values(obj.num_samples(), 0.0);
    for (const auto& [subset, weight] : grouped) {
        for (std::size_t i = 0; i < obj.num_samples(); ++i) {
            values[i] += weight * obj.eval(i, subset);
        }
    }
    return values;
}

/// Worst case over the ball of the distribution's expected values:
/// min_p sum_i p_i E_{S~dist}[f_i(S)].
inline RobustValue robust_set_value(const SetDistribution& dist, const SampledObjective& obj,
                                    const Chi2Ball& ball) {
    detail::require(ball.n == obj.num_samples(), "ball dimension must match the sample count");
    RobustValue out;
    out.objective_values = distribution_values(dist, obj);
    OracleSolution sol = linear_oracle(out.objective_values, ball);
    out.value = sol.value;
    out.worst_p = std::move(sol.p);
    return out;
}

}  // namespace drsm
