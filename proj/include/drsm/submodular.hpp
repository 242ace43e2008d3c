#pragma once
// Stochastic monotone submodular objectives given by explicit samples.
//
// Two sample families are supported: facility-location demand samples
// (f(S) = best reward among the open facilities) and live-edge influence
// samples (f(S) = nodes reachable from the seed set along realized edges).
// On top of per-sample set evaluation this header provides the multilinear
// extension, an unbiased stochastic gradient, and the worst-case value of a
// fractional point when sample weights range over a chi-square ball.

#include <cstdint>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "drsm/chi2.hpp"
#include "drsm/rng.hpp"

namespace drsm {

using index_list = std::vector<std::uint32_t>;

/// One facility-location demand sample: reward r_j >= 0 per facility,
/// f(S) = max_{j in S} r_j with f(empty) = 0.
struct FacilitySample {
    numvec rewards;
};

/// One live-edge influence sample: the directed edges that fired.
/// f(S) = number of nodes reachable from S (seeds count themselves).
struct LiveEdgeSample {
    std::size_t nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// Finite sample of a stochastic monotone submodular function with shared
/// ground set and uniform empirical weights. Value semantics; evaluation is
/// const and thread-safe.
class SampledObjective {
  public:
    /// Facility-location objective. The declared value bound B defaults to
    /// the largest generated reward; rewards must lie in [0, B].
    static SampledObjective facility(std::vector<FacilitySample> samples,
                                     double declared_bound = std::numeric_limits<double>::quiet_NaN()) {
        detail::require(!samples.empty(), "objective needs at least one sample");
        const std::size_t ground = samples.front().rewards.size();
        detail::require(ground >= 1, "ground set must be nonempty");
        double max_reward = 0.0;
        for (const auto& s : samples) {
            detail::require(s.rewards.size() == ground, "samples must share the ground set");
            for (double r : s.rewards) {
                detail::require(std::isfinite(r) && r >= 0.0, "rewards must be finite and nonnegative");
                max_reward = std::max(max_reward, r);
            }
        }
        double bound = declared_bound;
        if (std::isnan(bound)) {
            bound = max_reward;
        } else {
            detail::require(std::isfinite(bound) && bound >= max_reward - 1e-12,
                            "declared bound must cover every reward");
        }
        SampledObjective obj;
        obj.ground_ = ground;
        obj.value_bound_ = bound;
        obj.singleton_bound_ = max_reward;
        // Per-sample reward order (descending) for the closed-form extension.
        std::vector<index_list> orders(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            index_list& ord = orders[i];
            ord.resize(ground);
            for (std::uint32_t j = 0; j < ground; ++j) ord[j] = j;
            const numvec& r = samples[i].rewards;
            std::stable_sort(ord.begin(), ord.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return r[a] > r[b]; });
        }
        obj.data_ = FacilityData{std::move(samples), std::move(orders)};
        return obj;
    }

    /// Influence objective over live-edge samples; B equals the node count.
    static SampledObjective influence(std::vector<LiveEdgeSample> samples) {
        detail::require(!samples.empty(), "objective needs at least one sample");
        const std::size_t ground = samples.front().nodes;
        detail::require(ground >= 1, "ground set must be nonempty");
        InfluenceData data;
        data.samples = std::move(samples);
        data.adjacency.resize(data.samples.size());
        for (std::size_t i = 0; i < data.samples.size(); ++i) {
            const LiveEdgeSample& s = data.samples[i];
            detail::require(s.nodes == ground, "samples must share the ground set");
            data.adjacency[i].assign(ground, {});
            for (const auto& [u, v] : s.edges) {
                detail::require(u < ground && v < ground, "edge endpoint out of range");
                data.adjacency[i][u].push_back(v);
            }
        }
        SampledObjective obj;
        obj.ground_ = ground;
        obj.value_bound_ = static_cast<double>(ground);
        obj.data_ = std::move(data);
        // Largest single-seed spread across samples.
        std::vector<char> reached(ground, 0);
        double b = 0.0;
        for (std::size_t i = 0; i < obj.num_samples(); ++i) {
            for (std::uint32_t j = 0; j < ground; ++j) {
                std::fill(reached.begin(), reached.end(), 0);
                b = std::max(b, static_cast<double>(obj.sample_reach(i, j, reached, true)));
            }
        }
        obj.singleton_bound_ = b;
        return obj;
    }

    std::size_t num_samples() const {
        if (is_facility()) return std::get<FacilityData>(data_).samples.size();
        return std::get<InfluenceData>(data_).samples.size();
    }
    std::size_t ground_size() const { return ground_; }
    double value_bound() const { return value_bound_; }
    double singleton_bound() const { return singleton_bound_; }
    bool is_facility() const { return std::holds_alternative<FacilityData>(data_); }

    const std::vector<FacilitySample>& facility_samples() const {
        detail::require(is_facility(), "not a facility objective");
        return std::get<FacilityData>(data_).samples;
    }
    const std::vector<LiveEdgeSample>& influence_samples() const {
        detail::require(!is_facility(), "not an influence objective");
        return std::get<InfluenceData>(data_).samples;
    }

    /// f_i(S) for an explicit member list (duplicates allowed, order free).
    double eval(std::size_t i, const index_list& members) const {
        check_sample(i);
        if (is_facility()) {
            const numvec& r = std::get<FacilityData>(data_).samples[i].rewards;
            double best = 0.0;
            for (std::uint32_t j : members) {
                detail::require(j < ground_, "member out of range");
                best = std::max(best, r[j]);
            }
            return best;
        }
        std::vector<char> reached(ground_, 0);
        std::size_t count = 0;
        for (std::uint32_t j : members) {
            detail::require(j < ground_, "member out of range");
            count += sample_reach(i, j, reached, true);
        }
        return static_cast<double>(count);
    }

    /// Influence only: BFS from `seed` along sample i's live edges. Returns
    /// how many reachable nodes are not yet in `reached`; when commit, marks
    /// them. `reached` is never modified when commit is false.
    std::size_t sample_reach(std::size_t i, std::uint32_t seed, std::vector<char>& reached,
                             bool commit) const {
        const auto& adj = std::get<InfluenceData>(data_).adjacency[i];
        std::vector<char> visited(ground_, 0);
        std::vector<std::uint32_t> stack{seed};
        visited[seed] = 1;
        std::size_t fresh = 0;
        while (!stack.empty()) {
            const std::uint32_t u = stack.back();
            stack.pop_back();
            if (!reached[u]) {
                ++fresh;
                if (commit) reached[u] = 1;
            }
            for (std::uint32_t v : adj[u]) {
                if (!visited[v]) {
                    visited[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return fresh;
    }

    /**
     * @brief Multilinear extension F_i(x) = E_{S ~ x}[f_i(S)], evaluated
     * exactly. Coordinates of x are independent inclusion probabilities.
     *
     * Facility samples use the closed form over rewards sorted descending,
     *      F(x) = sum_t r_(t) x_(t) prod_{s<t} (1 - x_(s)),
     * influence samples sum over all subsets, so the ground set is capped at
     * 20 elements; larger instances must use the sampling estimator.
     *
     * @throws std::invalid_argument if x leaves [0,1]^V or the ground set is
     *         too large for exact evaluation.
     */
    double multilinear_exact(std::size_t i, const numvec& x) const {
        check_sample(i);
        check_point(x);
        detail::require(ground_ <= 20, "ground set too large for exact evaluation; use the estimator");
        if (is_facility()) {
            const FacilityData& d = std::get<FacilityData>(data_);
            const numvec& r = d.samples[i].rewards;
            double acc = 0.0;
            double none_before = 1.0;
            for (std::uint32_t j : d.orders[i]) {
                acc += r[j] * x[j] * none_before;
                none_before *= 1.0 - x[j];
            }
            return acc;
        }
        const std::uint32_t full = static_cast<std::uint32_t>(1u << ground_);
        std::vector<char> reached(ground_, 0);
        double acc = 0.0;
        for (std::uint32_t mask = 0; mask < full; ++mask) {
            double w = 1.0;
            for (std::size_t j = 0; j < ground_ && w != 0.0; ++j) {
                w *= (mask >> j) & 1u ? x[j] : 1.0 - x[j];
            }
            if (w == 0.0) continue;
            std::fill(reached.begin(), reached.end(), 0);
            std::size_t count = 0;
            for (std::uint32_t j = 0; j < ground_; ++j) {
                if ((mask >> j) & 1u) count += sample_reach(i, j, reached, true);
            }
            acc += w * static_cast<double>(count);
        }
        return acc;
    }

    /**
     * @brief Unbiased estimate of grad F_i(x): draws S ~ x and returns
     * per coordinate f_i(S + j) - f_i(S - j), averaged over inner_samples
     * independent draws. Each coordinate estimate is bounded by the largest
     * singleton value; variance shrinks as 1/inner_samples.
     */
    numvec grad_estimate(std::size_t i, const numvec& x, Rng& rng, std::size_t inner_samples = 1) const {
        check_sample(i);
        check_point(x);
        detail::require(inner_samples >= 1, "need at least one draw");
        numvec g(ground_, 0.0);
        std::vector<char> included(ground_, 0);
        index_list members;
        for (std::size_t rep = 0; rep < inner_samples; ++rep) {
            members.clear();
            for (std::size_t j = 0; j < ground_; ++j) {
                included[j] = rng.next_double() < x[j] ? 1 : 0;
                if (included[j]) members.push_back(static_cast<std::uint32_t>(j));
            }
            if (is_facility()) {
                accumulate_facility_grad(i, included, g);
            } else {
                accumulate_influence_grad(i, included, members, g);
            }
        }
        for (double& gj : g) gj /= static_cast<double>(inner_samples);
        return g;
    }

  private:
    struct FacilityData {
        std::vector<FacilitySample> samples;
        std::vector<index_list> orders; // per sample, rewards descending
    };
    struct InfluenceData {
        std::vector<LiveEdgeSample> samples;
        std::vector<std::vector<index_list>> adjacency; // per sample, per node
    };

    void check_sample(std::size_t i) const {
        detail::require(i < num_samples(), "sample index out of range");
    }
    void check_point(const numvec& x) const {
        detail::require(x.size() == ground_, "point size must match the ground set");
        for (double xi : x) {
            detail::require(std::isfinite(xi) && xi >= 0.0 && xi <= 1.0, "point must lie in [0,1]^V");
        }
    }

    void accumulate_facility_grad(std::size_t i, const std::vector<char>& included, numvec& g) const {
        const numvec& r = std::get<FacilityData>(data_).samples[i].rewards;
        // Top two selected rewards determine every with/without difference.
        double max1 = 0.0, max2 = 0.0;
        std::size_t arg1 = ground_;
        for (std::size_t j = 0; j < ground_; ++j) {
            if (!included[j]) continue;
            if (r[j] > max1) {
                max2 = max1;
                max1 = r[j];
                arg1 = j;
            } else if (r[j] > max2) {
                max2 = r[j];
            }
        }
        for (std::size_t j = 0; j < ground_; ++j) {
            const double with_j = included[j] ? max1 : std::max(max1, r[j]);
            const double without_j = j == arg1 ? max2 : max1;
            g[j] += with_j - without_j;
        }
    }

    void accumulate_influence_grad(std::size_t i, const std::vector<char>& included,
                                   const index_list& members, numvec& g) const {
        std::vector<char> reached(ground_, 0);
        std::size_t base = 0;
        for (std::uint32_t j : members) base += sample_reach(i, j, reached, true);
        std::vector<char> scratch(ground_);
        for (std::uint32_t j = 0; j < ground_; ++j) {
            if (!included[j]) {
                // f(S + j) - f(S): nodes j reaches beyond reach(S).
                g[j] += static_cast<double>(sample_reach(i, j, reached, false));
            } else {
                // f(S) - f(S - j): recompute the reach without j.
                std::fill(scratch.begin(), scratch.end(), 0);
                std::size_t without = 0;
                for (std::uint32_t m : members) {
                    if (m != j) without += sample_reach(i, m, scratch, true);
                }
                g[j] += static_cast<double>(base - without);
            }
        }
    }

    std::variant<FacilityData, InfluenceData> data_;
    std::size_t ground_ = 0;
    double value_bound_ = 0.0;
    double singleton_bound_ = 0.0;
};

/// Draw an inclusion list S ~ product(x). Always consumes exactly |V|
/// uniforms so stream positions stay aligned across call sites.
inline index_list sample_included(const numvec& x, Rng& rng) {
    index_list members;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const bool in = rng.next_double() < x[j];
        if (in) members.push_back(static_cast<std::uint32_t>(j));
    }
    return members;
}

/// Worst case of a fractional point over the ball: value and weights of
/// min_p sum_i p_i F_i(x), plus the per-sample objective values used.
struct RobustValue {
    double value = 0.0;
    numvec worst_p;
    numvec objective_values;
};

/// Exact robust value of x (exact multilinear evaluation per sample).
inline RobustValue robust_value(const SampledObjective& obj, const Chi2Ball& ball, const numvec& x) {
    detail::require(ball.n == obj.num_samples(), "ball dimension must match the sample count");
    RobustValue out;
    out.objective_values.resize(obj.num_samples());
    for (std::size_t i = 0; i < obj.num_samples(); ++i) {
        out.objective_values[i] = obj.multilinear_exact(i, x);
    }
    OracleSolution sol = linear_oracle(out.objective_values, ball);
    out.value = sol.value;
    out.worst_p = std::move(sol.p);
    return out;
}

/// Monte-Carlo robust value of x: every F_i is estimated on one shared pool
/// of `num_sets` draws from product(x), then the worst case is taken over
/// the estimates. The estimates are unbiased; the minimum over them is the
/// standard plug-in and carries the usual small downward bias.
inline RobustValue robust_value_sampled(const SampledObjective& obj, const Chi2Ball& ball,
                                        const numvec& x, Rng& rng, std::size_t num_sets = 200) {
    detail::require(ball.n == obj.num_samples(), "ball dimension must match the sample count");
    detail::require(num_sets >= 1, "need at least one sampled set");
    RobustValue out;
    out.objective_values.assign(obj.num_samples(), 0.0);
    for (std::size_t s = 0; s < num_sets; ++s) {
        const index_list members = sample_included(x, rng);
        for (std::size_t i = 0; i < obj.num_samples(); ++i) {
            out.objective_values[i] += obj.eval(i, members);
        }
    }
    for (double& zi : out.objective_values) zi /= static_cast<double>(num_sets);
    OracleSolution sol = linear_oracle(out.objective_values, ball);
    out.value = sol.value;
    out.worst_p = std::move(sol.p);
    return out;
}

}  // namespace drsm
