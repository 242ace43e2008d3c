#pragma once
// Slow reference implementations used only by the tests: dense simplex-grid
// search over the uncertainty ball, random feasible points, and exhaustive
// subset enumeration. Everything here is deliberately naive so that it can
// disagree with the library only when the library is wrong.

#include "drsm/chi2.hpp"
#include "drsm/rng.hpp"
#include "drsm/submodular.hpp"

namespace bf {

namespace detail {

template <typename Fn>
void compositions(std::size_t remaining, std::size_t index, std::size_t steps, drsm::numvec& p,
                  Fn& fn) {
    if (index + 1 == p.size()) {
        p[index] = static_cast<double>(remaining) / static_cast<double>(steps);
        fn(const_cast<const drsm::numvec&>(p));
        return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
        p[index] = static_cast<double>(c) / static_cast<double>(steps);
        compositions(remaining - c, index + 1, steps, p, fn);
    }
}

template <typename Fn>
void subsets(std::size_t next, std::size_t n, std::size_t k, drsm::index_list& s, Fn& fn) {
    if (s.size() == k) {
        fn(const_cast<const drsm::index_list&>(s));
        return;
    }
    // enough indices must remain to fill the subset
    for (std::size_t j = next; j + (k - s.size()) <= n; ++j) {
        s.push_back(static_cast<std::uint32_t>(j));
        subsets(j + 1, n, k, s, fn);
        s.pop_back();
    }
}

}  // namespace detail

/// Calls fn(p) for every grid point p with coordinates c_i / steps summing
/// to one (all compositions of `steps` into n nonnegative parts).
template <typename Fn>
void for_each_grid_point(std::size_t n, std::size_t steps, Fn&& fn) {
    drsm::numvec p(n);
    detail::compositions(steps, 0, steps, p, fn);
}

/// Calls fn(subset) for every size-k index subset of {0, ..., n-1},
/// in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    drsm::index_list s;
    s.reserve(k);
    detail::subsets(0, n, k, s, fn);
}

/// Minimum of <z, p> over ball-feasible grid points (membership checked with
/// a small slack so boundary grid points count).
inline double grid_min_linear(const drsm::numvec& z, const drsm::Chi2Ball& ball,
                              std::size_t steps) {
    double best = std::numeric_limits<double>::infinity();
    for_each_grid_point(z.size(), steps, [&](const drsm::numvec& p) {
        if (drsm::chi2_cost(p) <= ball.rho + 1e-9) {
            double v = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) v += z[i] * p[i];
            best = std::min(best, v);
        }
    });
    return best;
}

/// Minimum of 0.5 * ||w - p||^2 over ball-feasible grid points.
inline double grid_min_distance(const drsm::numvec& w, const drsm::Chi2Ball& ball,
                                std::size_t steps) {
    double best = std::numeric_limits<double>::infinity();
    for_each_grid_point(w.size(), steps, [&](const drsm::numvec& p) {
        if (drsm::chi2_cost(p) <= ball.rho + 1e-9) {
            double d = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) d += (w[i] - p[i]) * (w[i] - p[i]);
            best = std::min(best, 0.5 * d);
        }
    });
    return best;
}

/// Random point strictly inside the ball: a random simplex point (uniform via
/// exponential spacings) pulled toward the uniform distribution until its
/// divergence cost is a random fraction of rho. The cost is quadratic along
/// that segment, so the shrink factor is exact.
inline drsm::numvec random_feasible_point(const drsm::Chi2Ball& ball, drsm::Rng& rng) {
    const std::size_t n = ball.n;
    drsm::numvec p(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = -std::log(1.0 - rng.next_double() * (1.0 - 1e-12));
        total += p[i];
    }
    for (auto& v : p) v /= total;
    const double cost = drsm::chi2_cost(p);
    const double target = ball.rho * rng.next_double();
    if (cost > target && cost > 0.0) {
        const double t = std::sqrt(target / cost);
        const double u = 1.0 / static_cast<double>(n);
        for (auto& v : p) v = u + t * (v - u);
    }
    return p;
}

/// Exhaustive robust optimum over all size-k sets: max_S min_p sum_i p_i f_i(S).
inline double enumerate_robust_opt(const drsm::SampledObjective& obj, const drsm::Chi2Ball& ball,
                                   std::size_t k) {
    double best = -std::numeric_limits<double>::infinity();
    for_each_subset(obj.ground_size(), k, [&](const drsm::index_list& s) {
        drsm::numvec z(obj.num_samples());
        for (std::size_t i = 0; i < obj.num_samples(); ++i) z[i] = obj.eval(i, s);
        best = std::max(best, drsm::linear_oracle(z, ball).value);
    });
    return best;
}

}  // namespace bf
