// Continuous solvers: the linear maximization step, Frank-Wolfe variants and
// their bitwise equivalences, momentum reconstruction, lazy greedy against a
// plain reference, and the online best-response baseline.

#include <catch2/catch_amalgamated.hpp>

#include "brute_force.hpp"
#include "drsm/solvers.hpp"

using drsm::Chi2Ball;
using drsm::index_list;
using drsm::numvec;
using drsm::SampledObjective;
using drsm::SolverConfig;

namespace {

SampledObjective random_facility(std::size_t ground, std::size_t samples, drsm::Rng& rng) {
    std::vector<drsm::FacilitySample> fs(samples);
    for (auto& s : fs) {
        s.rewards.resize(ground);
        for (auto& r : s.rewards) r = rng.next_double();
    }
    return SampledObjective::facility(std::move(fs));
}

// plain eager greedy on g(S) = sum_i weights_i f_i(S), lowest index on ties
index_list plain_greedy(const SampledObjective& obj, const numvec& weights, std::size_t k) {
    index_list chosen;
    std::vector<char> in_set(obj.ground_size(), 0);
    auto value_of = [&](const index_list& s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < obj.num_samples(); ++i) {
            if (weights[i] > 0.0) acc += weights[i] * obj.eval(i, s);
        }
        return acc;
    };
    for (std::size_t round = 0; round < k; ++round) {
        const double base = value_of(chosen);
        double best_gain = -1.0;
        std::uint32_t best_j = 0;
        for (std::uint32_t j = 0; j < obj.ground_size(); ++j) {
            if (in_set[j]) continue;
            index_list trial = chosen;
            trial.push_back(j);
            const double gain = value_of(trial) - base;
            if (gain > best_gain) {
                best_gain = gain;
                best_j = j;
            }
        }
        chosen.push_back(best_j);
        in_set[best_j] = 1;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

double weighted_value(const SampledObjective& obj, const numvec& weights, const index_list& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < obj.num_samples(); ++i) acc += weights[i] * obj.eval(i, s);
    return acc;
}

}  // namespace

TEST_CASE("vertex step selects the k largest entries, lowest index first", "[solvers]") {
    REQUIRE(drsm::lmo_topk({0.5, 2.0, 1.0}, 2) == numvec{0.0, 1.0, 1.0});
    REQUIRE(drsm::lmo_topk({1.0, 1.0, 0.0}, 1) == numvec{1.0, 0.0, 0.0});
    REQUIRE(drsm::lmo_topk({-1.0, -2.0}, 1) == numvec{1.0, 0.0});
    REQUIRE(drsm::lmo_topk({3.0, 3.0, 3.0, 3.0}, 2) == numvec{1.0, 1.0, 0.0, 0.0});
    REQUIRE_THROWS_AS(drsm::lmo_topk({1.0, 2.0}, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(drsm::lmo_topk({1.0, 2.0}, 3), std::invalid_argument);
}

TEST_CASE("momentum schedule is clamped into (0, 1]", "[solvers]") {
    const drsm::StepSchedule s;
    REQUIRE(std::abs(s(1) - 4.0 / std::pow(9.0, 2.0 / 3.0)) < 1e-15);
    REQUIRE(s(1) <= 1.0);
    REQUIRE(s(1000000000) >= 1e-12);
    const auto one = drsm::StepSchedule::constant(5.0);
    REQUIRE(one(1) == 1.0);
    const auto half = drsm::StepSchedule::constant(0.5);
    REQUIRE(half(1) == 0.5);
    REQUIRE(half(999) == 0.5);
}

TEST_CASE("iterates stay in the scaled polytope and finish on the face", "[solvers]") {
    drsm::Rng rng(211);
    const auto obj = random_facility(7, 5, rng);
    SolverConfig cfg;
    cfg.iterations = 13;
    cfg.cardinality = 3;
    cfg.seed = 5;
    cfg.record_iterates = true;
    const auto run = drsm::mfw(obj, {0.7, 5}, cfg);
    REQUIRE(run.iterates.size() == 13);
    for (std::size_t t = 0; t < run.iterates.size(); ++t) {
        double sum = 0.0;
        for (double xj : run.iterates[t]) {
            REQUIRE(xj >= 0.0);
            REQUIRE(xj <= 1.0);
            sum += xj;
        }
        REQUIRE(std::abs(sum - static_cast<double>(t) * 3.0 / 13.0) < 1e-12);
    }
    double total = 0.0;
    for (double xj : run.x) total += xj;
    REQUIRE(std::abs(total - 3.0) < 1e-12);
    REQUIRE(run.trajectory.size() == 13);
}

TEST_CASE("plain Frank-Wolfe equals momentum with a constant schedule", "[solvers]") {
    drsm::Rng rng(223);
    const auto obj = random_facility(9, 6, rng);
    const Chi2Ball ball{1.2, 6};
    SolverConfig cfg;
    cfg.iterations = 40;
    cfg.cardinality = 3;
    cfg.seed = 17;
    const auto plain = drsm::fw_plain(obj, ball, cfg);
    cfg.momentum = drsm::StepSchedule::constant(1.0);
    const auto momentum = drsm::mfw(obj, ball, cfg);
    REQUIRE(plain.x == momentum.x);
    for (std::size_t t = 0; t < 40; ++t) {
        REQUIRE(plain.trajectory[t].value == momentum.trajectory[t].value);
        REQUIRE(plain.trajectory[t].direction_norm == momentum.trajectory[t].direction_norm);
    }
}

TEST_CASE("smoothing with zero radius and one sample reproduces momentum", "[solvers]") {
    drsm::Rng rng(227);
    const auto obj = random_facility(8, 4, rng);
    const Chi2Ball ball{0.9, 4};
    SolverConfig cfg;
    cfg.iterations = 30;
    cfg.cardinality = 2;
    cfg.seed = 23;
    cfg.smoothing_radius = 0.0;
    cfg.smoothing_samples = 1;
    const auto smoothed = drsm::fw_smoothed(obj, ball, cfg);
    const auto momentum = drsm::mfw(obj, ball, cfg);
    REQUIRE(smoothed.x == momentum.x);
    for (std::size_t t = 0; t < 30; ++t) {
        REQUIRE(smoothed.trajectory[t].value == momentum.trajectory[t].value);
    }
}

TEST_CASE("direction is the advertised momentum average of the gradients", "[solvers]") {
    drsm::Rng rng(229);
    const auto obj = random_facility(6, 4, rng);
    SolverConfig cfg;
    cfg.iterations = 5;
    cfg.cardinality = 2;
    cfg.seed = 31;
    cfg.record_gradients = true;
    const auto run = drsm::mfw(obj, {0.5, 4}, cfg);
    REQUIRE(run.gradients.size() == 5);
    numvec d(6, 0.0);
    for (std::size_t t = 1; t <= 5; ++t) {
        const double rho_t = cfg.momentum(t);
        for (std::size_t j = 0; j < 6; ++j) {
            d[j] = (1.0 - rho_t) * d[j] + rho_t * run.gradients[t - 1][j];
        }
        double norm = 0.0;
        for (double dj : d) norm += dj * dj;
        REQUIRE(std::abs(std::sqrt(norm) - run.trajectory[t - 1].direction_norm) < 1e-12);
    }
}

TEST_CASE("solver runs are reproducible from the seed", "[solvers]") {
    drsm::Rng rng(233);
    const auto obj = random_facility(10, 5, rng);
    const Chi2Ball ball{1.0, 5};
    SolverConfig cfg;
    cfg.iterations = 25;
    cfg.cardinality = 4;
    cfg.seed = 77;
    const auto a = drsm::mfw(obj, ball, cfg);
    const auto b = drsm::mfw(obj, ball, cfg);
    REQUIRE(a.x == b.x);
    for (std::size_t t = 0; t < 25; ++t) {
        REQUIRE(a.trajectory[t].value == b.trajectory[t].value);
        REQUIRE(a.trajectory[t].worst_p == b.trajectory[t].worst_p);
    }
}

TEST_CASE("exact-mode trajectories are monotone with feasible weights", "[solvers]") {
    drsm::Rng rng(239);
    const auto obj = random_facility(8, 5, rng);
    const Chi2Ball ball{0.8, 5};
    SolverConfig cfg;
    cfg.iterations = 50;
    cfg.cardinality = 3;
    cfg.seed = 41;
    const auto run = drsm::mfw(obj, ball, cfg);
    for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
        if (t > 0) {
            // counts only grow, the extension is monotone, and evaluation is
            // exact below the cutoff, so recorded values cannot decrease
            REQUIRE(run.trajectory[t].value >= run.trajectory[t - 1].value - 1e-12);
        }
        REQUIRE(drsm::contains(ball, run.trajectory[t].worst_p, 1e-9));
    }
}

TEST_CASE("oversized ground sets fall back to sampled value estimates", "[solvers]") {
    drsm::Rng rng(241);
    const auto obj = random_facility(23, 4, rng);
    SolverConfig cfg;
    cfg.iterations = 6;
    cfg.cardinality = 2;
    cfg.seed = 3;
    cfg.value_samples = 40;
    const auto run = drsm::mfw(obj, {0.5, 4}, cfg);
    double total = 0.0;
    for (double xj : run.x) {
        REQUIRE(xj >= 0.0);
        REQUIRE(xj <= 1.0);
        total += xj;
    }
    REQUIRE(std::abs(total - 2.0) < 1e-12);
}

TEST_CASE("smoothed variant shifts the returned point inward", "[solvers]") {
    drsm::Rng rng(251);
    const auto obj = random_facility(6, 3, rng);
    SolverConfig cfg;
    cfg.iterations = 10;
    cfg.cardinality = 2;
    cfg.seed = 11;
    cfg.smoothing_radius = 0.2;
    cfg.smoothing_samples = 3;
    const auto run = drsm::fw_smoothed(obj, {0.5, 3}, cfg);
    double total = 0.0;
    for (double xj : run.x) {
        REQUIRE(xj >= 0.0);
        REQUIRE(xj <= 1.0 - 0.2 + 1e-12);
        total += xj;
    }
    REQUIRE(total <= 2.0 + 1e-12);
}

TEST_CASE("lazy greedy reproduces plain greedy exactly", "[solvers]") {
    drsm::Rng rng(257);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t ground = 4 + rng.next_index(6);
        const std::size_t samples = 1 + rng.next_index(5);
        const auto obj = random_facility(ground, samples, rng);
        numvec w(samples);
        for (auto& wi : w) wi = rng.uniform(-0.2, 1.0);
        bool any_positive = false;
        for (double wi : w) any_positive = any_positive || wi > 0.0;
        if (!any_positive) w[0] = 0.5;
        const std::size_t k = 1 + rng.next_index(ground - 1);
        REQUIRE(drsm::lazy_greedy(obj, w, k) == plain_greedy(obj, w, k));
    }
    // influence objective too
    std::vector<drsm::LiveEdgeSample> ls(3);
    for (auto& s : ls) {
        s.nodes = 7;
        for (std::uint32_t u = 0; u < 7; ++u) {
            for (std::uint32_t v = 0; v < 7; ++v) {
                if (u != v && rng.bernoulli(0.25)) s.edges.emplace_back(u, v);
            }
        }
    }
    const auto inf = SampledObjective::influence(std::move(ls));
    const numvec w{0.5, 0.3, 0.2};
    for (std::size_t k = 1; k <= 4; ++k) {
        REQUIRE(drsm::lazy_greedy(inf, w, k) == plain_greedy(inf, w, k));
    }
}

TEST_CASE("greedy value clears the classical approximation bound", "[solvers]") {
    drsm::Rng rng(263);
    for (int rep = 0; rep < 10; ++rep) {
        const auto obj = random_facility(8, 4, rng);
        numvec w(4);
        for (auto& wi : w) wi = rng.next_double() + 0.01;
        const std::size_t k = 3;
        const index_list greedy = drsm::lazy_greedy(obj, w, k);
        double opt = 0.0;
        bf::for_each_subset(8, k, [&](const index_list& s) {
            opt = std::max(opt, weighted_value(obj, w, s));
        });
        REQUIRE(weighted_value(obj, w, greedy) >= (1.0 - std::exp(-1.0)) * opt - 1e-12);
    }
}

TEST_CASE("nonpositive sample weights are ignored by greedy", "[solvers]") {
    // sample 1 and 2 would dominate the choice if their weights counted
    std::vector<drsm::FacilitySample> fs{{{0.0, 1.0}}, {{10.0, 0.0}}, {{5.0, 0.0}}};
    const auto obj = SampledObjective::facility(std::move(fs));
    REQUIRE(drsm::lazy_greedy(obj, {1.0, -5.0, 0.0}, 1) == index_list{1});
    REQUIRE(drsm::lazy_greedy(obj, {1.0, 2.0, 0.0}, 1) == index_list{0});
}

TEST_CASE("zero-radius best response repeats greedy on the sample mean", "[solvers]") {
    drsm::Rng rng(269);
    const auto obj = random_facility(6, 4, rng);
    drsm::OgdConfig cfg;
    cfg.iterations = 7;
    cfg.cardinality = 2;
    const auto run = drsm::ogd_best_response(obj, {0.0, 4}, cfg);
    REQUIRE(run.subsets.size() == 7);
    const numvec uniform(4, 0.25);
    const index_list mean_greedy = drsm::lazy_greedy(obj, uniform, 2);
    for (const auto& s : run.subsets) REQUIRE(s == mean_greedy);
    for (double w : run.final_weights) REQUIRE(std::abs(w - 0.25) < 1e-12);
    for (std::size_t t = 1; t < 7; ++t) REQUIRE(run.round_values[t] == run.round_values[0]);
}

TEST_CASE("best-response weights stay feasible and payoffs bounded", "[solvers]") {
    drsm::Rng rng(271);
    const auto obj = random_facility(9, 6, rng);
    const Chi2Ball ball{1.5, 6};
    drsm::OgdConfig cfg;
    cfg.iterations = 20;
    cfg.cardinality = 3;
    const auto run = drsm::ogd_best_response(obj, ball, cfg);
    REQUIRE(drsm::contains(ball, run.final_weights, 1e-9));
    for (double v : run.round_values) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= obj.value_bound() + 1e-12);
    }
    // single-sample corner: the adversary has nowhere to move
    const auto single = SampledObjective::facility({obj.facility_samples()[0]});
    const auto one = drsm::ogd_best_response(single, {3.0, 1}, cfg);
    REQUIRE(one.final_weights == numvec{1.0});
}

TEST_CASE("solver configuration is validated", "[solvers]") {
    drsm::Rng rng(277);
    const auto obj = random_facility(5, 3, rng);
    SolverConfig cfg;
    cfg.iterations = 0;
    REQUIRE_THROWS_AS(drsm::mfw(obj, {0.5, 3}, cfg), std::invalid_argument);
    cfg.iterations = 5;
    cfg.cardinality = 9;
    REQUIRE_THROWS_AS(drsm::mfw(obj, {0.5, 3}, cfg), std::invalid_argument);
    cfg.cardinality = 2;
    REQUIRE_THROWS_AS(drsm::mfw(obj, {0.5, 4}, cfg), std::invalid_argument);
    drsm::OgdConfig ocfg;
    ocfg.cardinality = 2;
    ocfg.eta0 = -1.0;
    REQUIRE_THROWS_AS(drsm::ogd_best_response(obj, {0.5, 3}, ocfg), std::invalid_argument);
}
