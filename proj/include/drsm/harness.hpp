#pragma once
// Train/test experiment harness comparing the distributionally robust
// pipeline (momentum Frank-Wolfe + swap rounding) against empirical risk
// minimization on held-out data. Provides synthetic generators for both
// sample families, an embarrassingly parallel trial runner with per-trial
// seeds, and CSV/JSON emission of per-trial rows and aggregates.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "drsm/rounding.hpp"
#include "drsm/solvers.hpp"

namespace drsm {

struct FacilityGenSpec {
    std::size_t support_size = 3;   // facilities liked per demand sample
    double lognormal_mu = 0.0;      // log-scale location of reward magnitudes
    double lognormal_sigma = 1.0;   // log-scale spread (heavier tails when larger)
    double magnitude_scale = 1.0;   // 0 produces all-zero samples
};

struct InfluenceGenSpec {
    std::size_t nodes = 100;
    std::string graph = "erdos_renyi";  // or "watts_strogatz" / "preferential"
    double avg_out_degree = 6.0;        // erdos_renyi
    std::size_t ws_ring = 4;            // watts_strogatz: neighbors per side
    double ws_rewire = 0.1;
    std::size_t pa_attach = 3;  // preferential: edges added per arriving node
    double q_rare = 0.1;   // probability a sample comes from the rare regime
    double p_low = 0.025;  // edge activation in the rare regime
    double p_high = 0.1;   // edge activation in the common regime
};

struct ExperimentConfig {
    std::string problem = "facility";  // or "influence"
    std::size_t ground = 50;           // facility ground set (influence uses nodes)
    std::size_t cardinality = 5;
    std::size_t train_samples = 20;
    std::size_t test_samples = 200;
    double rho = 10.0;
    std::size_t trials = 30;
    std::uint64_t seed = 1;
    std::string erm_solver = "greedy";  // or "mfw_rho0"
    std::size_t round_count = 200;
    SolverConfig solver;  // cardinality and seed are set per trial
    FacilityGenSpec facility;
    InfluenceGenSpec influence;
};

/// Demand samples with exactly support_size liked facilities each, chosen
/// uniformly without replacement, with log-normal reward magnitudes.
inline std::vector<FacilitySample> gen_facility_samples(std::size_t ground, std::size_t count,
                                                        const FacilityGenSpec& spec, Rng& rng) {
    detail::require(ground >= 1 && count >= 1, "need a nonempty instance");
    detail::require(spec.support_size >= 1 && spec.support_size <= ground, "support size out of range");
    detail::require(spec.magnitude_scale >= 0.0 && spec.lognormal_sigma >= 0.0, "invalid magnitudes");
    std::vector<FacilitySample> samples(count);
    std::vector<std::uint32_t> pool(ground);
    for (auto& s : samples) {
        s.rewards.assign(ground, 0.0);
        std::iota(pool.begin(), pool.end(), 0u);
        for (std::size_t t = 0; t < spec.support_size; ++t) {
            const std::size_t pick = t + rng.next_index(ground - t);
            std::swap(pool[t], pool[pick]);
            s.rewards[pool[t]] =
                spec.magnitude_scale * std::exp(spec.lognormal_mu + spec.lognormal_sigma * rng.next_normal());
        }
    }
    return samples;
}

/// Directed Erdos-Renyi graph: each ordered pair is an edge independently
/// with probability avg_out_degree / (nodes - 1).
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> make_er_graph(std::size_t nodes,
                                                                          double avg_out_degree,
                                                                          Rng& rng) {
    detail::require(nodes >= 2, "graph needs at least two nodes");
    const double p = std::min(1.0, avg_out_degree / static_cast<double>(nodes - 1));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < nodes; ++u) {
        for (std::uint32_t v = 0; v < nodes; ++v) {
            if (u != v && rng.bernoulli(p)) edges.emplace_back(u, v);
        }
    }
    return edges;
}

/// Watts-Strogatz small world: ring lattice with `ring` neighbors per side,
/// each clockwise edge rewired with probability rewire; edges are stored in
/// both directions.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> make_ws_graph(std::size_t nodes,
                                                                          std::size_t ring,
                                                                          double rewire, Rng& rng) {
    detail::require(nodes >= 3 && ring >= 1 && 2 * ring < nodes, "invalid ring lattice");
    detail::require(rewire >= 0.0 && rewire <= 1.0, "rewire probability out of range");
    std::vector<std::vector<char>> adj(nodes, std::vector<char>(nodes, 0));
    for (std::uint32_t u = 0; u < nodes; ++u) {
        for (std::size_t d = 1; d <= ring; ++d) {
            std::uint32_t v = static_cast<std::uint32_t>((u + d) % nodes);
            if (rng.bernoulli(rewire)) {
                // rewire to a uniform non-neighbor
                for (std::size_t tries = 0; tries < 4 * nodes; ++tries) {
                    const auto w = static_cast<std::uint32_t>(rng.next_index(nodes));
                    if (w != u && !adj[u][w] && !adj[w][u]) {
                        v = w;
                        break;
                    }
                }
            }
            if (!adj[u][v] && !adj[v][u] && u != v) {
                adj[u][v] = adj[v][u] = 1;
            }
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < nodes; ++u) {
        for (std::uint32_t v = 0; v < nodes; ++v) {
            if (adj[u][v]) edges.emplace_back(u, v);
        }
    }
    return edges;
}

/// Preferential attachment (scale-free) graph: nodes arrive one at a time and
/// attach `attach` edges to existing nodes picked proportionally to degree;
/// edges are stored in both directions. Degree heterogeneity mirrors real
/// social graphs, where a few hubs dominate low-activation cascades.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> make_pa_graph(std::size_t nodes,
                                                                          std::size_t attach,
                                                                          Rng& rng) {
    detail::require(attach >= 1 && nodes > attach, "attachment count out of range");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    // endpoint bag: each node appears once per incident edge, giving
    // degree-proportional sampling by a uniform draw
    std::vector<std::uint32_t> bag;
    const std::uint32_t seed_nodes = static_cast<std::uint32_t>(attach + 1);
    for (std::uint32_t u = 0; u < seed_nodes; ++u) {
        for (std::uint32_t v = u + 1; v < seed_nodes; ++v) {
            edges.emplace_back(u, v);
            edges.emplace_back(v, u);
            bag.push_back(u);
            bag.push_back(v);
        }
    }
    std::vector<std::uint32_t> picked;
    for (std::uint32_t u = seed_nodes; u < nodes; ++u) {
        picked.clear();
        while (picked.size() < attach) {
            const std::uint32_t t = bag[rng.next_index(bag.size())];
            if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
        }
        for (const std::uint32_t t : picked) {
            edges.emplace_back(u, t);
            edges.emplace_back(t, u);
            bag.push_back(u);
            bag.push_back(t);
        }
    }
    return edges;
}

/// Live-edge samples from a two-regime cascade mixture: with probability
/// q_rare a sample activates edges at p_low (rare regime), otherwise at
/// p_high. Regime labels are kept for rare-class evaluation.
struct InfluenceSampleSet {
    std::vector<LiveEdgeSample> samples;
    std::vector<char> rare;
};

inline InfluenceSampleSet gen_influence_mixture(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges, std::size_t nodes,
    const InfluenceGenSpec& spec, std::size_t count, Rng& rng) {
    detail::require(count >= 1, "need at least one sample");
    detail::require(spec.q_rare >= 0.0 && spec.q_rare <= 1.0, "mixture weight out of range");
    detail::require(spec.p_low >= 0.0 && spec.p_low <= 1.0 && spec.p_high >= 0.0 && spec.p_high <= 1.0,
                    "activation probabilities out of range");
    InfluenceSampleSet out;
    out.samples.resize(count);
    out.rare.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const bool rare = rng.bernoulli(spec.q_rare);
        const double p = rare ? spec.p_low : spec.p_high;
        out.rare[i] = rare ? 1 : 0;
        out.samples[i].nodes = nodes;
        for (const auto& e : edges) {
            if (rng.bernoulli(p)) out.samples[i].edges.push_back(e);
        }
    }
    return out;
}

/// One train/test comparison. Train and test columns are plain means over
/// the respective samples of the solution distribution's expected value;
/// rare columns restrict the test mean to rare-regime samples (NaN when the
/// trial has none or the problem has no regimes).
struct TrialResult {
    std::uint64_t trial_seed = 0;
    double dro_train = 0.0;
    double dro_test = 0.0;
    double erm_train = 0.0;
    double erm_test = 0.0;
    double dro_rare_test = std::numeric_limits<double>::quiet_NaN();
    double erm_rare_test = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double mean_over(const numvec& values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

inline double mean_over_mask(const numvec& values, const std::vector<char>& mask) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask[i]) {
            acc += values[i];
            ++count;
        }
    }
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : acc / static_cast<double>(count);
}

// Stream ids inside one trial; both arms derive the same streams so that a
// rho = 0 robust arm reproduces the mfw_rho0 ERM arm bitwise.
inline constexpr std::uint64_t kGraphStream = 100;
inline constexpr std::uint64_t kTrainStream = 101;
inline constexpr std::uint64_t kTestStream = 102;
inline constexpr std::uint64_t kSolverStream = 103;
inline constexpr std::uint64_t kRoundStream = 104;

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
    detail::require(cfg.problem == "facility" || cfg.problem == "influence", "unknown problem kind");
    detail::require(cfg.erm_solver == "greedy" || cfg.erm_solver == "mfw_rho0", "unknown ERM solver");
    detail::require(cfg.influence.graph == "erdos_renyi" || cfg.influence.graph == "watts_strogatz" ||
                        cfg.influence.graph == "preferential",
                    "unknown graph generator");
    const std::size_t ground = cfg.problem == "facility" ? cfg.ground : cfg.influence.nodes;
    detail::require(cfg.cardinality >= 1 && cfg.cardinality <= ground, "cardinality out of range");
    detail::require(cfg.train_samples >= 1 && cfg.test_samples >= 1, "need train and test samples");
    detail::require(std::isfinite(cfg.rho) && cfg.rho >= 0.0, "rho must be finite and nonnegative");
    detail::require(cfg.trials >= 1, "need at least one trial");
    detail::require(cfg.round_count >= 1, "need at least one rounded draw");
}

inline TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
    validate_config(cfg);
    const std::uint64_t trial_seed = derive_seed(cfg.seed, trial_index + 1);
    Rng train_rng = Rng::stream(trial_seed, detail::kTrainStream);
    Rng test_rng = Rng::stream(trial_seed, detail::kTestStream);

    TrialResult out;
    out.trial_seed = trial_seed;

    // One graph per trial; both the train and test cascades run on it.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> graph_edges;
    if (cfg.problem == "influence") {
        Rng graph_rng = Rng::stream(trial_seed, detail::kGraphStream);
        if (cfg.influence.graph == "watts_strogatz") {
            graph_edges = make_ws_graph(cfg.influence.nodes, cfg.influence.ws_ring,
                                        cfg.influence.ws_rewire, graph_rng);
        } else if (cfg.influence.graph == "preferential") {
            graph_edges = make_pa_graph(cfg.influence.nodes, cfg.influence.pa_attach, graph_rng);
        } else {
            graph_edges = make_er_graph(cfg.influence.nodes, cfg.influence.avg_out_degree, graph_rng);
        }
    }

    SampledObjective train = [&] {
        if (cfg.problem == "facility") {
            return SampledObjective::facility(
                gen_facility_samples(cfg.ground, cfg.train_samples, cfg.facility, train_rng));
        }
        auto mix = gen_influence_mixture(graph_edges, cfg.influence.nodes, cfg.influence,
                                         cfg.train_samples, train_rng);
        return SampledObjective::influence(std::move(mix.samples));
    }();

    std::vector<char> test_rare;
    SampledObjective test = [&] {
        if (cfg.problem == "facility") {
            return SampledObjective::facility(
                gen_facility_samples(cfg.ground, cfg.test_samples, cfg.facility, test_rng));
        }
        auto mix = gen_influence_mixture(graph_edges, cfg.influence.nodes, cfg.influence,
                                         cfg.test_samples, test_rng);
        test_rare = std::move(mix.rare);
        return SampledObjective::influence(std::move(mix.samples));
    }();

    const Chi2Ball ball{cfg.rho, cfg.train_samples};
    SolverConfig scfg = cfg.solver;
    scfg.cardinality = cfg.cardinality;
    scfg.seed = derive_seed(trial_seed, detail::kSolverStream);

    // Robust arm: momentum Frank-Wolfe, then an empirical rounded distribution.
    const SolverRun dro_run = mfw(train, ball, scfg);
    Rng dro_round = Rng::stream(trial_seed, detail::kRoundStream);
    const SetDistribution dro_dist =
        build_distribution(dro_run.x, cfg.cardinality, cfg.round_count, dro_round);

    // ERM arm: greedy on the sample mean, or the same pipeline at rho = 0.
    SetDistribution erm_dist;
    if (cfg.erm_solver == "greedy") {
        const numvec uniform(train.num_samples(), 1.0 / static_cast<double>(train.num_samples()));
        erm_dist.subsets.push_back(lazy_greedy(train, uniform, cfg.cardinality));
        erm_dist.weights.push_back(1.0);
    } else {
        const Chi2Ball mean_ball{0.0, cfg.train_samples};
        const SolverRun erm_run = mfw(train, mean_ball, scfg);
        Rng erm_round = Rng::stream(trial_seed, detail::kRoundStream);
        erm_dist = build_distribution(erm_run.x, cfg.cardinality, cfg.round_count, erm_round);
    }

    out.dro_train = detail::mean_over(distribution_values(dro_dist, train));
    out.erm_train = detail::mean_over(distribution_values(erm_dist, train));
    const numvec dro_test_values = distribution_values(dro_dist, test);
    const numvec erm_test_values = distribution_values(erm_dist, test);
    out.dro_test = detail::mean_over(dro_test_values);
    out.erm_test = detail::mean_over(erm_test_values);
    if (cfg.problem == "influence") {
        out.dro_rare_test = detail::mean_over_mask(dro_test_values, test_rare);
        out.erm_rare_test = detail::mean_over_mask(erm_test_values, test_rare);
    }
    return out;
}

/// Across-trial aggregates. Variances are unbiased sample variances of the
/// test columns; relative improvement averages 100 * (dro - erm) / erm over
/// trials with positive ERM value; ties are exact equalities.
struct Summary {
    std::size_t trials = 0;
    double dro_train_mean = 0.0;
    double erm_train_mean = 0.0;
    double dro_test_mean = 0.0;
    double erm_test_mean = 0.0;
    double dro_test_var = 0.0;
    double erm_test_var = 0.0;
    double mean_abs_improvement = 0.0;
    double mean_rel_improvement_pct = 0.0;
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
    std::size_t rare_trials = 0;
    double dro_rare_mean = std::numeric_limits<double>::quiet_NaN();
    double erm_rare_mean = std::numeric_limits<double>::quiet_NaN();
    std::size_t rare_wins = 0;
    std::size_t rare_ties = 0;
    std::size_t rare_losses = 0;
};

inline Summary aggregate(const std::vector<TrialResult>& results) {
    detail::require(!results.empty(), "no trials to aggregate");
    Summary s;
    s.trials = results.size();
    const double n = static_cast<double>(results.size());
    double rel_acc = 0.0;
    std::size_t rel_count = 0;
    double rare_dro_acc = 0.0;
    double rare_erm_acc = 0.0;
    for (const TrialResult& r : results) {
        s.dro_train_mean += r.dro_train / n;
        s.erm_train_mean += r.erm_train / n;
        s.dro_test_mean += r.dro_test / n;
        s.erm_test_mean += r.erm_test / n;
        s.mean_abs_improvement += (r.dro_test - r.erm_test) / n;
        if (r.erm_test > 0.0) {
            rel_acc += 100.0 * (r.dro_test - r.erm_test) / r.erm_test;
            ++rel_count;
        }
        if (r.dro_test > r.erm_test) {
            ++s.wins;
        } else if (r.dro_test < r.erm_test) {
            ++s.losses;
        } else {
            ++s.ties;
        }
        if (!std::isnan(r.dro_rare_test) && !std::isnan(r.erm_rare_test)) {
            ++s.rare_trials;
            rare_dro_acc += r.dro_rare_test;
            rare_erm_acc += r.erm_rare_test;
            if (r.dro_rare_test > r.erm_rare_test) {
                ++s.rare_wins;
            } else if (r.dro_rare_test < r.erm_rare_test) {
                ++s.rare_losses;
            } else {
                ++s.rare_ties;
            }
        }
    }
    s.mean_rel_improvement_pct = rel_count > 0 ? rel_acc / static_cast<double>(rel_count)
                                               : std::numeric_limits<double>::quiet_NaN();
    if (s.rare_trials > 0) {
        s.dro_rare_mean = rare_dro_acc / static_cast<double>(s.rare_trials);
        s.erm_rare_mean = rare_erm_acc / static_cast<double>(s.rare_trials);
    }
    if (results.size() >= 2) {
        for (const TrialResult& r : results) {
            s.dro_test_var += (r.dro_test - s.dro_test_mean) * (r.dro_test - s.dro_test_mean);
            s.erm_test_var += (r.erm_test - s.erm_test_mean) * (r.erm_test - s.erm_test_mean);
        }
        s.dro_test_var /= n - 1.0;
        s.erm_test_var /= n - 1.0;
    }
    return s;
}

/// Worker count: DRSM_THREADS when set, otherwise the hardware concurrency.
inline std::size_t thread_count() {
    if (const char* env = std::getenv("DRSM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? hw : 1;
}

/// Runs all trials (parallel across a work-stealing index; results are
/// positioned by trial index, so the output is independent of scheduling).
inline std::vector<TrialResult> run_trials(const ExperimentConfig& cfg) {
    validate_config(cfg);
    std::vector<TrialResult> results(cfg.trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t workers = std::min(thread_count(), cfg.trials);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cfg.trials) return;
                try {
                    results[i] = run_trial(cfg, i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_trials_csv(const std::string& path, const std::vector<TrialResult>& results) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "trial,trial_seed,dro_train,dro_test,erm_train,erm_test,dro_rare_test,erm_rare_test\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const TrialResult& r = results[i];
        out << i << "," << r.trial_seed << "," << detail::format_double(r.dro_train) << ","
            << detail::format_double(r.dro_test) << "," << detail::format_double(r.erm_train) << ","
            << detail::format_double(r.erm_test) << "," << detail::format_double(r.dro_rare_test)
            << "," << detail::format_double(r.erm_rare_test) << "\n";
    }
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{{"problem", cfg.problem},
                     {"ground", cfg.ground},
                     {"cardinality", cfg.cardinality},
                     {"train_samples", cfg.train_samples},
                     {"test_samples", cfg.test_samples},
                     {"rho", cfg.rho},
                     {"trials", cfg.trials},
                     {"seed", cfg.seed},
                     {"erm_solver", cfg.erm_solver},
                     {"round_count", cfg.round_count}};
    j["solver"] = {{"iterations", cfg.solver.iterations},
                   {"batch", cfg.solver.batch},
                   {"value_samples", cfg.solver.value_samples},
                   {"exact_cutoff", cfg.solver.exact_cutoff},
                   {"grad_inner", cfg.solver.grad_inner},
                   {"momentum",
                    {{"numerator", cfg.solver.momentum.numerator},
                     {"offset", cfg.solver.momentum.offset},
                     {"exponent", cfg.solver.momentum.exponent}}}};
    if (cfg.problem == "facility") {
        j["facility"] = {{"support_size", cfg.facility.support_size},
                         {"lognormal_mu", cfg.facility.lognormal_mu},
                         {"lognormal_sigma", cfg.facility.lognormal_sigma},
                         {"magnitude_scale", cfg.facility.magnitude_scale}};
    } else {
        j["influence"] = {{"nodes", cfg.influence.nodes},
                          {"graph", cfg.influence.graph},
                          {"avg_out_degree", cfg.influence.avg_out_degree},
                          {"ws_ring", cfg.influence.ws_ring},
                          {"ws_rewire", cfg.influence.ws_rewire},
                          {"pa_attach", cfg.influence.pa_attach},
                          {"q_rare", cfg.influence.q_rare},
                          {"p_low", cfg.influence.p_low},
                          {"p_high", cfg.influence.p_high}};
    }
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.problem = j.value("problem", cfg.problem);
    cfg.ground = j.value("ground", cfg.ground);
    cfg.cardinality = j.value("cardinality", cfg.cardinality);
    cfg.train_samples = j.value("train_samples", cfg.train_samples);
    cfg.test_samples = j.value("test_samples", cfg.test_samples);
    cfg.rho = j.value("rho", cfg.rho);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.erm_solver = j.value("erm_solver", cfg.erm_solver);
    cfg.round_count = j.value("round_count", cfg.round_count);
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        cfg.solver.iterations = s.value("iterations", cfg.solver.iterations);
        cfg.solver.batch = s.value("batch", cfg.solver.batch);
        cfg.solver.value_samples = s.value("value_samples", cfg.solver.value_samples);
        cfg.solver.exact_cutoff = s.value("exact_cutoff", cfg.solver.exact_cutoff);
        cfg.solver.grad_inner = s.value("grad_inner", cfg.solver.grad_inner);
        if (s.contains("momentum")) {
            const auto& m = s.at("momentum");
            cfg.solver.momentum.numerator = m.value("numerator", cfg.solver.momentum.numerator);
            cfg.solver.momentum.offset = m.value("offset", cfg.solver.momentum.offset);
            cfg.solver.momentum.exponent = m.value("exponent", cfg.solver.momentum.exponent);
        }
    }
    if (j.contains("facility")) {
        const auto& f = j.at("facility");
        cfg.facility.support_size = f.value("support_size", cfg.facility.support_size);
        cfg.facility.lognormal_mu = f.value("lognormal_mu", cfg.facility.lognormal_mu);
        cfg.facility.lognormal_sigma = f.value("lognormal_sigma", cfg.facility.lognormal_sigma);
        cfg.facility.magnitude_scale = f.value("magnitude_scale", cfg.facility.magnitude_scale);
    }
    if (j.contains("influence")) {
        const auto& f = j.at("influence");
        cfg.influence.nodes = f.value("nodes", cfg.influence.nodes);
        cfg.influence.graph = f.value("graph", cfg.influence.graph);
        cfg.influence.avg_out_degree = f.value("avg_out_degree", cfg.influence.avg_out_degree);
        cfg.influence.ws_ring = f.value("ws_ring", cfg.influence.ws_ring);
        cfg.influence.ws_rewire = f.value("ws_rewire", cfg.influence.ws_rewire);
        cfg.influence.pa_attach = f.value("pa_attach", cfg.influence.pa_attach);
        cfg.influence.q_rare = f.value("q_rare", cfg.influence.q_rare);
        cfg.influence.p_low = f.value("p_low", cfg.influence.p_low);
        cfg.influence.p_high = f.value("p_high", cfg.influence.p_high);
    }
    validate_config(cfg);
    return cfg;
}

inline nlohmann::json summary_to_json(const Summary& s, const ExperimentConfig& cfg) {
    nlohmann::json j{{"trials", s.trials},
                     {"dro_train_mean", s.dro_train_mean},
                     {"erm_train_mean", s.erm_train_mean},
                     {"dro_test_mean", s.dro_test_mean},
                     {"erm_test_mean", s.erm_test_mean},
                     {"dro_test_var", s.dro_test_var},
                     {"erm_test_var", s.erm_test_var},
                     {"mean_abs_improvement", s.mean_abs_improvement},
                     {"mean_rel_improvement_pct", s.mean_rel_improvement_pct},
                     {"wins", s.wins},
                     {"ties", s.ties},
                     {"losses", s.losses}};
    if (s.rare_trials > 0) {
        j["rare"] = {{"trials", s.rare_trials}, {"dro_rare_mean", s.dro_rare_mean},
                     {"erm_rare_mean", s.erm_rare_mean}, {"wins", s.rare_wins},
                     {"ties", s.rare_ties},     {"losses", s.rare_losses}};
    }
    j["config"] = config_to_json(cfg);
    return j;
}

/// Runs the experiment and writes <out_dir>/trials.csv and summary.json.
inline Summary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    const std::vector<TrialResult> results = run_trials(cfg);
    const Summary summary = aggregate(results);
    std::filesystem::create_directories(out_dir);
    write_trials_csv((std::filesystem::path(out_dir) / "trials.csv").string(), results);
    std::ofstream out(std::filesystem::path(out_dir) / "summary.json");
    if (!out) throw std::runtime_error(out_dir + "/summary.json: cannot open for writing");
    out << summary_to_json(summary, cfg).dump(2) << "\n";
    return summary;
}

}  // namespace drsm
