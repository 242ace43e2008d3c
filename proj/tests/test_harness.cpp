// Experiment harness: synthetic generators, trial plumbing, aggregation,
// and the file formats.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "drsm/harness.hpp"
#include "drsm/io.hpp"

using drsm::ExperimentConfig;
using drsm::index_list;
using drsm::numvec;
using drsm::TrialResult;

namespace {

ExperimentConfig tiny_facility_config() {
    ExperimentConfig cfg;
    cfg.problem = "facility";
    cfg.ground = 8;
    cfg.cardinality = 2;
    cfg.train_samples = 5;
    cfg.test_samples = 12;
    cfg.rho = 1.0;
    cfg.trials = 2;
    cfg.seed = 404;
    cfg.round_count = 16;
    cfg.solver.iterations = 10;
    return cfg;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("facility generator marks exactly the requested support", "[harness]") {
    drsm::Rng rng(501);
    drsm::FacilityGenSpec spec;
    spec.support_size = 3;
    const auto samples = drsm::gen_facility_samples(10, 50, spec, rng);
    REQUIRE(samples.size() == 50);
    for (const auto& s : samples) {
        REQUIRE(s.rewards.size() == 10);
        std::size_t positive = 0;
        for (double r : s.rewards) {
            REQUIRE(r >= 0.0);
            if (r > 0.0) ++positive;
        }
        REQUIRE(positive == 3);
    }
    // one-liked-facility corner: exactly one positive reward
    spec.support_size = 1;
    for (const auto& s : drsm::gen_facility_samples(6, 30, spec, rng)) {
        std::size_t positive = 0;
        for (double r : s.rewards) positive += r > 0.0 ? 1 : 0;
        REQUIRE(positive == 1);
    }
    // zero magnitude scale degenerates to all-zero samples
    spec.magnitude_scale = 0.0;
    for (const auto& s : drsm::gen_facility_samples(6, 10, spec, rng)) {
        for (double r : s.rewards) REQUIRE(r == 0.0);
    }
    REQUIRE_THROWS_AS(drsm::gen_facility_samples(2, 5, {5, 0.0, 1.0, 1.0}, rng),
                      std::invalid_argument);
}

TEST_CASE("random graphs have the advertised shape", "[harness]") {
    drsm::Rng rng(503);
    const auto er = drsm::make_er_graph(60, 6.0, rng);
    for (const auto& [u, v] : er) {
        REQUIRE(u != v);
        REQUIRE(u < 60);
        REQUIRE(v < 60);
    }
    // 60 * 6 = 360 expected edges, sigma about 18
    REQUIRE(er.size() > 250);
    REQUIRE(er.size() < 480);

    const auto ws = drsm::make_ws_graph(40, 3, 0.1, rng);
    std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(ws.begin(), ws.end());
    for (const auto& [u, v] : ws) {
        REQUIRE(u != v);
        REQUIRE(edge_set.count({v, u}) == 1);  // stored in both directions
    }
    // ring degree 2 * 3 per node, some rewires may collide and drop
    REQUIRE(ws.size() > 0.8 * 40 * 6);
    REQUIRE(ws.size() <= 40 * 6);

    const auto pa = drsm::make_pa_graph(100, 3, rng);
    std::set<std::pair<std::uint32_t, std::uint32_t>> pa_set(pa.begin(), pa.end());
    std::vector<std::size_t> degree(100, 0);
    for (const auto& [u, v] : pa) {
        REQUIRE(u != v);
        REQUIRE(u < 100);
        REQUIRE(v < 100);
        REQUIRE(pa_set.count({v, u}) == 1);
        ++degree[u];
    }
    // 4-clique seed plus 3 attachments per arriving node, both directions
    REQUIRE(pa.size() == 2 * (6 + 96 * 3));
    // preferential attachment concentrates degree on early hubs
    REQUIRE(*std::max_element(degree.begin(), degree.end()) >= 4 * 3);
}

TEST_CASE("cascade mixture hits the rare regime at the configured rate", "[harness]") {
    drsm::Rng graph_rng(509);
    const auto edges = drsm::make_er_graph(30, 5.0, graph_rng);
    drsm::InfluenceGenSpec spec;
    spec.nodes = 30;
    spec.q_rare = 0.1;
    drsm::Rng rng(511);
    const auto mix = drsm::gen_influence_mixture(edges, 30, spec, 5000, rng);
    REQUIRE(mix.samples.size() == 5000);
    std::size_t rare = 0;
    double rare_edges = 0.0;
    double common_edges = 0.0;
    for (std::size_t i = 0; i < 5000; ++i) {
        if (mix.rare[i]) {
            ++rare;
            rare_edges += static_cast<double>(mix.samples[i].edges.size());
        } else {
            common_edges += static_cast<double>(mix.samples[i].edges.size());
        }
    }
    // binomial(5000, 0.1): mean 500, sigma about 21
    REQUIRE(rare > 400);
    REQUIRE(rare < 600);
    // rare cascades activate far fewer edges (p_low = 0.025 vs p_high = 0.1)
    REQUIRE(rare_edges / static_cast<double>(rare) <
            0.5 * common_edges / static_cast<double>(5000 - rare));
}

TEST_CASE("trials are reproducible and scheduling independent", "[harness]") {
    const ExperimentConfig cfg = tiny_facility_config();
    const auto a = drsm::run_trials(cfg);
    const auto b = drsm::run_trials(cfg);
    REQUIRE(a.size() == 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].trial_seed == b[i].trial_seed);
        REQUIRE(a[i].dro_test == b[i].dro_test);
        REQUIRE(a[i].erm_test == b[i].erm_test);
    }
    // forcing a single worker must not change anything
    setenv("DRSM_THREADS", "1", 1);
    const auto c = drsm::run_trials(cfg);
    unsetenv("DRSM_THREADS");
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].dro_train == c[i].dro_train);
        REQUIRE(a[i].dro_test == c[i].dro_test);
        REQUIRE(a[i].erm_train == c[i].erm_train);
        REQUIRE(a[i].erm_test == c[i].erm_test);
    }
}

TEST_CASE("zero-radius robust arm matches the rho-zero baseline bitwise", "[harness]") {
    ExperimentConfig cfg = tiny_facility_config();
    cfg.rho = 0.0;
    cfg.erm_solver = "mfw_rho0";
    for (const TrialResult& r : drsm::run_trials(cfg)) {
        REQUIRE(r.dro_train == r.erm_train);
        REQUIRE(r.dro_test == r.erm_test);
    }
}

TEST_CASE("influence trials report rare-class columns", "[harness]") {
    ExperimentConfig cfg;
    cfg.problem = "influence";
    cfg.cardinality = 2;
    cfg.train_samples = 6;
    cfg.test_samples = 40;
    cfg.rho = 2.0;
    cfg.trials = 1;
    cfg.seed = 9;
    cfg.round_count = 8;
    cfg.solver.iterations = 8;
    cfg.influence.nodes = 12;
    cfg.influence.avg_out_degree = 3.0;
    const auto results = drsm::run_trials(cfg);
    // with 40 test draws at q = 0.1 a rare sample is essentially certain
    REQUIRE(!std::isnan(results[0].dro_rare_test));
    REQUIRE(!std::isnan(results[0].erm_rare_test));
    REQUIRE(results[0].dro_test >= 0.0);
    REQUIRE(results[0].dro_test <= 12.0);
}

TEST_CASE("aggregation computes means, variances, and win counts", "[harness]") {
    std::vector<TrialResult> rs(3);
    rs[0] = {1, 0.0, 2.0, 0.0, 1.0, NAN, NAN};
    rs[1] = {2, 0.0, 4.0, 0.0, 4.0, NAN, NAN};
    rs[2] = {3, 0.0, 3.0, 0.0, 5.0, NAN, NAN};
    const auto s = drsm::aggregate(rs);
    REQUIRE(s.trials == 3);
    REQUIRE(std::abs(s.dro_test_mean - 3.0) < 1e-15);
    REQUIRE(std::abs(s.erm_test_mean - 10.0 / 3.0) < 1e-12);
    REQUIRE(std::abs(s.dro_test_var - 1.0) < 1e-12);  // unbiased variance of {2,3,4}
    REQUIRE(s.wins == 1);
    REQUIRE(s.ties == 1);
    REQUIRE(s.losses == 1);
    REQUIRE(std::abs(s.mean_abs_improvement - (-1.0 / 3.0)) < 1e-12);
    REQUIRE(s.rare_trials == 0);

    // identical columns: all ties, zero improvement
    for (auto& r : rs) r.erm_test = r.dro_test;
    const auto t = drsm::aggregate(rs);
    REQUIRE(t.ties == 3);
    REQUIRE(t.mean_abs_improvement == 0.0);
    REQUIRE(std::abs(t.mean_rel_improvement_pct) < 1e-12);
}

TEST_CASE("experiments write trial rows and a summary", "[harness]") {
    const auto dir = temp_file("drsm_harness_exp");
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg = tiny_facility_config();
    const auto summary = drsm::run_experiment(cfg, dir.string());
    REQUIRE(summary.trials == 2);
    REQUIRE(std::filesystem::exists(dir / "trials.csv"));
    REQUIRE(std::filesystem::exists(dir / "summary.json"));
    std::ifstream csv(dir / "trials.csv");
    std::string header;
    std::getline(csv, header);
    REQUIRE(header ==
            "trial,trial_seed,dro_train,dro_test,erm_train,erm_test,dro_rare_test,erm_rare_test");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) {
        if (!line.empty()) ++rows;
    }
    REQUIRE(rows == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("experiment configs survive a json round trip", "[harness]") {
    ExperimentConfig cfg;
    cfg.problem = "influence";
    cfg.cardinality = 4;
    cfg.train_samples = 9;
    cfg.rho = 3.5;
    cfg.erm_solver = "mfw_rho0";
    cfg.solver.iterations = 55;
    cfg.solver.momentum.numerator = 2.0;
    cfg.influence.nodes = 44;
    cfg.influence.graph = "preferential";
    cfg.influence.pa_attach = 5;
    cfg.influence.q_rare = 0.25;
    const auto back = drsm::config_from_json(drsm::config_to_json(cfg));
    REQUIRE(back.problem == cfg.problem);
    REQUIRE(back.cardinality == cfg.cardinality);
    REQUIRE(back.train_samples == cfg.train_samples);
    REQUIRE(back.rho == cfg.rho);
    REQUIRE(back.erm_solver == cfg.erm_solver);
    REQUIRE(back.solver.iterations == cfg.solver.iterations);
    REQUIRE(back.solver.momentum.numerator == cfg.solver.momentum.numerator);
    REQUIRE(back.influence.nodes == cfg.influence.nodes);
    REQUIRE(back.influence.graph == cfg.influence.graph);
    REQUIRE(back.influence.pa_attach == cfg.influence.pa_attach);
    REQUIRE(back.influence.q_rare == cfg.influence.q_rare);
    // defaults fill in missing fields; junk is rejected
    const auto sparse = drsm::config_from_json(nlohmann::json{{"problem", "facility"}});
    REQUIRE(sparse.ground == ExperimentConfig{}.ground);
    REQUIRE_THROWS_AS(drsm::config_from_json(nlohmann::json{{"problem", "unknown"}}),
                      std::invalid_argument);
}

TEST_CASE("sample files round trip through their formats", "[harness]") {
    drsm::Rng rng(521);
    drsm::FacilityGenSpec spec;
    const auto facility = drsm::gen_facility_samples(5, 7, spec, rng);
    const auto fac_path = temp_file("drsm_fac.csv");
    drsm::save_facility_csv(fac_path.string(), facility);
    const auto fac_back = drsm::load_facility_csv(fac_path.string());
    REQUIRE(fac_back.size() == facility.size());
    for (std::size_t i = 0; i < facility.size(); ++i) {
        REQUIRE(fac_back[i].rewards == facility[i].rewards);
    }

    std::vector<drsm::LiveEdgeSample> live(2);
    live[0] = {4, {{0, 1}, {2, 3}}};
    live[1] = {4, {{1, 0}}};
    const auto live_path = temp_file("drsm_live.txt");
    drsm::save_live_edges(live_path.string(), live);
    const auto live_back = drsm::load_live_edges(live_path.string());
    REQUIRE(live_back.size() == 2);
    REQUIRE(live_back[0].nodes == 4);
    REQUIRE(live_back[0].edges == live[0].edges);
    REQUIRE(live_back[1].edges == live[1].edges);

    // format sniffing: '#' headers mean live edges, otherwise reward rows
    REQUIRE(!drsm::load_objective(live_path.string()).is_facility());
    REQUIRE(drsm::load_objective(fac_path.string()).is_facility());

    const auto values_path = temp_file("drsm_vals.txt");
    std::ofstream(values_path) << "0.25\n-1.5\n3\n";
    REQUIRE(drsm::load_values(values_path.string()) == numvec{0.25, -1.5, 3.0});

    std::filesystem::remove(fac_path);
    std::filesystem::remove(live_path);
    std::filesystem::remove(values_path);
}

TEST_CASE("malformed files fail with the offending location", "[harness]") {
    const auto bad_path = temp_file("drsm_bad.csv");
    std::ofstream(bad_path) << "1.0,2.0\n1.0\n";  // ragged row
    try {
        drsm::load_facility_csv(bad_path.string());
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        REQUIRE(what.find("drsm_bad.csv") != std::string::npos);
        REQUIRE(what.find("2") != std::string::npos);  // line number
    }
    std::filesystem::remove(bad_path);
    REQUIRE_THROWS_AS(drsm::load_values("/nonexistent/drsm_nope.txt"), std::runtime_error);
}

TEST_CASE("experiment configuration is validated", "[harness]") {
    ExperimentConfig cfg = tiny_facility_config();
    cfg.cardinality = 100;
    REQUIRE_THROWS_AS(drsm::run_trials(cfg), std::invalid_argument);
    cfg = tiny_facility_config();
    cfg.rho = -1.0;
    REQUIRE_THROWS_AS(drsm::run_trials(cfg), std::invalid_argument);
    cfg = tiny_facility_config();
    cfg.trials = 0;
    REQUIRE_THROWS_AS(drsm::run_trials(cfg), std::invalid_argument);
    cfg = tiny_facility_config();
    cfg.erm_solver = "sgd";
    REQUIRE_THROWS_AS(drsm::run_trials(cfg), std::invalid_argument);
    cfg = tiny_facility_config();
    cfg.influence.graph = "complete";
    REQUIRE_THROWS_AS(drsm::run_trials(cfg), std::invalid_argument);
}
