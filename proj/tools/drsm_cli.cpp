// Command-line frontend: adversarial-distribution queries, data inspection,
// the continuous solvers, swap rounding, and the train/test experiment
// harness. All outputs are deterministic for a fixed seed; wall-clock
// timings are only emitted behind --timing so reruns stay byte-identical.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "drsm/drsm.hpp"

namespace {

using nlohmann::json;

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

void write_json(const std::string& path, const json& j) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    json j;
    in >> j;
    return j;
}

struct OracleArgs {
    std::string values_path;
    double rho = 1.0;
    std::string out;
};

int run_oracle(const OracleArgs& args) {
    const drsm::numvec z = drsm::load_values(args.values_path);
    const drsm::Chi2Ball ball{args.rho, z.size()};
    const drsm::OracleSolution sol = drsm::linear_oracle(z, ball);
    json j{{"value", sol.value},       {"p", sol.p},     {"m", sol.m},
           {"lambda", sol.lambda},     {"theta", sol.theta}, {"tight", sol.tight},
           {"kkt_residual", drsm::kkt_residual(z, ball, sol)}};
    write_json(args.out, j);
    return 0;
}

int run_project(const OracleArgs& args) {
    const drsm::numvec w = drsm::load_values(args.values_path);
    const drsm::Chi2Ball ball{args.rho, w.size()};
    const drsm::numvec p = drsm::project(w, ball);
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sq += (w[i] - p[i]) * (w[i] - p[i]);
    json j{{"p", p}, {"squared_distance", sq}, {"chi2_cost", drsm::chi2_cost(p)}};
    write_json(args.out, j);
    return 0;
}

struct DataArgs {
    std::string path;
    std::string format = "auto";
};

int run_data(const DataArgs& args) {
    const drsm::SampledObjective obj = drsm::load_objective(args.path, args.format);
    json j{{"kind", obj.is_facility() ? "facility" : "influence"},
           {"samples", obj.num_samples()},
           {"ground", obj.ground_size()},
           {"value_bound", obj.value_bound()},
           {"singleton_bound", obj.singleton_bound()}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct SolveArgs {
    std::string data_path;
    std::string format = "auto";
    std::string alg = "mfw";
    double rho = 1.0;
    std::size_t k = 1;
    std::size_t iterations = 100;
    std::size_t batch = 1;
    std::uint64_t seed = 0;
    std::size_t value_samples = 200;
    double smoothing_radius = 0.05;
    std::size_t smoothing_samples = 10;
    std::string out;
    bool timing = false;
};

int run_solve(const SolveArgs& args) {
    const drsm::SampledObjective obj = drsm::load_objective(args.data_path, args.format);
    const drsm::Chi2Ball ball{args.rho, obj.num_samples()};

    json j{{"algorithm", args.alg}, {"rho", args.rho},   {"cardinality", args.k},
           {"iterations", args.iterations}, {"seed", args.seed}, {"data", args.data_path}};

    if (args.alg == "ogd") {
        drsm::OgdConfig cfg;
        cfg.iterations = args.iterations;
        cfg.cardinality = args.k;
        const drsm::OgdRun run = drsm::ogd_best_response(obj, ball, cfg);
        json sets = json::array();
        for (const auto& s : run.subsets) sets.push_back(s);
        j["subsets"] = sets;
        j["round_values"] = run.round_values;
        j["final_weights"] = run.final_weights;
        if (args.timing) j["wall_time_sec"] = run.wall_time_sec;
        write_json(args.out, j);
        return 0;
    }

    drsm::SolverConfig cfg;
    cfg.iterations = args.iterations;
    cfg.cardinality = args.k;
    cfg.batch = args.batch;
    cfg.seed = args.seed;
    cfg.value_samples = args.value_samples;
    cfg.smoothing_radius = args.smoothing_radius;
    cfg.smoothing_samples = args.smoothing_samples;

    drsm::SolverRun run = [&] {
        if (args.alg == "mfw") return drsm::mfw(obj, ball, cfg);
        if (args.alg == "fw") return drsm::fw_plain(obj, ball, cfg);
        if (args.alg == "equator") return drsm::fw_smoothed(obj, ball, cfg);
        throw std::invalid_argument("unknown algorithm: " + args.alg);
    }();

    const drsm::RobustValue robust = drsm::robust_value(obj, ball, run.x);
    j["x_final"] = run.x;
    j["robust_value"] = robust.value;
    j["worst_p"] = robust.worst_p;
    json traj = json::array();
    for (const auto& stat : run.trajectory) {
        traj.push_back({{"value", stat.value}, {"direction_norm", stat.direction_norm}});
    }
    j["trajectory"] = traj;
    if (args.timing) j["wall_time_sec"] = run.wall_time_sec;
    write_json(args.out, j);
    return 0;
}

struct RoundArgs {
    std::string run_path;
    std::size_t count = 0;  // 0: recommended count for the ground size
    std::uint64_t seed = 0;
    std::string out;
};

int run_round(const RoundArgs& args) {
    const json run = load_json(args.run_path);
    if (!run.contains("x_final")) {
        throw std::runtime_error(args.run_path + ": no x_final field (not a solver run?)");
    }
    const drsm::numvec x = run.at("x_final").get<drsm::numvec>();
    const auto k = run.at("cardinality").get<std::size_t>();
    const std::size_t count =
        args.count > 0 ? args.count : drsm::recommended_sample_count(x.size());
    drsm::Rng rng(args.seed);
    const drsm::SetDistribution dist = drsm::build_distribution(x, k, count, rng);
    json subsets = json::array();
    for (const auto& s : dist.subsets) subsets.push_back(s);
    json j{{"x", x}, {"cardinality", k}, {"count", count},
           {"seed", args.seed}, {"subsets", subsets}, {"weights", dist.weights}};
    write_json(args.out, j);
    return 0;
}

struct ExperimentArgs {
    std::string config_path;
    std::string out_dir = "experiment_out";
};

int run_experiment_cmd(const ExperimentArgs& args) {
    const drsm::ExperimentConfig cfg = drsm::config_from_json(load_json(args.config_path));
    const drsm::Summary s = drsm::run_experiment(cfg, args.out_dir);
    json j = drsm::summary_to_json(s, cfg);
    if (!j["mean_rel_improvement_pct"].is_null() &&
        !std::isfinite(j["mean_rel_improvement_pct"].get<double>())) {
        j["mean_rel_improvement_pct"] = nullptr;
    }
    j["out_dir"] = args.out_dir;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust submodular maximization from samples"};
    app.require_subcommand(1);

    // chi2 oracle / chi2 project
    auto* chi2 = app.add_subcommand("chi2", "Adversarial-distribution computations");
    chi2->require_subcommand(1);
    OracleArgs oracle_args;
    auto* oracle = chi2->add_subcommand("oracle", "Worst-case distribution for a value vector");
    oracle->add_option("--values", oracle_args.values_path, "Newline-separated values file")
        ->required();
    oracle->add_option("--rho", oracle_args.rho, "Ball radius")->required();
    oracle->add_option("--out", oracle_args.out, "Output JSON path (default stdout)");
    OracleArgs project_args;
    auto* project = chi2->add_subcommand("project", "Euclidean projection onto the ball");
    project->add_option("--values", project_args.values_path, "Newline-separated weight file")
        ->required();
    project->add_option("--rho", project_args.rho, "Ball radius")->required();
    project->add_option("--out", project_args.out, "Output JSON path (default stdout)");

    // data
    DataArgs data_args;
    auto* data = app.add_subcommand("data", "Inspect a sample file");
    data->require_subcommand(1);
    auto* load = data->add_subcommand("load", "Load and summarize");
    load->add_option("file", data_args.path, "Sample file (CSV rewards or live-edge lists)")
        ->required();
    load->add_option("--format", data_args.format, "facility|influence|auto")
        ->check(CLI::IsMember({"facility", "influence", "auto"}));

    // solve
    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Run a solver on a sample file");
    solve->add_option("--data", solve_args.data_path, "Sample file")->required();
    solve->add_option("--format", solve_args.format, "facility|influence|auto")
        ->check(CLI::IsMember({"facility", "influence", "auto"}));
    solve->add_option("--alg", solve_args.alg, "mfw|fw|equator|ogd")
        ->check(CLI::IsMember({"mfw", "fw", "equator", "ogd"}));
    solve->add_option("--rho", solve_args.rho, "Ball radius")->required();
    solve->add_option("--k", solve_args.k, "Cardinality budget")->required();
    solve->add_option("--T", solve_args.iterations, "Iteration count");
    solve->add_option("--batch", solve_args.batch, "Gradient batch size per iteration");
    solve->add_option("--seed", solve_args.seed, "Random seed");
    solve->add_option("--value-samples", solve_args.value_samples,
                      "Monte Carlo sets per value estimate above the exact cutoff");
    solve->add_option("--smoothing-radius", solve_args.smoothing_radius,
                      "Perturbation radius (equator)");
    solve->add_option("--smoothing-samples", solve_args.smoothing_samples,
                      "Perturbations per gradient query (equator)");
    solve->add_option("--out", solve_args.out, "Output JSON path (default stdout)");
    solve->add_flag("--timing", solve_args.timing,
                    "Include wall-clock time (breaks byte-identical reruns)");

    // round
    RoundArgs round_args;
    auto* round = app.add_subcommand("round", "Swap-round a solver run into sets");
    round->add_option("--x", round_args.run_path, "Solver run JSON with x_final")->required();
    round->add_option("--count", round_args.count, "Independent rounded draws (0: recommended)");
    round->add_option("--seed", round_args.seed, "Random seed");
    round->add_option("--out", round_args.out, "Output JSON path (default stdout)");

    // experiment
    ExperimentArgs exp_args;
    auto* experiment = app.add_subcommand("experiment", "Train/test comparison over trials");
    experiment->add_option("--config", exp_args.config_path, "Experiment config JSON")->required();
    experiment->add_option("--out", exp_args.out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (oracle->parsed()) return run_oracle(oracle_args);
        if (project->parsed()) return run_project(project_args);
        if (load->parsed()) return run_data(data_args);
        if (solve->parsed()) return run_solve(solve_args);
        if (round->parsed()) return run_round(round_args);
        if (experiment->parsed()) return run_experiment_cmd(exp_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}
