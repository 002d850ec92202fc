#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmdp/analysis.hpp"
#include "pmdp/harness.hpp"
#include "pmdp/oracles.hpp"
#include "pmdp/plot.hpp"

namespace fs = std::filesystem;
using namespace pmdp;

namespace {

constexpr int kExitBadConfig = 2;
constexpr int kExitSolverAbort = 3;

// Precedence: built-in defaults < preset < config file keys. A --preset flag
// is appended after the file text, so it replaces the file's preset while the
// file's explicit keys still win over preset defaults.
RunConfig load_cli_config(const std::string& config_path, const std::string& preset) {
    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file: " + config_path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        text = buffer.str();
    }
    if (!preset.empty()) text += "\nenv.preset = " + preset + "\n";
    return parse_config(text);
}

int cmd_run(const std::string& config_path, const std::string& preset, long long seed,
            int episodes, const std::string& out, const std::string& framework) {
    RunConfig config = load_cli_config(config_path, preset);
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (episodes > 0) config.episodes = episodes;
    if (!framework.empty()) config.framework = framework;
    if (!out.empty()) config.out_dir = out;

    const RunResult result = execute_run(config);
    std::printf("run complete: %s\n", result.dir.string().c_str());
    std::printf("final cumulative regret: %.6f\n", result.final_regret);
    std::printf("mean last-decile rho gap: %.6f\n", result.last_decile_rho_gap);
    return 0;
}

std::string series_name(const std::string& ledger_path) {
    const fs::path path(ledger_path);
    const std::string dir_name = path.parent_path().filename().string();
    return dir_name.empty() ? path.stem().string() : dir_name;
}

int cmd_plot(const std::vector<std::string>& ledgers, const std::string& out,
             const std::string& heatmap_dir, const std::string& steps_csv) {
    if (!ledgers.empty()) {
        std::vector<ChartSeries> series;
        for (const std::string& path : ledgers) {
            const RegretLedger ledger = read_ledger_csv(path);
            series.push_back({series_name(path), ledger.cumulative_regret});
        }
        const fs::path chart = out.empty() ? fs::path("regret.svg") : fs::path(out);
        write_line_chart_svg(chart, "Cumulative periodic regret", "cumulative regret", series);
        std::printf("wrote %s\n", chart.string().c_str());
    }

    if (!heatmap_dir.empty()) {
        const fs::path dir(heatmap_dir);
        const RunConfig config = load_config_file((dir / "config.resolved").string());
        const ResolvedWorld world = build_world(config);

        fs::path newest;
        int best_episode = -1;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("occupancy_", 0) != 0) continue;
            const int episode = std::atoi(name.substr(10).c_str());
            if (episode > best_episode) {
                best_episode = episode;
                newest = entry.path();
            }
        }
        if (best_episode < 0) throw ConfigError("no occupancy snapshots in " + dir.string());
        const OccupancySnapshot snap = read_occupancy_snapshot(newest);

        std::vector<int> steps;
        if (steps_csv.empty()) {
            const int n = config.horizon;
            steps = {1, n / 4, n / 2, 3 * n / 4, n};
        } else {
            std::istringstream in(steps_csv);
            std::string item;
            while (std::getline(in, item, ',')) steps.push_back(std::atoi(item.c_str()));
        }
        for (int n : steps) {
            if (n < 0 || n > config.horizon) continue;
            const Dist& slice = snap.occupancy.slice[static_cast<std::size_t>(n)];
            std::vector<double> mass(static_cast<std::size_t>(world.grid.num_cells()), 0.0);
            for (int x = 0; x < world.env.dims.num_states; ++x)
                for (int a = 0; a < world.env.dims.num_actions; ++a)
                    mass[static_cast<std::size_t>(x)] += slice[world.env.dims.pair_index(x, a)];
            const fs::path file = dir / ("heatmap_ep" + std::to_string(snap.episode) + "_n" +
                                         std::to_string(n) + ".svg");
            write_heatmap_svg(file,
                              "State distribution, episode " + std::to_string(snap.episode) +
                                  ", step " + std::to_string(n),
                              world.grid, mass);
            std::printf("wrote %s\n", file.string().c_str());
        }
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out) {
    const RunConfig base = load_cli_config(config_path, "");
    const std::string dir = out.empty() ? "sweep" : out;
    const std::vector<SweepRow> rows = run_sweep(base, dir);
    int failed = 0;
    for (const SweepRow& row : rows)
        if (row.status != "ok") ++failed;
    std::printf("sweep complete: %zu runs, %d failed, summary at %s/summary.csv\n", rows.size(),
                failed, dir.c_str());
    return 0;
}

MatrixXd random_stochastic(int rows, int cols, RngStream& rng) {
    MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = 0.1 + rng.uniform01();
        m.row(r) /= m.row(r).sum();
    }
    return m;
}

int cmd_oracle(long long seed_arg) {
    const std::uint64_t seed = seed_arg >= 0 ? static_cast<std::uint64_t>(seed_arg) : 7;

    std::printf("== forward rollout vs exhaustive trajectory enumeration ==\n");
    {
        SpaceDims dims{2, 2, 3};
        RngStream rng(derive_seed(seed, 1));
        TransitionKernel kernel;
        Policy policy;
        for (int n = 0; n < dims.horizon; ++n) {
            kernel.step.push_back(random_stochastic(dims.pairs(), dims.num_states, rng));
            policy.step.push_back(random_stochastic(dims.num_states, dims.num_actions, rng));
        }
        Dist init = Dist::Zero(dims.pairs());
        init[0] = 1.0;
        const OccupancyMeasure fast = forward_rollout(policy, init, kernel);
        const OccupancyMeasure slow = oracle::enumerate_occupancy(policy, init, kernel);
        double worst = 0.0;
        for (int n = 0; n <= dims.horizon; ++n)
            worst = std::max(worst, l1_distance(fast.slice[n], slow.slice[n]));
        std::printf("  slices 0..%d, max L1 discrepancy: %.3e\n", dims.horizon, worst);
    }

    std::printf("== dynamic program vs policy-grid Lagrangian minimum ==\n");
    for (int instance = 0; instance < 3; ++instance) {
        SpaceDims dims{2, 2, 2};
        RngStream rng(derive_seed(seed, 2, static_cast<std::uint64_t>(instance)));
        EpisodeProblem p;
        p.dims = dims;
        for (int n = 0; n < dims.horizon; ++n) {
            p.kernel.step.push_back(random_stochastic(dims.pairs(), dims.num_states, rng));
            Dist g(dims.pairs());
            for (int i = 0; i < g.size(); ++i) g[i] = 2.0 * rng.uniform01() - 1.0;
            p.gradient.push_back(g);
        }
        Dist init(4);
        for (int i = 0; i < 4; ++i) init[i] = 0.1 + rng.uniform01();
        p.init = init / init.sum();
        p.prior_policy = Policy::uniform(dims);
        p.bonuses = BonusSchedule::zero(dims);
        p.target = Dist::Zero(4);
        p.target[0] = 1.0;
        p.eta = 0.8;
        const double lambda = 0.5 * instance;
        const DpResult dp = backward_q_and_policy(p, lambda);
        const double dp_value = lagrangian_value(p, lambda, dp.policy);
        const double grid_value = oracle::grid_min_lagrangian(p, lambda, 0.02);
        std::printf("  instance %d: lambda=%.2f  dp=%.6f  grid=%.6f  dp-grid=%+.2e\n", instance,
                    lambda, dp_value, grid_value, dp_value - grid_value);
    }

    std::printf("== objective gradients vs central finite differences ==\n");
    {
        SpaceDims dims{4, 3, 1};
        RngStream rng(derive_seed(seed, 3));
        const ObjectiveSpec entropy = entropy_objective(dims);
        const ObjectiveSpec obstacles = obstacle_objective(dims, {0}, {1});
        const char* names[2] = {"entropy", "obstacles"};
        const ObjectiveSpec* objectives[2] = {&entropy, &obstacles};
        for (int which = 0; which < 2; ++which) {
            double worst = 0.0;
            for (int probe = 0; probe < 20; ++probe) {
                Dist mu(dims.pairs());
                for (int i = 0; i < mu.size(); ++i) mu[i] = 0.5 + rng.uniform01();
                mu /= mu.sum();
                const Dist grad = objectives[which]->gradient(1, 1, mu);
                const Dist fd = oracle::finite_difference_gradient(
                    [&](const Dist& d) { return objectives[which]->value(1, 1, d); }, mu);
                for (int i = 0; i < mu.size(); ++i)
                    worst = std::max(worst,
                                     std::abs(grad[i] - fd[i]) / std::max(1.0, std::abs(grad[i])));
            }
            std::printf("  %s: worst relative error over 20 points: %.3e\n", names[which], worst);
        }
    }

    std::printf("== sampled trajectories vs analytic occupancy ==\n");
    {
        SpaceDims dims{3, 2, 3};
        RngStream rng(derive_seed(seed, 4));
        TransitionKernel kernel;
        for (int n = 0; n < dims.horizon; ++n)
            kernel.step.push_back(random_stochastic(dims.pairs(), dims.num_states, rng));
        const Policy policy = Policy::uniform(dims);
        Dist init = Dist::Zero(dims.pairs());
        init[2] = 1.0;
        const OccupancyMeasure mu = forward_rollout(policy, init, kernel);
        RngStream sample_rng(derive_seed(seed, 5));
        const auto freq = oracle::mc_visit_frequencies(policy, kernel, init, 100000, sample_rng);
        double worst = 0.0;
        for (int n = 0; n <= dims.horizon; ++n)
            worst = std::max(worst, l1_distance(freq[static_cast<std::size_t>(n)], mu.slice[n]));
        std::printf("  100000 samples, worst slice L1 gap: %.4f\n", worst);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic-mdp: reset-free online learning in tabular MDPs"};
    app.require_subcommand(1);

    std::string config_path, preset, out, framework, steps;
    long long seed = -1;
    int episodes = 0;
    std::vector<std::string> ledgers;
    std::string heatmap_dir;

    CLI::App* run = app.add_subcommand("run", "run one configured experiment");
    run->add_option("--config", config_path, "config file path");
    run->add_option("--preset", preset,
                    "max-entropy | obstacles | max-entropy-small | obstacles-small");
    run->add_option("--seed", seed, "override protocol.seed");
    run->add_option("--episodes", episodes, "override protocol.episodes");
    run->add_option("--out", out, "output directory");
    run->add_option("--framework", framework, "k | u | baseline");

    CLI::App* plot = app.add_subcommand("plot", "charts from ledgers and occupancy snapshots");
    plot->add_option("ledgers", ledgers, "ledger.csv paths (one chart series each)");
    plot->add_option("--out", out, "chart output path");
    plot->add_option("--heatmaps", heatmap_dir,
                     "run directory: renders state heatmaps from its newest occupancy snapshot");
    plot->add_option("--steps", steps, "comma separated time steps for the heatmaps");

    CLI::App* sweep = app.add_subcommand("sweep", "grid of runs driven by the sweep.* keys");
    sweep->add_option("--config", config_path, "config file path")->required();
    sweep->add_option("--out", out, "sweep output directory");

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "print the brute-force oracle tables");
    oracle_cmd->add_option("--seed", seed, "oracle instance seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (config_path.empty() && preset.empty()) {
                std::fprintf(stderr, "run needs --config or --preset\n");
                return kExitBadConfig;
            }
            return cmd_run(config_path, preset, seed, episodes, out, framework);
        }
        if (plot->parsed()) {
            if (ledgers.empty() && heatmap_dir.empty()) {
                std::fprintf(stderr, "plot needs ledger paths or --heatmaps\n");
                return kExitBadConfig;
            }
            return cmd_plot(ledgers, out, heatmap_dir, steps);
        }
        if (sweep->parsed()) return cmd_sweep(config_path, out);
        if (oracle_cmd->parsed()) return cmd_oracle(seed);
    } catch (const SolverError& err) {
        std::fprintf(stderr, "solver abort: %s\n", err.what());
        return kExitSolverAbort;
    } catch (const ConfigError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kExitBadConfig;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
