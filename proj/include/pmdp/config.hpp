#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmdp/protocol.hpp"

namespace pmdp {

/// Everything a run needs, loadable from the flat key-value config format
/// (one `section.key = value` per line, '#' comments). Unknown keys are
/// rejected; serialization emits every key so a resolved config reproduces
/// the run by itself.
struct RunConfig {
    // env.*
    std::string preset = "max-entropy-small"; // or "custom"
    std::string map_path;                     // custom preset only
    double noise = 0.0;
    std::string rho_action = "stay";
    int horizon = 20;

    // objective.*
    std::string objective_kind = "entropy"; // entropy | obstacles
    double objective_floor = 1e-12;

    // protocol.*
    std::string framework = "k"; // k | u | baseline
    int episodes = 1000;
    int agents = 2;
    double eta = 0.01;
    double eta_lambda = 0.01;
    double epsilon = 1e-3;
    int max_dual_iters = 5000;
    std::optional<double> alpha_bar = 0.1; // nullopt = auto
    double delta = 0.1;
    double gamma = 1000.0;
    std::uint64_t seed = 1;
    double mix_rate = 1e-6;
    std::optional<double> bonus_c;          // nullopt = theoretical width
    bool mean_field = true;
    bool regret_end_gaps = false;

    // comparator.*
    double comparator_tol = 1e-3;
    int comparator_max_iters = 2000;
    double comparator_eta = 0.05;

    // run.*
    std::string out_dir = "runs/latest";
    int checkpoint_interval = 100;
    bool plots = true;

    // sweep.* (empty lists fall back to the base value)
    std::vector<std::uint64_t> sweep_seeds;
    std::vector<int> sweep_episodes;
    std::vector<double> sweep_etas;
    std::vector<double> sweep_gammas;
    std::vector<double> sweep_noises;

    ProtocolConfig protocol() const;
    Framework framework_enum() const;
};

/// Fills environment, objective, and protocol defaults for a named preset:
/// max-entropy, obstacles, max-entropy-small, obstacles-small. The small
/// presets are noise-free reductions sized for minutes-long runs.
void apply_preset(const std::string& name, RunConfig& config);

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Instantiates the world and the objective a config describes.
struct ResolvedWorld {
    GridSpec grid;
    Environment env;
    ObjectiveSpec objective;
};
ResolvedWorld build_world(const RunConfig& config);

} // namespace pmdp
