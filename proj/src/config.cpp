#include "pmdp/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pmdp {

ProtocolConfig RunConfig::protocol() const {
    ProtocolConfig p;
    p.num_episodes = episodes;
    p.num_agents = agents;
    p.framework = framework_enum();
    p.eta = eta;
    p.dual.eta_lambda = eta_lambda;
    p.dual.epsilon = epsilon;
    p.dual.max_iters = max_dual_iters;
    p.alpha_bar = alpha_bar;
    p.delta = delta;
    p.gamma = gamma;
    p.seed = seed;
    p.mix_rate = mix_rate;
    p.bonus_c = bonus_c.value_or(-1.0);
    p.mean_field = mean_field;
    return p;
}

Framework RunConfig::framework_enum() const {
    if (framework == "k") return Framework::kKnownRho;
    if (framework == "u") return Framework::kUnknownRho;
    if (framework == "baseline") return Framework::kEpisodicBaseline;
    throw ConfigError("protocol.framework must be one of k, u, baseline");
}

void apply_preset(const std::string& name, RunConfig& config) {
    config.preset = name;
    if (name == "custom") return;
    // bonus_c sits at 2/N so the first episode, whose estimated kernel is all
    // uniform rows, keeps a feasible terminal constraint (slack c*N covers the
    // L1 diameter); the entropy floor bounds the gradient scale so the dual
    // multiplier stays trackable at the fixed eta_lambda.
    if (name == "max-entropy") {
        config.objective_kind = "entropy";
        config.objective_floor = 1e-3;
        config.horizon = 40;
        config.episodes = 5000;
        config.noise = 0.1;
        config.bonus_c = 0.05;
        config.epsilon = 0.02;
        config.max_dual_iters = 50000;
        config.comparator_tol = 0.35;
        config.comparator_max_iters = 4000;
    } else if (name == "obstacles") {
        config.objective_kind = "obstacles";
        config.horizon = 80;
        config.episodes = 1000;
        config.noise = 0.1;
        config.bonus_c = 0.025;
        config.epsilon = 0.02;
        config.max_dual_iters = 50000;
        config.comparator_tol = 0.35;
        config.comparator_max_iters = 4000;
    } else if (name == "max-entropy-small") {
        config.objective_kind = "entropy";
        config.objective_floor = 1e-3;
        config.horizon = 20;
        config.episodes = 1000;
        config.noise = 0.1;
        config.bonus_c = 0.1;
        config.epsilon = 0.02;
        config.max_dual_iters = 200000;
        config.comparator_tol = 0.3;
    } else if (name == "obstacles-small") {
        config.objective_kind = "obstacles";
        config.horizon = 20;
        config.episodes = 1000;
        config.noise = 0.0;
        config.bonus_c = 0.1;
        config.epsilon = 0.25;
        config.max_dual_iters = 200000;
        config.comparator_tol = 0.02;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
}

namespace {

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + value + "'");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<T> out;
    if (trim(value).empty()) return out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse(key, trim(item)));
    return out;
}

template <typename T>
std::string join_list(const std::vector<T>& items, const std::function<std::string(T)>& fmt) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += fmt(items[i]);
    }
    return out;
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "env.preset") return; // handled before the sweep over keys
    if (key == "env.map") { c.map_path = value; return; }
    if (key == "env.noise") { c.noise = parse_double(key, value); return; }
    if (key == "env.rho_action") { c.rho_action = value; return; }
    if (key == "env.horizon") { c.horizon = static_cast<int>(parse_int(key, value)); return; }
    if (key == "objective.kind") { c.objective_kind = value; return; }
    if (key == "objective.floor") { c.objective_floor = parse_double(key, value); return; }
    if (key == "protocol.framework") { c.framework = value; return; }
    if (key == "protocol.episodes") { c.episodes = static_cast<int>(parse_int(key, value)); return; }
    if (key == "protocol.agents") { c.agents = static_cast<int>(parse_int(key, value)); return; }
    if (key == "protocol.eta") { c.eta = parse_double(key, value); return; }
    if (key == "protocol.eta_lambda") { c.eta_lambda = parse_double(key, value); return; }
    if (key == "protocol.epsilon") { c.epsilon = parse_double(key, value); return; }
    if (key == "protocol.max_dual_iters") {
        c.max_dual_iters = static_cast<int>(parse_int(key, value));
        return;
    }
    if (key == "protocol.alpha_bar") {
        if (value == "auto") c.alpha_bar.reset();
        else c.alpha_bar = parse_double(key, value);
        return;
    }
    if (key == "protocol.delta") { c.delta = parse_double(key, value); return; }
    if (key == "protocol.gamma") { c.gamma = parse_double(key, value); return; }
    if (key == "protocol.seed") {
        c.seed = static_cast<std::uint64_t>(parse_int(key, value));
        return;
    }
    if (key == "protocol.mix_rate") { c.mix_rate = parse_double(key, value); return; }
    if (key == "protocol.bonus_c") {
        if (value == "auto") c.bonus_c.reset();
        else c.bonus_c = parse_double(key, value);
        return;
    }
    if (key == "protocol.mean_field") { c.mean_field = parse_bool(key, value); return; }
    if (key == "protocol.regret_end_gaps") { c.regret_end_gaps = parse_bool(key, value); return; }
    if (key == "comparator.tol") { c.comparator_tol = parse_double(key, value); return; }
    if (key == "comparator.max_iters") {
        c.comparator_max_iters = static_cast<int>(parse_int(key, value));
        return;
    }
    if (key == "comparator.eta") { c.comparator_eta = parse_double(key, value); return; }
    if (key == "run.out") { c.out_dir = value; return; }
    if (key == "run.checkpoint_interval") {
        c.checkpoint_interval = static_cast<int>(parse_int(key, value));
        return;
    }
    if (key == "run.plots") { c.plots = parse_bool(key, value); return; }
    if (key == "sweep.seeds") {
        c.sweep_seeds = parse_list<std::uint64_t>(key, value, [](const std::string& k, const std::string& v) {
            return static_cast<std::uint64_t>(parse_int(k, v));
        });
        return;
    }
    if (key == "sweep.episodes") {
        c.sweep_episodes = parse_list<int>(key, value, [](const std::string& k, const std::string& v) {
            return static_cast<int>(parse_int(k, v));
        });
        return;
    }
    if (key == "sweep.etas") {
        c.sweep_etas = parse_list<double>(key, value, parse_double);
        return;
    }
    if (key == "sweep.gammas") {
        c.sweep_gammas = parse_list<double>(key, value, parse_double);
        return;
    }
    if (key == "sweep.noises") {
        c.sweep_noises = parse_list<double>(key, value, parse_double);
        return;
    }
    throw ConfigError("config: unknown key '" + key + "'");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::istringstream in(text);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_number) + " has no '='");
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    RunConfig config;
    for (const auto& [key, value] : pairs)
        if (key == "env.preset") apply_preset(value, config);
    for (const auto& [key, value] : pairs) apply_key(config, key, value);
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "env.preset = " << c.preset << "\n";
    out << "env.map = " << c.map_path << "\n";
    out << "env.noise = " << format_double(c.noise) << "\n";
    out << "env.rho_action = " << c.rho_action << "\n";
    out << "env.horizon = " << c.horizon << "\n";
    out << "objective.kind = " << c.objective_kind << "\n";
    out << "objective.floor = " << format_double(c.objective_floor) << "\n";
    out << "protocol.framework = " << c.framework << "\n";
    out << "protocol.episodes = " << c.episodes << "\n";
    out << "protocol.agents = " << c.agents << "\n";
    out << "protocol.eta = " << format_double(c.eta) << "\n";
    out << "protocol.eta_lambda = " << format_double(c.eta_lambda) << "\n";
    out << "protocol.epsilon = " << format_double(c.epsilon) << "\n";
    out << "protocol.max_dual_iters = " << c.max_dual_iters << "\n";
    out << "protocol.alpha_bar = "
        << (c.alpha_bar ? format_double(*c.alpha_bar) : std::string("auto")) << "\n";
    out << "protocol.delta = " << format_double(c.delta) << "\n";
    out << "protocol.gamma = " << format_double(c.gamma) << "\n";
    out << "protocol.seed = " << c.seed << "\n";
    out << "protocol.mix_rate = " << format_double(c.mix_rate) << "\n";
    out << "protocol.bonus_c = "
        << (c.bonus_c ? format_double(*c.bonus_c) : std::string("auto")) << "\n";
    out << "protocol.mean_field = " << (c.mean_field ? "true" : "false") << "\n";
    out << "protocol.regret_end_gaps = " << (c.regret_end_gaps ? "true" : "false") << "\n";
    out << "comparator.tol = " << format_double(c.comparator_tol) << "\n";
    out << "comparator.max_iters = " << c.comparator_max_iters << "\n";
    out << "comparator.eta = " << format_double(c.comparator_eta) << "\n";
    out << "run.out = " << c.out_dir << "\n";
    out << "run.checkpoint_interval = " << c.checkpoint_interval << "\n";
    out << "run.plots = " << (c.plots ? "true" : "false") << "\n";
    const std::function<std::string(std::uint64_t)> fmt_u64 = [](std::uint64_t v) {
        return std::to_string(v);
    };
    const std::function<std::string(int)> fmt_int = [](int v) { return std::to_string(v); };
    const std::function<std::string(double)> fmt_dbl = [](double v) { return format_double(v); };
    out << "sweep.seeds = " << join_list(c.sweep_seeds, fmt_u64) << "\n";
    out << "sweep.episodes = " << join_list(c.sweep_episodes, fmt_int) << "\n";
    out << "sweep.etas = " << join_list(c.sweep_etas, fmt_dbl) << "\n";
    out << "sweep.gammas = " << join_list(c.sweep_gammas, fmt_dbl) << "\n";
    out << "sweep.noises = " << join_list(c.sweep_noises, fmt_dbl) << "\n";
    return out.str();
}

ResolvedWorld build_world(const RunConfig& config) {
    ResolvedWorld world;
    if (config.preset == "custom") {
        if (config.map_path.empty()) throw ConfigError("custom preset requires env.map");
        world.grid = load_map_file(config.map_path);
    } else if (config.preset == "max-entropy" || config.preset == "obstacles") {
        world.grid = parse_map(four_room_11_map());
    } else if (config.preset == "max-entropy-small") {
        world.grid = parse_map(two_room_7_map());
    } else if (config.preset == "obstacles-small") {
        world.grid = parse_map(two_room_9_map());
    } else {
        throw ConfigError("unknown preset: " + config.preset);
    }
    world.grid.noise = config.noise;

    int rho_action = -1;
    if (config.rho_action == "up") rho_action = kActionUp;
    else if (config.rho_action == "down") rho_action = kActionDown;
    else if (config.rho_action == "left") rho_action = kActionLeft;
    else if (config.rho_action == "right") rho_action = kActionRight;
    else if (config.rho_action == "stay") rho_action = kActionStay;
    else throw ConfigError("env.rho_action must be a direction or stay");

    world.env = four_room_kernel(world.grid, config.horizon, rho_action);

    if (config.objective_kind == "entropy") {
        world.objective = entropy_objective(world.env.dims, config.objective_floor);
    } else if (config.objective_kind == "obstacles") {
        if (world.grid.target_cells.empty())
            throw ConfigError("obstacle objective needs at least one target cell in the map");
        world.objective =
            obstacle_objective(world.env.dims, world.grid.target_cells, world.grid.constraint_cells);
    } else {
        throw ConfigError("objective.kind must be entropy or obstacles");
    }
    return world;
}

} // namespace pmdp
