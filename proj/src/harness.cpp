#include "pmdp/harness.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pmdp/analysis.hpp"
#include "pmdp/plot.hpp"

namespace pmdp {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << text;
}

void write_counters(std::ostream& out, const char* label, const VisitCounters& counters) {
    out << label << " " << counters.pair_count.size() << "\n";
    for (std::size_t n = 0; n < counters.pair_count.size(); ++n) {
        const auto& pairs = counters.pair_count[n];
        for (int x = 0; x < pairs.rows(); ++x)
            for (int a = 0; a < pairs.cols(); ++a)
                if (pairs(x, a) > 0) out << "p " << n << " " << x << " " << a << " " << pairs(x, a) << "\n";
        const auto& triples = counters.triple_count[n];
        for (int row = 0; row < triples.rows(); ++row)
            for (int col = 0; col < triples.cols(); ++col)
                if (triples(row, col) > 0)
                    out << "t " << n << " " << row << " " << col << " " << triples(row, col) << "\n";
    }
    out << "end_" << label << "\n";
}

void write_dist(std::ostream& out, const char* label, const Dist& d) {
    out << label;
    for (int i = 0; i < d.size(); ++i) out << " " << fmt(d[i]);
    out << "\n";
}

} // namespace

std::string ledger_csv_string(const RegretLedger& ledger) {
    std::ostringstream out;
    out << kLedgerHeader << "\n";
    for (std::size_t i = 0; i < ledger.records.size(); ++i) {
        const EpisodeRecord& r = ledger.records[i];
        out << r.episode << "," << fmt(r.loss) << "," << fmt(r.comparator_loss) << ","
            << fmt(ledger.cumulative_regret[i]) << "," << fmt(r.rho_gap) << ","
            << fmt(r.rho_tilde_gap) << "," << fmt(r.lambda_final) << "," << r.dual_iters << ","
            << fmt(r.g_final) << "," << fmt(r.alpha_bar) << "\n";
    }
    return out.str();
}

void write_ledger_csv(const fs::path& path, const RegretLedger& ledger) {
    write_text_file(path, ledger_csv_string(ledger));
}

RegretLedger read_ledger_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ledger: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty ledger: " + path.string());
    if (line != kLedgerHeader) {
        std::istringstream expected(kLedgerHeader), found(line);
        std::string want, got;
        while (std::getline(expected, want, ',')) {
            if (!std::getline(found, got, ',')) got = "<missing>";
            if (want != got)
                throw ConfigError("ledger schema mismatch in " + path.string() +
                                  ": expected column '" + want + "', found '" + got + "'");
        }
        throw ConfigError("ledger schema mismatch in " + path.string() + ": extra columns");
    }

    RegretLedger ledger;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 10)
            throw ConfigError("ledger row with " + std::to_string(cells.size()) + " columns in " +
                              path.string());
        EpisodeRecord rec;
        rec.episode = std::stoi(cells[0]);
        rec.loss = std::stod(cells[1]);
        rec.comparator_loss = std::stod(cells[2]);
        rec.rho_gap = std::stod(cells[4]);
        rec.rho_tilde_gap = std::stod(cells[5]);
        rec.lambda_final = std::stod(cells[6]);
        rec.dual_iters = std::stoi(cells[7]);
        rec.g_final = std::stod(cells[8]);
        rec.alpha_bar = std::stod(cells[9]);
        ledger.records.push_back(rec);
        ledger.cumulative_regret.push_back(std::stod(cells[3]));
    }
    return ledger;
}

void write_checkpoint(const fs::path& path, const ProtocolCheckpointView& view,
                      const SpaceDims& dims) {
    std::ostringstream out;
    out << "pmdp-checkpoint 1\n";
    out << "episode " << view.episode << "\n";
    out << "dims " << dims.num_states << " " << dims.num_actions << " " << dims.horizon << "\n";
    out << "lambda " << fmt(view.lambda) << "\n";
    write_dist(out, "rho", *view.rho_next);
    if (view.rho_tilde) write_dist(out, "rho_tilde", *view.rho_tilde);
    out << "policy " << view.next_policy->step.size() << "\n";
    for (const MatrixXd& step : view.next_policy->step)
        for (int x = 0; x < step.rows(); ++x) {
            out << "r";
            for (int a = 0; a < step.cols(); ++a) out << " " << fmt(step(x, a));
            out << "\n";
        }
    write_counters(out, "counters", *view.counters);
    if (view.counters_tilde) write_counters(out, "counters_tilde", *view.counters_tilde);
    out << "rng_sampled " << *view.sampled_stream << "\n";
    out << "rng_restart " << *view.restart_stream << "\n";
    write_text_file(path, out.str());
}

void write_occupancy_snapshot(const fs::path& path, int episode, const OccupancyMeasure& mu) {
    std::ostringstream out;
    out << "pmdp-occupancy 1\n";
    out << "episode " << episode << "\n";
    out << "slices " << mu.slice.size() << " " << mu.slice[0].size() << "\n";
    for (const Dist& slice : mu.slice) {
        for (int i = 0; i < slice.size(); ++i) out << (i ? " " : "") << fmt(slice[i]);
        out << "\n";
    }
    write_text_file(path, out.str());
}

OccupancySnapshot read_occupancy_snapshot(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open occupancy snapshot: " + path.string());
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "pmdp-occupancy" || version != 1)
        throw ConfigError("not an occupancy snapshot: " + path.string());
    OccupancySnapshot snap;
    std::size_t slices = 0, entries = 0;
    in >> tag >> snap.episode >> tag >> slices >> entries;
    snap.occupancy.slice.assign(slices, Dist(entries));
    for (std::size_t n = 0; n < slices; ++n)
        for (std::size_t i = 0; i < entries; ++i) in >> snap.occupancy.slice[n][i];
    if (!in) throw ConfigError("truncated occupancy snapshot: " + path.string());
    return snap;
}

namespace {

// The comparator depends only on the world and its tolerance, not on the
// seed, so sweeps share one per distinct world.
struct ComparatorCache {
    std::mutex lock;
    std::map<std::string, Comparator> entries;
};

Comparator comparator_for(const RunConfig& config, const ResolvedWorld& world) {
    static ComparatorCache cache;
    std::ostringstream key;
    key << config.preset << "|" << config.map_path << "|" << config.noise << "|" << config.horizon
        << "|" << config.objective_kind << "|" << config.objective_floor << "|"
        << config.comparator_tol << "|" << config.comparator_eta << "|" << config.rho_action;
    {
        std::lock_guard<std::mutex> guard(cache.lock);
        const auto it = cache.entries.find(key.str());
        if (it != cache.entries.end()) return it->second;
    }
    Comparator comparator = offline_optimal_periodic(
        world.env, world.objective, config.comparator_tol, config.comparator_max_iters,
        config.comparator_eta);
    std::lock_guard<std::mutex> guard(cache.lock);
    cache.entries.emplace(key.str(), comparator);
    return comparator;
}

std::string framework_label(const std::string& framework) {
    if (framework == "k") return "MDPP-K";
    if (framework == "u") return "MDPP-U";
    return "baseline";
}

} // namespace

RunResult execute_run(const RunConfig& config, const std::string& out_dir_override) {
    const ResolvedWorld world = build_world(config);
    const fs::path dir = out_dir_override.empty() ? fs::path(config.out_dir)
                                                  : fs::path(out_dir_override);
    fs::create_directories(dir);

    RunResult result;
    result.dir = dir;
    result.comparator = comparator_for(config, world);

    ProtocolHooks hooks;
    hooks.on_checkpoint = [&](const ProtocolCheckpointView& view) {
        if (config.checkpoint_interval <= 0) return;
        const bool due = view.episode % config.checkpoint_interval == 0 ||
                         view.episode == config.episodes;
        if (!due) return;
        write_checkpoint(dir / "checkpoint.txt", view, world.env.dims);
        write_occupancy_snapshot(
            dir / ("occupancy_" + std::to_string(view.episode) + ".txt"), view.episode,
            *view.true_occupancy);
    };

    result.ledger = run_protocol(world.env, world.objective, config.protocol(), result.comparator,
                                 &hooks);

    RunConfig resolved = config;
    resolved.out_dir = dir.string();
    write_text_file(dir / "config.resolved", serialize_config(resolved));
    write_ledger_csv(dir / "ledger.csv", result.ledger);

    const std::vector<double> regret =
        periodic_regret(result.ledger, config.gamma, config.regret_end_gaps);
    result.final_regret = regret.back();
    std::vector<double> gaps;
    gaps.reserve(result.ledger.records.size());
    for (const EpisodeRecord& rec : result.ledger.records) gaps.push_back(rec.rho_gap);
    result.last_decile_rho_gap = last_decile_mean(gaps);

    if (config.plots) {
        ChartSeries series{framework_label(config.framework), regret};
        write_line_chart_svg(dir / "regret.svg", "Cumulative periodic regret",
                             "cumulative regret", {series});
    }
    return result;
}

int thread_cap() {
    if (const char* env = std::getenv("PERIODIC_MDP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const std::string& out_dir) {
    const std::vector<std::uint64_t> seeds =
        base.sweep_seeds.empty() ? std::vector<std::uint64_t>{base.seed} : base.sweep_seeds;
    const std::vector<int> episode_grid =
        base.sweep_episodes.empty() ? std::vector<int>{base.episodes} : base.sweep_episodes;
    const std::vector<double> etas =
        base.sweep_etas.empty() ? std::vector<double>{base.eta} : base.sweep_etas;
    const std::vector<double> gammas =
        base.sweep_gammas.empty() ? std::vector<double>{base.gamma} : base.sweep_gammas;
    const std::vector<double> noises =
        base.sweep_noises.empty() ? std::vector<double>{base.noise} : base.sweep_noises;

    std::vector<RunConfig> combos;
    for (std::uint64_t seed : seeds)
        for (int episodes : episode_grid)
            for (double eta : etas)
                for (double gamma : gammas)
                    for (double noise : noises) {
                        RunConfig combo = base;
                        combo.seed = seed;
                        combo.episodes = episodes;
                        combo.eta = eta;
                        combo.gamma = gamma;
                        combo.noise = noise;
                        combo.plots = false;
                        combo.sweep_seeds.clear();
                        combo.sweep_episodes.clear();
                        combo.sweep_etas.clear();
                        combo.sweep_gammas.clear();
                        combo.sweep_noises.clear();
                        combos.push_back(std::move(combo));
                    }

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<SweepRow> rows(combos.size());

    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(thread_cap(), static_cast<int>(combos.size()));
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= combos.size()) return;
            const RunConfig& combo = combos[i];
            SweepRow& row = rows[i];
            row.seed = combo.seed;
            row.episodes = combo.episodes;
            row.eta = combo.eta;
            row.gamma = combo.gamma;
            row.noise = combo.noise;
            const fs::path combo_dir = dir / ("run_" + std::to_string(i));
            row.dir = combo_dir.string();
            try {
                const RunResult result = execute_run(combo, combo_dir.string());
                row.final_regret = result.final_regret;
                row.slope = loglog_tail_slope(
                    periodic_regret(result.ledger, combo.gamma, combo.regret_end_gaps));
                row.last_decile_rho_gap = result.last_decile_rho_gap;
            } catch (const std::exception& err) {
                row.status = std::string("failed: ") + err.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    write_text_file(dir / "summary.csv", sweep_summary_csv(rows));
    return rows;
}

std::string sweep_summary_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "run,seed,episodes,eta,gamma,noise,status,final_regret,loglog_slope,last_decile_rho_gap,"
           "dir\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i];
        std::string status = r.status;
        for (char& c : status)
            if (c == ',' || c == '\n') c = ';';
        out << i << "," << r.seed << "," << r.episodes << "," << fmt(r.eta) << "," << fmt(r.gamma)
            << "," << fmt(r.noise) << "," << status << "," << fmt(r.final_regret) << ","
            << fmt(r.slope) << "," << fmt(r.last_decile_rho_gap) << "," << r.dir << "\n";
    }
    return out.str();
}

} // namespace pmdp
