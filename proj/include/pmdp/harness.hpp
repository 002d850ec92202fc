#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pmdp/config.hpp"
#include "pmdp/protocol.hpp"

namespace pmdp {

inline constexpr const char* kLedgerHeader =
    "episode,loss,comparator_loss,regret_cum,rho_gap_l1,rho_tilde_gap_l1,lambda_final,"
    "dual_iters,g_final,alpha_bar";

std::string ledger_csv_string(const RegretLedger& ledger);
void write_ledger_csv(const std::filesystem::path& path, const RegretLedger& ledger);
RegretLedger read_ledger_csv(const std::filesystem::path& path);

/// Full protocol state snapshot written at the checkpoint cadence, plus
/// lightweight occupancy snapshots used by the heatmap plots.
void write_checkpoint(const std::filesystem::path& path, const ProtocolCheckpointView& view,
                      const SpaceDims& dims);
void write_occupancy_snapshot(const std::filesystem::path& path, int episode,
                              const OccupancyMeasure& mu);

struct OccupancySnapshot {
    int episode = 0;
    OccupancyMeasure occupancy;
};
OccupancySnapshot read_occupancy_snapshot(const std::filesystem::path& path);

struct RunResult {
    RegretLedger ledger;
    Comparator comparator;
    std::filesystem::path dir;
    double final_regret = 0.0;
    double last_decile_rho_gap = 0.0;
};

/// Runs one configured experiment: builds the world, solves the offline
/// comparator, runs the protocol, and writes ledger.csv, config.resolved,
/// checkpoint/occupancy files, and (when enabled) the regret chart under
/// out_dir.
RunResult execute_run(const RunConfig& config, const std::string& out_dir_override = "");

struct SweepRow {
    std::uint64_t seed = 0;
    int episodes = 0;
    double eta = 0.0;
    double gamma = 0.0;
    double noise = 0.0;
    std::string dir;
    std::string status = "ok";
    double final_regret = 0.0;
    double slope = 0.0;
    double last_decile_rho_gap = 0.0;
};

/// Expands the sweep grid from the config, runs every combination (failures
/// are recorded per row and do not stop the sweep), and writes summary.csv
/// into out_dir. Worker parallelism is capped by PERIODIC_MDP_THREADS.
std::vector<SweepRow> run_sweep(const RunConfig& base, const std::string& out_dir);

std::string sweep_summary_csv(const std::vector<SweepRow>& rows);

/// Worker cap: PERIODIC_MDP_THREADS when set, hardware concurrency otherwise.
int thread_cap();

} // namespace pmdp
