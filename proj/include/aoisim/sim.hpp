#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "aoisim/core.hpp"
#include "aoisim/policies.hpp"

namespace aoisim {

struct TerminalMetrics {
  double avg_aoi = 0.0;
  double avg_paoi = 0.0;  // mean AoI sampled just before each delivery; 0 if none
  std::int64_t updates = 0;
  std::int64_t scheduled = 0;
  std::map<std::int64_t, std::int64_t> aoi_histogram;  // end-of-slot age -> slots
};

struct Metrics {
  double avg_aoi = 0.0;   // time average of the terminal mean, post-warmup
  double avg_paoi = 0.0;  // update-count-weighted mean over terminals
  std::int64_t slots_measured = 0;
  std::int64_t collisions = 0;
  std::int64_t blanks = 0;
  std::int64_t idle_slots = 0;
  std::vector<TerminalMetrics> per_terminal;
  bool unstable_rates = false;  // a deficit-round-robin share <= arrival rate (FCFS)
};

struct RunOptions {
  bool keep_histograms = false;
  // Replay a recorded decision sequence instead of consulting the policy;
  // used to couple runs across channel modes.
  const std::vector<std::vector<std::uint32_t>>* replay = nullptr;
  // Record each slot's decision set here when non-null.
  std::vector<std::vector<std::uint32_t>>* record = nullptr;
  // Capture each slot's post-warmup mean AoI when non-null (dominance tests).
  std::vector<double>* slot_mean_aoi = nullptr;
};

Metrics run_scenario(const ScenarioConfig& cfg, const PolicySpec& spec,
                     const RunOptions& opts = {});

struct ReplicatedMetrics {
  double mean_avg_aoi = 0.0;
  double sd_avg_aoi = 0.0;      // sample standard deviation across replications
  double stderr_avg_aoi = 0.0;  // sd / sqrt(replications)
  double mean_avg_paoi = 0.0;
  double sd_avg_paoi = 0.0;
  double stderr_avg_paoi = 0.0;
  std::uint32_t replications = 0;
  std::vector<Metrics> runs;
};

// Runs `replications` independent copies of the scenario; replication i uses
// seed mix64(cfg.seed ^ (0x5aa5a55a00ff00ffULL + i)) so streams never overlap.
ReplicatedMetrics run_replicated(const ScenarioConfig& cfg, const PolicySpec& spec,
                                 std::uint32_t replications,
                                 const RunOptions& opts = {});

}  // namespace aoisim
