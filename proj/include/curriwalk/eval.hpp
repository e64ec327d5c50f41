#pragma once

// Evaluation harness: seeded multi-instance trials with a deterministic
// policy, plus the difficulty sweep. Training-time evaluation uses the same
// code path.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curriwalk/actor_critic.hpp"
#include "curriwalk/biped_env.hpp"
#include "curriwalk/checkpoint.hpp"
#include "curriwalk/running_stats.hpp"

namespace curriwalk::eval {

struct EvalConfig {
  terrain::TerrainKind kind = terrain::TerrainKind::kFlat;
  double difficulty = 10.0;
  int n_trials = 100;
  double perturbation = 0.0;  // N, 0 disables
  std::uint64_t seed = 0;
  int instances = terrain::kEvalInstances;

  void validate() const;
};

struct EvalReport {
  double mean_pct = 0.0;
  double std_pct = 0.0;  // population standard deviation
  std::vector<double> fractions;
  int successes = 0;
  double mean_steps = 0.0;
};

// Maps the current observation to a normalized action. The environment is
// passed so test doubles can inspect or overwrite the simulated state.
using Policy = std::function<sim::Vec6(const env::Observation&, env::BipedEnv&)>;

// Trial i uses seed cfg.seed + i for its course and perturbations. Guide
// forces are off.
EvalReport run_trials(const env::EnvConfig& env_config, const EvalConfig& cfg,
                      const Policy& policy);

// Mean action of the network on normalized observations.
Policy deterministic_policy(const rl::ActorCritic<float>& net, const rl::RunningStats& stats,
                            double obs_clip);

// Loads the checkpoint, checks the architecture and evaluates it.
EvalReport run_trials(const env::EnvConfig& env_config, const EvalConfig& cfg,
                      const rl::Checkpoint& checkpoint, const rl::Architecture& architecture,
                      double obs_clip);

inline constexpr double kSweepDifficulties[4] = {1.0, 8.0, 10.0, 12.0};

struct SweepEntry {
  double difficulty = 0.0;
  EvalReport report;
};

// run_trials at d = 1, 8, 10, 12; everything else in cfg is shared.
std::vector<SweepEntry> difficulty_sweep(const env::EnvConfig& env_config, const EvalConfig& cfg,
                                         const Policy& policy);

std::string report_csv_header();
std::string report_csv_row(const std::string& label, const EvalReport& report);

}  // namespace curriwalk::eval
