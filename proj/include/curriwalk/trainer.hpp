#pragma once

// Curriculum-driven PPO training loop with periodic guide-free evaluation,
// plus the ablation matrix built on top of it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "curriwalk/biped_env.hpp"
#include "curriwalk/checkpoint.hpp"
#include "curriwalk/curriculum.hpp"
#include "curriwalk/eval.hpp"
#include "curriwalk/ppo.hpp"

namespace curriwalk::train {

struct TrainConfig {
  terrain::TerrainKind kind = terrain::TerrainKind::kFlat;
  std::uint64_t seed = 1;
  std::uint64_t total_steps = 3'000'000;
  rl::PpoConfig ppo;
  int hidden1 = 256;
  int hidden2 = 256;
  double obs_clip = 10.0;
  curriculum::CurriculumConfig curriculum;
  int eval_interval = 10;  // updates between evaluations; 0 disables
  int eval_trials = 10;
  int checkpoint_interval = 0;  // updates between snapshot files; 0: final only
  std::filesystem::path output_dir;  // empty: no files written

  void validate() const;
  rl::Architecture architecture() const {
    return {env::kObservationSize, hidden1, hidden2, sim::kNumJoints};
  }
};

struct MetricsRow {
  std::uint64_t step = 0;
  int update = 0;
  curriculum::Phase phase = curriculum::Phase::kStage1;
  int difficulty = 1;
  double guide = 0.0;
  double perturbation = 0.0;
  double mean_reward = 0.0;          // per step over the rollout
  double mean_episode_return = 0.0;  // completed episodes; NaN if none
  int episodes = 0;
  int successes = 0;
  double eval_distance_pct = -1.0;   // -1 when not evaluated this update
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  bool aborted = false;
};

struct TransitionRow {
  std::uint64_t step = 0;
  int episode = 0;
  curriculum::Phase from = curriculum::Phase::kStage1;
  curriculum::Phase to = curriculum::Phase::kStage1;
  int difficulty = 1;
  double guide = 0.0;
  double perturbation = 0.0;
};

struct TrainResult {
  rl::Checkpoint checkpoint;
  std::vector<MetricsRow> metrics;
  std::vector<TransitionRow> transitions;
  int episodes = 0;
  int faults = 0;
  int aborted_updates = 0;
};

using ProgressFn = std::function<void(const MetricsRow&)>;

// Deterministic for a fixed configuration. When output_dir is set, writes
// metrics.csv, curriculum.csv and final.ckpt (plus periodic snapshots).
TrainResult train(const env::EnvConfig& env_config, const TrainConfig& config,
                  const ProgressFn& progress = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);
std::string transitions_csv_header();
std::string transitions_csv_row(const TransitionRow& row);

struct AblationVariant {
  std::string name;
  std::function<void(env::EnvConfig&, TrainConfig&)> apply;
};

// Full curriculum, the three stage ablations, continuous decay, base-only
// guidance and the unlinked target trajectory.
std::vector<AblationVariant> ablation_variants();

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  eval::EvalReport report;
};

// Trains every variant for every seed with the same budget and evaluates the
// final policy with run_trials (eval_cfg.seed is shared by all rows).
std::vector<AblationRow> ablation_suite(const env::EnvConfig& env_config,
                                        const TrainConfig& base,
                                        const std::vector<AblationVariant>& variants,
                                        const std::vector<std::uint64_t>& seeds,
                                        const eval::EvalConfig& eval_cfg);

}  // namespace curriwalk::train
