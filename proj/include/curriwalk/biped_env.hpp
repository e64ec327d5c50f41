#pragma once

// Episodic walking environment: simulator, terrain course, gait target,
// guide forces, perturbations, reward and termination behind a
// reset/step interface.

#include <optional>
#include <random>

#include "curriwalk/biped_model.hpp"
#include "curriwalk/curriculum.hpp"
#include "curriwalk/guide.hpp"
#include "curriwalk/reward.hpp"
#include "curriwalk/robot_state.hpp"
#include "curriwalk/simulator.hpp"
#include "curriwalk/target_trajectory.hpp"
#include "curriwalk/terrain.hpp"

namespace curriwalk::env {

inline constexpr int kObservationSize = sim::kRobotStateSize + terrain::kScanSamples;

using Observation = std::array<double, kObservationSize>;

struct EnvConfig {
  sim::BipedModel model;
  sim::SimConfig sim;
  terrain::TerrainLayout layout;
  target::GaitParams gait;
  guide::GuideGains guide_gains;
  guide::CoMTargets com_targets;
  reward::RewardWeights reward_weights;
  reward::RewardTargets reward_targets;
  curriculum::TerminationConfig termination;
  curriculum::PerturbationConfig perturbation;
  double start_x = 1.0;   // m, base x at reset
  int scan_interval = 6;  // control steps between terrain scans
  int debounce_steps = 3;
  bool linked = true;     // restart the gait segment at each touchdown

  void validate() const;
};

struct EpisodeSettings {
  terrain::TerrainKind kind = terrain::TerrainKind::kFlat;
  double difficulty = 1.0;
  int instances = terrain::kTrainInstances;
  double guide_multiplier = 0.0;
  bool joint_guide = true;
  double perturbation = 0.0;  // N, 0 disables
  std::uint64_t seed = 0;     // terrain and perturbation stream
};

struct StepOutcome {
  double reward = 0.0;
  reward::RewardBreakdown breakdown;
  // Set when the episode ended on this step.
  std::optional<curriculum::EpisodeOutcome> outcome;
  // The episode ended without a meaningful continuation value (fall, fault).
  bool terminal = false;
};

class BipedEnv {
 public:
  explicit BipedEnv(EnvConfig config);

  const Observation& reset(const EpisodeSettings& settings);

  // action: per-joint torque in units of the torque limit; clipped to [-1, 1].
  // Throws std::logic_error if called after the episode ended.
  StepOutcome step(const sim::Vec6& action);

  const Observation& observation() const { return obs_; }
  const sim::GeneralizedState& state() const { return state_; }
  const terrain::Heightfield& heightfield() const { return hf_; }
  const target::TargetTrajectory& trajectory() const { return traj_; }
  const target::TrajectoryCursor& cursor() const { return cursor_; }
  const sim::GaitTracker& tracker() const { return tracker_; }
  const EnvConfig& config() const { return config_; }
  const sim::BipedSimulator& simulator() const { return sim_; }
  int step_count() const { return steps_; }
  int step_limit() const { return step_limit_; }
  double start_x() const { return config_.start_x; }
  bool done() const { return done_; }

  // Overwrites the simulated state (test doubles and diagnostics).
  void set_state(const sim::GeneralizedState& state);

 private:
  void refresh_observation(bool rescan);

  EnvConfig config_;
  sim::BipedSimulator sim_;
  target::TargetTrajectory traj_;
  std::vector<sim::ContactPoint> probes_;
  EpisodeSettings settings_;
  terrain::Heightfield hf_;
  sim::GeneralizedState state_;
  sim::ContactReport contacts_;
  sim::GaitTracker tracker_;
  target::TrajectoryCursor cursor_;
  std::mt19937_64 perturb_rng_;
  terrain::Scan scan_{};
  Observation obs_{};
  int steps_ = 0;
  int step_limit_ = 0;
  bool done_ = true;
};

}  // namespace curriwalk::env
