#pragma once

// Three-stage curriculum: terrain difficulty (Stage 1), guide-force decay
// (Stage 2) and perturbation magnitude (Stage 3). Every advancement is gated
// by a streak of consecutive successful episodes.

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "curriwalk/biped_model.hpp"
#include "curriwalk/guide.hpp"
#include "curriwalk/terrain.hpp"

namespace curriwalk::curriculum {

using Rng = std::mt19937_64;

enum class Phase { kStage1 = 1, kStage2 = 2, kStage3 = 3, kDone = 4 };

std::string_view to_string(Phase phase);

struct CurriculumConfig {
  bool terrain_stage = true;   // false: start at the final difficulty
  bool guide_stage = true;     // false: guide forces are never applied
  bool perturb_stage = true;   // false: perturbations stay at the initial magnitude
  guide::DecayMode decay_mode = guide::DecayMode::kSuccessGated;
  bool joint_guide = true;     // false: guide the base only
  int max_difficulty = 10;
  int success_streak = 3;
  double guide_threshold = 0.05;
  double perturb_initial = 50.0;   // N
  double perturb_final = 1000.0;   // N
  int perturb_increments = 10;

  void validate() const;
};

struct CurriculumState {
  Phase phase = Phase::kStage1;
  int d_index = 1;
  guide::GuideLevel guide;
  bool guide_active = true;
  double p_magnitude = 50.0;
  int success_streak = 0;
  int p_step = 0;
};

enum class Termination {
  kNone,
  kSuccess,
  kTimeout,
  kLowBase,
  kPitch,
  kBodyContact,
  kFootTrip,
  kFellInGap,
  kFault,
};

std::string_view to_string(Termination reason);

struct EpisodeOutcome {
  bool success = false;
  double distance_fraction = 0.0;
  Termination reason = Termination::kNone;
};

struct Settings {
  double difficulty = 1.0;
  double guide_multiplier = 1.0;  // 0 when guidance is disabled
  double perturbation = 50.0;     // N
  bool joint_guide = true;
};

CurriculumState initial_state(const CurriculumConfig& config, terrain::TerrainKind kind);

// Applies one finished episode. Throws std::logic_error once Done.
CurriculumState record_episode(const CurriculumState& state, const EpisodeOutcome& outcome,
                               const CurriculumConfig& config);

Settings current_settings(const CurriculumState& state);

struct PerturbationConfig {
  double rate_hz = 2.5;
  double moment_arm = 0.3;  // m, converts the pitch sample to N m
};

// With probability rate * dt returns a one-step base wrench whose components
// are drawn independently from U(-p, p) (pitch scaled by the moment arm).
std::optional<sim::Vec3> sample_perturbation(double magnitude, Rng& rng, double dt,
                                             const PerturbationConfig& config = {});

struct TerminationConfig {
  double min_base_height = 0.45;  // m above local ground
  double max_pitch = 1.0;         // rad
  double gap_fall_z = -0.5;       // m
  double trip_depth = 0.05;       // m, foot point buried in an obstacle side
  int max_steps = 2000;
  // Long courses get time_factor x the nominal traversal time instead.
  double time_factor = 1.5;

  void validate() const;
};

struct TerminationInputs {
  const sim::GeneralizedState* state = nullptr;
  int step_count = 0;
  int step_limit = 2000;
  double start_x = 0.0;
  bool body_contact = false;
  bool foot_trip = false;
};

double distance_fraction(const terrain::Heightfield& hf, double start_x, double base_x);

int step_limit(const TerminationConfig& config, const terrain::Heightfield& hf, double start_x,
               double nominal_speed, double control_dt);

std::optional<EpisodeOutcome> episode_termination(const TerminationInputs& inputs,
                                                  const terrain::Heightfield& hf,
                                                  const TerminationConfig& config);

}  // namespace curriwalk::curriculum
