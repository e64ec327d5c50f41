#include "curriwalk/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curriwalk::curriculum {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kStage1:
      return "stage1";
    case Phase::kStage2:
      return "stage2";
    case Phase::kStage3:
      return "stage3";
    case Phase::kDone:
      return "done";
  }
  return "unknown";
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::kNone:
      return "none";
    case Termination::kSuccess:
      return "success";
    case Termination::kTimeout:
      return "timeout";
    case Termination::kLowBase:
      return "low_base";
    case Termination::kPitch:
      return "pitch";
    case Termination::kBodyContact:
      return "body_contact";
    case Termination::kFootTrip:
      return "foot_trip";
    case Termination::kFellInGap:
      return "fell_in_gap";
    case Termination::kFault:
      return "fault";
  }
  return "unknown";
}

void CurriculumConfig::validate() const {
  const bool ok = max_difficulty >= 1 && max_difficulty <= 12 && success_streak >= 1 &&
                  guide_threshold > 0.0 && guide_threshold < 1.0 && perturb_initial >= 0.0 &&
                  perturb_final >= perturb_initial && perturb_increments >= 1;
  if (!ok) throw std::invalid_argument("curriculum config: invalid values");
}

namespace {

// Moves to the first enabled stage at or after `from`.
void enter_stage(CurriculumState& s, Phase from, const CurriculumConfig& config) {
  Phase phase = from;
  if (phase == Phase::kStage2 && !config.guide_stage) phase = Phase::kStage3;
  if (phase == Phase::kStage3 && !config.perturb_stage) phase = Phase::kDone;
  s.phase = phase;
  s.success_streak = 0;
}

}  // namespace

CurriculumState initial_state(const CurriculumConfig& config, terrain::TerrainKind kind) {
  config.validate();
  CurriculumState s;
  s.guide.multiplier = 1.0;
  s.guide.mode = config.decay_mode;
  s.guide.joints_enabled = config.joint_guide;
  s.guide_active = config.guide_stage;
  s.p_magnitude = config.perturb_initial;
  // Flat has a single difficulty level, so its terrain stage is empty.
  const bool ramp_terrain = config.terrain_stage && kind != terrain::TerrainKind::kFlat;
  if (ramp_terrain) {
    s.d_index = 1;
    s.phase = Phase::kStage1;
  } else {
    s.d_index = config.max_difficulty;
    enter_stage(s, Phase::kStage2, config);
  }
  return s;
}

CurriculumState record_episode(const CurriculumState& state, const EpisodeOutcome& outcome,
                               const CurriculumConfig& config) {
  if (state.phase == Phase::kDone) {
    throw std::logic_error("curriculum: record_episode after completion");
  }
  CurriculumState s = state;
  const bool continuous = s.guide.mode == guide::DecayMode::kContinuous;

  if (s.phase == Phase::kStage2 && continuous) {
    s.guide = guide::decay_continuous(s.guide);
    s.success_streak = outcome.success ? s.success_streak + 1 : 0;
    if (s.success_streak >= config.success_streak) s.success_streak = 0;
    if (s.guide.multiplier < config.guide_threshold) enter_stage(s, Phase::kStage3, config);
    return s;
  }

  if (!outcome.success) {
    s.success_streak = 0;
    return s;
  }
  if (++s.success_streak < config.success_streak) return s;
  s.success_streak = 0;

  switch (s.phase) {
    case Phase::kStage1:
      ++s.d_index;
      if (s.d_index >= config.max_difficulty) {
        s.d_index = config.max_difficulty;
        enter_stage(s, Phase::kStage2, config);
      }
      break;
    case Phase::kStage2:
      s.guide = guide::decay(s.guide);
      if (s.guide.multiplier < config.guide_threshold) enter_stage(s, Phase::kStage3, config);
      break;
    case Phase::kStage3:
      ++s.p_step;
      s.p_magnitude = config.perturb_initial + (config.perturb_final - config.perturb_initial) *
                                                   s.p_step / config.perturb_increments;
      if (s.p_step >= config.perturb_increments) {
        s.p_magnitude = config.perturb_final;
        s.phase = Phase::kDone;
      }
      break;
    case Phase::kDone:
      break;
  }
  return s;
}

Settings current_settings(const CurriculumState& state) {
  Settings out;
  out.difficulty = state.d_index;
  out.guide_multiplier = state.guide_active ? state.guide.multiplier : 0.0;
  out.perturbation = state.p_magnitude;
  out.joint_guide = state.guide.joints_enabled;
  return out;
}

std::optional<sim::Vec3> sample_perturbation(double magnitude, Rng& rng, double dt,
                                             const PerturbationConfig& config) {
  if (magnitude < 0.0) throw std::invalid_argument("perturbation magnitude must be >= 0");
  std::uniform_real_distribution<double> trigger(0.0, 1.0);
  if (trigger(rng) >= config.rate_hz * dt) return std::nullopt;
  if (magnitude == 0.0) return sim::Vec3::Zero();
  std::uniform_real_distribution<double> force(-magnitude, magnitude);
  const double fx = force(rng);
  const double fz = force(rng);
  const double pitch = force(rng);
  return sim::Vec3(fx, fz, pitch * config.moment_arm);
}

void TerminationConfig::validate() const {
  if (!(min_base_height > 0.0 && max_pitch > 0.0 && trip_depth > 0.0 && max_steps > 0 &&
        time_factor > 0.0)) {
    throw std::invalid_argument("termination config: invalid values");
  }
}

double distance_fraction(const terrain::Heightfield& hf, double start_x, double base_x) {
  const double span = hf.finish_x - start_x;
  if (!(span > 0.0)) return 1.0;
  return std::clamp((base_x - start_x) / span, 0.0, 1.0);
}

int step_limit(const TerminationConfig& config, const terrain::Heightfield& hf, double start_x,
               double nominal_speed, double control_dt) {
  const double nominal = (hf.finish_x - start_x) / nominal_speed / control_dt;
  const int scaled = static_cast<int>(std::ceil(config.time_factor * nominal));
  return std::max(config.max_steps, scaled);
}

std::optional<EpisodeOutcome> episode_termination(const TerminationInputs& inputs,
                                                  const terrain::Heightfield& hf,
                                                  const TerminationConfig& config) {
  const sim::GeneralizedState& s = *inputs.state;
  EpisodeOutcome out;
  out.distance_fraction = distance_fraction(hf, inputs.start_x, s.base_x());
  if (s.base_x() >= hf.finish_x) {
    out.success = true;
    out.distance_fraction = 1.0;
    out.reason = Termination::kSuccess;
    return out;
  }
  const double clearance = s.base_z() - hf.height_at(s.base_x()).height;
  if (s.base_z() < config.gap_fall_z) out.reason = Termination::kFellInGap;
  else if (clearance < config.min_base_height) out.reason = Termination::kLowBase;
  else if (std::abs(s.pitch()) > config.max_pitch) out.reason = Termination::kPitch;
  else if (inputs.body_contact) out.reason = Termination::kBodyContact;
  else if (inputs.foot_trip) out.reason = Termination::kFootTrip;
  else if (inputs.step_count >= inputs.step_limit) out.reason = Termination::kTimeout;
  else return std::nullopt;
  return out;
}

}  // namespace curriwalk::curriculum
