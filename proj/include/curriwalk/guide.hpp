#pragma once

// Assistance forces: a PD "gantry" on the base and PD joint torques towards
// the target gait, both scaled by a shared guide multiplier f.

#include "curriwalk/biped_model.hpp"

namespace curriwalk::guide {

using sim::Vec3;
using sim::Vec6;

struct GuideGains {
  Vec3 com_kp{0.0, 2000.0, 400.0};  // x (unused: velocity tracking), z N/m, pitch N m/rad
  Vec3 com_kd{300.0, 300.0, 60.0};
  double joint_kp = 60.0;  // N m/rad
  double joint_kd = 2.0;   // N m s/rad

  void validate() const;
};

enum class DecayMode { kSuccessGated, kContinuous };

inline constexpr double kSuccessDecay = 0.65;
inline constexpr double kContinuousDecay = 0.995;

struct GuideLevel {
  double multiplier = 1.0;
  DecayMode mode = DecayMode::kSuccessGated;
  bool joints_enabled = true;
};

struct CoMTargets {
  double forward_velocity = 1.0;  // m/s
  double height = 0.80;           // m above the supporting ground
  double pitch = 0.0;             // rad
};

// Base pose/velocity as seen by the gantry: (x, z above support, pitch) and
// their rates.
struct BaseState {
  Vec3 pose = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

// f * [Kp (p_target - p) + Kd (v_target - v)] per planar DOF; the x position
// gain is forced to zero so x tracks velocity only.
Vec3 com_guide_force(const GuideGains& gains, const GuideLevel& level,
                     const CoMTargets& targets, const BaseState& base);

// f * [Kp (J_target - J) - Kd Jv]; zero when joint guidance is disabled.
Vec6 joint_guide_torques(const GuideGains& gains, const GuideLevel& level,
                         const Vec6& target_joints, const Vec6& joints,
                         const Vec6& joint_velocities);

// Success-gated decay: f <- 0.65 f. Throws std::logic_error in continuous mode.
GuideLevel decay(const GuideLevel& level);
// Per-episode decay: f <- 0.995 f. Throws std::logic_error in success-gated mode.
GuideLevel decay_continuous(const GuideLevel& level);

}  // namespace curriwalk::guide
