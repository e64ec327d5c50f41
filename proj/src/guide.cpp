#include "curriwalk/guide.hpp"

#include <stdexcept>

namespace curriwalk::guide {

void GuideGains::validate() const {
  if ((com_kp.array() < 0.0).any() || (com_kd.array() < 0.0).any() || joint_kp < 0.0 ||
      joint_kd < 0.0) {
    throw std::invalid_argument("guide gains must be non-negative");
  }
}

Vec3 com_guide_force(const GuideGains& gains, const GuideLevel& level,
                     const CoMTargets& targets, const BaseState& base) {
  const Vec3 target_pose(0.0, targets.height, targets.pitch);
  const Vec3 target_velocity(targets.forward_velocity, 0.0, 0.0);
  const Vec3 kp(0.0, gains.com_kp.y(), gains.com_kp.z());
  const Vec3 pd = kp.cwiseProduct(target_pose - base.pose) +
                  gains.com_kd.cwiseProduct(target_velocity - base.velocity);
  return level.multiplier * pd;
}

Vec6 joint_guide_torques(const GuideGains& gains, const GuideLevel& level,
                         const Vec6& target_joints, const Vec6& joints,
                         const Vec6& joint_velocities) {
  if (!level.joints_enabled) return Vec6::Zero();
  return level.multiplier * (gains.joint_kp * (target_joints - joints) - gains.joint_kd * joint_velocities);
}

GuideLevel decay(const GuideLevel& level) {
  if (level.mode != DecayMode::kSuccessGated) {
    throw std::logic_error("guide: success-gated decay in continuous mode");
  }
  GuideLevel next = level;
  next.multiplier = kSuccessDecay * level.multiplier;
  return next;
}

GuideLevel decay_continuous(const GuideLevel& level) {
  if (level.mode != DecayMode::kContinuous) {
    throw std::logic_error("guide: continuous decay in success-gated mode");
  }
  GuideLevel next = level;
  next.multiplier = kContinuousDecay * level.multiplier;
  return next;
}

}  // namespace curriwalk::guide
