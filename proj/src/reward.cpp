#include "curriwalk/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace curriwalk::reward {

void RewardWeights::validate() const {
  const bool ok = w_goal > 0.0 && w_pos > 0.0 && w_vel > 0.0 && w_base > 0.0 && w_step > 0.0 &&
                  w_act <= 0.0 && c_goal > 0.0 && c_pos > 0.0 && c_vel > 0.0 && c_base > 0.0 &&
                  c_step > 0.0;
  if (!ok) throw std::invalid_argument("reward weights: shaped weights and scales must be positive, w_act <= 0");
}

RewardBreakdown compute_reward(const RewardWeights& w, const RewardTargets& targets,
                               const RewardInputs& in) {
  const bool finite = std::isfinite(in.forward_velocity) && std::isfinite(in.base_height) &&
                      std::isfinite(in.pitch) && in.joints.allFinite() &&
                      in.joint_velocities.allFinite() && in.target_joints.allFinite() &&
                      in.action.allFinite() && std::isfinite(in.stride_left) &&
                      std::isfinite(in.stride_right);
  if (!finite) throw std::invalid_argument("reward: non-finite input");

  const double dv = in.forward_velocity - targets.forward_velocity;
  const double e_goal = dv * dv;
  const double e_pos = (in.joints - in.target_joints).squaredNorm();
  const double e_vel = in.joint_velocities.squaredNorm();
  const double dh = in.base_height - targets.base_height;
  const double e_base = dh * dh + in.pitch * in.pitch;
  const double ds = in.stride_left - in.stride_right;
  const double e_step = ds * ds;

  RewardBreakdown r;
  r.goal = w.w_goal * std::exp(-w.c_goal * e_goal);
  r.pos = w.w_pos * std::exp(-w.c_pos * e_pos);
  r.vel = w.w_vel * std::exp(-w.c_vel * e_vel);
  r.base = w.w_base * std::exp(-w.c_base * e_base);
  r.step = w.w_step * std::exp(-w.c_step * e_step);
  r.act = w.w_act * in.action.squaredNorm();
  r.total = r.goal + r.pos + r.vel + r.base + r.step + r.act;
  return r;
}

}  // namespace curriwalk::reward
