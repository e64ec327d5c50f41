#pragma once

// Six-term locomotion reward: five exponentially shaped tracking terms plus a
// quadratic action penalty.
//
//   e_goal = (v_x - v_target)^2
//   e_pos  = sum_j (J_j - J_target_j)^2
//   e_vel  = sum_j Jv_j^2
//   e_base = (h - h_target)^2 + pitch^2
//   e_step = (stride_left - stride_right)^2
//   term   = w * exp(-c * e);   act = w_act * sum_j a_j^2

#include "curriwalk/biped_model.hpp"

namespace curriwalk::reward {

using sim::Vec6;

struct RewardWeights {
  double w_goal = 0.3;
  double w_pos = 0.3;
  double w_vel = 0.1;
  double w_base = 0.2;
  double w_step = 0.1;
  double w_act = -0.001;
  double c_goal = 2.0;
  double c_pos = 2.0;
  double c_vel = 0.1;
  double c_base = 10.0;
  double c_step = 5.0;

  void validate() const;
  double shaped_sum() const { return w_goal + w_pos + w_vel + w_base + w_step; }
};

struct RewardTargets {
  double forward_velocity = 1.0;
  double base_height = 0.80;
};

struct RewardInputs {
  double forward_velocity = 0.0;
  double base_height = 0.0;  // above the supporting ground
  double pitch = 0.0;
  Vec6 joints = Vec6::Zero();
  Vec6 joint_velocities = Vec6::Zero();
  Vec6 target_joints = Vec6::Zero();
  Vec6 action = Vec6::Zero();
  double stride_left = 0.0;
  double stride_right = 0.0;
};

struct RewardBreakdown {
  double goal = 0.0;
  double pos = 0.0;
  double vel = 0.0;
  double base = 0.0;
  double step = 0.0;
  double act = 0.0;
  double total = 0.0;
};

// Throws std::invalid_argument on non-finite inputs.
RewardBreakdown compute_reward(const RewardWeights& weights, const RewardTargets& targets,
                               const RewardInputs& inputs);

}  // namespace curriwalk::reward
