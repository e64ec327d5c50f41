#include "curriwalk/target_trajectory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curriwalk::target {

void GaitParams::validate() const {
  if (!(step_length > 0.0 && step_height > 0.0 && cycle_s > 0.0 && hip_height > 0.0 &&
        frame_dt > 0.0)) {
    throw std::invalid_argument("gait parameters must be positive");
  }
  const double frames = cycle_s / frame_dt;
  const long rounded = std::lround(frames);
  if (std::abs(frames - rounded) > 1e-9 || rounded < 2 || rounded % 2 != 0) {
    throw std::invalid_argument("gait cycle must span an even number of frames");
  }
}

sim::Vec2 foot_offset(const GaitParams& params, double phase) {
  const double half = 0.5 * params.step_length;
  if (phase < 0.5) {
    const double s = phase / 0.5;
    return {half - params.step_length * s, 0.0};
  }
  const double s = (phase - 0.5) / 0.5;
  const double x = -half + params.step_length * 0.5 * (1.0 - std::cos(std::numbers::pi * s));
  return {x, params.step_height * std::sin(std::numbers::pi * s)};
}

Eigen::Vector3d leg_inverse_kinematics(const sim::BipedModel& model,
                                       const sim::Vec2& ankle_from_hip) {
  const double l1 = model.thigh.length;
  const double l2 = model.shank.length;
  const double d2 = ankle_from_hip.squaredNorm();
  const double d = std::sqrt(d2);
  if (d >= l1 + l2 || d <= std::abs(l1 - l2)) {
    throw std::invalid_argument("gait: ankle target out of leg reach");
  }
  // Knee flexion is negative: the shank folds backward.
  const double knee = -std::acos((d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2));
  const double line = std::atan2(ankle_from_hip.x(), -ankle_from_hip.y());
  const double hip = line + std::atan2(-l2 * std::sin(knee), l1 + l2 * std::cos(knee));
  return {hip, knee, -(hip + knee)};
}

TargetTrajectory builtin_walk_trajectory(const sim::BipedModel& model, const GaitParams& params) {
  params.validate();
  const int frames = static_cast<int>(std::lround(params.cycle_s / params.frame_dt));
  const int half = frames / 2;
  const double ankle_height = -model.heel.y();

  auto pose_at = [&](int k) {
    const double phase = static_cast<double>(k) / frames;
    Vec6 joints;
    for (int side = 0; side < 2; ++side) {
      // The left foot lags the right by half a cycle.
      const double p = std::fmod(phase + 0.5 * side, 1.0);
      const sim::Vec2 foot = foot_offset(params, p);
      const sim::Vec2 ankle(foot.x(), foot.y() - (params.hip_height - ankle_height));
      joints.segment<3>(3 * side) = leg_inverse_kinematics(model, ankle);
    }
    for (int j = 0; j < sim::kNumJoints; ++j) {
      if (joints(j) < model.joint_lower(j) || joints(j) > model.joint_upper(j)) {
        throw std::invalid_argument("gait: target pose violates joint limits");
      }
    }
    return joints;
  };

  TargetTrajectory traj;
  traj.cycle_s = params.cycle_s;
  traj.speed = 2.0 * params.step_length / params.cycle_s;
  for (int k = 0; k < half; ++k) {
    traj.right_segment.push_back(pose_at(k));
    traj.left_segment.push_back(pose_at(k + half));
  }
  return traj;
}

TrajectoryCursor on_foot_contact(const TrajectoryCursor& cursor, sim::Foot foot) {
  if (!cursor.linked) return cursor;
  return {foot == sim::Foot::kRight ? SegmentId::kRight : SegmentId::kLeft, 0, true};
}

TrajectoryCursor advance(const TargetTrajectory& traj, const TrajectoryCursor& cursor) {
  TrajectoryCursor next = cursor;
  const int length = static_cast<int>(traj.segment(cursor.active).size());
  next.frame = (cursor.frame + 1) % length;
  if (next.frame == 0) {
    next.active = cursor.active == SegmentId::kRight ? SegmentId::kLeft : SegmentId::kRight;
  }
  return next;
}

const Vec6& target_joints(const TargetTrajectory& traj, const TrajectoryCursor& cursor) {
  const auto& seg = traj.segment(cursor.active);
  const int length = static_cast<int>(seg.size());
  const int frame = ((cursor.frame % length) + length) % length;
  return seg[frame];
}

}  // namespace curriwalk::target
