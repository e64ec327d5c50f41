#pragma once

// Hand-designed cyclic walking gait used as the target for the joint guide and
// the pose reward, split into one segment per foot. Each segment starts at the
// touchdown of its foot; a linked cursor restarts the matching segment on
// every swing-foot touchdown.

#include <vector>

#include "curriwalk/biped_model.hpp"

namespace curriwalk::target {

using sim::Vec6;

struct GaitParams {
  double step_length = 0.5;   // m, swing-foot travel relative to the hip
  double step_height = 0.08;  // m, peak swing-foot lift
  double cycle_s = 1.0;       // s, two steps
  double hip_height = 0.80;   // m, pelvis above the sole during stance
  double frame_dt = 1.0 / 120.0;

  void validate() const;
};

enum class SegmentId { kRight = 0, kLeft = 1 };

struct TargetTrajectory {
  std::vector<Vec6> right_segment;
  std::vector<Vec6> left_segment;
  double cycle_s = 0.0;
  double speed = 0.0;  // m/s

  const std::vector<Vec6>& segment(SegmentId id) const {
    return id == SegmentId::kRight ? right_segment : left_segment;
  }
};

struct TrajectoryCursor {
  SegmentId active = SegmentId::kRight;
  int frame = 0;
  bool linked = true;
};

// Ankle position relative to the hip for one foot at gait phase in [0, 1),
// where phase 0 is that foot's touchdown.
sim::Vec2 foot_offset(const GaitParams& params, double phase);

// Planar two-link inverse kinematics for one leg with the foot held flat.
// Returns (hip, knee, ankle); throws std::invalid_argument when unreachable.
Eigen::Vector3d leg_inverse_kinematics(const sim::BipedModel& model,
                                       const sim::Vec2& ankle_from_hip);

// Throws std::invalid_argument if the gait is unreachable for the model's
// legs or leaves the joint limits.
TargetTrajectory builtin_walk_trajectory(const sim::BipedModel& model,
                                         const GaitParams& params = {});

TrajectoryCursor on_foot_contact(const TrajectoryCursor& cursor, sim::Foot foot);

// Advances one frame; at the end of a segment playback continues with the
// first frame of the other segment.
TrajectoryCursor advance(const TargetTrajectory& traj, const TrajectoryCursor& cursor);

const Vec6& target_joints(const TargetTrajectory& traj, const TrajectoryCursor& cursor);

}  // namespace curriwalk::target
