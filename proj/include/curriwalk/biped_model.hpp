#pragma once

// Seven-link planar biped: a floating torso with two three-joint legs.
//
// Generalized coordinates (9):
//   0 base x [m]   1 base z [m]   2 base pitch [rad]
//   3 right hip    4 right knee   5 right ankle
//   6 left hip     7 left knee    8 left ankle
// The base frame origin is the pelvis, where both hip joints sit. Actuated
// 6-vectors (torques, joint angles) use the order of coordinates 3..8.
// Contact points are ordered right heel, right toe, left heel, left toe.

#include <array>

#include <Eigen/Dense>

#include "curriwalk/planar_tree.hpp"

namespace curriwalk::sim {

inline constexpr int kDof = 9;
inline constexpr int kNumJoints = 6;
inline constexpr int kNumContacts = 4;
inline constexpr int kNumLinks = 7;
inline constexpr int kBaseDof = 3;

using Vec6 = Eigen::Matrix<double, 6, 1>;

enum BodyIndex : int {
  kBaseX = 0,
  kBaseZ = 1,
  kTorso = 2,
  kRightThigh = 3,
  kRightShank = 4,
  kRightFoot = 5,
  kLeftThigh = 6,
  kLeftShank = 7,
  kLeftFoot = 8,
};

enum class Foot { kRight = 0, kLeft = 1 };

struct LinkParams {
  double mass = 1.0;     // kg
  double inertia = 0.1;  // kg m^2 about the CoM
  double length = 0.4;   // m
  Vec2 com = Vec2::Zero();  // m, link frame
};

struct BipedModel {
  LinkParams torso{17.0, 0.8, 0.5, Vec2(0.0, 0.2)};
  LinkParams thigh{4.0, 0.06, 0.4, Vec2(0.0, -0.2)};
  LinkParams shank{2.5, 0.035, 0.4, Vec2(0.0, -0.2)};
  LinkParams foot{1.0, 0.005, 0.2, Vec2(0.05, -0.05)};
  Vec2 heel{-0.05, -0.08};  // foot frame
  Vec2 toe{0.15, -0.08};
  Vec6 torque_limit = Vec6::Constant(150.0);
  Vec6 joint_lower = (Vec6() << -1.5, -2.6, -1.0, -1.5, -2.6, -1.0).finished();
  Vec6 joint_upper = (Vec6() << 2.0, 0.0, 1.0, 2.0, 0.0, 1.0).finished();
  double gravity = 9.81;

  // Throws std::invalid_argument when a physical parameter is invalid.
  void validate() const;
  double total_mass() const;
};

// Builds the kinematic tree (two virtual prismatic bodies carry the base
// translation, the torso carries the pitch).
PlanarTree build_tree(const BipedModel& model);

struct GeneralizedState {
  VecN q = VecN::Zero(kDof);
  VecN qdot = VecN::Zero(kDof);
  double t = 0.0;

  double base_x() const { return q(kBaseX); }
  double base_z() const { return q(kBaseZ); }
  double pitch() const { return q(kTorso); }
  Vec6 joints() const { return q.segment<6>(3); }
  Vec6 joint_velocities() const { return qdot.segment<6>(3); }
  bool finite() const { return q.allFinite() && qdot.allFinite(); }
};

struct StepInput {
  Vec6 joint_torques = Vec6::Zero();  // policy torques, clamped before use
  Vec3 base_wrench = Vec3::Zero();    // [Fx N, Fz N, tau_pitch N m] at the pelvis
  Vec6 guide_torques = Vec6::Zero();  // joint guide torques, not clamped
};

struct ContactPoint {
  int body;
  Vec2 local;
};

std::array<ContactPoint, kNumContacts> contact_points(const BipedModel& model);

// Points on non-foot links that must never touch the ground.
std::vector<ContactPoint> body_probe_points(const BipedModel& model);

}  // namespace curriwalk::sim
