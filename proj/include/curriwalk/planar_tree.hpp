#pragma once

// Planar (sagittal x-z) rigid-body kinematic trees.
//
// Spatial vectors are 3-vectors ordered (angular, x, z). Angles are measured
// counter-clockwise in the x-z plane, so with x forward and z up a positive
// angle pitches a forward-pointing link upward and swings a downward-pointing
// link forward. Every body owns exactly one single-DOF joint to its parent, so
// the generalized coordinate index of a joint equals its body index.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace curriwalk::sim {

inline constexpr int kMaxBodies = 12;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxBodies, 1>;
using MatN = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                           kMaxBodies, kMaxBodies>;
using PointJacobian =
    Eigen::Matrix<double, 2, Eigen::Dynamic, Eigen::ColMajor, 2, kMaxBodies>;

enum class JointType { kPrismaticX, kPrismaticZ, kRevolute };

struct Body {
  std::string name;
  int parent = -1;
  JointType joint = JointType::kRevolute;
  Vec2 joint_offset = Vec2::Zero();  // joint location in the parent frame
  double mass = 0.0;
  double inertia = 0.0;              // rotational inertia about the CoM
  Vec2 com = Vec2::Zero();           // CoM in the body frame
};

struct Pose2 {
  Vec2 position = Vec2::Zero();
  double angle = 0.0;

  Vec2 transform(const Vec2& local) const;
  Vec2 rotate(const Vec2& local) const;
};

// Per-configuration cache shared by the dynamics routines.
struct TreeKinematics {
  int count = 0;
  std::array<Mat3, kMaxBodies> x_up;       // parent -> body motion transform
  std::array<Pose2, kMaxBodies> pose;      // world pose of each body frame
  std::array<Vec3, kMaxBodies> velocity;   // spatial velocity, body coords
  std::array<Vec3, kMaxBodies> motion_subspace;
};

// Planar coordinate transform for motion vectors from frame A to frame B,
// where B sits at `origin` (A coords) rotated by `angle` relative to A.
Mat3 planar_transform(double angle, const Vec2& origin);
Mat3 motion_cross(const Vec3& v);
Mat3 force_cross(const Vec3& v);
Mat3 spatial_inertia(double mass, double inertia, const Vec2& com);

class PlanarTree {
 public:
  // Bodies must be added parent-first. Returns the new body index.
  int add_body(const Body& body);

  int dof() const { return static_cast<int>(bodies_.size()); }
  const Body& body(int i) const { return bodies_.at(i); }
  const std::vector<Body>& bodies() const { return bodies_; }
  double total_mass() const;

  TreeKinematics kinematics(const VecN& q, const VecN& qdot) const;

  // Joint-space inertia via the composite-rigid-body algorithm.
  MatN mass_matrix(const TreeKinematics& kin) const;
  MatN mass_matrix(const VecN& q) const;

  // Recursive Newton-Euler: tau = M(q) qddot + h(q, qdot). With qddot = 0 this
  // yields the bias h (Coriolis, centrifugal and gravity terms).
  VecN inverse_dynamics(const TreeKinematics& kin, const VecN& qdot,
                        const VecN& qddot, double gravity) const;
  VecN bias_forces(const TreeKinematics& kin, const VecN& qdot,
                   double gravity) const;
  VecN bias_forces(const VecN& q, const VecN& qdot, double gravity) const;

  Vec2 point_position(const TreeKinematics& kin, int body,
                      const Vec2& local) const;
  PointJacobian point_jacobian(const TreeKinematics& kin, int body,
                               const Vec2& local) const;
  Vec2 com_position(const TreeKinematics& kin) const;

  double kinetic_energy(const VecN& q, const VecN& qdot) const;
  double potential_energy(const TreeKinematics& kin, double gravity) const;

 private:
  std::vector<Body> bodies_;
  std::vector<Mat3> inertia_;  // spatial inertia in body coords
  std::vector<Mat3> x_tree_;
};

}  // namespace curriwalk::sim
