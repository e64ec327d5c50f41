#include "curriwalk/planar_tree.hpp"

#include <cmath>
#include <stdexcept>

namespace curriwalk::sim {

Vec2 Pose2::rotate(const Vec2& local) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * local.x() - s * local.y(), s * local.x() + c * local.y()};
}

Vec2 Pose2::transform(const Vec2& local) const { return position + rotate(local); }

Mat3 planar_transform(double angle, const Vec2& origin) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 x;
  x << 1.0, 0.0, 0.0,
       s * origin.x() - c * origin.y(), c, s,
       c * origin.x() + s * origin.y(), -s, c;
  return x;
}

Mat3 motion_cross(const Vec3& v) {
  Mat3 m;
  m << 0.0, 0.0, 0.0,
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return m;
}

Mat3 force_cross(const Vec3& v) { return -motion_cross(v).transpose(); }

Mat3 spatial_inertia(double mass, double inertia, const Vec2& com) {
  Mat3 m;
  m << inertia + mass * com.squaredNorm(), -mass * com.y(), mass * com.x(),
       -mass * com.y(), mass, 0.0,
       mass * com.x(), 0.0, mass;
  return m;
}

namespace {

Vec3 subspace(JointType type) {
  switch (type) {
    case JointType::kPrismaticX:
      return {0.0, 1.0, 0.0};
    case JointType::kPrismaticZ:
      return {0.0, 0.0, 1.0};
    case JointType::kRevolute:
      return {1.0, 0.0, 0.0};
  }
  return Vec3::Zero();
}

Mat3 joint_transform(JointType type, double q) {
  switch (type) {
    case JointType::kPrismaticX:
      return planar_transform(0.0, Vec2(q, 0.0));
    case JointType::kPrismaticZ:
      return planar_transform(0.0, Vec2(0.0, q));
    case JointType::kRevolute:
      return planar_transform(q, Vec2::Zero());
  }
  return Mat3::Identity();
}

}  // namespace

int PlanarTree::add_body(const Body& body) {
  const int index = dof();
  if (index >= kMaxBodies) throw std::invalid_argument("planar tree: too many bodies");
  if (body.parent >= index || body.parent < -1) {
    throw std::invalid_argument("planar tree: parent must precede child");
  }
  if (body.mass < 0.0 || body.inertia < 0.0) {
    throw std::invalid_argument("planar tree: negative mass or inertia");
  }
  bodies_.push_back(body);
  inertia_.push_back(spatial_inertia(body.mass, body.inertia, body.com));
  x_tree_.push_back(planar_transform(0.0, body.joint_offset));
  return index;
}

double PlanarTree::total_mass() const {
  double m = 0.0;
  for (const auto& b : bodies_) m += b.mass;
  return m;
}

TreeKinematics PlanarTree::kinematics(const VecN& q, const VecN& qdot) const {
  const int n = dof();
  if (q.size() != n || qdot.size() != n) {
    throw std::invalid_argument("planar tree: state dimension mismatch");
  }
  if (!q.allFinite() || !qdot.allFinite()) {
    throw std::invalid_argument("planar tree: non-finite state");
  }
  TreeKinematics kin;
  kin.count = n;
  for (int i = 0; i < n; ++i) {
    const Body& b = bodies_[i];
    const Vec3 s = subspace(b.joint);
    kin.motion_subspace[i] = s;
    kin.x_up[i] = joint_transform(b.joint, q(i)) * x_tree_[i];

    Pose2 parent_pose;
    Vec3 parent_velocity = Vec3::Zero();
    if (b.parent >= 0) {
      parent_pose = kin.pose[b.parent];
      parent_velocity = kin.velocity[b.parent];
    }
    Vec2 local = b.joint_offset;
    double angle = parent_pose.angle;
    switch (b.joint) {
      case JointType::kPrismaticX:
        local.x() += q(i);
        break;
      case JointType::kPrismaticZ:
        local.y() += q(i);
        break;
      case JointType::kRevolute:
        angle += q(i);
        break;
    }
    kin.pose[i].position = parent_pose.transform(local);
    kin.pose[i].angle = angle;
    kin.velocity[i] = kin.x_up[i] * parent_velocity + s * qdot(i);
  }
  return kin;
}

MatN PlanarTree::mass_matrix(const TreeKinematics& kin) const {
  const int n = dof();
  std::array<Mat3, kMaxBodies> composite;
  for (int i = 0; i < n; ++i) composite[i] = inertia_[i];
  for (int i = n - 1; i >= 0; --i) {
    const int parent = bodies_[i].parent;
    if (parent >= 0) {
      composite[parent] += kin.x_up[i].transpose() * composite[i] * kin.x_up[i];
    }
  }
  MatN m = MatN::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Vec3 f = composite[i] * kin.motion_subspace[i];
    m(i, i) = kin.motion_subspace[i].dot(f);
    int j = i;
    while (bodies_[j].parent >= 0) {
      f = kin.x_up[j].transpose() * f;
      j = bodies_[j].parent;
      m(i, j) = kin.motion_subspace[j].dot(f);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

MatN PlanarTree::mass_matrix(const VecN& q) const {
  return mass_matrix(kinematics(q, VecN::Zero(dof())));
}

VecN PlanarTree::inverse_dynamics(const TreeKinematics& kin, const VecN& qdot,
                                  const VecN& qddot, double gravity) const {
  const int n = dof();
  std::array<Vec3, kMaxBodies> accel;
  std::array<Vec3, kMaxBodies> force;
  // Gravity enters as a fictitious upward acceleration of the world frame.
  const Vec3 world_accel(0.0, 0.0, gravity);
  for (int i = 0; i < n; ++i) {
    const int parent = bodies_[i].parent;
    const Vec3& s = kin.motion_subspace[i];
    const Vec3 parent_accel = parent >= 0 ? accel[parent] : world_accel;
    accel[i] = kin.x_up[i] * parent_accel + s * qddot(i) +
               motion_cross(kin.velocity[i]) * s * qdot(i);
    force[i] = inertia_[i] * accel[i] +
               force_cross(kin.velocity[i]) * inertia_[i] * kin.velocity[i];
  }
  VecN tau(n);
  for (int i = n - 1; i >= 0; --i) {
    tau(i) = kin.motion_subspace[i].dot(force[i]);
    const int parent = bodies_[i].parent;
    if (parent >= 0) force[parent] += kin.x_up[i].transpose() * force[i];
  }
  return tau;
}

VecN PlanarTree::bias_forces(const TreeKinematics& kin, const VecN& qdot,
                             double gravity) const {
  return inverse_dynamics(kin, qdot, VecN::Zero(dof()), gravity);
}

VecN PlanarTree::bias_forces(const VecN& q, const VecN& qdot, double gravity) const {
  return bias_forces(kinematics(q, qdot), qdot, gravity);
}

Vec2 PlanarTree::point_position(const TreeKinematics& kin, int body,
                                const Vec2& local) const {
  return kin.pose[body].transform(local);
}

PointJacobian PlanarTree::point_jacobian(const TreeKinematics& kin, int body,
                                         const Vec2& local) const {
  const int n = dof();
  PointJacobian jac = PointJacobian::Zero(2, n);
  const Vec2 p = point_position(kin, body, local);
  for (int j = body; j >= 0; j = bodies_[j].parent) {
    const Body& b = bodies_[j];
    const double parent_angle = b.parent >= 0 ? kin.pose[b.parent].angle : 0.0;
    const Pose2 axis_frame{Vec2::Zero(), parent_angle};
    switch (b.joint) {
      case JointType::kPrismaticX:
        jac.col(j) = axis_frame.rotate(Vec2(1.0, 0.0));
        break;
      case JointType::kPrismaticZ:
        jac.col(j) = axis_frame.rotate(Vec2(0.0, 1.0));
        break;
      case JointType::kRevolute: {
        const Vec2 r = p - kin.pose[j].position;
        jac.col(j) = Vec2(-r.y(), r.x());
        break;
      }
    }
  }
  return jac;
}

Vec2 PlanarTree::com_position(const TreeKinematics& kin) const {
  Vec2 sum = Vec2::Zero();
  double mass = 0.0;
  for (int i = 0; i < dof(); ++i) {
    sum += bodies_[i].mass * point_position(kin, i, bodies_[i].com);
    mass += bodies_[i].mass;
  }
  return mass > 0.0 ? Vec2(sum / mass) : Vec2::Zero();
}

double PlanarTree::kinetic_energy(const VecN& q, const VecN& qdot) const {
  return 0.5 * qdot.dot(mass_matrix(q) * qdot);
}

double PlanarTree::potential_energy(const TreeKinematics& kin, double gravity) const {
  double v = 0.0;
  for (int i = 0; i < dof(); ++i) {
    v += bodies_[i].mass * gravity * point_position(kin, i, bodies_[i].com).y();
  }
  return v;
}

}  // namespace curriwalk::sim
