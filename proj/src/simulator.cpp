#include "curriwalk/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace curriwalk::sim {

void SimConfig::validate() const {
  if (!(control_dt > 0.0) || substeps < 1 || !(divergence_limit > 0.0)) {
    throw std::invalid_argument("simulator config: dt, substeps and divergence limit must be positive");
  }
  contact.validate();
}

void free_substep(const PlanarTree& tree, VecN& q, VecN& qdot, const VecN& tau, double gravity,
                  double h) {
  const TreeKinematics kin = tree.kinematics(q, qdot);
  const Eigen::LLT<MatN> llt(tree.mass_matrix(kin));
  if (llt.info() != Eigen::Success) throw SimulationFault("singular mass matrix");
  VecN qddot = llt.solve(tau - tree.bias_forces(kin, qdot, gravity));
  const VecN mid_velocity = qdot + (0.5 * h) * qddot;
  qddot = llt.solve(tau - tree.bias_forces(q, mid_velocity, gravity));
  qdot += h * qddot;
  q += h * qdot;
}

BipedSimulator::BipedSimulator(BipedModel model, SimConfig config)
    : model_(std::move(model)),
      config_(config),
      tree_(build_tree(model_)),
      contact_points_(contact_points(model_)) {
  config_.validate();
}

MatN BipedSimulator::mass_matrix(const GeneralizedState& state) const {
  return tree_.mass_matrix(tree_.kinematics(state.q, state.qdot));
}

VecN BipedSimulator::bias_forces(const GeneralizedState& state) const {
  return tree_.bias_forces(state.q, state.qdot, model_.gravity);
}

ForwardKinematics BipedSimulator::forward_kinematics(const GeneralizedState& state) const {
  const TreeKinematics kin = tree_.kinematics(state.q, state.qdot);
  ForwardKinematics fk;
  for (int i = 0; i < kNumLinks; ++i) fk.link_poses[i] = kin.pose[kTorso + i];
  for (int c = 0; c < kNumContacts; ++c) {
    const ContactPoint& cp = contact_points_[c];
    fk.contacts[c].position = tree_.point_position(kin, cp.body, cp.local);
    fk.contacts[c].velocity = tree_.point_jacobian(kin, cp.body, cp.local) * state.qdot;
  }
  return fk;
}

namespace {

struct ActiveContact {
  PointJacobian jacobian;
  double depth = 0.0;
  bool normal_implicit = true;
  bool tangential_implicit = true;
  double fixed_normal = 0.0;
  double fixed_tangential = 0.0;
};

}  // namespace

ContactReport BipedSimulator::substep(GeneralizedState& state, const VecN& generalized_force,
                                      const terrain::Heightfield& hf, double h) const {
  const int n = tree_.dof();
  const TreeKinematics kin = tree_.kinematics(state.q, state.qdot);
  const MatN mass = tree_.mass_matrix(kin);
  const VecN rhs_base = generalized_force - tree_.bias_forces(kin, state.qdot, model_.gravity);
  const ContactParams& cp = config_.contact;

  ContactReport report;
  std::array<ActiveContact, kNumContacts> active;
  std::array<bool, kNumContacts> is_active{};
  for (int c = 0; c < kNumContacts; ++c) {
    const ContactPoint& point = contact_points_[c];
    const Vec2 p = tree_.point_position(kin, point.body, point.local);
    const terrain::HeightSample ground = hf.height_at(p.x());
    const double depth = ground.height - p.y();
    report.points[c].position = p;
    report.points[c].penetration = depth;
    if (depth > 0.0 && !ground.is_gap) {
      is_active[c] = true;
      active[c].jacobian = tree_.point_jacobian(kin, point.body, point.local);
      active[c].depth = depth;
    }
  }

  const double normal_gain = cp.damping + h * cp.stiffness;
  VecN qddot(n);
  auto solve = [&](const VecN& rhs_free) {
    for (int iteration = 0; iteration < 6; ++iteration) {
      MatN a = mass;
      VecN b = rhs_free;
      for (int c = 0; c < kNumContacts; ++c) {
        if (!is_active[c]) continue;
        const ActiveContact& ac = active[c];
        const auto jn = ac.jacobian.row(1);
        const auto jt = ac.jacobian.row(0);
        if (ac.normal_implicit) {
          b += jn.transpose() * (cp.stiffness * ac.depth - normal_gain * jn.dot(state.qdot));
          a += (h * normal_gain) * jn.transpose() * jn;
        } else {
          b += jn.transpose() * ac.fixed_normal;
        }
        if (ac.tangential_implicit) {
          b -= jt.transpose() * (cp.tangential_damping * jt.dot(state.qdot));
          a += (h * cp.tangential_damping) * jt.transpose() * jt;
        } else {
          b += jt.transpose() * ac.fixed_tangential;
        }
      }
      Eigen::LLT<MatN> llt(a);
      if (llt.info() != Eigen::Success) throw SimulationFault("singular system matrix");
      qddot = llt.solve(b);

      const VecN qdot_next = state.qdot + h * qddot;
      bool changed = false;
      for (int c = 0; c < kNumContacts; ++c) {
        if (!is_active[c]) continue;
        ActiveContact& ac = active[c];
        const Vec2 v = ac.jacobian * qdot_next;
        double normal = ac.normal_implicit ? cp.stiffness * ac.depth - normal_gain * v.y()
                                           : ac.fixed_normal;
        if (normal < 0.0) {
          // Separating: the clamp at zero is active.
          if (ac.normal_implicit) changed = true;
          ac.normal_implicit = false;
          ac.fixed_normal = 0.0;
          normal = 0.0;
        }
        const double limit = cp.friction * normal;
        if (ac.tangential_implicit) {
          const double tangential = -cp.tangential_damping * v.x();
          if (std::abs(tangential) > limit) {
            ac.tangential_implicit = false;
            ac.fixed_tangential = std::copysign(limit, tangential);
            changed = true;
          }
        } else if (std::abs(ac.fixed_tangential) > limit) {
          ac.fixed_tangential = std::copysign(limit, ac.fixed_tangential);
          changed = true;
        }
      }
      if (!changed) break;
    }
  };
  solve(rhs_base);
  // Corrector: velocity-dependent bias at the predicted midpoint velocity.
  // Explicit evaluation at the start velocity adds energy whenever the
  // inertia depends on the configuration.
  // The prediction passes through the joint stops so a pinned joint does not
  // contribute a velocity it will never have.
  GeneralizedState predicted = state;
  predicted.qdot += h * qddot;
  limit_joint_velocities(predicted, mass, h);
  const VecN mid_velocity = 0.5 * (state.qdot + predicted.qdot);
  solve(generalized_force - tree_.bias_forces(state.q, mid_velocity, model_.gravity));

  state.qdot += h * qddot;
  // Report the forces actually applied during this substep.
  for (int c = 0; c < kNumContacts; ++c) {
    if (!is_active[c]) continue;
    const ActiveContact& ac = active[c];
    const Vec2 v = ac.jacobian * state.qdot;
    PointContact& out = report.points[c];
    out.in_contact = true;
    out.normal = ac.normal_implicit
                     ? std::max(0.0, cp.stiffness * ac.depth - normal_gain * v.y())
                     : ac.fixed_normal;
    const double limit = cp.friction * out.normal;
    out.tangential = ac.tangential_implicit
                         ? std::clamp(-cp.tangential_damping * v.x(), -limit, limit)
                         : std::clamp(ac.fixed_tangential, -limit, limit);
  }
  limit_joint_velocities(state, mass, h);
  state.q += h * state.qdot;
  // Roundoff only: the limited velocities land exactly on the stops.
  for (int j = 0; j < kNumJoints; ++j) {
    double& angle = state.q(kBaseDof + j);
    angle = std::clamp(angle, model_.joint_lower(j), model_.joint_upper(j));
  }
  state.t += h;

  const double limit = config_.divergence_limit;
  const auto bad = [limit](double v) { return !std::isfinite(v) || std::abs(v) > limit; };
  for (int i = 0; i < n; ++i) {
    if (bad(state.q(i)) || bad(state.qdot(i))) throw SimulationFault("state diverged");
  }
  return report;
}

void BipedSimulator::limit_joint_velocities(GeneralizedState& state, const MatN& mass,
                                            double h) const {
  // Joints whose next position would leave the range get the velocity that
  // lands them on the stop. An inelastic joint-space impulse enforces it, so
  // the rest of the tree responds through the inertia and momentum is kept.
  const auto target = [&](int j) {
    const int i = kBaseDof + j;
    const double next = state.q(i) + h * state.qdot(i);
    if (next < model_.joint_lower(j)) return (model_.joint_lower(j) - state.q(i)) / h;
    if (next > model_.joint_upper(j)) return (model_.joint_upper(j) - state.q(i)) / h;
    return state.qdot(i);
  };
  const Eigen::LLT<MatN> llt(mass);
  std::array<bool, kNumJoints> stopped{};
  std::array<double, kNumJoints> stop_velocity{};
  for (int pass = 0; pass < kNumJoints; ++pass) {
    bool added = false;
    for (int j = 0; j < kNumJoints; ++j) {
      if (stopped[j]) continue;
      const double v = target(j);
      if (v != state.qdot(kBaseDof + j)) {
        stopped[j] = true;
        stop_velocity[j] = v;
        added = true;
      }
    }
    if (!added) break;
    std::vector<int> rows;
    std::vector<double> wanted;
    for (int j = 0; j < kNumJoints; ++j) {
      if (!stopped[j]) continue;
      rows.push_back(kBaseDof + j);
      wanted.push_back(stop_velocity[j]);
    }
    const int m = static_cast<int>(rows.size());
    MatN selector = MatN::Zero(tree_.dof(), m);
    for (int k = 0; k < m; ++k) selector(rows[k], k) = 1.0;
    const MatN response = llt.solve(selector);  // M^-1 S
    MatN coupling(m, m);
    VecN change(m);
    for (int k = 0; k < m; ++k) {
      coupling.row(k) = response.row(rows[k]);
      change(k) = wanted[k] - state.qdot(rows[k]);
    }
    state.qdot += response * coupling.ldlt().solve(change);
    for (int k = 0; k < m; ++k) state.qdot(rows[k]) = wanted[k];
  }
}

StepResult BipedSimulator::step(const GeneralizedState& state, const StepInput& input,
                                const terrain::Heightfield& hf) const {
  if (!state.finite()) throw std::invalid_argument("simulator: non-finite state");
  if (!input.joint_torques.allFinite() || !input.base_wrench.allFinite() ||
      !input.guide_torques.allFinite()) {
    throw std::invalid_argument("simulator: non-finite input");
  }
  VecN force = VecN::Zero(tree_.dof());
  force.head<3>() = input.base_wrench;
  const Vec6 clamped =
      input.joint_torques.cwiseMax(-model_.torque_limit).cwiseMin(model_.torque_limit);
  force.segment<6>(kBaseDof) = clamped + input.guide_torques;

  StepResult result{state, {}};
  const double h = config_.control_dt / config_.substeps;
  for (int s = 0; s < config_.substeps; ++s) {
    result.contacts = substep(result.state, force, hf, h);
  }
  return result;
}

GeneralizedState BipedSimulator::standing_state(double base_x, const Vec6& joints,
                                                const terrain::Heightfield& hf) const {
  GeneralizedState s;
  s.q(kBaseX) = base_x;
  s.q.segment<6>(kBaseDof) = joints;
  const TreeKinematics kin = tree_.kinematics(s.q, s.qdot);
  double clearance = std::numeric_limits<double>::infinity();
  for (const ContactPoint& cp : contact_points_) {
    const Vec2 p = tree_.point_position(kin, cp.body, cp.local);
    clearance = std::min(clearance, p.y() - hf.support_height(p.x()));
  }
  s.q(kBaseZ) = -clearance;
  return s;
}

}  // namespace curriwalk::sim
