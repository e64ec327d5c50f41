#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "curriwalk/biped_model.hpp"
#include "curriwalk/contact.hpp"
#include "curriwalk/terrain.hpp"

namespace curriwalk::sim {

// Episode-terminating simulator failure (divergence or a singular system).
class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contact-free form of the simulator substep for an arbitrary tree: midpoint
// bias, then qdot += h qddot, q += h qdot.
void free_substep(const PlanarTree& tree, VecN& q, VecN& qdot, const VecN& tau, double gravity,
                  double h);

struct SimConfig {
  double control_dt = 1.0 / 120.0;
  int substeps = 4;
  double divergence_limit = 1e6;
  ContactParams contact;

  void validate() const;
};

struct ForwardKinematics {
  std::array<Pose2, kNumLinks> link_poses;  // torso, right thigh/shank/foot, left ...
  std::array<PointKinematics, kNumContacts> contacts;
};

struct StepResult {
  GeneralizedState state;
  ContactReport contacts;
};

class BipedSimulator {
 public:
  explicit BipedSimulator(BipedModel model, SimConfig config = {});

  const BipedModel& model() const { return model_; }
  const PlanarTree& tree() const { return tree_; }
  const SimConfig& config() const { return config_; }

  MatN mass_matrix(const GeneralizedState& state) const;
  VecN bias_forces(const GeneralizedState& state) const;
  ForwardKinematics forward_kinematics(const GeneralizedState& state) const;

  // One control period: `substeps` semi-implicit Euler substeps. Contact
  // forces are taken linearly implicit in the end-of-substep velocity, so the
  // applied force equals the penalty law evaluated at the end of the substep.
  // Coriolis and centrifugal terms use a predicted midpoint velocity.
  StepResult step(const GeneralizedState& state, const StepInput& input,
                  const terrain::Heightfield& hf) const;

  // Places the base so the lowest foot point rests exactly on the ground
  // below the pelvis. Velocities are zeroed.
  GeneralizedState standing_state(double base_x, const Vec6& joints,
                                  const terrain::Heightfield& hf) const;

 private:
  ContactReport substep(GeneralizedState& state, const VecN& generalized_force,
                        const terrain::Heightfield& hf, double h) const;
  void limit_joint_velocities(GeneralizedState& state, const MatN& mass, double h) const;

  BipedModel model_;
  SimConfig config_;
  PlanarTree tree_;
  std::array<ContactPoint, kNumContacts> contact_points_;
};

}  // namespace curriwalk::sim
