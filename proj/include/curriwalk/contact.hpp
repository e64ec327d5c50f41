#pragma once

// Penalty contact between foot points and the heightfield. Normals are
// vertical; friction acts along x.

#include <array>

#include "curriwalk/biped_model.hpp"
#include "curriwalk/terrain.hpp"

namespace curriwalk::sim {

struct ContactParams {
  double stiffness = 1e5;             // k_p, N/m
  double damping = 3e3;               // k_d, N s/m
  double friction = 0.9;              // mu
  double tangential_damping = 3e3;    // k_t, N s/m

  void validate() const;
};

struct PointKinematics {
  Vec2 position = Vec2::Zero();  // world (x, z)
  Vec2 velocity = Vec2::Zero();
};

struct PointContact {
  bool in_contact = false;
  double normal = 0.0;      // N, >= 0
  double tangential = 0.0;  // N, |tangential| <= friction * normal
  Vec2 position = Vec2::Zero();
  double penetration = 0.0;  // m, > 0 when below the surface
};

struct ContactReport {
  std::array<PointContact, kNumContacts> points{};

  bool foot_in_contact(Foot foot) const;
  double total_normal() const;
};

// Spring-damper normal force with a clamped viscous friction law. Points above
// the ground, or over a gap, carry no force.
PointContact contact_force(const terrain::Heightfield& hf, const PointKinematics& point,
                           const ContactParams& params);

ContactReport contact_forces(const terrain::Heightfield& hf,
                             const std::array<PointKinematics, kNumContacts>& points,
                             const ContactParams& params);

}  // namespace curriwalk::sim
