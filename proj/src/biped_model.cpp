#include "curriwalk/biped_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace curriwalk::sim {

namespace {

void check_link(const LinkParams& link, const char* name) {
  const bool ok = std::isfinite(link.mass) && std::isfinite(link.inertia) &&
                  std::isfinite(link.length) && link.mass > 0.0 &&
                  link.inertia > 0.0 && link.length > 0.0 && link.com.allFinite();
  if (!ok) {
    throw std::invalid_argument(std::string("biped model: invalid link '") + name +
                                "' (mass, inertia and length must be positive)");
  }
}

}  // namespace

void BipedModel::validate() const {
  check_link(torso, "torso");
  check_link(thigh, "thigh");
  check_link(shank, "shank");
  check_link(foot, "foot");
  if (!(gravity > 0.0)) throw std::invalid_argument("biped model: gravity must be positive");
  for (int j = 0; j < kNumJoints; ++j) {
    if (!(torque_limit(j) > 0.0)) {
      throw std::invalid_argument("biped model: torque limits must be positive");
    }
    if (!(joint_lower(j) < joint_upper(j))) {
      throw std::invalid_argument("biped model: joint lower limit must be below upper");
    }
  }
  if (!(toe.x() > heel.x())) throw std::invalid_argument("biped model: toe must be ahead of heel");
}

double BipedModel::total_mass() const {
  return torso.mass + 2.0 * (thigh.mass + shank.mass + foot.mass);
}

PlanarTree build_tree(const BipedModel& model) {
  model.validate();
  PlanarTree tree;
  tree.add_body({"base_x", -1, JointType::kPrismaticX, Vec2::Zero(), 0.0, 0.0, Vec2::Zero()});
  tree.add_body({"base_z", kBaseX, JointType::kPrismaticZ, Vec2::Zero(), 0.0, 0.0, Vec2::Zero()});
  tree.add_body({"torso", kBaseZ, JointType::kRevolute, Vec2::Zero(), model.torso.mass,
                 model.torso.inertia, model.torso.com});
  for (const char* side : {"right", "left"}) {
    const std::string prefix(side);
    const int thigh = tree.add_body({prefix + "_thigh", kTorso, JointType::kRevolute,
                                     Vec2::Zero(), model.thigh.mass, model.thigh.inertia,
                                     model.thigh.com});
    const int shank = tree.add_body({prefix + "_shank", thigh, JointType::kRevolute,
                                     Vec2(0.0, -model.thigh.length), model.shank.mass,
                                     model.shank.inertia, model.shank.com});
    tree.add_body({prefix + "_foot", shank, JointType::kRevolute,
                   Vec2(0.0, -model.shank.length), model.foot.mass, model.foot.inertia,
                   model.foot.com});
  }
  return tree;
}

std::array<ContactPoint, kNumContacts> contact_points(const BipedModel& model) {
  return {{{kRightFoot, model.heel},
           {kRightFoot, model.toe},
           {kLeftFoot, model.heel},
           {kLeftFoot, model.toe}}};
}

std::vector<ContactPoint> body_probe_points(const BipedModel& model) {
  const double half_thigh = 0.5 * model.thigh.length;
  const double half_shank = 0.5 * model.shank.length;
  return {{kTorso, Vec2(0.0, model.torso.length)},
          {kTorso, Vec2::Zero()},
          {kRightThigh, Vec2(0.0, -half_thigh)},
          {kRightShank, Vec2::Zero()},
          {kRightShank, Vec2(0.0, -half_shank)},
          {kLeftThigh, Vec2(0.0, -half_thigh)},
          {kLeftShank, Vec2::Zero()},
          {kLeftShank, Vec2(0.0, -half_shank)}};
}

}  // namespace curriwalk::sim
