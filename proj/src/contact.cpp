#include "curriwalk/contact.hpp"

#include <algorithm>
#include <stdexcept>

namespace curriwalk::sim {

void ContactParams::validate() const {
  if (!(stiffness > 0.0 && damping > 0.0 && friction > 0.0 && tangential_damping > 0.0)) {
    throw std::invalid_argument("contact parameters must be positive");
  }
}

bool ContactReport::foot_in_contact(Foot foot) const {
  const int first = foot == Foot::kRight ? 0 : 2;
  return points[first].in_contact || points[first + 1].in_contact;
}

double ContactReport::total_normal() const {
  double sum = 0.0;
  for (const auto& p : points) sum += p.normal;
  return sum;
}

PointContact contact_force(const terrain::Heightfield& hf, const PointKinematics& point,
                           const ContactParams& params) {
  PointContact out;
  out.position = point.position;
  const terrain::HeightSample ground = hf.height_at(point.position.x());
  const double depth = ground.height - point.position.y();
  out.penetration = depth;
  if (depth <= 0.0 || ground.is_gap) return out;
  out.in_contact = true;
  out.normal = std::max(0.0, params.stiffness * depth - params.damping * point.velocity.y());
  const double limit = params.friction * out.normal;
  out.tangential = -std::clamp(params.tangential_damping * point.velocity.x(), -limit, limit);
  return out;
}

ContactReport contact_forces(const terrain::Heightfield& hf,
                             const std::array<PointKinematics, kNumContacts>& points,
                             const ContactParams& params) {
  ContactReport report;
  for (int i = 0; i < kNumContacts; ++i) report.points[i] = contact_force(hf, points[i], params);
  return report;
}

}  // namespace curriwalk::sim
