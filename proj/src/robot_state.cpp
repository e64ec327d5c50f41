#include "curriwalk/robot_state.hpp"

#include <stdexcept>

namespace curriwalk::sim {

ContactFlags contact_flags(const ContactReport& report) {
  ContactFlags flags{};
  for (int c = 0; c < kNumContacts; ++c) flags[c] = report.points[c].in_contact;
  return flags;
}

RobotState extract_robot_state(const GeneralizedState& state, const ContactReport& contacts,
                               const ContactFlags& previous, const SwingFlags& swing,
                               const terrain::Heightfield& hf) {
  namespace L = state_layout;
  RobotState out{};
  for (int j = 0; j < kNumJoints; ++j) {
    out[L::kJoints + j] = state.q(kBaseDof + j);
    out[L::kJointVelocities + j] = state.qdot(kBaseDof + j);
  }
  for (int c = 0; c < kNumContacts; ++c) {
    out[L::kContacts + c] = contacts.points[c].in_contact ? 1.0 : 0.0;
    out[L::kPreviousContacts + c] = previous[c] ? 1.0 : 0.0;
  }
  out[L::kBaseVelocity] = state.qdot(kBaseX);
  out[L::kBaseVelocity + 1] = state.qdot(kBaseZ);
  out[L::kPitchRate] = state.qdot(kTorso);
  out[L::kPitch] = state.q(kTorso);
  out[L::kHeight] = state.base_z() - hf.height_at(state.base_x()).height;
  out[L::kSwingRight] = swing.right ? 1.0 : 0.0;
  out[L::kSwingLeft] = swing.left ? 1.0 : 0.0;
  return out;
}

GaitTracker::GaitTracker(int debounce_steps) : debounce_(debounce_steps) {
  if (debounce_steps < 1) throw std::invalid_argument("gait tracker: debounce must be >= 1");
}

namespace {

bool foot_down(const ContactFlags& flags, int foot) {
  return flags[2 * foot] || flags[2 * foot + 1];
}

}  // namespace

void GaitTracker::reset(const ContactReport& contacts, Foot swing_foot,
                        const std::array<double, 2>& foot_x) {
  current_ = contact_flags(contacts);
  previous_ = current_;
  for (int f = 0; f < 2; ++f) {
    stance_steps_[f] = foot_down(current_, f) ? debounce_ + 1 : 0;
    last_touchdown_x_[f] = foot_x[f];
    stride_[f] = 0.0;
  }
  swing_foot_ = swing_foot;
  touchdowns_ = 0;
}

std::optional<Foot> GaitTracker::update(const ContactReport& contacts,
                                        const std::array<double, 2>& foot_x) {
  previous_ = current_;
  current_ = contact_flags(contacts);
  std::optional<Foot> event;
  for (int f = 0; f < 2; ++f) {
    if (!foot_down(current_, f)) {
      stance_steps_[f] = 0;
      continue;
    }
    if (stance_steps_[f] <= debounce_) ++stance_steps_[f];
    if (stance_steps_[f] == debounce_ && static_cast<int>(swing_foot_) == f) {
      event = static_cast<Foot>(f);
    }
  }
  if (event) {
    const int f = static_cast<int>(*event);
    stride_[f] = foot_x[f] - last_touchdown_x_[f];
    last_touchdown_x_[f] = foot_x[f];
    swing_foot_ = *event == Foot::kRight ? Foot::kLeft : Foot::kRight;
    ++touchdowns_;
  }
  return event;
}

SwingFlags GaitTracker::swing() const {
  return {swing_foot_ == Foot::kRight, swing_foot_ == Foot::kLeft};
}

}  // namespace curriwalk::sim
