#pragma once

// Proprioceptive robot state fed to the policy and the gait bookkeeping that
// produces its contact-history and swing-phase entries.
//
// Layout (kRobotStateSize = 27 entries, fixed order):
//   [ 0.. 5]  joint angles, rad (right hip/knee/ankle, left hip/knee/ankle)
//   [ 6..11]  joint velocities, rad/s
//   [12..15]  current contact flags (right heel, right toe, left heel, left toe)
//   [16..19]  previous-step contact flags, same order
//   [20..21]  base linear velocity (x, z), m/s, world frame
//   [22]      base pitch rate, rad/s
//   [23]      base pitch, rad, world frame
//   [24]      base height above the ground directly below it, m (gap floor
//             over gaps)
//   [25..26]  swing-phase indicators (right, left)

#include <array>
#include <optional>

#include "curriwalk/biped_model.hpp"
#include "curriwalk/contact.hpp"
#include "curriwalk/terrain.hpp"

namespace curriwalk::sim {

inline constexpr int kRobotStateSize = 27;

namespace state_layout {
inline constexpr int kJoints = 0;
inline constexpr int kJointVelocities = 6;
inline constexpr int kContacts = 12;
inline constexpr int kPreviousContacts = 16;
inline constexpr int kBaseVelocity = 20;
inline constexpr int kPitchRate = 22;
inline constexpr int kPitch = 23;
inline constexpr int kHeight = 24;
inline constexpr int kSwingRight = 25;
inline constexpr int kSwingLeft = 26;
}  // namespace state_layout

using RobotState = std::array<double, kRobotStateSize>;
using ContactFlags = std::array<bool, kNumContacts>;

ContactFlags contact_flags(const ContactReport& report);

struct SwingFlags {
  bool right = false;
  bool left = false;
};

RobotState extract_robot_state(const GeneralizedState& state, const ContactReport& contacts,
                               const ContactFlags& previous, const SwingFlags& swing,
                               const terrain::Heightfield& hf);

// Debounced touchdown detection, swing-foot bookkeeping, contact history and
// per-foot stride lengths.
class GaitTracker {
 public:
  explicit GaitTracker(int debounce_steps = 3);

  // Starts an episode. Feet already on the ground count as settled stance.
  void reset(const ContactReport& contacts, Foot swing_foot,
             const std::array<double, 2>& foot_x);

  // Advances one control step. Returns the swing foot if it completed a
  // debounced touchdown on this step; the swing role then passes to the
  // other foot.
  std::optional<Foot> update(const ContactReport& contacts,
                             const std::array<double, 2>& foot_x);

  const ContactFlags& current() const { return current_; }
  const ContactFlags& previous() const { return previous_; }
  SwingFlags swing() const;
  Foot swing_foot() const { return swing_foot_; }
  // Distance each foot moved since its previous touchdown (or the episode
  // start); 0 until the first touchdown.
  double stride(Foot foot) const { return stride_[static_cast<int>(foot)]; }
  int touchdowns() const { return touchdowns_; }

 private:
  int debounce_;
  ContactFlags current_{};
  ContactFlags previous_{};
  std::array<int, 2> stance_steps_{};
  std::array<double, 2> last_touchdown_x_{};
  std::array<double, 2> stride_{};
  Foot swing_foot_ = Foot::kLeft;
  int touchdowns_ = 0;
};

}  // namespace curriwalk::sim
