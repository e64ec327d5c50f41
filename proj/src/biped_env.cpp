#include "curriwalk/biped_env.hpp"

#include <algorithm>
#include <stdexcept>

namespace curriwalk::env {

using sim::Foot;
using sim::Vec3;
using sim::Vec6;

void EnvConfig::validate() const {
  model.validate();
  sim.validate();
  layout.validate();
  gait.validate();
  guide_gains.validate();
  reward_weights.validate();
  termination.validate();
  if (!(start_x >= 0.0 && scan_interval >= 1 && debounce_steps >= 1 &&
        perturbation.rate_hz >= 0.0 && perturbation.moment_arm > 0.0 &&
        com_targets.forward_velocity > 0.0 && com_targets.height > 0.0 &&
        reward_targets.forward_velocity > 0.0 && reward_targets.base_height > 0.0)) {
    throw std::invalid_argument("env config: invalid values");
  }
  if (start_x >= layout.start_zone) {
    throw std::invalid_argument("env config: start_x must lie inside the start zone");
  }
}

namespace {

std::array<double, 2> foot_positions(const sim::ContactReport& c) {
  // Heel x of each foot.
  return {c.points[0].position.x(), c.points[2].position.x()};
}

}  // namespace

BipedEnv::BipedEnv(EnvConfig config)
    : config_(std::move(config)),
      sim_(config_.model, config_.sim),
      traj_(target::builtin_walk_trajectory(config_.model, config_.gait)),
      probes_(sim::body_probe_points(config_.model)),
      tracker_(config_.debounce_steps) {
  config_.validate();
}

const Observation& BipedEnv::reset(const EpisodeSettings& settings) {
  if (settings.guide_multiplier < 0.0 || settings.perturbation < 0.0 || settings.instances < 1) {
    throw std::invalid_argument("episode settings: invalid values");
  }
  settings_ = settings;
  hf_ = terrain::generate(
      {settings.kind, settings.difficulty, settings.instances, settings.seed}, config_.layout);
  perturb_rng_.seed(settings.seed ^ 0x9e3779b97f4a7c15ULL);

  cursor_ = target::TrajectoryCursor{target::SegmentId::kRight, 0, config_.linked};
  state_ = sim_.standing_state(config_.start_x, target::target_joints(traj_, cursor_), hf_);
  const sim::ForwardKinematics fk = sim_.forward_kinematics(state_);
  contacts_ = sim::contact_forces(hf_, fk.contacts, config_.sim.contact);
  // Episodes start at a right touchdown, so the left leg swings first.
  tracker_.reset(contacts_, Foot::kLeft, foot_positions(contacts_));

  steps_ = 0;
  step_limit_ = curriculum::step_limit(config_.termination, hf_, config_.start_x,
                                       config_.reward_targets.forward_velocity,
                                       config_.sim.control_dt);
  done_ = false;
  refresh_observation(true);
  return obs_;
}

void BipedEnv::set_state(const sim::GeneralizedState& state) {
  if (!state.finite()) throw std::invalid_argument("set_state: non-finite state");
  state_ = state;
  const sim::ForwardKinematics fk = sim_.forward_kinematics(state_);
  contacts_ = sim::contact_forces(hf_, fk.contacts, config_.sim.contact);
  refresh_observation(true);
}

void BipedEnv::refresh_observation(bool rescan) {
  if (rescan) scan_ = terrain::scan(hf_, state_.base_x(), state_.base_z());
  const sim::RobotState rs =
      sim::extract_robot_state(state_, contacts_, tracker_.previous(), tracker_.swing(), hf_);
  std::copy(rs.begin(), rs.end(), obs_.begin());
  std::copy(scan_.begin(), scan_.end(), obs_.begin() + sim::kRobotStateSize);
}

StepOutcome BipedEnv::step(const Vec6& action) {
  if (done_) throw std::logic_error("env: step after episode end");
  if (!action.allFinite()) throw std::invalid_argument("env: non-finite action");
  const Vec6 clipped = action.cwiseMax(-1.0).cwiseMin(1.0);
  const double support = hf_.support_height(state_.base_x());

  sim::StepInput input;
  input.joint_torques = clipped.cwiseProduct(config_.model.torque_limit);
  const guide::GuideLevel level{settings_.guide_multiplier, guide::DecayMode::kSuccessGated,
                                settings_.joint_guide};
  if (level.multiplier > 0.0) {
    guide::BaseState base;
    base.pose = Vec3(state_.base_x(), state_.base_z() - support, state_.pitch());
    base.velocity = state_.qdot.head<3>();
    input.base_wrench = guide::com_guide_force(config_.guide_gains, level, config_.com_targets, base);
    input.guide_torques =
        guide::joint_guide_torques(config_.guide_gains, level, target::target_joints(traj_, cursor_),
                                   state_.joints(), state_.joint_velocities());
  }
  if (settings_.perturbation > 0.0) {
    if (auto kick = curriculum::sample_perturbation(settings_.perturbation, perturb_rng_,
                                                    config_.sim.control_dt, config_.perturbation)) {
      input.base_wrench += *kick;
    }
  }

  StepOutcome out;
  ++steps_;
  try {
    sim::StepResult result = sim_.step(state_, input, hf_);
    state_ = std::move(result.state);
    contacts_ = result.contacts;
  } catch (const sim::SimulationFault&) {
    done_ = true;
    out.terminal = true;
    out.outcome = curriculum::EpisodeOutcome{
        false, curriculum::distance_fraction(hf_, config_.start_x, state_.base_x()),
        curriculum::Termination::kFault};
    return out;
  }

  cursor_ = target::advance(traj_, cursor_);
  if (const auto touchdown = tracker_.update(contacts_, foot_positions(contacts_))) {
    cursor_ = target::on_foot_contact(cursor_, *touchdown);
  }
  refresh_observation(steps_ % config_.scan_interval == 0);

  reward::RewardInputs ri;
  ri.forward_velocity = state_.qdot(sim::kBaseX);
  ri.base_height = state_.base_z() - hf_.support_height(state_.base_x());
  ri.pitch = state_.pitch();
  ri.joints = state_.joints();
  ri.joint_velocities = state_.joint_velocities();
  ri.target_joints = target::target_joints(traj_, cursor_);
  ri.action = clipped;
  ri.stride_left = tracker_.stride(Foot::kLeft);
  ri.stride_right = tracker_.stride(Foot::kRight);
  out.breakdown = reward::compute_reward(config_.reward_weights, config_.reward_targets, ri);
  out.reward = out.breakdown.total;

  const sim::TreeKinematics kin = sim_.tree().kinematics(state_.q, state_.qdot);
  bool body_contact = false;
  for (const sim::ContactPoint& p : probes_) {
    const sim::Vec2 w = sim_.tree().point_position(kin, p.body, p.local);
    if (w.y() < hf_.height_at(w.x()).height) {
      body_contact = true;
      break;
    }
  }
  bool foot_trip = false;
  for (const sim::PointContact& c : contacts_.points) {
    if (c.penetration > config_.termination.trip_depth && !hf_.height_at(c.position.x()).is_gap) {
      foot_trip = true;
      break;
    }
  }

  curriculum::TerminationInputs ti;
  ti.state = &state_;
  ti.step_count = steps_;
  ti.step_limit = step_limit_;
  ti.start_x = config_.start_x;
  ti.body_contact = body_contact;
  ti.foot_trip = foot_trip;
  out.outcome = curriculum::episode_termination(ti, hf_, config_.termination);
  if (out.outcome) {
    done_ = true;
    const auto reason = out.outcome->reason;
    out.terminal = reason != curriculum::Termination::kSuccess &&
                   reason != curriculum::Termination::kTimeout;
  }
  return out;
}

}  // namespace curriwalk::env
