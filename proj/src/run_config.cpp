#include "curriwalk/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace curriwalk::config {

namespace {

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config: bad value '" + text + "' for " + key);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config: bad boolean '" + text + "' for " + key);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T, typename Accessor>
Entry field(std::string key, Accessor acc) {
  Entry e;
  e.key = key;
  e.set = [key, acc](RunConfig& c, const std::string& v) {
    if constexpr (std::is_same_v<T, bool>) {
      acc(c) = parse_bool(key, v);
    } else {
      acc(c) = parse_number<T>(key, v);
    }
  };
  e.get = [acc](const RunConfig& c) -> std::string {
    const T value = acc(const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, bool>) {
      return value ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_double(value);
    } else {
      return std::to_string(value);
    }
  };
  return e;
}

// Per-joint values shared by both legs (index 0..2 within a leg).
Entry leg_joint(std::string key, sim::Vec6 sim::BipedModel::*member, int joint) {
  Entry e;
  e.key = key;
  e.set = [key, member, joint](RunConfig& c, const std::string& v) {
    const double value = parse_number<double>(key, v);
    (c.env.model.*member)(joint) = value;
    (c.env.model.*member)(joint + 3) = value;
  };
  e.get = [member, joint](const RunConfig& c) {
    return format_double((c.env.model.*member)(joint));
  };
  return e;
}

void add_link(std::vector<Entry>& out, const std::string& name,
              sim::LinkParams sim::BipedModel::*link) {
  const std::string p = "morphology." + name + "_";
  out.push_back(field<double>(p + "mass", [link](RunConfig& c) -> double& { return (c.env.model.*link).mass; }));
  out.push_back(field<double>(p + "inertia", [link](RunConfig& c) -> double& { return (c.env.model.*link).inertia; }));
  out.push_back(field<double>(p + "length", [link](RunConfig& c) -> double& { return (c.env.model.*link).length; }));
  out.push_back(field<double>(p + "com_x", [link](RunConfig& c) -> double& { return (c.env.model.*link).com.x(); }));
  out.push_back(field<double>(p + "com_z", [link](RunConfig& c) -> double& { return (c.env.model.*link).com.y(); }));
}

#define CW_D(key, expr) field<double>(key, [](RunConfig& c) -> double& { return c.expr; })
#define CW_I(key, expr) field<int>(key, [](RunConfig& c) -> int& { return c.expr; })
#define CW_B(key, expr) field<bool>(key, [](RunConfig& c) -> bool& { return c.expr; })
#define CW_U(key, expr) \
  field<std::uint64_t>(key, [](RunConfig& c) -> std::uint64_t& { return c.expr; })

std::vector<Entry> build_registry() {
  std::vector<Entry> r;

  r.push_back(CW_U("run.seed", train.seed));
  {
    Entry e;
    e.key = "run.terrain";
    e.set = [](RunConfig& c, const std::string& v) {
      const auto kind = terrain::parse_kind(v);
      if (!kind) throw ConfigError("config: unknown terrain '" + v + "'");
      c.train.kind = *kind;
      c.eval.kind = *kind;
    };
    e.get = [](const RunConfig& c) { return std::string(terrain::to_string(c.train.kind)); };
    r.push_back(e);
  }
  {
    Entry e;
    e.key = "run.output_root";
    e.set = [](RunConfig& c, const std::string& v) {
      if (v.empty()) throw ConfigError("config: run.output_root must not be empty");
      c.output_root = v;
    };
    e.get = [](const RunConfig& c) { return c.output_root; };
    r.push_back(e);
  }

  add_link(r, "torso", &sim::BipedModel::torso);
  add_link(r, "thigh", &sim::BipedModel::thigh);
  add_link(r, "shank", &sim::BipedModel::shank);
  add_link(r, "foot", &sim::BipedModel::foot);
  r.push_back(CW_D("morphology.heel_x", env.model.heel.x()));
  r.push_back(CW_D("morphology.heel_z", env.model.heel.y()));
  r.push_back(CW_D("morphology.toe_x", env.model.toe.x()));
  r.push_back(CW_D("morphology.toe_z", env.model.toe.y()));
  const char* joints[3] = {"hip", "knee", "ankle"};
  for (int j = 0; j < 3; ++j) {
    const std::string p = std::string("morphology.") + joints[j] + "_";
    r.push_back(leg_joint(p + "torque_limit", &sim::BipedModel::torque_limit, j));
    r.push_back(leg_joint(p + "lower", &sim::BipedModel::joint_lower, j));
    r.push_back(leg_joint(p + "upper", &sim::BipedModel::joint_upper, j));
  }
  r.push_back(CW_D("morphology.gravity", env.model.gravity));

  r.push_back(CW_D("sim.control_dt", env.sim.control_dt));
  r.push_back(CW_I("sim.substeps", env.sim.substeps));
  r.push_back(CW_D("sim.divergence_limit", env.sim.divergence_limit));
  r.push_back(CW_D("sim.contact_stiffness", env.sim.contact.stiffness));
  r.push_back(CW_D("sim.contact_damping", env.sim.contact.damping));
  r.push_back(CW_D("sim.friction", env.sim.contact.friction));
  r.push_back(CW_D("sim.tangential_damping", env.sim.contact.tangential_damping));

  r.push_back(CW_D("terrain.start_zone", env.layout.start_zone));
  r.push_back(CW_D("terrain.spacing", env.layout.spacing));
  r.push_back(CW_D("terrain.spacing_jitter", env.layout.spacing_jitter));
  r.push_back(CW_D("terrain.hurdle_width", env.layout.hurdle_width));
  r.push_back(CW_D("terrain.stair_run", env.layout.stair_run));
  r.push_back(CW_I("terrain.min_stairs", env.layout.min_stairs));
  r.push_back(CW_I("terrain.max_stairs", env.layout.max_stairs));
  r.push_back(CW_D("terrain.gap_floor_depth", env.layout.gap_floor_depth));
  r.push_back(CW_I("terrain.scan_interval", env.scan_interval));

  r.push_back(CW_D("gait.step_length", env.gait.step_length));
  r.push_back(CW_D("gait.step_height", env.gait.step_height));
  r.push_back(CW_D("gait.cycle_s", env.gait.cycle_s));
  r.push_back(CW_D("gait.hip_height", env.gait.hip_height));
  r.push_back(CW_B("gait.linked", env.linked));
  r.push_back(CW_I("gait.debounce_steps", env.debounce_steps));

  r.push_back(CW_D("env.start_x", env.start_x));

  r.push_back(CW_D("guide.com_kp_z", env.guide_gains.com_kp(1)));
  r.push_back(CW_D("guide.com_kp_pitch", env.guide_gains.com_kp(2)));
  r.push_back(CW_D("guide.com_kd_x", env.guide_gains.com_kd(0)));
  r.push_back(CW_D("guide.com_kd_z", env.guide_gains.com_kd(1)));
  r.push_back(CW_D("guide.com_kd_pitch", env.guide_gains.com_kd(2)));
  r.push_back(CW_D("guide.joint_kp", env.guide_gains.joint_kp));
  r.push_back(CW_D("guide.joint_kd", env.guide_gains.joint_kd));
  r.push_back(CW_D("guide.target_velocity", env.com_targets.forward_velocity));
  r.push_back(CW_D("guide.target_height", env.com_targets.height));
  r.push_back(CW_D("guide.target_pitch", env.com_targets.pitch));

  r.push_back(CW_B("curriculum.terrain_stage", train.curriculum.terrain_stage));
  r.push_back(CW_B("curriculum.guide_stage", train.curriculum.guide_stage));
  r.push_back(CW_B("curriculum.perturb_stage", train.curriculum.perturb_stage));
  {
    Entry e;
    e.key = "curriculum.decay_mode";
    e.set = [](RunConfig& c, const std::string& v) {
      if (v == "success") c.train.curriculum.decay_mode = guide::DecayMode::kSuccessGated;
      else if (v == "continuous") c.train.curriculum.decay_mode = guide::DecayMode::kContinuous;
      else throw ConfigError("config: decay_mode must be 'success' or 'continuous'");
    };
    e.get = [](const RunConfig& c) {
      return std::string(c.train.curriculum.decay_mode == guide::DecayMode::kContinuous
                             ? "continuous"
                             : "success");
    };
    r.push_back(e);
  }
  r.push_back(CW_B("curriculum.joint_guide", train.curriculum.joint_guide));
  r.push_back(CW_I("curriculum.max_difficulty", train.curriculum.max_difficulty));
  r.push_back(CW_I("curriculum.success_streak", train.curriculum.success_streak));
  r.push_back(CW_D("curriculum.guide_threshold", train.curriculum.guide_threshold));
  r.push_back(CW_D("curriculum.perturb_initial", train.curriculum.perturb_initial));
  r.push_back(CW_D("curriculum.perturb_final", train.curriculum.perturb_final));
  r.push_back(CW_I("curriculum.perturb_increments", train.curriculum.perturb_increments));
  r.push_back(CW_D("curriculum.perturb_rate_hz", env.perturbation.rate_hz));
  r.push_back(CW_D("curriculum.perturb_moment_arm", env.perturbation.moment_arm));

  r.push_back(CW_D("termination.min_base_height", env.termination.min_base_height));
  r.push_back(CW_D("termination.max_pitch", env.termination.max_pitch));
  r.push_back(CW_D("termination.gap_fall_z", env.termination.gap_fall_z));
  r.push_back(CW_D("termination.trip_depth", env.termination.trip_depth));
  r.push_back(CW_I("termination.max_steps", env.termination.max_steps));
  r.push_back(CW_D("termination.time_factor", env.termination.time_factor));

  r.push_back(CW_D("reward.w_goal", env.reward_weights.w_goal));
  r.push_back(CW_D("reward.w_pos", env.reward_weights.w_pos));
  r.push_back(CW_D("reward.w_vel", env.reward_weights.w_vel));
  r.push_back(CW_D("reward.w_base", env.reward_weights.w_base));
  r.push_back(CW_D("reward.w_step", env.reward_weights.w_step));
  r.push_back(CW_D("reward.w_act", env.reward_weights.w_act));
  r.push_back(CW_D("reward.c_goal", env.reward_weights.c_goal));
  r.push_back(CW_D("reward.c_pos", env.reward_weights.c_pos));
  r.push_back(CW_D("reward.c_vel", env.reward_weights.c_vel));
  r.push_back(CW_D("reward.c_base", env.reward_weights.c_base));
  r.push_back(CW_D("reward.c_step", env.reward_weights.c_step));
  r.push_back(CW_D("reward.target_velocity", env.reward_targets.forward_velocity));
  r.push_back(CW_D("reward.target_height", env.reward_targets.base_height));

  r.push_back(CW_D("ppo.gamma", train.ppo.gamma));
  r.push_back(CW_D("ppo.lambda", train.ppo.lambda));
  r.push_back(CW_D("ppo.clip", train.ppo.clip));
  r.push_back(CW_I("ppo.epochs", train.ppo.epochs));
  r.push_back(CW_I("ppo.minibatch", train.ppo.minibatch));
  r.push_back(CW_D("ppo.learning_rate", train.ppo.learning_rate));
  r.push_back(CW_D("ppo.value_coef", train.ppo.value_coef));
  r.push_back(CW_D("ppo.entropy_coef", train.ppo.entropy_coef));
  r.push_back(CW_D("ppo.max_grad_norm", train.ppo.max_grad_norm));
  r.push_back(CW_D("ppo.adam_beta1", train.ppo.adam_beta1));
  r.push_back(CW_D("ppo.adam_beta2", train.ppo.adam_beta2));
  r.push_back(CW_D("ppo.adam_eps", train.ppo.adam_eps));
  r.push_back(CW_I("ppo.horizon", train.ppo.horizon));
  r.push_back(CW_D("ppo.initial_log_std", train.ppo.initial_log_std));
  r.push_back(CW_B("ppo.normalize_advantages", train.ppo.normalize_advantages));
  r.push_back(CW_I("ppo.hidden1", train.hidden1));
  r.push_back(CW_I("ppo.hidden2", train.hidden2));
  r.push_back(CW_D("ppo.obs_clip", train.obs_clip));

  r.push_back(CW_U("train.total_steps", train.total_steps));
  r.push_back(CW_I("train.eval_interval", train.eval_interval));
  r.push_back(CW_I("train.eval_trials", train.eval_trials));
  r.push_back(CW_I("train.checkpoint_interval", train.checkpoint_interval));

  r.push_back(CW_D("eval.difficulty", eval.difficulty));
  r.push_back(CW_I("eval.n_trials", eval.n_trials));
  r.push_back(CW_D("eval.perturbation", eval.perturbation));
  r.push_back(CW_U("eval.seed", eval.seed));
  r.push_back(CW_I("eval.instances", eval.instances));
  return r;
}

#undef CW_D
#undef CW_I
#undef CW_B
#undef CW_U

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = build_registry();
  return r;
}

const Entry& find(const std::string& key) {
  for (const Entry& e : registry()) {
    if (e.key == key) return e;
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::validate() const {
  try {
    env.validate();
    train.validate();
    eval.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (train.kind != eval.kind) throw ConfigError("config: train and eval terrain differ");
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  find(key).set(config, value);
}

std::string get_value(const RunConfig& config, const std::string& key) {
  return find(key).get(config);
}

std::vector<std::string> keys() {
  std::vector<std::string> out;
  for (const Entry& e : registry()) out.push_back(e.key);
  return out;
}

void apply_text(RunConfig& config, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void apply_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_text(config, buf.str(), path.string());
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const Entry& e : registry()) out += e.key + " = " + e.get(config) + "\n";
  return out;
}

}  // namespace curriwalk::config
