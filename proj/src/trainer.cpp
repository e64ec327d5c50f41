#include "curriwalk/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace curriwalk::train {

namespace {

// Independent streams derived from the run seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void TrainConfig::validate() const {
  ppo.validate();
  curriculum.validate();
  if (total_steps < 1 || hidden1 < 1 || hidden2 < 1 || !(obs_clip > 0.0) || eval_interval < 0 ||
      eval_trials < 1 || checkpoint_interval < 0) {
    throw std::invalid_argument("train config: invalid values");
  }
}

TrainResult train(const env::EnvConfig& env_config, const TrainConfig& config,
                  const ProgressFn& progress) {
  config.validate();
  const rl::Architecture arch = config.architecture();
  env::BipedEnv env(env_config);

  rl::Rng init_rng(stream_seed(config.seed, 1));
  rl::Rng episode_rng(stream_seed(config.seed, 2));
  rl::Rng action_rng(stream_seed(config.seed, 3));
  rl::Rng shuffle_rng(stream_seed(config.seed, 4));
  const std::uint64_t eval_seed = stream_seed(config.seed, 5);

  rl::ActorCritic<float> net(arch);
  net.initialize(init_rng, config.ppo.initial_log_std);
  rl::Adam<float> adam(net.size(), config.ppo.adam_beta1, config.ppo.adam_beta2,
                       config.ppo.adam_eps);
  rl::RunningStats stats(arch.input);
  rl::RolloutBuffer buffer(config.ppo.horizon, arch.input, arch.action);
  curriculum::CurriculumState cs = curriculum::initial_state(config.curriculum, config.kind);

  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);
  std::string metrics_text = metrics_csv_header() + "\n";
  std::string transitions_text = transitions_csv_header() + "\n";

  TrainResult result;
  std::uint64_t steps = 0;
  double episode_return = 0.0;

  auto start_episode = [&]() {
    const curriculum::Settings s = curriculum::current_settings(cs);
    env::EpisodeSettings es;
    es.kind = config.kind;
    es.difficulty = s.difficulty;
    es.instances = terrain::kTrainInstances;
    es.guide_multiplier = s.guide_multiplier;
    es.joint_guide = s.joint_guide;
    es.perturbation = s.perturbation;
    es.seed = episode_rng();
    env.reset(es);
    episode_return = 0.0;
  };

  Eigen::VectorXf x(arch.input);
  auto normalized = [&](const env::Observation& obs) {
    stats.normalize(obs, std::span<float>(x.data(), x.size()), config.obs_clip);
    return x;
  };

  auto make_checkpoint = [&](int updates) {
    rl::Checkpoint c;
    c.kind = config.kind;
    c.architecture = arch;
    c.env_steps = steps;
    c.updates = static_cast<std::uint32_t>(updates);
    c.curriculum = cs;
    c.obs_stats = stats;
    c.params.assign(net.params().begin(), net.params().end());
    return c;
  };

  start_episode();
  int update = 0;
  while (steps < config.total_steps) {
    buffer.clear();
    rl::RunningStats shard(arch.input);
    double reward_sum = 0.0;
    double return_sum = 0.0;
    int episodes = 0;
    int successes = 0;

    while (!buffer.full()) {
      const env::Observation raw = env.observation();
      shard.update(raw);
      const Eigen::VectorXf obs = normalized(raw);
      Eigen::VectorXf mean;
      float value = 0.0f;
      net.act(obs, mean, value);
      Eigen::VectorXf action;
      const Eigen::VectorXf log_std = net.log_std();
      const float log_prob = rl::sample_action<float>(mean, log_std, action_rng, action);

      const env::StepOutcome step = env.step(action.cast<double>());
      ++steps;
      reward_sum += step.reward;
      episode_return += step.reward;

      double bootstrap = 0.0;
      if (step.outcome && !step.terminal) {
        Eigen::VectorXf m;
        float v = 0.0f;
        net.act(normalized(env.observation()), m, v);
        bootstrap = v;
      }
      buffer.add(obs, action, log_prob, step.reward, value, step.outcome.has_value(),
                 step.terminal, bootstrap);

      if (step.outcome) {
        ++episodes;
        ++result.episodes;
        return_sum += episode_return;
        if (step.outcome->success) ++successes;
        if (step.outcome->reason == curriculum::Termination::kFault) ++result.faults;
        if (cs.phase != curriculum::Phase::kDone) {
          const curriculum::CurriculumState before = cs;
          cs = curriculum::record_episode(cs, *step.outcome, config.curriculum);
          if (cs.phase != before.phase || cs.d_index != before.d_index ||
              cs.guide.multiplier != before.guide.multiplier || cs.p_step != before.p_step) {
            TransitionRow t;
            t.step = steps;
            t.episode = result.episodes;
            t.from = before.phase;
            t.to = cs.phase;
            t.difficulty = cs.d_index;
            t.guide = curriculum::current_settings(cs).guide_multiplier;
            t.perturbation = cs.p_magnitude;
            result.transitions.push_back(t);
            transitions_text += transitions_csv_row(t) + "\n";
          }
        }
        start_episode();
      }
    }

    float last_value = 0.0f;
    {
      Eigen::VectorXf m;
      net.act(normalized(env.observation()), m, last_value);
    }
    const rl::GaeResult gae =
        rl::compute_gae(buffer, last_value, config.ppo.gamma, config.ppo.lambda);
    const rl::UpdateStats us = rl::ppo_update(net, adam, buffer, gae, config.ppo, shuffle_rng);
    if (us.aborted) {
      ++result.aborted_updates;
      std::fprintf(stderr, "update %d: non-finite loss, update skipped\n", update + 1);
    }
    stats.merge(shard);
    ++update;

    MetricsRow row;
    row.step = steps;
    row.update = update;
    const curriculum::Settings s = curriculum::current_settings(cs);
    row.phase = cs.phase;
    row.difficulty = cs.d_index;
    row.guide = s.guide_multiplier;
    row.perturbation = s.perturbation;
    row.mean_reward = reward_sum / buffer.size;
    row.mean_episode_return =
        episodes > 0 ? return_sum / episodes : std::numeric_limits<double>::quiet_NaN();
    row.episodes = episodes;
    row.successes = successes;
    row.policy_loss = us.policy_loss;
    row.value_loss = us.value_loss;
    row.entropy = us.entropy;
    row.approx_kl = us.approx_kl;
    row.clip_fraction = us.clip_fraction;
    row.aborted = us.aborted;
    const bool last = steps >= config.total_steps;
    if (config.eval_interval > 0 && (update % config.eval_interval == 0 || last)) {
      eval::EvalConfig ec;
      ec.kind = config.kind;
      ec.difficulty = config.curriculum.max_difficulty;
      ec.n_trials = config.eval_trials;
      ec.perturbation = 0.0;
      ec.seed = eval_seed;
      row.eval_distance_pct =
          eval::run_trials(env_config, ec, eval::deterministic_policy(net, stats, config.obs_clip))
              .mean_pct;
    }
    result.metrics.push_back(row);
    metrics_text += metrics_csv_row(row) + "\n";
    if (progress) progress(row);

    if (!config.output_dir.empty()) {
      write_text(config.output_dir / "metrics.csv", metrics_text);
      write_text(config.output_dir / "curriculum.csv", transitions_text);
      if (config.checkpoint_interval > 0 && update % config.checkpoint_interval == 0) {
        char name[64];
        std::snprintf(name, sizeof(name), "update_%06d.ckpt", update);
        rl::save_checkpoint(config.output_dir / name, make_checkpoint(update));
      }
    }
  }

  result.checkpoint = make_checkpoint(update);
  if (!config.output_dir.empty()) {
    rl::save_checkpoint(config.output_dir / "final.ckpt", result.checkpoint);
  }
  return result;
}

std::string metrics_csv_header() {
  return "step,update,phase,difficulty,guide,perturbation,mean_reward,mean_episode_return,"
         "episodes,successes,eval_distance_pct,policy_loss,value_loss,entropy,approx_kl,"
         "clip_fraction,aborted";
}

std::string metrics_csv_row(const MetricsRow& r) {
  std::string s;
  s += std::to_string(r.step) + "," + std::to_string(r.update) + "," +
       std::to_string(static_cast<int>(r.phase)) + "," + std::to_string(r.difficulty) + ",";
  s += fmt(r.guide) + "," + fmt(r.perturbation) + "," + fmt(r.mean_reward) + "," +
       fmt(r.mean_episode_return) + ",";
  s += std::to_string(r.episodes) + "," + std::to_string(r.successes) + ",";
  s += (r.eval_distance_pct < 0.0 ? std::string() : fmt(r.eval_distance_pct)) + ",";
  s += fmt(r.policy_loss) + "," + fmt(r.value_loss) + "," + fmt(r.entropy) + "," +
       fmt(r.approx_kl) + "," + fmt(r.clip_fraction) + "," + (r.aborted ? "1" : "0");
  return s;
}

std::string transitions_csv_header() {
  return "step,episode,from_phase,to_phase,difficulty,guide,perturbation";
}

std::string transitions_csv_row(const TransitionRow& t) {
  return std::to_string(t.step) + "," + std::to_string(t.episode) + "," +
         std::to_string(static_cast<int>(t.from)) + "," + std::to_string(static_cast<int>(t.to)) +
         "," + std::to_string(t.difficulty) + "," + fmt(t.guide) + "," + fmt(t.perturbation);
}

std::vector<AblationVariant> ablation_variants() {
  using E = env::EnvConfig;
  using T = TrainConfig;
  return {
      {"stage1_stage2", [](E&, T&) {}},
      {"no_stage1_stage2", [](E&, T& t) { t.curriculum.terrain_stage = false; }},
      {"stage1_no_stage2", [](E&, T& t) { t.curriculum.guide_stage = false; }},
      {"no_stage1_no_stage2",
       [](E&, T& t) {
         t.curriculum.terrain_stage = false;
         t.curriculum.guide_stage = false;
       }},
      {"continuous_decay",
       [](E&, T& t) { t.curriculum.decay_mode = guide::DecayMode::kContinuous; }},
      {"com_only", [](E&, T& t) { t.curriculum.joint_guide = false; }},
      {"no_link", [](E& e, T&) { e.linked = false; }},
  };
}

std::vector<AblationRow> ablation_suite(const env::EnvConfig& env_config,
                                        const TrainConfig& base,
                                        const std::vector<AblationVariant>& variants,
                                        const std::vector<std::uint64_t>& seeds,
                                        const eval::EvalConfig& eval_cfg) {
  std::vector<AblationRow> rows;
  for (const AblationVariant& v : variants) {
    for (std::uint64_t seed : seeds) {
      env::EnvConfig e = env_config;
      TrainConfig t = base;
      t.seed = seed;
      if (!base.output_dir.empty()) {
        t.output_dir = base.output_dir / (v.name + "_seed" + std::to_string(seed));
      }
      v.apply(e, t);
      const TrainResult r = train(e, t);
      eval::EvalConfig ec = eval_cfg;
      ec.kind = t.kind;
      rows.push_back({v.name, seed, eval::run_trials(e, ec, r.checkpoint, t.architecture(),
                                                     t.obs_clip)});
    }
  }
  return rows;
}

}  // namespace curriwalk::train
