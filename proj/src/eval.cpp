#include "curriwalk/eval.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace curriwalk::eval {

void EvalConfig::validate() const {
  if (n_trials < 1) throw std::invalid_argument("eval: n_trials must be >= 1");
  if (!(difficulty >= terrain::kMinDifficulty && difficulty <= terrain::kMaxDifficulty)) {
    throw std::invalid_argument("eval: difficulty must lie in [1, 12]");
  }
  if (!(perturbation >= 0.0)) throw std::invalid_argument("eval: perturbation must be >= 0");
  if (instances < 1) throw std::invalid_argument("eval: instances must be >= 1");
}

EvalReport run_trials(const env::EnvConfig& env_config, const EvalConfig& cfg,
                      const Policy& policy) {
  cfg.validate();
  env::BipedEnv env(env_config);
  EvalReport report;
  report.fractions.reserve(cfg.n_trials);
  double total_steps = 0.0;
  for (int i = 0; i < cfg.n_trials; ++i) {
    env::EpisodeSettings settings;
    settings.kind = cfg.kind;
    settings.difficulty = cfg.difficulty;
    settings.instances = cfg.instances;
    settings.guide_multiplier = 0.0;
    settings.joint_guide = false;
    settings.perturbation = cfg.perturbation;
    settings.seed = cfg.seed + static_cast<std::uint64_t>(i);
    env.reset(settings);
    curriculum::EpisodeOutcome outcome;
    for (;;) {
      const env::StepOutcome step = env.step(policy(env.observation(), env));
      if (step.outcome) {
        outcome = *step.outcome;
        break;
      }
    }
    report.fractions.push_back(outcome.distance_fraction);
    if (outcome.success) ++report.successes;
    total_steps += env.step_count();
  }
  double sum = 0.0;
  for (double f : report.fractions) sum += f;
  const double n = static_cast<double>(cfg.n_trials);
  const double mean = sum / n;
  double var = 0.0;
  for (double f : report.fractions) var += (f - mean) * (f - mean);
  report.mean_pct = 100.0 * mean;
  report.std_pct = 100.0 * std::sqrt(var / n);
  report.mean_steps = total_steps / n;
  return report;
}

Policy deterministic_policy(const rl::ActorCritic<float>& net, const rl::RunningStats& stats,
                            double obs_clip) {
  if (stats.dim() != env::kObservationSize || net.architecture().input != env::kObservationSize ||
      net.architecture().action != sim::kNumJoints) {
    throw std::invalid_argument("deterministic_policy: dimension mismatch");
  }
  auto shared_net = std::make_shared<const rl::ActorCritic<float>>(net);
  auto shared_stats = std::make_shared<const rl::RunningStats>(stats);
  return [shared_net, shared_stats, obs_clip](const env::Observation& obs, env::BipedEnv&) {
    Eigen::VectorXf x(env::kObservationSize);
    shared_stats->normalize(obs, std::span<float>(x.data(), x.size()), obs_clip);
    Eigen::VectorXf mean;
    float value = 0.0f;
    shared_net->act(x, mean, value);
    return sim::Vec6(mean.cast<double>());
  };
}

EvalReport run_trials(const env::EnvConfig& env_config, const EvalConfig& cfg,
                      const rl::Checkpoint& checkpoint, const rl::Architecture& architecture,
                      double obs_clip) {
  const rl::ActorCritic<float> net = rl::network_from(checkpoint, architecture);
  return run_trials(env_config, cfg, deterministic_policy(net, checkpoint.obs_stats, obs_clip));
}

std::vector<SweepEntry> difficulty_sweep(const env::EnvConfig& env_config, const EvalConfig& cfg,
                                         const Policy& policy) {
  std::vector<SweepEntry> out;
  for (double d : kSweepDifficulties) {
    EvalConfig c = cfg;
    c.difficulty = d;
    out.push_back({d, run_trials(env_config, c, policy)});
  }
  return out;
}

std::string report_csv_header() { return "label,mean_pct,std_pct,successes,trials,mean_steps"; }

std::string report_csv_row(const std::string& label, const EvalReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%d,%zu,%.17g", r.mean_pct, r.std_pct, r.successes,
                r.fractions.size(), r.mean_steps);
  return label + buf;
}

}  // namespace curriwalk::eval
