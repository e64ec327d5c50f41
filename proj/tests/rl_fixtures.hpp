#pragma once

// Shared builders for the reinforcement-learning tests.

#include <Eigen/Dense>
#include <random>

#include "curriwalk/actor_critic.hpp"
#include "curriwalk/ppo.hpp"

namespace fixtures {

using curriwalk::rl::ActorCritic;
using curriwalk::rl::Architecture;

// Random batch in double with old log-probs placed so each ratio sits at a
// chosen distance from the clip boundaries, never on a kink.
struct LossBatch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

// Assumes a clip range of 0.2.
inline LossBatch random_batch(const ActorCritic<double>& net, int batch, std::mt19937_64& rng) {
  const Architecture& arch = net.architecture();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  LossBatch b;
  b.obs.resize(arch.input, batch);
  for (int c = 0; c < batch; ++c)
    for (int r = 0; r < arch.input; ++r) b.obs(r, c) = normal(rng);
  ActorCritic<double>::Cache cache;
  net.forward(b.obs, cache);
  const Eigen::VectorXd log_std = net.log_std();
  b.actions.resize(arch.action, batch);
  b.old_log_probs.resize(batch);
  b.advantages.resize(batch);
  b.returns.resize(batch);
  // Ratios spread over the unclipped interior and both clipped sides.
  const double targets[] = {0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 0.7, 1.35, 0.95, 1.05};
  for (int c = 0; c < batch; ++c) {
    for (int a = 0; a < arch.action; ++a) {
      b.actions(a, c) = cache.mean(a, c) + std::exp(log_std[a]) * normal(rng);
    }
    const double lp = curriwalk::rl::gaussian_log_prob<double>(cache.mean.col(c), log_std,
                                                               b.actions.col(c));
    const double ratio = targets[c % 10] * (1.0 + 0.01 * (uniform(rng) - 0.5));
    b.old_log_probs[c] = lp - std::log(ratio);
    b.advantages[c] = (c % 3 == 0 ? -1.0 : 1.0) * (0.2 + uniform(rng));
    b.returns[c] = cache.value[c] + normal(rng);
  }
  return b;
}

}  // namespace fixtures
