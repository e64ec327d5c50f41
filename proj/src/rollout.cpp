#include "curriwalk/rollout.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace curriwalk::rl {

RolloutBuffer::RolloutBuffer(int capacity, int obs_dim, int action_dim)
    : obs(obs_dim, capacity),
      actions(action_dim, capacity),
      log_probs(capacity),
      rewards(capacity),
      values(capacity),
      dones(capacity),
      terminals(capacity),
      bootstrap_values(capacity) {
  if (capacity < 1) throw std::invalid_argument("rollout buffer: capacity must be >= 1");
}

void RolloutBuffer::add(const Eigen::VectorXf& normalized_obs, const Eigen::VectorXf& action,
                        float log_prob, double reward, double value, bool done, bool terminal,
                        double bootstrap_value) {
  if (full()) throw std::logic_error("rollout buffer: add on full buffer");
  obs.col(size) = normalized_obs;
  actions.col(size) = action;
  log_probs[size] = log_prob;
  rewards[size] = reward;
  values[size] = value;
  dones[size] = done ? 1 : 0;
  terminals[size] = terminal ? 1 : 0;
  bootstrap_values[size] = bootstrap_value;
  ++size;
}

GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<unsigned char>& dones,
                      const std::vector<unsigned char>& terminals,
                      const std::vector<double>& bootstrap_values, double last_value,
                      double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n || terminals.size() != n ||
      bootstrap_values.size() != n) {
    throw std::invalid_argument("compute_gae: length mismatch");
  }
  if (!(gamma > 0.0 && gamma <= 1.0 && lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("compute_gae: gamma in (0,1], lambda in [0,1]");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    double next_value;
    double carry;
    if (dones[k]) {
      next_value = terminals[k] ? 0.0 : bootstrap_values[k];
      carry = 0.0;
    } else {
      next_value = k + 1 < n ? values[k + 1] : last_value;
      carry = gamma * lambda * next_adv;
    }
    const double delta = rewards[k] + gamma * next_value - values[k];
    next_adv = delta + carry;
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
  }
  return out;
}

GaeResult compute_gae(const RolloutBuffer& buffer, double last_value, double gamma,
                      double lambda) {
  if (!buffer.full()) throw std::logic_error("compute_gae: buffer not full");
  return compute_gae(buffer.rewards, buffer.values, buffer.dones, buffer.terminals,
                     buffer.bootstrap_values, last_value, gamma, lambda);
}

void normalize_advantages(std::vector<double>& adv) {
  if (adv.empty()) return;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 1e-12)) {
    for (double& a : adv) a -= mean;
    return;
  }
  for (double& a : adv) a = (a - mean) / sd;
}

}  // namespace curriwalk::rl
