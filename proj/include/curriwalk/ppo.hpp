#pragma once

// Clipped-surrogate PPO on top of ActorCritic: composite loss with exact
// gradients, Adam, and the minibatch update loop.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "curriwalk/actor_critic.hpp"
#include "curriwalk/rollout.hpp"

namespace curriwalk::rl {

using Rng = std::mt19937_64;

struct PpoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  int epochs = 10;
  int minibatch = 256;
  double learning_rate = 3e-4;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int horizon = 4096;
  double initial_log_std = -1.0;
  bool normalize_advantages = true;

  void validate() const {
    const bool ok = gamma > 0.0 && gamma <= 1.0 && lambda > 0.0 && lambda <= 1.0 && clip > 0.0 &&
                    epochs >= 1 && minibatch >= 1 && learning_rate >= 0.0 && value_coef >= 0.0 &&
                    entropy_coef >= 0.0 && max_grad_norm > 0.0 && adam_beta1 >= 0.0 &&
                    adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 && adam_eps > 0.0 &&
                    horizon >= 1 && initial_log_std >= kLogStdMin && initial_log_std <= kLogStdMax;
    if (!ok) throw std::invalid_argument("ppo config: invalid values");
  }
};

struct LossCoefficients {
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
};

template <typename T>
struct LossTerms {
  T policy = T(0);
  T value = T(0);
  T entropy = T(0);
  T total = T(0);
  T clip_fraction = T(0);
  T approx_kl = T(0);
  T max_ratio_deviation = T(0);
};

// Entropy of a diagonal Gaussian with the given log-std.
template <typename T>
T gaussian_entropy(const Eigen::Matrix<T, Eigen::Dynamic, 1>& log_std) {
  const T c = T(0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e));
  return log_std.sum() + c * T(log_std.size());
}

// Composite loss
//   L = -mean(min(r A, clip(r, 1-eps, 1+eps) A)) + c_v mean((V - R)^2) - c_e H
// over the columns of obs. If grad is non-null, the exact gradient is
// accumulated into it (it is resized and zeroed first).
template <typename T>
LossTerms<T> ppo_loss(const ActorCritic<T>& net,
                      const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& obs,
                      const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& actions,
                      const Eigen::Matrix<T, Eigen::Dynamic, 1>& old_log_probs,
                      const Eigen::Matrix<T, Eigen::Dynamic, 1>& advantages,
                      const Eigen::Matrix<T, Eigen::Dynamic, 1>& returns,
                      const LossCoefficients& coef, ParamVector<T>* grad) {
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;
  const Eigen::Index batch = obs.cols();
  const Eigen::Index na = net.architecture().action;
  if (batch < 1 || actions.cols() != batch || actions.rows() != na ||
      old_log_probs.size() != batch || advantages.size() != batch || returns.size() != batch) {
    throw std::invalid_argument("ppo_loss: batch shape mismatch");
  }

  typename ActorCritic<T>::Cache cache;
  net.forward(obs, cache);
  const Vector log_std = net.log_std();
  const Vector inv_var = (T(-2) * log_std).array().exp();
  const T inv_b = T(1) / T(batch);
  const T lo = T(1 - coef.clip);
  const T hi = T(1 + coef.clip);

  LossTerms<T> out;
  Matrix d_mean(na, batch);
  Vector d_log_std = Vector::Zero(na);
  RowVector d_value(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const T lp = gaussian_log_prob<T>(cache.mean.col(i), log_std, actions.col(i));
    const T ratio = std::exp(lp - old_log_probs[i]);
    const T adv = advantages[i];
    const T unclipped = ratio * adv;
    const T clipped = std::clamp(ratio, lo, hi) * adv;
    // d(-min)/d(log p); zero when the clipped branch is selected and active.
    T d_lp = T(0);
    if (unclipped <= clipped) {
      out.policy -= unclipped * inv_b;
      d_lp = -unclipped * inv_b;
    } else {
      out.policy -= clipped * inv_b;
    }
    if (std::abs(ratio - T(1)) > T(coef.clip)) out.clip_fraction += inv_b;
    out.approx_kl += (old_log_probs[i] - lp) * inv_b;
    out.max_ratio_deviation = std::max(out.max_ratio_deviation, std::abs(ratio - T(1)));

    for (Eigen::Index a = 0; a < na; ++a) {
      const T diff = actions(a, i) - cache.mean(a, i);
      d_mean(a, i) = d_lp * diff * inv_var[a];
      d_log_std[a] += d_lp * (diff * diff * inv_var[a] - T(1));
    }
    const T err = cache.value[i] - returns[i];
    out.value += err * err * inv_b;
    d_value[i] = T(2 * coef.value_coef) * err * inv_b;
  }
  out.entropy = gaussian_entropy<T>(log_std);
  d_log_std.array() -= T(coef.entropy_coef);
  out.total = out.policy + T(coef.value_coef) * out.value - T(coef.entropy_coef) * out.entropy;

  if (grad != nullptr) {
    grad->assign(net.size(), T(0));
    net.backward(cache, d_mean, d_log_std, d_value, *grad);
  }
  return out;
}

template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double beta1, double beta2, double eps)
      : beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, T(0)), v_(n, T(0)) {}

  void step(ParamVector<T>& params, const ParamVector<T>& grad, double lr) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
      throw std::invalid_argument("adam: size mismatch");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const T b1 = T(beta1_);
    const T b2 = T(beta2_);
    const T step_size = T(lr / bc1);
    const T root_bc2 = T(std::sqrt(bc2));
    const T eps = T(eps_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = b1 * m_[i] + (T(1) - b1) * grad[i];
      v_[i] = b2 * v_[i] + (T(1) - b2) * grad[i] * grad[i];
      params[i] -= step_size * m_[i] / (std::sqrt(v_[i]) / root_bc2 + eps);
    }
  }

  long long steps() const { return t_; }
  const std::vector<T>& first_moment() const { return m_; }
  const std::vector<T>& second_moment() const { return v_; }
  void restore(long long t, std::vector<T> m, std::vector<T> v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long long t_ = 0;
  std::vector<T> m_;
  std::vector<T> v_;
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  // |ratio - 1| on the first minibatch, before any parameter step.
  double first_ratio_deviation = 0.0;
  int minibatches = 0;
  bool aborted = false;
};

// Draws a = mean + exp(log_std) * z and returns log pi(a).
template <typename T>
T sample_action(const Eigen::Matrix<T, Eigen::Dynamic, 1>& mean,
                const Eigen::Matrix<T, Eigen::Dynamic, 1>& log_std, Rng& rng,
                Eigen::Matrix<T, Eigen::Dynamic, 1>& action) {
  std::normal_distribution<double> normal(0.0, 1.0);
  action.resize(mean.size());
  for (Eigen::Index a = 0; a < mean.size(); ++a) {
    action[a] = mean[a] + std::exp(log_std[a]) * T(normal(rng));
  }
  return gaussian_log_prob<T>(mean, log_std, action);
}

template <typename T>
double global_norm(const ParamVector<T>& g) {
  double s = 0.0;
  for (T x : g) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

// Epochs of shuffled minibatch steps on the stored rollout. On a non-finite
// loss or gradient the parameters and optimizer state are restored and the
// update is reported as aborted.
template <typename T>
UpdateStats ppo_update(ActorCritic<T>& net, Adam<T>& adam, const RolloutBuffer& buffer,
                       const GaeResult& gae, const PpoConfig& config, Rng& rng) {
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  config.validate();
  const int n = buffer.size;
  if (n < 1 || static_cast<int>(gae.advantages.size()) != n) {
    throw std::invalid_argument("ppo_update: buffer/advantage size mismatch");
  }

  std::vector<double> adv = gae.advantages;
  if (config.normalize_advantages) normalize_advantages(adv);

  const ParamVector<T> saved_params = net.params();
  const long long saved_t = adam.steps();
  const std::vector<T> saved_m = adam.first_moment();
  const std::vector<T> saved_v = adam.second_moment();

  const LossCoefficients coef{config.clip, config.value_coef, config.entropy_coef};
  const int mb = std::min(config.minibatch, n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  ParamVector<T> grad;
  UpdateStats stats;
  const int obs_dim = static_cast<int>(buffer.obs.rows());
  const int act_dim = static_cast<int>(buffer.actions.rows());
  Matrix obs, actions;
  Vector old_lp, a_mb, r_mb;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += mb) {
      const int count = std::min(mb, n - start);
      obs.resize(obs_dim, count);
      actions.resize(act_dim, count);
      old_lp.resize(count);
      a_mb.resize(count);
      r_mb.resize(count);
      for (int j = 0; j < count; ++j) {
        const int k = order[start + j];
        obs.col(j) = buffer.obs.col(k).template cast<T>();
        actions.col(j) = buffer.actions.col(k).template cast<T>();
        old_lp[j] = T(buffer.log_probs[k]);
        a_mb[j] = T(adv[k]);
        r_mb[j] = T(gae.returns[k]);
      }
      const LossTerms<T> loss = ppo_loss<T>(net, obs, actions, old_lp, a_mb, r_mb, coef, &grad);
      const double norm = global_norm(grad);
      if (!std::isfinite(static_cast<double>(loss.total)) || !std::isfinite(norm)) {
        net.params() = saved_params;
        adam.restore(saved_t, saved_m, saved_v);
        stats.aborted = true;
        return stats;
      }
      if (stats.minibatches == 0) stats.first_ratio_deviation = loss.max_ratio_deviation;
      if (norm > config.max_grad_norm) {
        const T scale = T(config.max_grad_norm / norm);
        for (T& g : grad) g *= scale;
      }
      adam.step(net.params(), grad, config.learning_rate);

      ++stats.minibatches;
      stats.policy_loss += loss.policy;
      stats.value_loss += loss.value;
      stats.entropy += loss.entropy;
      stats.approx_kl += loss.approx_kl;
      stats.clip_fraction += loss.clip_fraction;
      stats.grad_norm += norm;
    }
  }
  const double m = static_cast<double>(stats.minibatches);
  stats.policy_loss /= m;
  stats.value_loss /= m;
  stats.entropy /= m;
  stats.approx_kl /= m;
  stats.clip_fraction /= m;
  stats.grad_norm /= m;
  return stats;
}

}  // namespace curriwalk::rl
