#pragma once

// Central finite-difference check of the composite PPO loss gradient.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "curriwalk/ppo.hpp"
#include "rl_fixtures.hpp"

namespace fixtures {

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
};

// Relative error |a - n| / max(|a|, |n|) per parameter; identical values
// (including two exact zeros) count as no error.
inline GradientCheck check_loss_gradient(std::uint64_t seed, const Architecture& arch,
                                         int batch = 10, double h = 1e-5) {
  std::mt19937_64 rng(seed);
  ActorCritic<double> net(arch);
  net.initialize(rng, -0.5);
  // Push the small policy head out of its near-zero start so every layer
  // carries a gradient of ordinary size.
  std::normal_distribution<double> normal(0.0, 0.3);
  for (double& p : net.params()) p += normal(rng);
  for (int a = 0; a < arch.action; ++a) net.params()[net.log_std_offset() + a] = -0.5 + 0.1 * a;

  const LossBatch b = random_batch(net, batch, rng);
  curriwalk::rl::LossCoefficients coef;
  coef.clip = 0.2;
  coef.value_coef = 0.5;
  coef.entropy_coef = 0.01;

  curriwalk::rl::ParamVector<double> grad;
  curriwalk::rl::ppo_loss<double>(net, b.obs, b.actions, b.old_log_probs, b.advantages,
                                  b.returns, coef, &grad);
  GradientCheck out;
  out.parameters = grad.size();
  curriwalk::rl::ParamVector<double>& p = net.params();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    const double up = curriwalk::rl::ppo_loss<double>(net, b.obs, b.actions, b.old_log_probs,
                                                      b.advantages, b.returns, coef, nullptr)
                          .total;
    p[i] = keep - h;
    const double down = curriwalk::rl::ppo_loss<double>(net, b.obs, b.actions, b.old_log_probs,
                                                        b.advantages, b.returns, coef, nullptr)
                            .total;
    p[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double diff = std::abs(numeric - grad[i]);
    if (diff == 0.0) continue;
    const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
    out.max_relative_error = std::max(out.max_relative_error, diff / scale);
  }
  return out;
}

}  // namespace fixtures
