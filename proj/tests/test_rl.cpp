#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "curriwalk/actor_critic.hpp"
#include "curriwalk/checkpoint.hpp"
#include "curriwalk/ppo.hpp"
#include "curriwalk/rollout.hpp"
#include "curriwalk/running_stats.hpp"
#include "gradient_check.hpp"
#include "rl_fixtures.hpp"

using namespace curriwalk;
using namespace curriwalk::rl;

namespace {

const Architecture kSmall{51, 32, 32, 6};

std::vector<float> policy_block(const ActorCritic<float>& net) {
  const auto& p = net.params();
  return {p.begin(), p.begin() + static_cast<std::ptrdiff_t>(net.log_std_offset()) +
                         net.architecture().action};
}

// Fills a buffer by sampling the float network on random observations.
RolloutBuffer random_rollout(const ActorCritic<float>& net, int n, Rng& rng) {
  const Architecture& arch = net.architecture();
  RolloutBuffer buffer(n, arch.input, arch.action);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  const Eigen::VectorXf log_std = net.log_std();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXf obs(arch.input);
    for (int r = 0; r < arch.input; ++r) obs[r] = normal(rng);
    Eigen::VectorXf mean;
    float value = 0.0f;
    net.act(obs, mean, value);
    Eigen::VectorXf action;
    const float lp = sample_action<float>(mean, log_std, rng, action);
    buffer.add(obs, action, lp, normal(rng), value, i % 50 == 49, i % 100 == 99, 0.0);
  }
  return buffer;
}

}  // namespace

TEST_CASE("running statistics match a two-pass computation") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int dim = 5;
  const int n = 5000;
  std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
  const double offset[dim] = {0.0, 1e3, -40.0, 0.5, 7.0};
  const double scale[dim] = {1.0, 0.01, 30.0, 2.0, 1e-3};
  RunningStats stats(dim);
  RunningStats first(dim), second(dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) rows[i][d] = offset[d] + scale[d] * normal(rng);
    stats.update(rows[i]);
    (i < 1234 ? first : second).update(rows[i]);
  }
  for (int d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[d];
    mean /= n;
    double var = 0.0;
    for (const auto& r : rows) var += (r[d] - mean) * (r[d] - mean);
    var /= n;
    CHECK(std::abs(stats.mean()[d] - mean) <= 1e-10 * std::max(1.0, std::abs(mean)));
    CHECK(std::abs(stats.std_dev(d) - std::sqrt(var)) <= 1e-10 * std::max(1.0, std::sqrt(var)));
  }
  first.merge(second);
  CHECK(first.count() == stats.count());
  for (int d = 0; d < dim; ++d) {
    CHECK(first.mean()[d] == doctest::Approx(stats.mean()[d]).epsilon(1e-12));
    CHECK(first.variance(d) == doctest::Approx(stats.variance(d)).epsilon(1e-10));
  }
}

TEST_CASE("normalisation clamps the spread and clips the output") {
  RunningStats empty(2);
  std::vector<float> out(2);
  const std::vector<double> raw{3.0, -20.0};
  empty.normalize(raw, out, 10.0);
  CHECK(out[0] == 3.0f);
  CHECK(out[1] == -10.0f);

  RunningStats constant(2);
  for (int i = 0; i < 10; ++i) constant.update(std::vector<double>{1.0, 2.0});
  CHECK(constant.variance(0) == 0.0);
  CHECK(constant.std_dev(0) == RunningStats::kMinStd);
  constant.normalize(std::vector<double>{1.0, 2.0 + 1e-7}, out, 10.0);
  CHECK(out[0] == 0.0f);
  CHECK(out[1] == doctest::Approx(0.1f));
  constant.normalize(std::vector<double>{5.0, -5.0}, out, 10.0);
  CHECK(out[0] == 10.0f);
  CHECK(out[1] == -10.0f);

  const RunningStats copy =
      RunningStats::from_moments(constant.count(), constant.mean(), constant.m2());
  CHECK(copy.count() == constant.count());
  CHECK(copy.mean() == constant.mean());
}

TEST_CASE("forward pass basics") {
  ActorCritic<double> zero(kSmall);
  ActorCritic<double>::Cache cache;
  Eigen::MatrixXd obs = Eigen::MatrixXd::Random(51, 4);
  zero.forward(obs, cache);
  CHECK(cache.mean.isZero(0.0));
  CHECK(cache.value.isZero(0.0));
  CHECK_THROWS_AS(zero.forward(Eigen::MatrixXd::Zero(50, 1), cache), std::invalid_argument);

  Rng rng(3);
  ActorCritic<double> net(kSmall);
  net.initialize(rng, -1.0);
  net.forward(obs, cache);
  const Eigen::MatrixXd mean = cache.mean;
  const Eigen::RowVectorXd value = cache.value;
  // Reversing the batch reverses the outputs and nothing else.
  net.forward(obs.rowwise().reverse(), cache);
  CHECK((cache.mean.rowwise().reverse() - mean).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((cache.value.reverse() - value).cwiseAbs().maxCoeff() < 1e-14);

  ActorCritic<float> full;
  full.initialize(rng, -1.0);
  std::uniform_real_distribution<float> u(-10.0f, 10.0f);
  Eigen::MatrixXf big(51, 1000);
  ActorCritic<float>::Cache fcache;
  for (int rep = 0; rep < 100; ++rep) {
    for (int c = 0; c < big.cols(); ++c)
      for (int r = 0; r < 51; ++r) big(r, c) = u(rng);
    full.forward(big, fcache);
    CHECK(fcache.mean.allFinite());
    CHECK(fcache.value.allFinite());
  }
}

TEST_CASE("log-std is clamped and has no gradient past the clamp") {
  ActorCritic<double> net(kSmall);
  Rng rng(4);
  net.initialize(rng, 0.0);
  const std::size_t o = net.log_std_offset();
  net.params()[o + 0] = -7.0;
  net.params()[o + 1] = 3.0;
  const Eigen::VectorXd s = net.log_std();
  CHECK(s[0] == kLogStdMin);
  CHECK(s[1] == kLogStdMax);
  std::mt19937_64 brng(5);
  const fixtures::LossBatch b = fixtures::random_batch(net, 10, brng);
  LossCoefficients coef;
  coef.entropy_coef = 0.1;
  ParamVector<double> grad;
  ppo_loss<double>(net, b.obs, b.actions, b.old_log_probs, b.advantages, b.returns, coef, &grad);
  CHECK(grad[o + 0] == 0.0);
  CHECK(grad[o + 1] == 0.0);
  CHECK(grad[o + 2] != 0.0);
}

TEST_CASE("action sampling") {
  Rng rng(6);
  Eigen::VectorXd mean(6);
  mean << 0.3, -0.2, 0.0, 1.0, -1.0, 0.5;
  const Eigen::VectorXd narrow = Eigen::VectorXd::Constant(6, -5.0);
  Eigen::VectorXd action;
  for (int i = 0; i < 1000; ++i) {
    sample_action<double>(mean, narrow, rng, action);
    CHECK(((action - mean).cwiseAbs().array() <= 0.007 * 6.0).all());
  }
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  CHECK(gaussian_log_prob<double>(mean, narrow, mean) ==
        doctest::Approx(6.0 * (5.0 - half_log_2pi)).epsilon(1e-14));

  Eigen::VectorXd log_std(6);
  log_std << -1.0, -0.5, 0.0, 0.2, -2.0, 0.7;
  const int n = 1000000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(6);
  double lp_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    lp_sum += sample_action<double>(mean, log_std, rng, action);
    sum += action;
  }
  const Eigen::VectorXd empirical = sum / n;
  for (int a = 0; a < 6; ++a) {
    CHECK(std::abs(empirical[a] - mean[a]) <= 3.0 * std::exp(log_std[a]) / 1000.0);
  }
  // The average log-density is minus the entropy.
  CHECK(lp_sum / n == doctest::Approx(-gaussian_entropy<double>(log_std)).epsilon(2e-3));
}

TEST_CASE("composite loss gradient matches central differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const fixtures::GradientCheck r = fixtures::check_loss_gradient(seed, kSmall);
    CHECK(r.parameters == ActorCritic<double>(kSmall).size());
    CHECK(r.max_relative_error <= 1e-4);
  }
}

TEST_CASE("zero advantage and perfect value fit give a zero gradient") {
  ActorCritic<double> net(kSmall);
  Rng rng(8);
  net.initialize(rng, -1.0);
  std::mt19937_64 brng(9);
  fixtures::LossBatch b = fixtures::random_batch(net, 10, brng);
  b.advantages.setZero();
  ActorCritic<double>::Cache cache;
  net.forward(b.obs, cache);
  b.returns = cache.value.transpose();
  ParamVector<double> grad;
  const LossTerms<double> loss = ppo_loss<double>(net, b.obs, b.actions, b.old_log_probs,
                                                  b.advantages, b.returns, LossCoefficients{},
                                                  &grad);
  CHECK(loss.policy == 0.0);
  CHECK(loss.value == 0.0);
  for (const double g : grad) CHECK(g == 0.0);
}

TEST_CASE("advantage estimation against brute-force returns") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double gamma = 0.99;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 20 + trial * 3;
    std::vector<double> rewards(n), values(n), boot(n);
    std::vector<unsigned char> dones(n), terminals(n);
    for (int k = 0; k < n; ++k) {
      rewards[k] = normal(rng);
      values[k] = normal(rng);
      boot[k] = normal(rng);
      dones[k] = u(rng) < 0.1;
      terminals[k] = dones[k] && u(rng) < 0.5;
    }
    const double last_value = normal(rng);

    // lambda = 1: discounted rewards to the end of the episode or buffer,
    // plus the discounted value that closes it, minus V(s_t).
    const GaeResult mc = compute_gae(rewards, values, dones, terminals, boot, last_value, gamma, 1.0);
    for (int t = 0; t < n; ++t) {
      double g = 0.0;
      double discount = 1.0;
      int k = t;
      for (; k < n; ++k) {
        g += discount * rewards[k];
        discount *= gamma;
        if (dones[k]) break;
      }
      if (k == n) g += discount * last_value;
      else if (!terminals[k]) g += discount * boot[k];
      CHECK(std::abs(mc.advantages[t] - (g - values[t])) <= 1e-10);
      CHECK(std::abs(mc.returns[t] - g) <= 1e-10);
    }

    // lambda = 0: the one-step TD error.
    const GaeResult td = compute_gae(rewards, values, dones, terminals, boot, last_value, gamma, 0.0);
    for (int t = 0; t < n; ++t) {
      double next = t + 1 < n ? values[t + 1] : last_value;
      if (dones[t]) next = terminals[t] ? 0.0 : boot[t];
      CHECK(td.advantages[t] == rewards[t] + gamma * next - values[t]);
    }
  }
  const std::vector<double> zeros(30, 0.0);
  const std::vector<unsigned char> none(30, 0);
  const GaeResult z = compute_gae(zeros, zeros, none, none, zeros, 0.0, 0.99, 0.95);
  for (const double a : z.advantages) CHECK(a == 0.0);
}

TEST_CASE("advantage normalisation") {
  std::vector<double> adv{1.0, 2.0, 3.0, 4.0};
  normalize_advantages(adv);
  double mean = 0.0, sq = 0.0;
  for (const double a : adv) mean += a / 4.0;
  for (const double a : adv) sq += (a - mean) * (a - mean) / 4.0;
  CHECK(mean == doctest::Approx(0.0).scale(1.0));
  CHECK(sq == doctest::Approx(1.0));
  std::vector<double> flat{2.0, 2.0};
  normalize_advantages(flat);
  CHECK(flat[0] == 0.0);
}

TEST_CASE("zero learning rate leaves parameters bit-exact and ratios at one") {
  Rng rng(12);
  ActorCritic<float> net(kSmall);
  net.initialize(rng, -1.0);
  RolloutBuffer buffer = random_rollout(net, 512, rng);
  const GaeResult gae = compute_gae(buffer, 0.0, 0.99, 0.95);
  PpoConfig config;
  config.learning_rate = 0.0;
  config.epochs = 3;
  config.minibatch = 128;
  Adam<float> adam(net.size(), config.adam_beta1, config.adam_beta2, config.adam_eps);
  const ParamVector<float> before = net.params();
  const UpdateStats stats = ppo_update(net, adam, buffer, gae, config, rng);
  CHECK_FALSE(stats.aborted);
  CHECK(stats.minibatches == 12);
  CHECK(net.params() == before);
  // Stored log-probs come from single-sample float forward passes; the
  // batched pass differs only by float rounding.
  CHECK(stats.first_ratio_deviation < 1e-4);
}

TEST_CASE("clipping stops a positive-advantage sample just past 1 + eps") {
  Rng rng(13);
  ActorCritic<float> net(kSmall);
  net.initialize(rng, -1.0);
  RolloutBuffer buffer = random_rollout(net, 1, rng);
  GaeResult gae;
  gae.advantages = {1.0};
  gae.returns = {buffer.values[0]};
  PpoConfig config;
  config.epochs = 1;
  config.minibatch = 1;
  config.learning_rate = 2e-3;
  config.adam_beta1 = 0.0;  // no momentum: a zero gradient means no step
  config.normalize_advantages = false;
  Adam<float> adam(net.size(), config.adam_beta1, config.adam_beta2, config.adam_eps);

  const Eigen::VectorXf obs = buffer.obs.col(0);
  const Eigen::VectorXf action = buffer.actions.col(0);
  const auto ratio = [&]() {
    Eigen::VectorXf mean;
    float value = 0.0f;
    net.act(obs, mean, value);
    const double lp = gaussian_log_prob<float>(mean, net.log_std(), action);
    return std::exp(lp - static_cast<double>(buffer.log_probs[0]));
  };

  std::vector<double> ratios{ratio()};
  int crossed = -1;
  for (int call = 0; call < 400; ++call) {
    const std::vector<float> policy_before = policy_block(net);
    ppo_update(net, adam, buffer, gae, config, rng);
    ratios.push_back(ratio());
    if (crossed < 0 && ratios.back() > 1.0 + config.clip) crossed = call + 1;
    if (crossed >= 0 && call + 1 > crossed) {
      // Clipped branch: the policy no longer moves.
      CHECK(policy_block(net) == policy_before);
    }
  }
  REQUIRE(crossed > 0);
  const double overshoot = ratios.back() - (1.0 + config.clip);
  const double last_step = ratios[crossed] - ratios[crossed - 1];
  CHECK(overshoot > 0.0);
  CHECK(overshoot <= last_step);
  CHECK(ratios.back() == ratios[crossed]);
}

TEST_CASE("a non-finite loss restores parameters and optimizer state") {
  Rng rng(14);
  ActorCritic<float> net(kSmall);
  net.initialize(rng, -1.0);
  RolloutBuffer buffer = random_rollout(net, 256, rng);
  GaeResult gae = compute_gae(buffer, 0.0, 0.99, 0.95);
  PpoConfig config;
  config.minibatch = 64;
  Adam<float> adam(net.size(), config.adam_beta1, config.adam_beta2, config.adam_eps);
  ppo_update(net, adam, buffer, gae, config, rng);
  const ParamVector<float> params = net.params();
  const long long steps = adam.steps();
  const std::vector<float> m = adam.first_moment();
  const std::vector<float> v = adam.second_moment();

  gae.returns[200] = std::numeric_limits<double>::quiet_NaN();
  const UpdateStats stats = ppo_update(net, adam, buffer, gae, config, rng);
  CHECK(stats.aborted);
  CHECK(net.params() == params);
  CHECK(adam.steps() == steps);
  CHECK(adam.first_moment() == m);
  CHECK(adam.second_moment() == v);
}

TEST_CASE("checkpoint round trip and corruption handling") {
  Rng rng(15);
  Checkpoint ckpt;
  ckpt.kind = terrain::TerrainKind::kStairs;
  ckpt.architecture = kSmall;
  ckpt.env_steps = 123456789012ULL;
  ckpt.updates = 77;
  ckpt.curriculum.phase = curriculum::Phase::kStage3;
  ckpt.curriculum.d_index = 10;
  ckpt.curriculum.guide.multiplier = 0.0490223;
  ckpt.curriculum.p_magnitude = 335.0;
  ckpt.curriculum.p_step = 3;
  ckpt.curriculum.success_streak = 2;
  RunningStats stats(51);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(51);
    for (double& e : x) e = normal(rng);
    stats.update(x);
  }
  ckpt.obs_stats = stats;
  ActorCritic<float> net(kSmall);
  net.initialize(rng, -1.0);
  ckpt.params.assign(net.params().begin(), net.params().end());

  const auto dir = std::filesystem::temp_directory_path() / "curriwalk_test_rl";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.ckpt";
  save_checkpoint(path, ckpt);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.kind == ckpt.kind);
  CHECK(back.architecture == ckpt.architecture);
  CHECK(back.env_steps == ckpt.env_steps);
  CHECK(back.updates == ckpt.updates);
  CHECK(back.curriculum.phase == ckpt.curriculum.phase);
  CHECK(back.curriculum.guide.multiplier == ckpt.curriculum.guide.multiplier);
  CHECK(back.curriculum.p_magnitude == ckpt.curriculum.p_magnitude);
  CHECK(back.curriculum.p_step == ckpt.curriculum.p_step);
  CHECK(back.curriculum.success_streak == ckpt.curriculum.success_streak);
  CHECK(back.obs_stats.count() == stats.count());
  CHECK(back.obs_stats.mean() == stats.mean());
  CHECK(back.obs_stats.m2() == stats.m2());
  CHECK(back.params == ckpt.params);
  CHECK(network_from(back, kSmall).params() == net.params());
  CHECK_THROWS_AS(network_from(back, Architecture{}), CheckpointError);

  // Saving the loaded copy reproduces the same bytes.
  const auto again = dir / "b.ckpt";
  save_checkpoint(again, back);
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
  };
  const std::vector<char> bytes = slurp(path);
  CHECK(slurp(again) == bytes);
  CHECK(std::string(bytes.data(), 6) == "CWCKPT");

  const auto cut = dir / "cut.ckpt";
  {
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_checkpoint(cut), CheckpointError);
  const auto bad = dir / "bad.ckpt";
  {
    std::vector<char> mangled = bytes;
    mangled[0] = 'X';
    std::ofstream out(bad, std::ios::binary);
    out.write(mangled.data(), static_cast<std::streamsize>(mangled.size()));
  }
  CHECK_THROWS_AS(load_checkpoint(bad), CheckpointError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), CheckpointError);
  std::filesystem::remove_all(dir);
}
