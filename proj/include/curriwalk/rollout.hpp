#pragma once

#include <Eigen/Dense>
#include <vector>

namespace curriwalk::rl {

// Fixed-capacity on-policy storage. Observations are stored already
// normalized, so the update sees exactly what the policy saw.
struct RolloutBuffer {
  RolloutBuffer() = default;
  RolloutBuffer(int capacity, int obs_dim, int action_dim);

  int capacity() const { return static_cast<int>(obs.cols()); }
  bool full() const { return size == capacity(); }
  void clear() { size = 0; }

  // done: the episode ended after this step. terminal: it ended in a state
  // with no future return (a fall); otherwise the value of the final
  // observation is used as a bootstrap.
  void add(const Eigen::VectorXf& normalized_obs, const Eigen::VectorXf& action, float log_prob,
           double reward, double value, bool done, bool terminal, double bootstrap_value);

  Eigen::MatrixXf obs;      // obs_dim x capacity
  Eigen::MatrixXf actions;  // action_dim x capacity
  std::vector<float> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<unsigned char> dones;
  std::vector<unsigned char> terminals;
  std::vector<double> bootstrap_values;
  int size = 0;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation over a full buffer. last_value is V of
// the observation following the final stored step (ignored if that step is
// done). Advantages are returned unnormalized.
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<unsigned char>& dones,
                      const std::vector<unsigned char>& terminals,
                      const std::vector<double>& bootstrap_values, double last_value,
                      double gamma, double lambda);

GaeResult compute_gae(const RolloutBuffer& buffer, double last_value, double gamma,
                      double lambda);

// Zero mean, unit standard deviation (population); unchanged if the spread is
// degenerate.
void normalize_advantages(std::vector<double>& advantages);

}  // namespace curriwalk::rl
