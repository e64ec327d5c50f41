#pragma once

// Gaussian actor-critic: two tanh MLPs (policy mean, value) plus a
// state-independent log-std vector. All parameters live in one flat buffer so
// optimizers, gradient clipping and checkpoints treat them uniformly.
//
// Flat layout: policy layers (W row-major per layer, then b), log_std,
// value layers (same layout).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace curriwalk::rl {

struct Architecture {
  int input = 51;
  int hidden1 = 256;
  int hidden2 = 256;
  int action = 6;

  bool operator==(const Architecture&) const = default;
  void validate() const {
    if (input < 1 || hidden1 < 1 || hidden2 < 1 || action < 1) {
      throw std::invalid_argument("architecture: all widths must be >= 1");
    }
  }
};

// Parameter and gradient storage. Eigen picks its vectorized head and tail
// split from the buffer address, so a fixed alignment keeps results
// bit-identical from run to run.
template <typename T>
using ParamVector = std::vector<T, Eigen::aligned_allocator<T>>;

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 1.0;

template <typename T>
class ActorCritic {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;
  using WeightMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstWeightMap =
      Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  struct Layer {
    int in = 0;
    int out = 0;
    std::size_t w_offset = 0;
    std::size_t b_offset = 0;
  };

  // Activations kept for the backward pass.
  struct Cache {
    Matrix input;
    Matrix policy_h1, policy_h2;
    Matrix value_h1, value_h2;
    Matrix mean;     // action x batch
    RowVector value; // 1 x batch
  };

  ActorCritic() : ActorCritic(Architecture{}) {}

  explicit ActorCritic(Architecture arch) : arch_(arch) {
    arch_.validate();
    std::size_t offset = 0;
    auto add = [&](int in, int out) {
      Layer l{in, out, offset, offset + static_cast<std::size_t>(in) * out};
      offset = l.b_offset + static_cast<std::size_t>(out);
      return l;
    };
    policy_[0] = add(arch.input, arch.hidden1);
    policy_[1] = add(arch.hidden1, arch.hidden2);
    policy_[2] = add(arch.hidden2, arch.action);
    log_std_offset_ = offset;
    offset += static_cast<std::size_t>(arch.action);
    value_[0] = add(arch.input, arch.hidden1);
    value_[1] = add(arch.hidden1, arch.hidden2);
    value_[2] = add(arch.hidden2, 1);
    params_.assign(offset, T(0));
  }

  const Architecture& architecture() const { return arch_; }
  std::size_t size() const { return params_.size(); }
  ParamVector<T>& params() { return params_; }
  const ParamVector<T>& params() const { return params_; }
  std::size_t log_std_offset() const { return log_std_offset_; }

  // Orthogonal hidden layers (gain sqrt 2), small policy head, zero biases.
  template <typename Rng>
  void initialize(Rng& rng, double initial_log_std) {
    std::fill(params_.begin(), params_.end(), T(0));
    const double hidden_gain = std::sqrt(2.0);
    for (int i = 0; i < 3; ++i) {
      const double pg = i == 2 ? 0.01 : hidden_gain;
      const double vg = i == 2 ? 1.0 : hidden_gain;
      orthogonal(policy_[i], pg, rng);
      orthogonal(value_[i], vg, rng);
    }
    for (int a = 0; a < arch_.action; ++a) params_[log_std_offset_ + a] = T(initial_log_std);
  }

  Vector log_std() const {
    Vector s(arch_.action);
    for (int a = 0; a < arch_.action; ++a) {
      s[a] = std::clamp(params_[log_std_offset_ + a], T(kLogStdMin), T(kLogStdMax));
    }
    return s;
  }

  // obs is input x batch.
  void forward(const Matrix& obs, Cache& cache) const {
    if (obs.rows() != arch_.input) throw std::invalid_argument("actor-critic: observation size mismatch");
    cache.input = obs;
    layer_forward(policy_[0], obs, cache.policy_h1, true);
    layer_forward(policy_[1], cache.policy_h1, cache.policy_h2, true);
    layer_forward(policy_[2], cache.policy_h2, cache.mean, false);
    layer_forward(value_[0], obs, cache.value_h1, true);
    layer_forward(value_[1], cache.value_h1, cache.value_h2, true);
    Matrix v;
    layer_forward(value_[2], cache.value_h2, v, false);
    cache.value = v.row(0);
  }

  // Accumulates into grad (same layout as params). d_log_std is the gradient
  // with respect to the clamped log-std; it is zeroed where the clamp is active.
  void backward(const Cache& cache, const Matrix& d_mean, const Vector& d_log_std,
                const RowVector& d_value, ParamVector<T>& grad) const {
    if (grad.size() != params_.size()) grad.assign(params_.size(), T(0));
    Matrix d = d_mean;
    Matrix d_prev;
    layer_backward(policy_[2], cache.policy_h2, d, grad, &d_prev);
    d = d_prev.array() * (T(1) - cache.policy_h2.array().square());
    layer_backward(policy_[1], cache.policy_h1, d, grad, &d_prev);
    d = d_prev.array() * (T(1) - cache.policy_h1.array().square());
    layer_backward(policy_[0], cache.input, d, grad, nullptr);

    for (int a = 0; a < arch_.action; ++a) {
      const T raw = params_[log_std_offset_ + a];
      if (raw > T(kLogStdMin) && raw < T(kLogStdMax)) grad[log_std_offset_ + a] += d_log_std[a];
    }

    d = d_value;
    layer_backward(value_[2], cache.value_h2, d, grad, &d_prev);
    d = d_prev.array() * (T(1) - cache.value_h2.array().square());
    layer_backward(value_[1], cache.value_h1, d, grad, &d_prev);
    d = d_prev.array() * (T(1) - cache.value_h1.array().square());
    layer_backward(value_[0], cache.input, d, grad, nullptr);
  }

  // Single-observation convenience for rollouts.
  void act(const Vector& obs, Vector& mean, T& value) const {
    Cache cache;
    forward(Matrix(obs), cache);
    mean = cache.mean.col(0);
    value = cache.value[0];
  }

 private:
  void layer_forward(const Layer& l, const Matrix& in, Matrix& out, bool hidden) const {
    ConstWeightMap w(params_.data() + l.w_offset, l.out, l.in);
    ConstVectorMap b(params_.data() + l.b_offset, l.out);
    out.noalias() = w * in;
    out.colwise() += b;
    if (hidden) out = out.array().tanh();
  }

  void layer_backward(const Layer& l, const Matrix& in, const Matrix& d_out,
                      ParamVector<T>& grad, Matrix* d_in) const {
    WeightMap gw(grad.data() + l.w_offset, l.out, l.in);
    VectorMap gb(grad.data() + l.b_offset, l.out);
    gw.noalias() += d_out * in.transpose();
    gb += d_out.rowwise().sum();
    if (d_in != nullptr) {
      ConstWeightMap w(params_.data() + l.w_offset, l.out, l.in);
      d_in->noalias() = w.transpose() * d_out;
    }
  }

  template <typename Rng>
  void orthogonal(const Layer& l, double gain, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int rows = std::max(l.out, l.in);
    const int cols = std::min(l.out, l.in);
    Eigen::MatrixXd a(rows, cols);
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) a(r, c) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    const Eigen::VectorXd diag = qr.matrixQR().diagonal();
    for (int c = 0; c < cols; ++c) {
      if (diag[c] < 0.0) q.col(c) = -q.col(c);
    }
    Eigen::MatrixXd w = l.out >= l.in ? q : Eigen::MatrixXd(q.transpose());
    WeightMap dst(params_.data() + l.w_offset, l.out, l.in);
    dst = (gain * w).cast<T>();
  }

  Architecture arch_;
  Layer policy_[3];
  Layer value_[3];
  std::size_t log_std_offset_ = 0;
  ParamVector<T> params_;
};

// Diagonal Gaussian log-density summed over action dimensions.
template <typename T, typename MeanExpr, typename ActionExpr, typename StdExpr>
T gaussian_log_prob(const MeanExpr& mean, const StdExpr& log_std, const ActionExpr& action) {
  const T half_log_2pi = T(0.5 * std::log(2.0 * std::numbers::pi));
  T lp = T(0);
  for (Eigen::Index a = 0; a < mean.size(); ++a) {
    const T z = (action[a] - mean[a]) / std::exp(log_std[a]);
    lp += T(-0.5) * z * z - log_std[a] - half_log_2pi;
  }
  return lp;
}

}  // namespace curriwalk::rl
