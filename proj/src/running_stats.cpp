#include "curriwalk/running_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curriwalk::rl {

RunningStats::RunningStats(int dim) : mean_(dim, 0.0), m2_(dim, 0.0) {
  if (dim < 0) throw std::invalid_argument("running stats: negative dimension");
}

void RunningStats::update(std::span<const double> x) {
  if (static_cast<int>(x.size()) != dim()) {
    throw std::invalid_argument("running stats: dimension mismatch");
  }
  ++count_;
  const double n = static_cast<double>(count_);
  for (int i = 0; i < dim(); ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
}

void RunningStats::merge(const RunningStats& other) {
  if (other.count_ == 0) return;
  if (other.dim() != dim()) throw std::invalid_argument("running stats: dimension mismatch");
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (int i = 0; i < dim(); ++i) {
    const double delta = other.mean_[i] - mean_[i];
    mean_[i] += delta * nb / n;
    m2_[i] += other.m2_[i] + delta * delta * na * nb / n;
  }
  count_ += other.count_;
}

double RunningStats::variance(int i) const {
  if (count_ == 0) return 0.0;
  return std::max(0.0, m2_[i] / static_cast<double>(count_));
}

double RunningStats::std_dev(int i) const { return std::max(kMinStd, std::sqrt(variance(i))); }

void RunningStats::normalize(std::span<const double> x, std::span<float> out,
                             double clip) const {
  if (static_cast<int>(x.size()) != dim() || out.size() != x.size()) {
    throw std::invalid_argument("running stats: dimension mismatch");
  }
  for (int i = 0; i < dim(); ++i) {
    const double z = count_ == 0 ? x[i] : (x[i] - mean_[i]) / std_dev(i);
    out[i] = static_cast<float>(std::clamp(z, -clip, clip));
  }
}

RunningStats RunningStats::from_moments(std::uint64_t count, std::vector<double> mean,
                                        std::vector<double> m2) {
  if (mean.size() != m2.size()) throw std::invalid_argument("running stats: moment size mismatch");
  RunningStats s;
  s.count_ = count;
  s.mean_ = std::move(mean);
  s.m2_ = std::move(m2);
  return s;
}

}  // namespace curriwalk::rl
