#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace curriwalk::rl {

// Per-dimension online mean/variance (Welford), mergeable across shards.
class RunningStats {
 public:
  RunningStats() = default;
  explicit RunningStats(int dim);

  int dim() const { return static_cast<int>(mean_.size()); }
  std::uint64_t count() const { return count_; }

  void update(std::span<const double> x);
  // Chan et al. pairwise combination.
  void merge(const RunningStats& other);

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& m2() const { return m2_; }
  // Population variance (M2 / n); 0 before any sample.
  double variance(int i) const;
  // Standard deviation clamped below at min_std.
  double std_dev(int i) const;

  // (x - mean) / std, clipped to [-clip, clip].
  void normalize(std::span<const double> x, std::span<float> out, double clip) const;

  static RunningStats from_moments(std::uint64_t count, std::vector<double> mean,
                                   std::vector<double> m2);

  static constexpr double kMinStd = 1e-6;

 private:
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

}  // namespace curriwalk::rl
