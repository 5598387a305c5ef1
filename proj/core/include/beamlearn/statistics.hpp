#pragma once

#include <cmath>
#include <cstddef>

namespace beamlearn {

/// Welford accumulator for a sample mean and its standard error.
class RunningMean {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  [[nodiscard]] std::size_t count() const { return n_; }
  [[nodiscard]] double mean() const { return mean_; }

  /// Unbiased sample variance; 0 with fewer than two samples.
  [[nodiscard]] double variance() const {
    return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
  }

  [[nodiscard]] double stderr_of_mean() const {
    return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Standard error of the difference of two independent means.
inline double pooled_stderr(double stderr_a, double stderr_b) {
  return std::sqrt(stderr_a * stderr_a + stderr_b * stderr_b);
}

}  // namespace beamlearn
