#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace lmc {

/// Correctly rounded floating-point summation (Shewchuk's exact partials
/// with a final half-even correction). The result does not depend on the
/// order in which values are added.
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

double exact_sum(std::span<const double> values);

/// Neumaier compensated accumulator for long streaming sums.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace lmc
