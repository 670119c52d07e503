#pragma once

#include <cmath>

namespace quadratura {

/// Neumaier compensated sum. Order-dependent; callers add in a fixed order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace quadratura
