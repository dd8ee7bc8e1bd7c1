#pragma once

#include <cmath>

namespace pairstat::detail {

// Neumaier-compensated running sum. Results depend only on the order of
// add() calls, which every caller keeps fixed (ascending pair number).
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace pairstat::detail
