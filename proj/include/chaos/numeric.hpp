#pragma once

#include <cmath>
#include <cstdint>

namespace chaos {

/// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Entries whose magnitude falls below this after arithmetic are dropped.
inline constexpr double kDropThreshold = 1e-15;

inline std::uint64_t factorial_u64(int n) {
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

/// (2m-1)!! for m >= 0, with (-1)!! = 1.
inline std::uint64_t double_factorial_odd(int m) {
  std::uint64_t r = 1;
  for (int i = 2 * m - 1; i > 1; i -= 2) r *= static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace chaos
