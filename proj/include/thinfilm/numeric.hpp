#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace thinfilm {

//! Neumaier-compensated sum. Deterministic left-to-right order.
inline double compensated_sum(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

//! Running compensated accumulator for per-step time integrals.
class Accumulator {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double max_value(const std::vector<double>& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = (i == 0 || v[i] > m) ? v[i] : m;
  return m;
}

inline double min_value(const std::vector<double>& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = (i == 0 || v[i] < m) ? v[i] : m;
  return m;
}

}  // namespace thinfilm
