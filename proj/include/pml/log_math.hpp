#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace pml {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_factorial(double n) { return std::lgamma(n + 1.0); }

// x log x with the convention 0 log 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Max-shifted streaming log-sum-exp. Terms are folded in call order, so a
// fixed iteration order gives bit-identical results.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }
  bool empty() const { return max_ == kNegInf; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

inline double log_sum_exp(std::span<const double> terms) {
  double mx = kNegInf;
  for (double t : terms) mx = t > mx ? t : mx;
  if (mx == kNegInf) return kNegInf;
  if (mx == std::numeric_limits<double>::infinity()) return mx;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

}  // namespace pml
