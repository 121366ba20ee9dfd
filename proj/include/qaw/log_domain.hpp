#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace qaw {

// Witness indices outgrow 64 bits quickly, and their log-magnitudes outgrow
// the double exponent range, so both get arbitrary-size representations.
using Index = boost::multiprecision::cpp_int;
using LogReal = boost::multiprecision::cpp_bin_float_50;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};
struct ParameterError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "parameter"; }
};
struct SizeError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "size"; }
};
struct SchemaError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "schema"; }
};
struct PreconditionError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

inline LogReal log_inf() { return std::numeric_limits<LogReal>::infinity(); }
inline LogReal neg_log_inf() { return -std::numeric_limits<LogReal>::infinity(); }

inline LogReal to_log_real(const Index& k) { return static_cast<LogReal>(k); }

// Smallest integer >= x. Only the leading ~50 digits are meaningful for huge x.
inline Index ceil_index(const LogReal& x) {
  return static_cast<Index>(boost::multiprecision::ceil(x));
}

inline double ln_factorial(std::size_t p) {
  if (p <= 32) {
    double acc = 0.0;
    for (std::size_t q = 2; q <= p; ++q) acc += std::log(static_cast<double>(q));
    return acc;
  }
  return std::lgamma(static_cast<double>(p) + 1.0);
}

// ln x! for real x >= 0 at extended range.
inline LogReal ln_factorial(const LogReal& x) {
  if (x <= 32) {
    if (x == boost::multiprecision::floor(x))
      return LogReal(ln_factorial(static_cast<std::size_t>(x)));
    return LogReal(std::lgamma(static_cast<double>(x) + 1.0));
  }
  // Stirling series for ln Gamma(x + 1).
  static const LogReal half_ln_two_pi = log(2 * boost::math::constants::pi<LogReal>()) / 2;
  LogReal inv = 1 / x;
  LogReal inv2 = inv * inv;
  LogReal series = inv * (LogReal(1) / 12 -
                          inv2 * (LogReal(1) / 360 -
                                  inv2 * (LogReal(1) / 1260 - inv2 * (LogReal(1) / 1680))));
  return x * log(x) - x + log(x) / 2 + half_ln_two_pi + series;
}

// A signed number stored as sign and natural log of its magnitude.
struct SignedLog {
  int sign = 0;  // 0 means exactly zero
  LogReal log_abs = neg_log_inf();

  static SignedLog zero() { return {}; }
  double log10_abs() const {
    if (sign == 0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(log_abs / boost::math::constants::ln_ten<LogReal>());
  }
};

// Sum of signed terms given in log form. Terms are rescaled against the
// running maximum and accumulated with Neumaier compensation.
class ScaledSum {
 public:
  void add(int sign, const LogReal& log_abs) {
    if (sign == 0 || log_abs == neg_log_inf()) return;
    if (empty_) {
      scale_ = log_abs;
      sum_ = static_cast<double>(sign);
      comp_ = 0.0;
      empty_ = false;
      return;
    }
    if (log_abs > scale_) {
      double factor = shift_factor(scale_ - log_abs);
      sum_ *= factor;
      comp_ *= factor;
      scale_ = log_abs;
    }
    accumulate(static_cast<double>(sign) * shift_factor(log_abs - scale_));
  }

  void add(const SignedLog& v) { add(v.sign, v.log_abs); }

  SignedLog value() const {
    if (empty_) return SignedLog::zero();
    double total = sum_ + comp_;
    if (total == 0.0) return SignedLog::zero();
    return {total > 0 ? 1 : -1, scale_ + LogReal(std::log(std::fabs(total)))};
  }

 private:
  static double shift_factor(const LogReal& delta) {
    if (delta < -745) return 0.0;
    return std::exp(static_cast<double>(delta));
  }
  void accumulate(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  bool empty_ = true;
  LogReal scale_ = neg_log_inf();
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(sum exp(x_i)) for doubles; -inf for an empty list.
inline double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double mx = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Running log-sum-exp over doubles.
class LogAccumulator {
 public:
  void add(double x) {
    if (std::isinf(x) && x < 0) return;
    if (std::isinf(log_)) {
      log_ = x;
      return;
    }
    double hi = std::max(log_, x), lo = std::min(log_, x);
    log_ = hi + std::log1p(std::exp(lo - hi));
  }
  double value() const { return log_; }

 private:
  double log_ = -std::numeric_limits<double>::infinity();
};

// Neumaier summation of doubles.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Least-squares slope of ys against xs.
inline double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace qaw
