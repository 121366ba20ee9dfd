#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "qaw/borel_witness.hpp"
#include "qaw/weight_function.hpp"

namespace oracle {

// Normalized log values: a random walk with increments uniform in [lo, hi].
inline std::vector<double> random_log_values(std::mt19937_64& rng, std::size_t n, double lo = -2.0, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> lv(n, 0.0);
  for (std::size_t p = 1; p < n; ++p) lv[p] = lv[p - 1] + u(rng);
  return lv;
}

// Random log-convex sequence: nondecreasing increments.
inline std::vector<double> random_log_convex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<double> lv(n, 0.0);
  double inc = -1.0;
  for (std::size_t p = 1; p < n; ++p) {
    inc += u(rng);
    lv[p] = lv[p - 1] + inc;
  }
  return lv;
}

// Lower convex envelope by minimizing over every chord through the point.
// O(P^3); keep P small.
inline std::vector<double> chord_envelope(const std::vector<double>& y) {
  std::size_t n = y.size();
  std::vector<double> out(y);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i <= p; ++i)
      for (std::size_t k = p; k < n; ++k) {
        if (i == k) continue;
        double t = static_cast<double>(p - i) / static_cast<double>(k - i);
        out[p] = std::min(out[p], y[i] + t * (y[k] - y[i]));
      }
  return out;
}

// Lower convex envelope by gift wrapping: from the current vertex, jump to
// the farthest point of minimal slope. O(P * vertices).
inline std::vector<double> gift_wrap_envelope(const std::vector<double>& y) {
  std::size_t n = y.size();
  std::vector<double> out(n);
  std::size_t cur = 0;
  out[0] = y[0];
  while (cur + 1 < n) {
    std::size_t best = cur + 1;
    long double best_slope = (static_cast<long double>(y[best]) - y[cur]);
    for (std::size_t k = cur + 2; k < n; ++k) {
      long double s = (static_cast<long double>(y[k]) - y[cur]) / static_cast<long double>(k - cur);
      if (s <= best_slope) {
        best_slope = s;
        best = k;
      }
    }
    for (std::size_t p = cur + 1; p <= best; ++p) {
      long double t = static_cast<long double>(p - cur) / static_cast<long double>(best - cur);
      out[p] = static_cast<double>(y[cur] + t * (static_cast<long double>(y[best]) - y[cur]));
    }
    out[best] = y[best];
    cur = best;
  }
  return out;
}

// Running-minimum construction of the increasing-root minorant:
// root'_p = min_{q >= p} root_q.
inline std::vector<double> root_minorant(const std::vector<double>& lv) {
  std::size_t n = lv.size();
  std::vector<double> r(n, 0.0), out(n, 0.0);
  for (std::size_t p = 1; p < n; ++p) r[p] = lv[p] / static_cast<double>(p);
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t p = n; p-- > 1;) {
    mn = std::min(mn, r[p]);
    out[p] = mn * static_cast<double>(p);
  }
  return out;
}

// S_P = sum_{p<=P} M_{p-1}/M_p and T_P = sum_{p<=P} M_p^{-1/p} in long double.
struct Sums {
  std::vector<long double> s, t;
};

inline Sums direct_sums(const std::vector<double>& lv) {
  Sums r;
  long double s = 0, t = 0;
  for (std::size_t p = 1; p < lv.size(); ++p) {
    s += std::exp(static_cast<long double>(lv[p - 1]) - lv[p]);
    t += std::exp(-static_cast<long double>(lv[p]) / static_cast<long double>(p));
    r.s.push_back(s);
    r.t.push_back(t);
  }
  return r;
}

inline double harmonic(std::size_t n) {
  long double h = 0;
  for (std::size_t k = n; k >= 1; --k) h += 1.0L / static_cast<long double>(k);
  return static_cast<double>(h);
}

// Random convex piecewise-linear function on increasing knots, with the
// domain ending at the last knot.
inline qaw::PiecewiseLinear random_convex_pl(std::mt19937_64& rng, std::size_t knots) {
  std::uniform_real_distribution<double> step(0.2, 1.5), slope_step(0.05, 1.0);
  qaw::PiecewiseLinear f;
  double x = 0, y = 0, slope = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
  f.xs.push_back(x);
  f.ys.push_back(y);
  for (std::size_t i = 1; i < knots; ++i) {
    double dx = step(rng);
    x += dx;
    y += slope * dx;
    f.xs.push_back(x);
    f.ys.push_back(y);
    slope += slope_step(rng);
  }
  return f;
}

// sup_x (x y - g(x)) over a finite table.
inline double discrete_conjugate(const std::vector<double>& xs, const std::vector<double>& g, double y) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) best = std::max(best, xs[i] * y - g[i]);
  return best;
}

// Witness index for the factorial_log_power(1) target with growth p under the
// unit model: the smallest k >= previous + 1 with ln(e + k) >= p^2.
inline qaw::Index flp1_index(std::size_t p, const qaw::Index& previous) {
  using qaw::LogReal;
  LogReal e = boost::math::constants::e<LogReal>();
  LogReal x = exp(LogReal(static_cast<double>(p * p))) - e;
  qaw::Index k = x <= 0 ? qaw::Index(0) : qaw::ceil_index(x);
  qaw::Index next = previous + 1;
  return k < next ? next : k;
}

}  // namespace oracle
