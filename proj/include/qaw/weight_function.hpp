#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "qaw/regularize.hpp"
#include "qaw/trend.hpp"
#include "qaw/weight_matrix.hpp"

namespace qaw {

// Convex piecewise-linear function on [xs.front(), inf) continued with
// `right_slope` past the last knot, or on [xs.front(), xs.back()] when
// right_slope is +inf.
struct PiecewiseLinear {
  std::vector<double> xs, ys;
  double right_slope = std::numeric_limits<double>::infinity();

  double slope(std::size_t k) const { return (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]); }

  bool convex(double tol = 1e-9) const {
    for (std::size_t k = 1; k + 1 < xs.size(); ++k)
      if (slope(k) < slope(k - 1) - tol * std::max(1.0, std::fabs(slope(k - 1)))) return false;
    if (xs.size() >= 2 && std::isfinite(right_slope) && right_slope < slope(xs.size() - 2) - tol) return false;
    return true;
  }
};

// Largest convex minorant of a piecewise-linear function, tail ray included.
inline PiecewiseLinear convexify(const PiecewiseLinear& f) {
  auto hull = lower_hull(f.xs, f.ys);
  if (std::isfinite(f.right_slope))
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull.back();
      if ((f.ys[b] - f.ys[a]) / (f.xs[b] - f.xs[a]) > f.right_slope) hull.pop_back();
      else break;
    }
  PiecewiseLinear g;
  g.right_slope = f.right_slope;
  std::size_t last = hull.back();
  std::vector<double> xs(f.xs.begin(), f.xs.begin() + last + 1), ys(f.ys.begin(), f.ys.begin() + last + 1);
  std::vector<std::size_t> sub(hull.begin(), hull.end());
  g.xs = xs;
  g.ys = hull_values(xs, ys, sub);
  return g;
}

struct ConjugateTable {
  std::vector<double> x_grid;
  std::vector<double> phi_star;  // +inf where the conjugate is infinite
  std::vector<double> argmax;    // maximizing y; NaN where infinite
  std::vector<bool> overflow;
  bool convexified = false;
  bool refined = false;
};

// Exact conjugate sup_y (x y - f(y)) of a convex piecewise-linear f at
// sorted x. The maximizing knot moves right monotonically, so one pass
// over the knots serves the whole grid.
inline ConjugateTable conjugate_pl(const PiecewiseLinear& f, const std::vector<double>& x_grid) {
  if (f.xs.empty()) throw ParameterError("conjugate: empty function");
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (x_grid[i] < x_grid[i - 1]) throw ParameterError("conjugate: x grid must be nondecreasing");
  ConjugateTable t;
  t.x_grid = x_grid;
  std::size_t k = 0;
  for (double x : x_grid) {
    if (std::isfinite(f.right_slope) && x > f.right_slope) {
      t.phi_star.push_back(std::numeric_limits<double>::infinity());
      t.argmax.push_back(std::numeric_limits<double>::quiet_NaN());
      t.overflow.push_back(true);
      continue;
    }
    while (k + 1 < f.xs.size() && f.slope(k) < x) ++k;
    t.phi_star.push_back(x * f.xs[k] - f.ys[k]);
    t.argmax.push_back(f.xs[k]);
    t.overflow.push_back(false);
  }
  return t;
}

// phi(y) = omega(e^y) for the named formulas, shifted so that omega(1) = 0.
inline std::optional<std::function<double(double)>> phi_formula(const std::string& id) {
  if (id == "max0_t_minus_1") return [](double y) { return std::expm1(y); };
  if (id == "t_squared_minus_1") return [](double y) { return std::expm1(2 * y); };
  if (id == "t_over_log") {
    double c = 1.0 / std::log(std::numbers::e + 1.0);
    return [c](double y) {
      double t = std::exp(y);
      return t / std::log(std::numbers::e + t) - c;
    };
  }
  if (id == "log_squared") {
    double c = std::log(2.0) * std::log(2.0);
    return [c](double y) {
      double l = y + std::log1p(std::exp(-y));  // ln(1 + e^y)
      return l * l - c;
    };
  }
  return std::nullopt;
}

inline const std::vector<std::string>& weight_formula_ids() {
  static const std::vector<std::string> ids = {"max0_t_minus_1", "t_over_log", "log_squared", "t_squared_minus_1"};
  return ids;
}

enum class Verdict { holds, fails, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct ConditionFlags {
  Verdict omega0 = Verdict::inconclusive;  // normalized, nondecreasing
  Verdict omega1 = Verdict::inconclusive;  // omega(2t) = O(omega(t))
  Verdict omega2 = Verdict::inconclusive;  // omega(t) = O(t)
  Verdict omega3 = Verdict::inconclusive;  // log t = o(omega(t))
  Verdict omega4 = Verdict::inconclusive;  // phi convex
  Verdict omega5 = Verdict::inconclusive;  // omega(t) = o(t)
  Trend omega_q = Trend::inconclusive;     // integral of omega(t)/t^2 diverges
  std::vector<double> omega_q_partials;    // integral from 1 to each knot
  Verdict w1_property_iii = Verdict::inconclusive;  // liminf (w_j)^{1/j} > 0 for W^(1)
  bool omega2_consistent = true;
};

// omega sampled at knots t_0 = 1 < t_1 < ..., linear in y = ln t between
// knots and continued with the last y-slope.
struct WeightFunction {
  std::vector<double> knots_t;
  std::vector<double> values;
  std::string formula;  // set when the samples came from a named formula
  std::optional<ConditionFlags> flags;

  std::vector<double> ys() const {
    std::vector<double> y(knots_t.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log(knots_t[i]);
    return y;
  }

  PiecewiseLinear phi_pl() const {
    PiecewiseLinear f;
    f.xs = ys();
    f.ys = values;
    std::size_t n = f.xs.size();
    f.right_slope = n >= 2 ? f.slope(n - 2) : 0.0;
    return f;
  }

  double phi(double y) const {
    std::size_t n = knots_t.size();
    auto y_at = [&](std::size_t i) { return std::log(knots_t[i]); };
    auto seg = [&](std::size_t k) { return (values[k + 1] - values[k]) / (y_at(k + 1) - y_at(k)); };
    if (y <= 0) return values.front();
    if (y >= y_at(n - 1)) return values.back() + seg(n - 2) * (y - y_at(n - 1));
    std::size_t lo = 0, hi = n - 1;  // y_at(lo) <= y < y_at(hi)
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (y_at(mid) <= y ? lo : hi) = mid;
    }
    return values[lo] + seg(lo) * (y - y_at(lo));
  }
  double omega(double t) const { return t <= 1 ? 0.0 : phi(std::log(t)); }
};

inline void validate(const WeightFunction& w) {
  if (w.knots_t.size() != w.values.size() || w.knots_t.size() < 2)
    throw SchemaError("weight function: knots and values must match, at least 2");
  if (w.knots_t[0] != 1.0) throw SchemaError("weight function: first knot must be t = 1");
  if (w.values[0] != 0.0) throw SchemaError("weight function: omega(1) must be 0");
  for (std::size_t i = 1; i < w.knots_t.size(); ++i) {
    if (!(w.knots_t[i] > w.knots_t[i - 1])) throw SchemaError("weight function: knots must increase");
    if (!std::isfinite(w.values[i])) throw SchemaError("weight function: values must be finite");
  }
}

inline WeightFunction from_samples(std::vector<double> knots_t, std::vector<double> values) {
  WeightFunction w{std::move(knots_t), std::move(values), {}, {}};
  validate(w);
  return w;
}

inline constexpr std::size_t kDefaultKnots = 512;
inline constexpr double kDefaultYMax = 24.0;

// Samples a named formula on knots uniform in y over [0, y_max].
inline WeightFunction from_formula(const std::string& id, std::size_t knots = kDefaultKnots,
                                   double y_max = kDefaultYMax) {
  auto phi = phi_formula(id);
  if (!phi) throw ParameterError("unknown weight formula: " + id);
  if (knots < 2 || !(y_max > 0)) throw ParameterError("weight formula grid needs >= 2 knots and y_max > 0");
  WeightFunction w;
  w.formula = id;
  for (std::size_t i = 0; i < knots; ++i) {
    double y = y_max * static_cast<double>(i) / static_cast<double>(knots - 1);
    w.knots_t.push_back(i == 0 ? 1.0 : std::exp(y));
    w.values.push_back(i == 0 ? 0.0 : (*phi)(y));
  }
  return w;
}

namespace detail {

// max over y in [lo, hi] of x y - phi(y) for concave objective.
inline std::pair<double, double> refine_max(const std::function<double(double)>& phi, double x, double lo,
                                            double hi) {
  auto neg = [&](double y) { return phi(y) - x * y; };
  auto r = boost::math::tools::brent_find_minima(neg, lo, hi, std::numeric_limits<double>::digits);
  return {-r.second, r.first};
}

}  // namespace detail

// Conjugate of phi_omega. Non-convex samples are convexified first. For
// formula weights the exact piecewise-linear maximizer is polished on the
// true phi between neighbouring knots, and x past the sampled slopes is
// handled on the formula instead of reported as infinite.
inline ConjugateTable conjugate(const WeightFunction& w, const std::vector<double>& x_grid) {
  validate(w);
  auto f = w.phi_pl();
  bool convexified = false;
  if (!f.convex()) {
    f = convexify(f);
    convexified = true;
  }
  auto t = conjugate_pl(f, x_grid);
  t.convexified = convexified;
  std::optional<std::function<double(double)>> phi;
  if (!convexified) phi = phi_formula(w.formula);
  if (!phi) return t;
  t.refined = true;
  const auto& ys = f.xs;
  std::size_t n = ys.size();
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    double x = x_grid[i];
    double lo, hi;
    if (t.overflow[i]) {
      lo = ys[n - 2];
      hi = std::max(ys.back(), 1.0);
      while ((*phi)(hi + 1) - (*phi)(hi) <= x) {
        hi *= 2;
        if (hi > 1e6) break;
      }
      if (hi > 1e6) continue;
      hi += 1;
    } else {
      std::size_t k = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), t.argmax[i]) - ys.begin());
      lo = ys[k == 0 ? 0 : k - 1];
      hi = ys[std::min(k + 1, n - 1)];
    }
    auto [val, arg] = detail::refine_max(*phi, x, lo, hi);
    if (t.overflow[i] || val > t.phi_star[i]) {
      t.phi_star[i] = val;
      t.argmax[i] = arg;
      t.overflow[i] = false;
    }
  }
  // Polishing can jitter the maximizer by a few ulps of the bracket.
  for (std::size_t i = 1; i < t.argmax.size(); ++i)
    if (!t.overflow[i] && !t.overflow[i - 1] && t.argmax[i] < t.argmax[i - 1] &&
        t.argmax[i - 1] - t.argmax[i] < 1e-6)
      t.argmax[i] = t.argmax[i - 1];
  return t;
}

struct AssociatedMatrix {
  WeightMatrix matrix;
  std::vector<double> levels;
  std::size_t prefix = 0;
  std::vector<std::string> warnings;
  bool normalized = true;
  bool log_convex = true;
  bool ordered = true;
};

// W^(l)_j = exp(phi*(l j) / l) for each level l.
inline AssociatedMatrix associated_matrix(const WeightFunction& w, std::vector<double> levels, std::size_t prefix) {
  if (levels.empty()) throw ParameterError("associated_matrix: no levels");
  std::sort(levels.begin(), levels.end());
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (!(levels[i] > 0) || (i > 0 && levels[i] == levels[i - 1]))
      throw ParameterError("associated_matrix: levels must be positive and distinct");
  if (prefix < 2) throw SizeError("associated_matrix: prefix must be >= 2");

  AssociatedMatrix out;
  out.levels = levels;
  out.prefix = prefix;
  std::vector<std::vector<double>> lv;
  for (double l : levels) {
    std::vector<double> xs(prefix);
    for (std::size_t j = 0; j < prefix; ++j) xs[j] = l * static_cast<double>(j);
    auto t = conjugate(w, xs);
    std::vector<double> v;
    for (std::size_t j = 0; j < prefix && !t.overflow[j]; ++j) v.push_back(t.phi_star[j] / l);
    if (v.size() < prefix) {
      out.warnings.push_back("level " + std::to_string(l) + ": conjugate infinite from j = " +
                             std::to_string(v.size()) + ", prefix shortened");
      out.prefix = std::min(out.prefix, v.size());
    }
    lv.push_back(std::move(v));
  }
  if (out.prefix < 2) throw SizeError("associated_matrix: conjugate infinite almost immediately");
  std::vector<WeightSequence> seqs;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    WeightSequence s;
    s.log_values.assign(lv[i].begin(), lv[i].begin() + out.prefix);
    s.name = "W(" + std::to_string(levels[i]) + ")";
    out.normalized = out.normalized && s.log_values[0] == 0.0;
    // Tolerance scaled to the magnitude of the conjugate values.
    double scale = std::max(1.0, std::fabs(s.log_values.back()));
    out.log_convex = out.log_convex && is_log_convex(s, kLogConvexTol * scale).log_convex;
    seqs.push_back(std::move(s));
  }
  out.ordered = order_defect(seqs) <= 1e-12;
  if (!out.normalized) out.warnings.push_back("some level is not normalized");
  out.matrix = table_matrix(levels, std::move(seqs), "W");
  return out;
}

inline constexpr double kRatioSlope = 0.1;

inline ConditionFlags check_conditions(const WeightFunction& w) {
  validate(w);
  if (w.knots_t.size() < 16) throw SizeError("check_conditions needs >= 16 knots");
  ConditionFlags c;
  auto f = w.phi_pl();
  const auto& ys = f.xs;
  std::size_t n = ys.size();

  bool nondecreasing = true;
  for (std::size_t i = 1; i < n; ++i) nondecreasing = nondecreasing && w.values[i] >= w.values[i - 1];
  c.omega0 = nondecreasing && w.values[0] == 0.0 ? Verdict::holds : Verdict::fails;
  c.omega4 = f.convex() ? Verdict::holds : Verdict::fails;

  // Tail window y in [y_max/2, y_max - ln 2] so that omega(2t) stays sampled.
  double y_hi = ys.back() - std::log(2.0), y_lo = ys.back() / 2;
  std::vector<double> lny, r1, r2, r3;
  for (std::size_t i = 0; i < n; ++i) {
    double y = ys[i];
    if (y < y_lo || y > y_hi || y <= 0) continue;
    double om = w.values[i];
    if (!(om > 0)) continue;
    lny.push_back(std::log(y));
    r1.push_back(std::log(w.phi(y + std::log(2.0)) / om));
    r2.push_back(std::log(om) - y);
    r3.push_back(std::log(om / y));
  }
  if (lny.size() >= 8) {
    double s1 = ls_slope(lny, r1), s2 = ls_slope(lny, r2), s3 = ls_slope(lny, r3);
    c.omega1 = s1 <= kRatioSlope ? Verdict::holds : Verdict::fails;
    c.omega2 = s2 <= kRatioSlope ? Verdict::holds : Verdict::fails;
    c.omega3 = s3 > kRatioSlope ? Verdict::holds : Verdict::fails;
    c.omega5 = s2 < -kRatioSlope ? Verdict::holds : Verdict::fails;
  }

  // On each segment omega = a + b ln t, and the integral of that over t^2
  // has antiderivative -a/t - b (ln t + 1)/t.
  CompensatedSum acc;
  c.omega_q_partials.push_back(0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double b = f.slope(i), a = f.ys[i] - b * ys[i];
    auto F = [&](double y) { return std::exp(-y) * (-a - b * (y + 1)); };
    acc.add(F(ys[i + 1]) - F(ys[i]));
    c.omega_q_partials.push_back(acc.value());
  }
  c.omega_q = classify_series(w.knots_t, c.omega_q_partials).verdict;

  try {
    auto am = associated_matrix(w, {1.0}, 256);
    const auto& s = am.matrix.table[0];
    if (s.size() >= 16) {
      std::vector<double> r;
      for (std::size_t j = 1; j < s.size(); ++j) r.push_back(s.log_little_m(j) / static_cast<double>(j));
      c.w1_property_iii = tail_slope(r, 1) >= -kRatioSlope ? Verdict::holds : Verdict::fails;
    }
  } catch (const SizeError&) {
  }
  if (c.w1_property_iii != Verdict::inconclusive && c.omega2 != Verdict::inconclusive)
    c.omega2_consistent = c.w1_property_iii == c.omega2;
  return c;
}

}  // namespace qaw
