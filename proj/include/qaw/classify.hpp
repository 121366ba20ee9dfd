#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qaw/regularize.hpp"
#include "qaw/trend.hpp"

namespace qaw {

struct QaReport {
  // Index P-1 holds the sums over 1 <= p <= P-1 of the prefix.
  std::vector<double> s_partial;      // sum M_{p-1}/M_p
  std::vector<double> t_partial;      // sum M_p^{-1/p}
  std::vector<double> log_s_partial;  // same, in log form
  std::vector<double> log_t_partial;
  Trend trend = Trend::inconclusive;  // of s_partial
  Trend t_trend = Trend::inconclusive;
  TrendFit fit;
  bool carleman_ok = true;
  std::optional<std::size_t> carleman_violation;
  Trend lc_trend = Trend::inconclusive;            // (Q) for the log-convex minorant
  Trend root_minorant_trend = Trend::inconclusive; // sum of (M^I_p)^{-1/p}
};

inline constexpr double kCarlemanRelTol = 1e-12;

namespace detail {

struct PartialSums {
  std::vector<double> s, t, log_s, log_t;
};

inline PartialSums partial_sums_of(const std::vector<double>& lv) {
  PartialSums ps;
  LogAccumulator ls, lt;
  CompensatedSum cs, ct;
  for (std::size_t p = 1; p < lv.size(); ++p) {
    double ls_term = lv[p - 1] - lv[p];
    double lt_term = -lv[p] / static_cast<double>(p);
    ls.add(ls_term);
    lt.add(lt_term);
    cs.add(std::exp(ls_term));
    ct.add(std::exp(lt_term));
    ps.s.push_back(cs.value());
    ps.t.push_back(ct.value());
    ps.log_s.push_back(ls.value());
    ps.log_t.push_back(lt.value());
  }
  return ps;
}

inline std::vector<double> index_axis(std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i + 1);
  return xs;
}

}  // namespace detail

inline constexpr std::size_t kMinQaPrefix = 32;

inline QaReport qa_diagnose(const WeightSequence& seq) {
  check_entries(seq.log_values);
  if (seq.size() < kMinQaPrefix) throw SizeError("qa_diagnose needs prefix >= 32");
  QaReport r;
  auto ps = detail::partial_sums_of(seq.log_values);
  r.s_partial = ps.s;
  r.t_partial = ps.t;
  r.log_s_partial = ps.log_s;
  r.log_t_partial = ps.log_t;
  for (std::size_t i = 0; i < ps.s.size(); ++i) {
    double slack = ps.log_t[i] - (1.0 + ps.log_s[i]);
    if (slack > kCarlemanRelTol) {
      r.carleman_ok = false;
      r.carleman_violation = i + 1;
      break;
    }
  }
  auto xs = detail::index_axis(ps.s.size());
  r.fit = classify_series(xs, ps.s);
  r.trend = r.fit.verdict;
  r.t_trend = classify_series(xs, ps.t).verdict;

  auto lc = lc_minorant(seq);
  r.lc_trend = classify_series(xs, detail::partial_sums_of(lc.minorant.log_values).s).verdict;
  auto inc = increasing_root_minorant(seq);
  r.root_minorant_trend = classify_series(xs, detail::partial_sums_of(inc.minorant.log_values).t).verdict;
  return r;
}

enum class RelationVerdict { precedes, strictly_smaller, neither_on_window };

inline const char* relation_name(RelationVerdict v) {
  switch (v) {
    case RelationVerdict::precedes: return "precedes";
    case RelationVerdict::strictly_smaller: return "strictly_smaller";
    case RelationVerdict::neither_on_window: return "neither_on_window";
  }
  return "neither_on_window";
}

struct RelationReport {
  std::vector<double> log_ratio_roots;  // index p-1 holds (ln M_p - ln N_p)/p
  double log_window_sup = 0;
  double window_sup = 1;
  double tail_trend = 0;  // slope against ln p over the last quarter
  RelationVerdict verdict = RelationVerdict::neither_on_window;
  std::string interpretation;
};

inline constexpr double kFlatSlope = 0.01;
inline constexpr std::size_t kMinTailPoints = 16;

// Slope of ys[i] against ln(i + offset) over the last quarter of ys.
inline double tail_slope(const std::vector<double>& ys, std::size_t offset, std::size_t* first = nullptr) {
  std::size_t n = ys.size();
  std::size_t len = std::min(n, std::max(kMinTailPoints, n / 4));
  std::size_t start = n - len;
  std::vector<double> xs, tail;
  for (std::size_t i = start; i < n; ++i) {
    xs.push_back(std::log(static_cast<double>(i + offset)));
    tail.push_back(ys[i]);
  }
  if (first) *first = start;
  return ls_slope(xs, tail);
}

inline RelationReport relate(const WeightSequence& m, const WeightSequence& n) {
  std::size_t len = std::min(m.size(), n.size());
  if (len < 2) throw SizeError("relate needs prefix >= 2");
  RelationReport r;
  r.log_window_sup = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p < len; ++p) {
    double v = (m.log_values[p] - n.log_values[p]) / static_cast<double>(p);
    r.log_ratio_roots.push_back(v);
    r.log_window_sup = std::max(r.log_window_sup, v);
  }
  r.window_sup = std::exp(r.log_window_sup);
  std::size_t first = 0;
  r.tail_trend = tail_slope(r.log_ratio_roots, 1, &first);
  bool falling = r.log_ratio_roots.back() < r.log_ratio_roots[first];
  if (r.tail_trend < -kFlatSlope && falling) r.verdict = RelationVerdict::strictly_smaller;
  else if (std::fabs(r.tail_trend) <= kFlatSlope) r.verdict = RelationVerdict::precedes;
  else r.verdict = RelationVerdict::neither_on_window;

  const std::string a = m.name, b = n.name;
  switch (r.verdict) {
    case RelationVerdict::strictly_smaller:
      r.interpretation = a + " strictly below " + b + " on the window: E{" + a + "} in E(" + b +
                         ") and Lambda{" + a + "} in Lambda(" + b + ")";
      break;
    case RelationVerdict::precedes:
      r.interpretation = a + " precedes " + b + " with window constant " + std::to_string(r.window_sup) +
                         ": E[" + a + "] in E[" + b + "] and Lambda[" + a + "] in Lambda[" + b + "]";
      break;
    case RelationVerdict::neither_on_window:
      r.interpretation = "no inclusion of " + a + " into " + b + " is supported on the window";
      break;
  }
  return r;
}

enum class Containment { roumieu_strict, beurling_strict, not_strict, inconclusive };

inline const char* containment_name(Containment c) {
  switch (c) {
    case Containment::roumieu_strict: return "roumieu_strict";
    case Containment::beurling_strict: return "beurling_strict";
    case Containment::not_strict: return "not_strict";
    case Containment::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// Growth of (m_p)^{1/p} on the window. The future minimum tracks the
// liminf side, the running maximum the sup side.
inline Containment strict_analytic_containment(const WeightSequence& seq) {
  check_entries(seq.log_values);
  std::size_t n = seq.size();
  if (n < 4) return Containment::inconclusive;
  std::vector<double> lm(n - 1), run_max(n - 1), fut_min(n - 1);
  for (std::size_t p = 1; p < n; ++p) lm[p - 1] = seq.log_little_m(p) / static_cast<double>(p);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lm.size(); ++i) run_max[i] = mx = std::max(mx, lm[i]);
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = lm.size(); i-- > 0;) fut_min[i] = mn = std::min(mn, lm[i]);

  double lo_slope = tail_slope(fut_min, 1);
  double hi_slope = tail_slope(run_max, 1);
  if (lo_slope > kFlatSlope) return Containment::beurling_strict;
  if (hi_slope > kFlatSlope) return Containment::roumieu_strict;
  if (std::fabs(hi_slope) <= kFlatSlope && std::fabs(lo_slope) <= kFlatSlope) return Containment::not_strict;
  return Containment::inconclusive;
}

}  // namespace qaw
