#pragma once

#include <cmath>
#include <vector>

#include "qaw/sequence.hpp"

namespace qaw {

// Lower convex hull of (xs[i], ys[i]) with xs strictly increasing, by a
// monotone-chain scan. Collinear points stay on the hull.
inline std::vector<std::size_t> lower_hull(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (h.size() >= 2) {
      std::size_t o = h[h.size() - 2], a = h.back();
      double cross = (xs[a] - xs[o]) * (ys[i] - ys[o]) - (ys[a] - ys[o]) * (xs[i] - xs[o]);
      if (cross < 0) h.pop_back();
      else break;
    }
    h.push_back(i);
  }
  return h;
}

// Values of the hull polyline at every xs[i].
inline std::vector<double> hull_values(const std::vector<double>& xs, const std::vector<double>& ys,
                                       const std::vector<std::size_t>& hull) {
  std::vector<double> out(xs.size());
  for (std::size_t v = 0; v < hull.size(); ++v) out[hull[v]] = ys[hull[v]];
  for (std::size_t v = 0; v + 1 < hull.size(); ++v) {
    std::size_t a = hull[v], b = hull[v + 1];
    double slope = (ys[b] - ys[a]) / (xs[b] - xs[a]);
    for (std::size_t i = a + 1; i < b; ++i) out[i] = ys[a] + slope * (xs[i] - xs[a]);
  }
  return out;
}

struct RegularizationResult {
  WeightSequence minorant;
  std::vector<std::size_t> touched_indices;
  std::size_t boundary_provisional = 0;

  bool provisional(std::size_t p) const { return p + boundary_provisional >= minorant.size(); }
};

namespace detail {

inline std::vector<std::size_t> touched(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < a.size(); ++p)
    if (std::fabs(a[p] - b[p]) <= 1e-12 * std::max(1.0, std::fabs(b[p]))) out.push_back(p);
  return out;
}

}  // namespace detail

inline RegularizationResult lc_minorant(const WeightSequence& seq) {
  check_entries(seq.log_values);
  std::size_t n = seq.size();
  std::vector<double> xs(n);
  for (std::size_t p = 0; p < n; ++p) xs[p] = static_cast<double>(p);
  auto hull = lower_hull(xs, seq.log_values);
  RegularizationResult r;
  r.minorant.log_values = hull_values(xs, seq.log_values, hull);
  r.minorant.name = "lc[" + seq.name + "]";
  r.touched_indices = detail::touched(r.minorant.log_values, seq.log_values);

  // Only strict corners count; indices after the second-to-last corner
  // could still be undercut by points beyond the prefix.
  std::vector<std::size_t> corners;
  for (std::size_t v = 0; v < hull.size(); ++v) {
    if (v == 0 || v + 1 == hull.size()) {
      corners.push_back(hull[v]);
      continue;
    }
    std::size_t o = hull[v - 1], a = hull[v], b = hull[v + 1];
    double s1 = (seq.log_values[a] - seq.log_values[o]) / (xs[a] - xs[o]);
    double s2 = (seq.log_values[b] - seq.log_values[a]) / (xs[b] - xs[a]);
    if (s2 > s1) corners.push_back(a);
  }
  std::size_t anchor = corners.size() >= 2 ? corners[corners.size() - 2] : 0;
  r.boundary_provisional = n == 0 ? 0 : n - 1 - anchor;
  return r;
}

inline RegularizationResult increasing_root_minorant(const WeightSequence& seq) {
  check_entries(seq.log_values);
  std::size_t n = seq.size();
  if (n < 2) throw SizeError("increasing_root_minorant needs prefix >= 2");
  std::vector<double> rm(n, 0.0);
  rm[n - 1] = seq.log_values[n - 1] / static_cast<double>(n - 1);
  for (std::size_t p = n - 1; p-- > 1;)
    rm[p] = std::min(rm[p + 1], seq.log_values[p] / static_cast<double>(p));

  RegularizationResult r;
  r.minorant.name = "I[" + seq.name + "]";
  r.minorant.log_values.assign(n, 0.0);
  for (std::size_t p = 1; p < n; ++p) {
    // Keep exact input values where the future minimum is the point itself.
    double own = seq.log_values[p] / static_cast<double>(p);
    r.minorant.log_values[p] = rm[p] == own ? seq.log_values[p] : rm[p] * static_cast<double>(p);
  }
  r.touched_indices = detail::touched(r.minorant.log_values, seq.log_values);

  std::size_t start = 1;
  for (std::size_t p = n - 1; p >= 2; --p)
    if (rm[p - 1] < rm[p]) {
      start = p;
      break;
    }
  r.boundary_provisional = n - start;
  return r;
}

}  // namespace qaw
