#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qaw/sequence.hpp"

namespace qaw {

// A real coefficient sequence b. Small indices may live in `dense`
// (b_0..b_{D-1}); the sparse part holds indices >= D with log-magnitudes.
struct FormalSequence {
  std::vector<Index> support;
  std::vector<LogReal> log_magnitudes;
  std::vector<int> signs;
  std::vector<double> dense;

  bool is_zero() const {
    if (!support.empty()) return false;
    for (double v : dense)
      if (v != 0.0) return false;
    return true;
  }

  void validate() const {
    if (support.size() != log_magnitudes.size() || support.size() != signs.size())
      throw SchemaError("formal sequence: support, log_magnitudes and signs differ in length");
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (i > 0 && !(support[i - 1] < support[i])) throw SchemaError("formal sequence: support must be strictly increasing");
      if (support[i] < 0) throw SchemaError("formal sequence: negative index");
      if (support[i] < dense.size()) throw SchemaError("formal sequence: sparse index overlaps dense prefix");
      if (signs[i] != 1 && signs[i] != -1) throw SchemaError("formal sequence: signs must be +1 or -1");
      if (!boost::multiprecision::isfinite(log_magnitudes[i])) throw SchemaError("formal sequence: magnitudes must be finite");
    }
    for (double v : dense)
      if (!std::isfinite(v)) throw SchemaError("formal sequence: dense entries must be finite");
  }

  // Visits every nonzero term as (index, sign, ln|b_j|) in increasing index order.
  template <class F>
  void for_each_term(F&& f) const {
    for (std::size_t j = 0; j < dense.size(); ++j)
      if (dense[j] != 0.0) f(Index(j), dense[j] > 0 ? 1 : -1, log(LogReal(std::fabs(dense[j]))));
    for (std::size_t i = 0; i < support.size(); ++i) f(support[i], signs[i], log_magnitudes[i]);
  }
};

inline FormalSequence dense_sequence(std::vector<double> values) {
  FormalSequence b;
  b.dense = std::move(values);
  return b;
}

// c * b in exact log form: shift magnitudes by ln|c|, flip signs for c < 0.
inline FormalSequence scale(const FormalSequence& b, double c) {
  if (c == 0.0) return {};
  FormalSequence out = b;
  LogReal shift = log(LogReal(std::fabs(c)));
  int flip = c < 0 ? -1 : 1;
  for (auto& v : out.dense) v *= c;
  for (std::size_t i = 0; i < out.support.size(); ++i) {
    out.log_magnitudes[i] += shift;
    out.signs[i] *= flip;
  }
  return out;
}

// sum_i c_i b_i. Sparse terms falling into the longest dense prefix are
// folded into it as doubles.
inline FormalSequence combine(const std::vector<std::pair<double, const FormalSequence*>>& terms) {
  std::size_t dense_len = 0;
  for (const auto& [c, b] : terms) dense_len = std::max(dense_len, b->dense.size());
  std::vector<CompensatedSum> dense(dense_len);
  std::map<Index, ScaledSum> sparse;
  for (const auto& [c, b] : terms) {
    if (c == 0.0) continue;
    LogReal shift = log(LogReal(std::fabs(c)));
    int flip = c < 0 ? -1 : 1;
    b->for_each_term([&](const Index& j, int sign, const LogReal& lm) {
      if (j < dense_len) {
        double v = static_cast<double>(exp(lm + shift));
        if (!std::isfinite(v)) throw ParameterError("combine: dense entry overflows double range");
        dense[static_cast<std::size_t>(j)].add(sign * flip * v);
      } else {
        sparse[j].add(sign * flip, lm + shift);
      }
    });
  }
  FormalSequence out;
  out.dense.resize(dense_len);
  for (std::size_t j = 0; j < dense_len; ++j) out.dense[j] = dense[j].value();
  for (auto& [j, acc] : sparse) {
    SignedLog v = acc.value();
    if (v.sign == 0) continue;
    out.support.push_back(j);
    out.log_magnitudes.push_back(v.log_abs);
    out.signs.push_back(v.sign);
  }
  return out;
}

struct SeminormResult {
  LogReal log_value = neg_log_inf();  // ln |b|_h; -inf for the zero sequence
  std::optional<Index> argmax;
  std::size_t out_of_window = 0;      // terms past an explicit sequence's prefix
};

// sup_j |b_j| / (h^j m_j) in log form.
inline SeminormResult seminorm(const FormalSequence& b, const WeightSequence& seq, double h) {
  if (!(h > 0)) throw ParameterError("seminorm: h must be > 0");
  SeminormResult r;
  LogReal lh = log(LogReal(h));
  b.for_each_term([&](const Index& j, int, const LogReal& lm) {
    LogReal k = to_log_real(j);
    auto lmj = seq.log_little_m_at(k);
    if (!lmj) {
      ++r.out_of_window;
      return;
    }
    LogReal v = lm - k * lh - *lmj;
    if (!r.argmax || v > r.log_value) {
      r.log_value = v;
      r.argmax = j;
    }
  });
  return r;
}

enum class Membership { roumieu_window, beurling_window, outside_window };

inline const char* membership_name(Membership m) {
  switch (m) {
    case Membership::roumieu_window: return "roumieu_window";
    case Membership::beurling_window: return "beurling_window";
    case Membership::outside_window: return "outside_window";
  }
  return "outside_window";
}

inline std::vector<double> h_grid() {
  std::vector<double> g;
  for (int k = -20; k <= 20; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

inline constexpr double kRateSlope = 0.05;

// Log-rate of b against m along the support:
// rho_j = (ln|b_j| - ln m_j)/j. |b|_h is finite iff rho_j - ln h stays
// bounded above by 0 eventually, so the window verdict comes from the
// tail of rho, fitted against ln ln(e + j).
struct RateProfile {
  std::vector<double> u;    // ln ln(e + j)
  std::vector<double> rho;
  std::size_t out_of_window = 0;
  double slope = 0;
  double tail_max = -std::numeric_limits<double>::infinity();
  bool falling = false;
};

inline RateProfile rate_profile(const FormalSequence& b, const WeightSequence& seq) {
  RateProfile rp;
  static const LogReal e = boost::math::constants::e<LogReal>();
  b.for_each_term([&](const Index& j, int, const LogReal& lm) {
    if (j == 0) return;
    LogReal k = to_log_real(j);
    auto lmj = seq.log_little_m_at(k);
    if (!lmj) {
      ++rp.out_of_window;
      return;
    }
    rp.rho.push_back(static_cast<double>((lm - *lmj) / k));
    rp.u.push_back(static_cast<double>(log(log(e + k))));
  });
  std::size_t n = rp.rho.size();
  if (n == 0) return rp;
  std::size_t len = std::min(n, std::max<std::size_t>(3, n / 4));
  std::vector<double> tu(rp.u.end() - len, rp.u.end()), tr(rp.rho.end() - len, rp.rho.end());
  rp.slope = ls_slope(tu, tr);
  for (double v : tr) rp.tail_max = std::max(rp.tail_max, v);
  rp.falling = tr.back() < tr.front();
  return rp;
}

// Whether |b|_h is finite on the window, for each h of the grid.
inline std::vector<bool> finite_on_grid(const RateProfile& rp, const std::vector<double>& grid) {
  std::vector<bool> out(grid.size(), false);
  bool few = rp.rho.size() < 2;
  bool to_minus_inf = rp.slope < -kRateSlope && rp.falling;
  bool bounded = rp.slope <= kRateSlope;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (few || to_minus_inf) out[i] = true;
    else if (bounded) out[i] = std::log(grid[i]) >= rp.tail_max - 1e-9;
  }
  return out;
}

inline Membership classify_membership(const FormalSequence& b, const WeightSequence& seq) {
  auto grid = h_grid();
  auto fin = finite_on_grid(rate_profile(b, seq), grid);
  if (fin.front()) return Membership::beurling_window;
  for (bool f : fin)
    if (f) return Membership::roumieu_window;
  return Membership::outside_window;
}

// Matrix version over materialized levels: Beurling needs every level,
// Roumieu needs some level.
inline Membership classify_membership(const FormalSequence& b, const std::vector<WeightSequence>& levels) {
  if (levels.empty()) throw ParameterError("classify_membership: no levels");
  bool all_beurling = true, any_in = false;
  for (const auto& s : levels) {
    auto m = classify_membership(b, s);
    all_beurling = all_beurling && m == Membership::beurling_window;
    any_in = any_in || m != Membership::outside_window;
  }
  if (all_beurling) return Membership::beurling_window;
  return any_in ? Membership::roumieu_window : Membership::outside_window;
}

}  // namespace qaw
