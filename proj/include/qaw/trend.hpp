#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qaw {

enum class Trend { diverging, converging, inconclusive };

inline const char* trend_name(Trend t) {
  switch (t) {
    case Trend::diverging: return "diverging";
    case Trend::converging: return "converging";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct TrendFit {
  Trend verdict = Trend::inconclusive;
  std::string best_model;
  double divergent_score = std::numeric_limits<double>::infinity();
  double convergent_score = std::numeric_limits<double>::infinity();
  std::size_t window_points = 0;
};

struct TrendOptions {
  double margin = 0.9;      // winner's score must be below margin * loser's
  std::size_t samples = 64; // geometric samples over the window
};

namespace detail {

struct AffineFit {
  double a = 0, b = 0, score = std::numeric_limits<double>::infinity();
};

// Fit y = a + b g(x); score is RMS residual over RMS deviation of y.
inline AffineFit fit_affine(const std::vector<double>& g, const std::vector<double>& y) {
  std::size_t n = g.size();
  double mg = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mg += g[i];
    my += y[i];
  }
  mg /= n;
  my /= n;
  double sgg = 0, sgy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sgg += (g[i] - mg) * (g[i] - mg);
    sgy += (g[i] - mg) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  AffineFit f;
  if (sgg <= 0 || syy <= 0) return f;
  f.b = sgy / sgg;
  f.a = my - f.b * mg;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.a - f.b * g[i];
    rss += r * r;
  }
  f.score = std::sqrt(rss / syy);
  return f;
}

}  // namespace detail

// Window verdict on whether ys(x) keeps growing without bound. Models
// a + b ln x and a + b ln ln x stand for divergence; a + b x^-c for
// c in {1/2, 1, 2} stand for convergence. Only x in [sqrt(x_max), x_max]
// is used.
inline TrendFit classify_series(const std::vector<double>& xs, const std::vector<double>& ys,
                                const TrendOptions& opt = {}) {
  TrendFit out;
  if (xs.size() != ys.size() || xs.size() < 8) return out;
  double x_max = xs.back();
  if (!(x_max > 1)) return out;
  double x_min = std::sqrt(x_max);

  std::vector<std::size_t> pick;
  {
    std::size_t i = 0;
    double lo = std::log(x_min), hi = std::log(x_max);
    for (std::size_t s = 0; s < opt.samples; ++s) {
      double target = std::exp(lo + (hi - lo) * static_cast<double>(s) / (opt.samples - 1));
      while (i + 1 < xs.size() && xs[i] < target) ++i;
      if (xs[i] >= x_min && (pick.empty() || pick.back() != i)) pick.push_back(i);
    }
  }
  out.window_points = pick.size();
  if (pick.size() < 6) return out;

  std::vector<double> x, y;
  for (auto i : pick) {
    x.push_back(xs[i]);
    y.push_back(ys[i]);
  }
  double my = 0, dev = 0;
  for (double v : y) my += v;
  my /= y.size();
  for (double v : y) dev += (v - my) * (v - my);
  double scale = 0;
  for (double v : y) scale = std::max(scale, std::fabs(v));
  if (std::sqrt(dev / y.size()) <= 1e-13 * std::max(1.0, scale)) {
    out.verdict = Trend::converging;
    out.best_model = "flat";
    out.convergent_score = 0;
    return out;
  }

  std::string div_name, conv_name;
  auto consider = [&](const char* name, bool divergent, auto g_of) {
    std::vector<double> g;
    for (double v : x) g.push_back(g_of(v));
    auto f = detail::fit_affine(g, y);
    if (divergent) {
      if (f.b > 0 && f.score < out.divergent_score) {
        out.divergent_score = f.score;
        div_name = name;
      }
    } else if (f.score < out.convergent_score) {
      out.convergent_score = f.score;
      conv_name = name;
    }
  };
  consider("log", true, [](double v) { return std::log(v); });
  if (x.front() > std::exp(1.0)) consider("loglog", true, [](double v) { return std::log(std::log(v)); });
  consider("inv_sqrt", false, [](double v) { return 1.0 / std::sqrt(v); });
  consider("inv", false, [](double v) { return 1.0 / v; });
  consider("inv_square", false, [](double v) { return 1.0 / (v * v); });

  out.best_model = out.divergent_score <= out.convergent_score ? div_name : conv_name;
  if (out.divergent_score < opt.margin * out.convergent_score) out.verdict = Trend::diverging;
  else if (out.convergent_score < opt.margin * out.divergent_score) out.verdict = Trend::converging;
  return out;
}

}  // namespace qaw
