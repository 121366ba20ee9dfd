#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qaw/classify.hpp"

namespace qaw {

enum class MatrixFamily { theta_powered_log, table };

// A one-parameter family lambda -> M^(lambda). The closed family is
// M^(l)_p = p! (ln(e+p))^{theta(l) p} with theta(l) = l/(1+l); a table
// answers with its nearest level.
struct WeightMatrix {
  MatrixFamily family = MatrixFamily::theta_powered_log;
  std::vector<double> table_levels;
  std::vector<WeightSequence> table;
  std::vector<double> sampled_levels;
  std::string name = "theta-powered-log";

  static double theta(double lambda) { return lambda / (1.0 + lambda); }

  WeightSequence level(double lambda, std::size_t prefix) const {
    if (!(lambda > 0) || !std::isfinite(lambda)) throw ParameterError("matrix level must be > 0");
    if (family == MatrixFamily::theta_powered_log)
      return make_sequence(Generator::factorial_log_power(theta(lambda)), prefix,
                           name + "[" + std::to_string(lambda) + "]");
    if (table.empty()) throw ParameterError("table matrix has no levels");
    std::size_t best = 0;
    for (std::size_t i = 1; i < table_levels.size(); ++i)
      if (std::fabs(table_levels[i] - lambda) < std::fabs(table_levels[best] - lambda)) best = i;
    if (table[best].size() < prefix && !table[best].generated())
      throw SizeError("table level shorter than requested prefix");
    return with_prefix(table[best], prefix);
  }

  // The level at its natural length: a short generated prefix (it extends
  // itself) or the whole table entry.
  WeightSequence full_level(double lambda) const {
    if (family == MatrixFamily::theta_powered_log) return level(lambda, kMinGeneratedPrefix);
    if (table.empty()) throw ParameterError("table matrix has no levels");
    std::size_t best = 0;
    for (std::size_t i = 1; i < table_levels.size(); ++i)
      if (std::fabs(table_levels[i] - lambda) < std::fabs(table_levels[best] - lambda)) best = i;
    return table[best];
  }

  std::vector<WeightSequence> materialize(const std::vector<double>& levels, std::size_t prefix) const {
    std::vector<WeightSequence> out;
    for (double l : levels) out.push_back(level(l, prefix));
    return out;
  }
};

inline WeightMatrix canonical_matrix() { return {}; }

inline WeightMatrix table_matrix(std::vector<double> levels, std::vector<WeightSequence> seqs,
                                 std::string name = "table") {
  if (levels.size() != seqs.size() || levels.empty()) throw SchemaError("table matrix: levels and sequences differ");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i - 1] < levels[i])) throw SchemaError("table matrix: levels must be increasing");
  WeightMatrix m;
  m.family = MatrixFamily::table;
  m.table_levels = levels;
  m.sampled_levels = levels;
  m.table = std::move(seqs);
  m.name = std::move(name);
  return m;
}

// Largest violation of M^(a)_p <= M^(b)_p over consecutive levels (<= 0 when ordered).
inline double order_defect(const std::vector<WeightSequence>& levels) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < levels.size(); ++i) {
    std::size_t n = std::min(levels[i - 1].size(), levels[i].size());
    for (std::size_t p = 0; p < n; ++p)
      worst = std::max(worst, levels[i - 1].log_values[p] - levels[i].log_values[p]);
  }
  return worst;
}

struct MatrixQaReport {
  std::vector<double> levels;
  std::vector<QaReport> reports;
  bool quasianalytic_window = false;
};

inline MatrixQaReport matrix_qa_diagnose(const WeightMatrix& mat, const std::vector<double>& levels,
                                         std::size_t prefix) {
  if (levels.empty()) throw ParameterError("matrix_qa_diagnose: levels must be non-empty");
  MatrixQaReport r;
  r.levels = levels;
  r.quasianalytic_window = true;
  for (double l : levels) {
    r.reports.push_back(qa_diagnose(mat.level(l, prefix)));
    r.quasianalytic_window = r.quasianalytic_window && r.reports.back().trend == Trend::diverging;
  }
  return r;
}

struct Block {
  std::size_t level = 0;  // i, 1-based
  double d = 0;
  std::size_t start = 0;  // j_i
  std::size_t end = 0;    // j_{i+1}, exclusive
  double certificate = 0; // sum over the block of (M^(i)_j)^{-1/j}
  bool completed = false;
  double max_log_ratio_root = 0;  // max over the block of (ln M^(1)_j - ln L~_j)/j
  bool dominated = true;          // levels 1..i all below L~ by the factor d_i
};

struct DominationResult {
  std::vector<Block> blocks;
  WeightSequence L_tilde;
  WeightSequence L;
  std::size_t completed_blocks = 0;

  std::vector<std::size_t> block_starts() const {
    std::vector<std::size_t> out;
    for (const auto& b : blocks) out.push_back(b.start);
    return out;
  }
};

struct IncompleteConstruction : Error {
  DominationResult partial;
  IncompleteConstruction(const std::string& what, DominationResult p) : Error(what), partial(std::move(p)) {}
  const char* kind() const noexcept override { return "incomplete_construction"; }
};

inline std::vector<double> default_d_schedule(std::size_t n) {
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(i + 2);
  return d;
}

// Diagonal construction: block i uses level i scaled by d_i^j, blocks are
// as short as possible subject to their certificate reaching d_i, and the
// result is the log-convex minorant of the blockwise sequence.
inline DominationResult dominate(const WeightMatrix& mat, const std::vector<double>& d_schedule,
                                 std::size_t prefix) {
  if (d_schedule.empty() || d_schedule[0] < 1) throw ParameterError("d schedule must start at d_1 >= 1");
  for (std::size_t i = 1; i < d_schedule.size(); ++i)
    if (!(d_schedule[i - 1] < d_schedule[i])) throw ParameterError("d schedule must be strictly increasing");
  if (prefix < kMinGeneratedPrefix) throw SizeError("prefix must be >= 8");

  DominationResult r;
  std::vector<double> lt(prefix, 0.0);
  std::vector<WeightSequence> levels;  // levels[i-1] = M^(i)
  auto level = [&](std::size_t i) -> const WeightSequence& {
    while (levels.size() < i) levels.push_back(mat.level(static_cast<double>(levels.size() + 1), prefix));
    return levels[i - 1];
  };

  std::size_t j = 1;
  for (std::size_t i = 1; i <= d_schedule.size() && j < prefix; ++i) {
    const auto& mi = level(i);
    Block b;
    b.level = i;
    b.d = d_schedule[i - 1];
    b.start = j;
    double ld = std::log(b.d);
    CompensatedSum cert;
    for (; j < prefix; ++j) {
      lt[j] = static_cast<double>(j) * ld + mi.log_values[j];
      cert.add(std::exp(-mi.log_values[j] / static_cast<double>(j)));
      if (cert.value() >= b.d && i < d_schedule.size()) {
        b.completed = true;
        ++j;
        break;
      }
    }
    b.end = j;
    b.certificate = cert.value();
    if (i == d_schedule.size() && b.certificate >= b.d) b.completed = true;
    r.blocks.push_back(b);
  }

  r.L_tilde.log_values = lt;
  r.L_tilde.name = "L~";
  for (auto& b : r.blocks) {
    b.max_log_ratio_root = -std::numeric_limits<double>::infinity();
    double bound = -std::log(b.d) + 1e-12;
    for (std::size_t lam = 1; lam <= b.level; ++lam) {
      const auto& ml = level(lam);
      for (std::size_t q = b.start; q < b.end; ++q) {
        double v = (ml.log_values[q] - lt[q]) / static_cast<double>(q);
        if (lam == 1) b.max_log_ratio_root = std::max(b.max_log_ratio_root, v);
        if (v > bound) b.dominated = false;
      }
    }
    if (b.completed) ++r.completed_blocks;
  }
  auto lc = lc_minorant(r.L_tilde);
  r.L = lc.minorant;
  r.L.name = "L";
  if (r.completed_blocks < 2)
    throw IncompleteConstruction("prefix exhausted before two blocks completed", std::move(r));
  return r;
}

}  // namespace qaw
