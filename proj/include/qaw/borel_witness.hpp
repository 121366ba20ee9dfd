#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qaw/classify.hpp"
#include "qaw/lambda_spaces.hpp"
#include "qaw/weight_matrix.hpp"

namespace qaw {

// Source of the coefficients omega_{j,k} (0 <= j < k) of the
// representation formula. Only their limit omega_{j,k} -> 1 is known, so
// the model is pluggable: `unit` is identically 1, `perturbed` is
// 1 + delta (j+1)/k^decay.
struct CoefficientModel {
  enum class Id { unit, perturbed };
  Id id = Id::unit;
  double delta = 0.0;
  double decay = 1.0;

  static CoefficientModel unit() { return {}; }
  static CoefficientModel perturbed(double delta, double decay = 1.0) {
    if (!(delta > 0) || !(decay > 0)) throw ParameterError("perturbed model needs delta > 0 and decay > 0");
    return {Id::perturbed, delta, decay};
  }

  std::string label() const {
    if (id == Id::unit) return "unit";
    return "perturbed:" + std::to_string(delta) + ":" + std::to_string(decay);
  }

  // ln |omega_{j,k} - 1|
  LogReal log_abs_deviation(const LogReal& j, const LogReal& k) const {
    if (id == Id::unit) return neg_log_inf();
    return log(LogReal(delta)) + log(j + 1) - LogReal(decay) * log(k);
  }
  // ln omega_{j,k}; the model keeps omega positive.
  LogReal log_value(const LogReal& j, const LogReal& k) const {
    if (id == Id::unit) return LogReal(0);
    return boost::multiprecision::log1p(exp(log_abs_deviation(j, k)));
  }
};

enum class WitnessSource { roumieu_single, beurling_matrix };

inline const char* source_name(WitnessSource s) {
  return s == WitnessSource::roumieu_single ? "roumieu_single" : "beurling_matrix";
}

struct WitnessStep {
  std::size_t p = 0;
  Index k;
  LogReal log_F;                         // ln F_{k_p}
  LogReal log_constraint = neg_log_inf(); // ln of the selection sum; must be <= 0
  double log_root_F = 0;                 // ln F_{k_p} / k_p
  double log_schedule = 0;               // ln of the growth target at p
};

struct Witness {
  FormalSequence F;
  std::vector<Index> k_indices;
  double a0 = 0.5;
  WitnessSource source = WitnessSource::roumieu_single;
  std::string target;
  std::string model;
  std::string m_label;
  std::vector<WitnessStep> constraint_log;
};

struct BudgetError : Error {
  Witness partial;
  BudgetError(const std::string& what, Witness w) : Error(what), partial(std::move(w)) {}
  const char* kind() const noexcept override { return "budget"; }
};

struct WitnessTarget {
  std::optional<WeightSequence> sequence;  // Roumieu: a single N
  std::optional<WeightMatrix> matrix;      // Beurling: level 1/(p+1) at step p

  static WitnessTarget single(WeightSequence s) { return {std::move(s), std::nullopt}; }
  static WitnessTarget beurling(WeightMatrix m) { return {std::nullopt, std::move(m)}; }
  WitnessSource source() const { return sequence ? WitnessSource::roumieu_single : WitnessSource::beurling_matrix; }
  std::string name() const { return sequence ? sequence->name : matrix->name; }
};

struct WitnessOptions {
  double a0 = 0.5;
  std::function<double(std::size_t)> growth = [](std::size_t p) { return static_cast<double>(p); };
  std::size_t max_p = 8;
  Index min_index = 1;
  double budget_digits = 30000;      // indices above 10^budget_digits are out of reach
  std::size_t check_prefix = 2048;   // window for the precondition checks
  bool check_preconditions = true;
  std::string m_label = "M";
};

inline double beurling_level(std::size_t p) { return 1.0 / static_cast<double>(p + 1); }

namespace detail {

inline LogReal log_sqrt_n(const WeightSequence& n, const LogReal& k) {
  auto lm = n.log_little_m_at(k);
  if (!lm) throw SizeError("target sequence cannot be evaluated past its prefix");
  return *lm / 2;
}

inline bool is_integer_exact(const LogReal& k) { return k < LogReal("1e45"); }

// Smallest integer k >= start with pred(k), for pred false-then-true.
inline std::optional<LogReal> smallest_true(const LogReal& start, const LogReal& log_budget,
                                            const std::function<bool(const LogReal&)>& pred) {
  using boost::multiprecision::floor;
  LogReal k = start;
  for (int i = 0; i < 64; ++i, k += 1)
    if (pred(k)) return k;
  LogReal lo = k - 1, hi;
  LogReal x = log(lo);
  LogReal step = 1;
  while (true) {
    LogReal xh = x + step;
    if (xh >= log_budget) {
      hi = boost::multiprecision::ceil(exp(log_budget));
      if (!pred(hi)) return std::nullopt;
      break;
    }
    hi = boost::multiprecision::ceil(exp(xh));
    if (pred(hi)) break;
    lo = hi;
    x = xh;
    step *= 2;
  }
  // pred(lo) false, pred(hi) true.
  while (hi - lo > 1) {
    LogReal mid;
    if (is_integer_exact(hi)) {
      mid = floor((lo + hi) / 2);
    } else {
      if ((hi - lo) / hi < LogReal("1e-45")) break;
      mid = floor(exp((log(lo) + log(hi)) / 2));
      if (mid <= lo || mid >= hi) mid = floor((lo + hi) / 2);
    }
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

inline void check_witness_target(const WitnessTarget& target, const WitnessOptions& opt) {
  auto check = [&](const WeightSequence& s, bool beurling) {
    auto w = s.generated() ? with_prefix(s, opt.check_prefix) : s;
    if (qa_diagnose(w).trend != Trend::diverging)
      throw PreconditionError("target " + s.name + " is not quasianalytic on the window");
    auto c = strict_analytic_containment(w);
    bool ok = c == Containment::beurling_strict || (!beurling && c == Containment::roumieu_strict);
    if (!ok) throw PreconditionError("target " + s.name + " does not strictly contain the analytic class on the window");
  };
  if (target.sequence) check(*target.sequence, false);
  else
    for (std::size_t p = 1; p <= opt.max_p; ++p) check(target.matrix->full_level(beurling_level(p)), true);
}

// Inductive choice of the lacunary support k_1 < k_2 < ... : k_p is the
// smallest index past k_{p-1} where both the root growth F^{1/k} >= g(p)
// and the selection constraint sum_{q<p} |omega_{k_q,k} - 1| F_{k_q} a0^{k_q} <= 1
// hold. Both predicates are monotone in k for the generated families.
inline Witness build_witness(const WitnessTarget& target, const CoefficientModel& model,
                             const WitnessOptions& opt = {}) {
  if (!(opt.a0 > 0 && opt.a0 <= 1)) throw ParameterError("a0 must lie in (0,1]");
  if (opt.max_p == 0) throw ParameterError("max_p must be >= 1");
  if (opt.min_index < 1) throw ParameterError("min index must be >= 1");
  if (!target.sequence && !target.matrix) throw ParameterError("witness target is empty");
  for (std::size_t p = 2; p <= opt.max_p; ++p)
    if (!(opt.growth(p) > opt.growth(p - 1))) throw ParameterError("growth schedule must be increasing");
  if (opt.check_preconditions) check_witness_target(target, opt);

  Witness w;
  w.a0 = opt.a0;
  w.source = target.source();
  w.target = target.name();
  w.model = model.label();
  w.m_label = opt.m_label;

  const LogReal ln_a0 = log(LogReal(opt.a0));
  const LogReal log_budget = LogReal(opt.budget_digits) * boost::math::constants::ln_ten<LogReal>();
  std::vector<LogReal> ks, weights;  // k_q and ln(F_{k_q} a0^{k_q})
  LogReal prev = to_log_real(opt.min_index) - 1;

  for (std::size_t p = 1; p <= opt.max_p; ++p) {
    WeightSequence level;
    if (target.matrix) level = target.matrix->full_level(beurling_level(p));
    const WeightSequence& n = target.sequence ? *target.sequence : level;
    double g = opt.growth(p);
    if (!(g > 0)) throw ParameterError("growth schedule must be positive");
    LogReal log_g = log(LogReal(g));

    auto log_constraint = [&](const LogReal& k) {
      ScaledSum s;
      for (std::size_t q = 0; q < ks.size(); ++q) s.add(1, model.log_abs_deviation(ks[q], k) + weights[q]);
      return s.value().log_abs;
    };
    auto pred = [&](const LogReal& k) {
      std::optional<LogReal> lm = n.log_little_m_at(k);
      if (!lm) return false;
      if (*lm / 2 < k * log_g) return false;
      return log_constraint(k) <= 0;
    };
    auto k = detail::smallest_true(prev + 1, log_budget, pred);
    if (!k) throw BudgetError("no admissible index below 10^" + std::to_string(opt.budget_digits) +
                                  " at p = " + std::to_string(p),
                              std::move(w));

    WitnessStep st;
    st.p = p;
    st.k = static_cast<Index>(*k);
    st.log_F = detail::log_sqrt_n(n, *k);
    st.log_constraint = log_constraint(*k);
    st.log_root_F = static_cast<double>(st.log_F / *k);
    st.log_schedule = static_cast<double>(log_g);
    w.constraint_log.push_back(st);
    w.k_indices.push_back(st.k);
    w.F.support.push_back(st.k);
    w.F.log_magnitudes.push_back(st.log_F);
    w.F.signs.push_back(1);
    ks.push_back(*k);
    weights.push_back(st.log_F + *k * ln_a0);
    prev = *k;
  }
  return w;
}

// F_k = sqrt(n_k) on a given support; a fixture for checking evaluations.
inline FormalSequence lacunary_sequence(const WeightSequence& n, const std::vector<Index>& support) {
  FormalSequence f;
  for (const auto& k : support) {
    f.support.push_back(k);
    f.log_magnitudes.push_back(detail::log_sqrt_n(n, to_log_real(k)));
    f.signs.push_back(1);
  }
  f.validate();
  return f;
}

// For each k: sum_{j<k} omega_{j,k} b_j a^j as (sign, ln|.|).
inline std::vector<SignedLog> partial_sums(const FormalSequence& b, const CoefficientModel& model, double a,
                                           const std::vector<Index>& k_list) {
  if (!(a > 0 && a <= 1)) throw ParameterError("partial_sums: a must lie in (0,1]");
  for (std::size_t i = 1; i < k_list.size(); ++i)
    if (!(k_list[i - 1] < k_list[i])) throw ParameterError("partial_sums: k list must be increasing");
  struct Term {
    Index j;
    LogReal jr;
    int sign;
    LogReal log_abs;
  };
  std::vector<Term> terms;
  LogReal ln_a = log(LogReal(a));
  b.for_each_term([&](const Index& j, int sign, const LogReal& lm) {
    LogReal jr = to_log_real(j);
    terms.push_back({j, jr, sign, lm + jr * ln_a});
  });

  std::vector<SignedLog> out;
  if (model.id == CoefficientModel::Id::unit) {
    ScaledSum s;
    std::size_t next = 0;
    for (const auto& k : k_list) {
      while (next < terms.size() && terms[next].j < k) {
        s.add(terms[next].sign, terms[next].log_abs);
        ++next;
      }
      out.push_back(s.value());
    }
    return out;
  }
  for (const auto& k : k_list) {
    ScaledSum s;
    LogReal kr = to_log_real(k);
    for (const auto& t : terms) {
      if (!(t.j < k)) break;
      s.add(t.sign, t.log_abs + model.log_value(t.jr, kr));
    }
    out.push_back(s.value());
  }
  return out;
}

// Indices just past each support point, where the partial sums first see F_{k_p}.
inline std::vector<Index> past_indices(const std::vector<Index>& ks, std::size_t limit = SIZE_MAX) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < ks.size() && i < limit; ++i) out.push_back(ks[i] + 1);
  return out;
}

// F^lambda_j = F_j / j^lambda, with index 0 dropped.
inline std::vector<FormalSequence> lineability_family(const FormalSequence& F, const std::vector<double>& lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0)) throw ParameterError("lineability: lambdas must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (lambdas[i] == lambdas[j]) throw ParameterError("lineability: lambdas must be distinct");
  }
  std::vector<FormalSequence> out;
  for (double lam : lambdas) {
    FormalSequence f = F;
    if (!f.dense.empty()) f.dense[0] = 0.0;
    for (std::size_t j = 1; j < f.dense.size(); ++j) f.dense[j] /= std::pow(static_cast<double>(j), lam);
    std::vector<Index> sup;
    std::vector<LogReal> mags;
    std::vector<int> signs;
    for (std::size_t i = 0; i < f.support.size(); ++i) {
      if (f.support[i] == 0) continue;
      sup.push_back(f.support[i]);
      mags.push_back(f.log_magnitudes[i] - LogReal(lam) * log(to_log_real(f.support[i])));
      signs.push_back(f.signs[i]);
    }
    f.support = std::move(sup);
    f.log_magnitudes = std::move(mags);
    f.signs = std::move(signs);
    out.push_back(std::move(f));
  }
  return out;
}

// G = sum_l alpha_l F^{lambda_l}, evaluated as F_j * sum_l alpha_l j^{-lambda_l}
// with the slowest-decaying power factored out, so that huge log-magnitudes
// never get subtracted from each other.
inline FormalSequence lineability_combination(const FormalSequence& F, const std::vector<double>& lambdas,
                                              const std::vector<double>& alphas) {
  if (lambdas.size() != alphas.size() || lambdas.empty())
    throw ParameterError("lineability: lambdas and alphas differ in length");
  lineability_family({}, lambdas);  // validation only
  double lam_min = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < lambdas.size(); ++l)
    if (alphas[l] != 0) lam_min = std::min(lam_min, lambdas[l]);
  FormalSequence g;
  if (!std::isfinite(lam_min)) return g;
  auto factor = [&](const LogReal& lnj) {
    double s = 0;
    for (std::size_t l = 0; l < lambdas.size(); ++l)
      s += alphas[l] * std::exp(static_cast<double>(-LogReal(lambdas[l] - lam_min) * lnj));
    return s;
  };
  g.dense.assign(F.dense.size(), 0.0);
  for (std::size_t j = 1; j < F.dense.size(); ++j)
    g.dense[j] = F.dense[j] * factor(std::log(static_cast<double>(j))) / std::pow(static_cast<double>(j), lam_min);
  for (std::size_t i = 0; i < F.support.size(); ++i) {
    if (F.support[i] == 0) continue;
    LogReal lnj = log(to_log_real(F.support[i]));
    double s = factor(lnj);
    if (s == 0) continue;
    g.support.push_back(F.support[i]);
    g.log_magnitudes.push_back(F.log_magnitudes[i] - LogReal(lam_min) * lnj + LogReal(std::log(std::fabs(s))));
    g.signs.push_back(F.signs[i] * (s > 0 ? 1 : -1));
  }
  return g;
}

struct ProbeResult {
  double alpha = 0;
  bool exceeded = false;
  std::optional<Index> k;  // first k whose partial sum passed the bound
  SignedLog last;
};

struct ProbeScan {
  std::vector<ProbeResult> results;
  std::size_t bounded_count = 0;
  bool at_most_one_bounded = true;
};

// Partial sums of b + alpha F along the witness indices for each alpha.
// Two bounded alphas would bound the sums of F itself by 2P/|alpha - beta|.
inline ProbeScan probe_line_scan(const FormalSequence& b, const Witness& F, const CoefficientModel& model, double a,
                                 const std::vector<double>& alphas, double bound, std::size_t k_budget = SIZE_MAX) {
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (alphas[i] == alphas[j]) throw ParameterError("probe: alphas must be distinct");
  if (!(bound > 0)) throw ParameterError("probe: bound must be > 0");
  LogReal log_bound = log(LogReal(bound));
  auto ks = past_indices(F.k_indices, k_budget);
  ProbeScan scan;
  for (double alpha : alphas) {
    auto line = combine({{1.0, &b}, {alpha, &F.F}});
    auto sums = partial_sums(line, model, a, ks);
    ProbeResult r;
    r.alpha = alpha;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      r.last = sums[i];
      if (sums[i].sign != 0 && sums[i].log_abs > log_bound) {
        r.exceeded = true;
        r.k = ks[i];
        break;
      }
    }
    if (!r.exceeded) ++scan.bounded_count;
    scan.results.push_back(r);
  }
  scan.at_most_one_bounded = scan.bounded_count <= 1;
  return scan;
}

// Density step: at least one of b + eps F and b - eps F leaves every bound.
inline std::pair<ProbeResult, ProbeResult> density_step(const FormalSequence& b, const Witness& F,
                                                        const CoefficientModel& model, double a, double eps,
                                                        double bound, std::size_t k_budget = SIZE_MAX) {
  auto scan = probe_line_scan(b, F, model, a, {eps, -eps}, bound, k_budget);
  return {scan.results[0], scan.results[1]};
}

}  // namespace qaw
