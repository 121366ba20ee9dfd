#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qaw/log_domain.hpp"

namespace qaw {

enum class Kind { explicit_values, gevrey, factorial_log_power, custom_formula };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::explicit_values: return "explicit";
    case Kind::gevrey: return "gevrey";
    case Kind::factorial_log_power: return "factorial_log_power";
    case Kind::custom_formula: return "custom_formula";
  }
  return "explicit";
}

// Generator provenance. `param` is s for gevrey and theta for
// factorial_log_power; `formula` names a custom formula.
struct Generator {
  Kind kind = Kind::explicit_values;
  double param = 0.0;
  std::string formula;

  static Generator explicit_values() { return {}; }
  static Generator gevrey(double s) { return {Kind::gevrey, s, {}}; }
  static Generator factorial_log_power(double theta) { return {Kind::factorial_log_power, theta, {}}; }
  static Generator custom(std::string id) { return {Kind::custom_formula, 0.0, std::move(id)}; }
};

inline const std::vector<std::string>& custom_formula_ids() {
  static const std::vector<std::string> ids = {"factorial", "factorial_loglog"};
  return ids;
}

inline void validate_generator(const Generator& g) {
  switch (g.kind) {
    case Kind::explicit_values: return;
    case Kind::gevrey:
      if (!(g.param > 0) || !std::isfinite(g.param))
        throw ParameterError("gevrey exponent s must be > 0");
      return;
    case Kind::factorial_log_power:
      if (!(g.param > 0 && g.param <= 1))
        throw ParameterError("factorial_log_power theta must lie in (0,1]");
      return;
    case Kind::custom_formula:
      for (const auto& id : custom_formula_ids())
        if (id == g.formula) return;
      throw ParameterError("unknown custom formula id: " + g.formula);
  }
}

namespace detail {

// ln m_p = ln M_p - ln p! for a generated sequence, at real index k >= 0.
inline LogReal generator_log_little_m(const Generator& g, const LogReal& k) {
  using boost::multiprecision::log;
  static const LogReal e = boost::math::constants::e<LogReal>();
  switch (g.kind) {
    case Kind::gevrey: return LogReal(g.param) * ln_factorial(k);
    case Kind::factorial_log_power: return LogReal(g.param) * k * log(log(e + k));
    case Kind::custom_formula:
      if (g.formula == "factorial") return LogReal(0);
      if (g.formula == "factorial_loglog") {
        static const LogReal ee = exp(e);
        return k * log(log(log(ee + k)));
      }
      break;
    case Kind::explicit_values: break;
  }
  throw ParameterError("sequence has no generator formula");
}

inline double generator_log_little_m(const Generator& g, std::size_t p) {
  double k = static_cast<double>(p);
  switch (g.kind) {
    case Kind::gevrey: return g.param * ln_factorial(p);
    case Kind::factorial_log_power: return g.param * k * std::log(std::log(std::numbers::e + k));
    case Kind::custom_formula:
      if (g.formula == "factorial") return 0.0;
      if (g.formula == "factorial_loglog") return k * std::log(std::log(std::log(std::exp(std::numbers::e) + k)));
      break;
    case Kind::explicit_values: break;
  }
  throw ParameterError("sequence has no generator formula");
}

}  // namespace detail

// A positive sequence M_0..M_{P-1} stored as ln M_p.
struct WeightSequence {
  std::vector<double> log_values;
  Generator generator;
  std::string name;

  std::size_t size() const { return log_values.size(); }
  bool generated() const { return generator.kind != Kind::explicit_values; }

  double log_little_m(std::size_t p) const { return log_values.at(p) - ln_factorial(p); }

  // ln m_k at an arbitrary index, in extended precision for generated
  // sequences (which also extend past the prefix); explicit ones answer
  // from the stored prefix only.
  std::optional<LogReal> log_little_m_at(const LogReal& k) const {
    if (generated()) return detail::generator_log_little_m(generator, k);
    if (k < LogReal(size())) return LogReal(log_little_m(static_cast<std::size_t>(k)));
    return std::nullopt;
  }
  std::optional<LogReal> log_value_at(const LogReal& k) const {
    if (generated()) return detail::generator_log_little_m(generator, k) + ln_factorial(k);
    if (k < LogReal(size())) return LogReal(log_values[static_cast<std::size_t>(k)]);
    return std::nullopt;
  }
};

inline void check_entries(const std::vector<double>& lv) {
  if (lv.empty()) throw SizeError("sequence must have at least one entry");
  if (lv[0] != 0.0) throw ParameterError("sequence must be normalized: M_0 = 1");
  for (double x : lv)
    if (!std::isfinite(x)) throw ParameterError("sequence entries must be finite and positive");
}

inline WeightSequence from_log_values(std::vector<double> lv, std::string name = "explicit") {
  check_entries(lv);
  return {std::move(lv), Generator::explicit_values(), std::move(name)};
}

inline WeightSequence from_values(const std::vector<double>& values, std::string name = "explicit") {
  std::vector<double> lv;
  lv.reserve(values.size());
  for (double v : values) {
    if (!(v > 0) || !std::isfinite(v)) throw ParameterError("raw sequence values must be positive and finite");
    lv.push_back(std::log(v));
  }
  return from_log_values(std::move(lv), std::move(name));
}

inline std::string default_name(const Generator& g) {
  switch (g.kind) {
    case Kind::gevrey: return "gevrey(" + std::to_string(g.param) + ")";
    case Kind::factorial_log_power: return "factorial_log_power(" + std::to_string(g.param) + ")";
    case Kind::custom_formula: return g.formula;
    case Kind::explicit_values: break;
  }
  return "explicit";
}

inline constexpr std::size_t kMinGeneratedPrefix = 8;

inline WeightSequence make_sequence(const Generator& g, std::size_t prefix, std::string name = {}) {
  if (g.kind == Kind::explicit_values) throw ParameterError("explicit sequences are built from values");
  validate_generator(g);
  if (prefix < kMinGeneratedPrefix) throw SizeError("prefix must be >= 8");
  WeightSequence s;
  s.generator = g;
  s.name = name.empty() ? default_name(g) : std::move(name);
  s.log_values.resize(prefix);
  for (std::size_t p = 0; p < prefix; ++p)
    s.log_values[p] = p == 0 ? 0.0 : detail::generator_log_little_m(g, p) + ln_factorial(p);
  return s;
}

// Same sequence with a shorter or equal prefix. Generated ones may also grow.
inline WeightSequence with_prefix(const WeightSequence& s, std::size_t prefix) {
  if (prefix <= s.size()) {
    WeightSequence t = s;
    t.log_values.resize(prefix);
    return t;
  }
  if (!s.generated()) throw SizeError("explicit sequence cannot be extended past its prefix");
  return make_sequence(s.generator, prefix, s.name);
}

inline constexpr double kLogConvexTol = 1e-9;

struct ConvexityVerdict {
  bool log_convex = true;
  std::optional<std::size_t> first_violation;
};

inline ConvexityVerdict is_log_convex(const WeightSequence& s, double tol = kLogConvexTol) {
  const auto& lv = s.log_values;
  for (std::size_t p = 1; p + 1 < lv.size(); ++p)
    if (lv[p - 1] + lv[p + 1] - 2 * lv[p] < -tol) return {false, p};
  return {};
}

// roots[p] = M_p^{1/p}; roots[0] = 1 by convention.
inline std::vector<double> log_roots(const WeightSequence& s) {
  std::vector<double> r(s.size(), 0.0);
  for (std::size_t p = 1; p < s.size(); ++p) r[p] = s.log_values[p] / static_cast<double>(p);
  return r;
}

inline std::vector<double> roots(const WeightSequence& s) {
  auto r = log_roots(s);
  for (double& x : r) x = std::exp(x);
  return r;
}

// quotients[p] = M_p / M_{p-1}; quotients[0] = 1 by convention.
inline std::vector<double> quotients(const WeightSequence& s) {
  std::vector<double> q(s.size(), 1.0);
  for (std::size_t p = 1; p < s.size(); ++p) q[p] = std::exp(s.log_values[p] - s.log_values[p - 1]);
  return q;
}

inline WeightSequence little_m(const WeightSequence& s) {
  WeightSequence m;
  m.name = "m[" + s.name + "]";
  m.log_values.resize(s.size());
  for (std::size_t p = 0; p < s.size(); ++p) m.log_values[p] = s.log_little_m(p);
  return m;
}

// Inverse of little_m: M_p = p! m_p.
inline WeightSequence from_little_m(const WeightSequence& m, std::string name = "explicit") {
  std::vector<double> lv(m.size());
  for (std::size_t p = 0; p < m.size(); ++p) lv[p] = m.log_values[p] + ln_factorial(p);
  return from_log_values(std::move(lv), std::move(name));
}

}  // namespace qaw
