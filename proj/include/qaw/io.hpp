#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qaw/borel_witness.hpp"
#include "qaw/weight_function.hpp"

namespace qaw::io {

using json = nlohmann::json;

// Doubles go out as JSON numbers; infinities as strings.
inline json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double get_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
      return std::stod(s);
    } catch (const std::exception&) {
    }
  }
  throw SchemaError("expected a number, got " + j.dump());
}

inline std::string log_real_str(const LogReal& x, int digits = std::numeric_limits<LogReal>::max_digits10) {
  if (boost::multiprecision::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x.str(digits, std::ios_base::scientific);
}

// Extended-range reals are written as strings at full precision.
inline json log_real(const LogReal& x) { return log_real_str(x); }

inline LogReal get_log_real(const json& j) {
  if (j.is_number()) return LogReal(j.get<double>());
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return log_inf();
    if (s == "-inf") return neg_log_inf();
    try {
      return LogReal(s);
    } catch (const std::exception&) {
    }
  }
  throw SchemaError("expected an extended real, got " + j.dump());
}

inline json index(const Index& k) {
  if (k <= Index(9007199254740992LL)) return k.convert_to<std::uint64_t>();
  return k.str();
}

inline Index get_index(const json& j) {
  if (j.is_number_unsigned()) return Index(j.get<std::uint64_t>());
  if (j.is_number_integer()) {
    auto v = j.get<std::int64_t>();
    if (v < 0) throw SchemaError("negative index");
    return Index(v);
  }
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw SchemaError("bad index string: " + s);
    return Index(s);
  }
  throw SchemaError("expected an index, got " + j.dump());
}

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field: ") + key);
  return j.at(key);
}

inline std::vector<double> get_doubles(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an array, got " + j.dump().substr(0, 60));
  std::vector<double> out;
  for (const auto& v : j) out.push_back(get_double(v));
  return out;
}

inline json doubles(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

// ---- weight sequences

inline json generator_params(const Generator& g) {
  switch (g.kind) {
    case Kind::gevrey: return {{"s", g.param}};
    case Kind::factorial_log_power: return {{"theta", g.param}};
    case Kind::custom_formula: return {{"id", g.formula}};
    case Kind::explicit_values: break;
  }
  return json::object();
}

inline json to_json(const WeightSequence& s) {
  return {{"name", s.name},
          {"kind", kind_name(s.generator.kind)},
          {"params", generator_params(s.generator)},
          {"log_values", doubles(s.log_values)}};
}

inline Generator generator_from_json(const json& j) {
  std::string kind = j.value("kind", std::string("explicit"));
  json params = j.value("params", json::object());
  auto param = [&](const char* key) {
    if (!params.contains(key)) throw SchemaError(std::string("missing generator parameter: ") + key);
    return get_double(params.at(key));
  };
  Generator g;
  if (kind == "explicit") g = Generator::explicit_values();
  else if (kind == "gevrey") g = Generator::gevrey(param("s"));
  else if (kind == "factorial_log_power") g = Generator::factorial_log_power(param("theta"));
  else if (kind == "custom_formula") {
    if (!params.contains("id") || !params.at("id").is_string()) throw SchemaError("missing generator parameter: id");
    g = Generator::custom(params.at("id").get<std::string>());
  } else
    throw SchemaError("unknown sequence kind: " + kind);
  validate_generator(g);
  return g;
}

// Explicit values win over the generator; a bare generator spec is
// generated at `prefix`.
inline WeightSequence sequence_from_json(const json& j, std::size_t prefix) {
  if (!j.is_object()) throw SchemaError("sequence must be a JSON object");
  Generator g = generator_from_json(j);
  std::string name = j.value("name", std::string());
  WeightSequence s;
  if (j.contains("log_values")) {
    s = from_log_values(get_doubles(j.at("log_values")), name.empty() ? "explicit" : name);
  } else if (j.contains("values")) {
    s = from_values(get_doubles(j.at("values")), name.empty() ? "explicit" : name);
  } else {
    if (g.kind == Kind::explicit_values) throw SchemaError("explicit sequence needs log_values or values");
    return make_sequence(g, prefix, name);
  }
  s.generator = g;
  return s;
}

// ---- matrices

inline json to_json(const WeightMatrix& m) {
  if (m.family == MatrixFamily::theta_powered_log)
    return {{"family", "theta-powered-log"}, {"name", m.name}, {"params", json::object()}, {"levels", doubles(m.sampled_levels)}};
  json seqs = json::array();
  for (const auto& s : m.table) seqs.push_back(to_json(s));
  return {{"family", "table"}, {"name", m.name}, {"params", {{"sequences", seqs}}}, {"levels", doubles(m.table_levels)}};
}

inline WeightMatrix matrix_from_json(const json& j, std::size_t prefix) {
  std::string fam = require(j, "family").get<std::string>();
  std::vector<double> levels = j.contains("levels") ? get_doubles(j.at("levels")) : std::vector<double>{};
  if (fam == "theta-powered-log") {
    WeightMatrix m = canonical_matrix();
    m.sampled_levels = levels;
    if (j.contains("name")) m.name = j.at("name").get<std::string>();
    return m;
  }
  if (fam == "table") {
    const json& params = require(j, "params");
    const json& seqs = require(params, "sequences");
    if (!seqs.is_array()) throw SchemaError("table sequences must be an array");
    std::vector<WeightSequence> out;
    for (const auto& s : seqs) out.push_back(sequence_from_json(s, prefix));
    return table_matrix(levels, std::move(out), j.value("name", std::string("table")));
  }
  throw SchemaError("unknown matrix family: " + fam);
}

// ---- weight functions

inline json to_json(const WeightFunction& w) {
  json j = {{"knots_t", doubles(w.knots_t)}, {"values", doubles(w.values)}};
  if (!w.formula.empty()) j["formula"] = w.formula;
  return j;
}

inline WeightFunction weight_function_from_json(const json& j) {
  if (j.contains("knots_t")) {
    auto w = from_samples(get_doubles(j.at("knots_t")), get_doubles(require(j, "values")));
    w.formula = j.value("formula", std::string());
    if (!w.formula.empty() && !phi_formula(w.formula)) throw SchemaError("unknown weight formula: " + w.formula);
    return w;
  }
  if (j.contains("formula")) {
    std::size_t knots = j.value("knots", kDefaultKnots);
    double y_max = j.contains("y_max") ? get_double(j.at("y_max")) : kDefaultYMax;
    return from_formula(j.at("formula").get<std::string>(), knots, y_max);
  }
  throw SchemaError("weight function needs knots_t/values or formula");
}

// ---- formal sequences and witnesses

inline json to_json(const FormalSequence& b) {
  json sup = json::array(), mags = json::array();
  for (const auto& k : b.support) sup.push_back(index(k));
  for (const auto& m : b.log_magnitudes) mags.push_back(log_real(m));
  json j = {{"support", sup}, {"log_magnitudes", mags}, {"signs", b.signs}};
  if (!b.dense.empty()) j["dense"] = doubles(b.dense);
  return j;
}

inline FormalSequence formal_from_json(const json& j) {
  FormalSequence b;
  for (const auto& k : require(j, "support")) b.support.push_back(get_index(k));
  for (const auto& m : require(j, "log_magnitudes")) b.log_magnitudes.push_back(get_log_real(m));
  for (const auto& s : require(j, "signs")) {
    if (!s.is_number_integer()) throw SchemaError("signs must be integers");
    b.signs.push_back(s.get<int>());
  }
  if (j.contains("dense")) b.dense = get_doubles(j.at("dense"));
  b.validate();
  return b;
}

inline json to_json(const Witness& w) {
  json j = to_json(w.F);
  json ks = json::array(), certs = json::array();
  for (const auto& k : w.k_indices) ks.push_back(index(k));
  for (const auto& st : w.constraint_log)
    certs.push_back({{"p", st.p},
                     {"k", index(st.k)},
                     {"log_F", log_real(st.log_F)},
                     {"log_constraint", log_real(st.log_constraint)},
                     {"log_root_F", num(st.log_root_F)},
                     {"log_schedule", num(st.log_schedule)}});
  j["k_indices"] = ks;
  j["a0"] = w.a0;
  j["source"] = source_name(w.source);
  j["target"] = w.target;
  j["model"] = w.model;
  j["m_label"] = w.m_label;
  j["certificates"] = certs;
  return j;
}

inline Witness witness_from_json(const json& j) {
  Witness w;
  w.F = formal_from_json(j);
  for (const auto& k : require(j, "k_indices")) w.k_indices.push_back(get_index(k));
  if (w.k_indices != w.F.support) throw SchemaError("witness: support must equal k_indices");
  w.a0 = get_double(require(j, "a0"));
  std::string src = j.value("source", std::string("roumieu_single"));
  if (src == "roumieu_single") w.source = WitnessSource::roumieu_single;
  else if (src == "beurling_matrix") w.source = WitnessSource::beurling_matrix;
  else throw SchemaError("unknown witness source: " + src);
  w.target = j.value("target", std::string());
  w.model = j.value("model", std::string("unit"));
  w.m_label = j.value("m_label", std::string("M"));
  if (j.contains("certificates"))
    for (const auto& c : j.at("certificates")) {
      WitnessStep st;
      st.p = require(c, "p").get<std::size_t>();
      st.k = get_index(require(c, "k"));
      st.log_F = get_log_real(require(c, "log_F"));
      st.log_constraint = get_log_real(require(c, "log_constraint"));
      st.log_root_F = get_double(require(c, "log_root_F"));
      st.log_schedule = get_double(require(c, "log_schedule"));
      w.constraint_log.push_back(st);
    }
  return w;
}

// "unit" or "perturbed:delta[:decay]"
inline CoefficientModel model_from_string(const std::string& s) {
  if (s == "unit") return CoefficientModel::unit();
  if (s.rfind("perturbed", 0) == 0) {
    double delta = 0.5, decay = 1.0;
    std::stringstream ss(s.substr(9));
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ':'))
      if (!part.empty()) parts.push_back(part);
    try {
      if (parts.size() >= 1) delta = std::stod(parts[0]);
      if (parts.size() >= 2) decay = std::stod(parts[1]);
    } catch (const std::exception&) {
      throw ParameterError("bad model spec: " + s);
    }
    return CoefficientModel::perturbed(delta, decay);
  }
  throw ParameterError("unknown coefficient model: " + s);
}

// ---- files

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("invalid JSON in " + path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path);
  out << text;
  if (!out) throw PreconditionError("write failed: " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// 17 significant digits in scientific notation.
inline std::string csv_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

inline std::string csv_log_real(const LogReal& x) { return log_real_str(x, 17); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::size_t cols_;
  std::ostringstream out_;
};

}  // namespace qaw::io
