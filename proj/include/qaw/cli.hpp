#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "qaw/io.hpp"

namespace qaw::cli {

using io::json;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"inspect",         "regularize", "qa-check",     "relate",
                                             "matrix-dominate", "conjugate",  "assoc-matrix", "witness",
                                             "partial-sums",    "probe-scan"};
  return c;
}

inline constexpr std::size_t kDefaultPrefix = 2048;

// QAW_PREFIX replaces the built-in default; an explicit --prefix wins over both.
inline std::size_t default_prefix() {
  if (const char* env = std::getenv("QAW_PREFIX")) {
    try {
      return static_cast<std::size_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw ParameterError(std::string("QAW_PREFIX is not an integer: ") + env);
    }
  }
  return kDefaultPrefix;
}

struct RunConfig {
  std::string command;
  std::vector<std::string> input_paths;
  std::size_t prefix = kDefaultPrefix;
  std::string output = ".";
  std::string format = "json";
  std::uint64_t seed = 0;

  double a0 = 0.5;
  std::vector<double> d_schedule;  // empty: d_i = i + 1
  std::vector<double> levels;      // empty: command default
  std::string model = "unit";
  std::vector<double> alphas = {1.0, -1.0, 0.5, -0.5};
  std::size_t max_p = 8;
  double bound = 1e6;
  std::vector<std::string> k_list;  // explicit indices for partial-sums
  std::size_t trials = 0;           // random b fixtures for probe-scan
  double budget_digits = 30000;
};

// Thrown for malformed invocations (exit 1).
struct UsageError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "usage"; }
};

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  void json_file(const std::string& name, const json& j) { files.emplace_back(name, j.dump(2) + "\n"); }
  void text_file(const std::string& name, const std::string& s) { files.emplace_back(name, s); }
};

namespace detail {

using io::csv_log_real;
using io::csv_num;

inline std::string csv_int(std::size_t v) { return std::to_string(v); }

inline std::string log10_str(const LogReal& ln) {
  return csv_log_real(ln / boost::math::constants::ln_ten<LogReal>());
}

inline const std::string& input(const RunConfig& c, std::size_t i) {
  if (c.input_paths.size() <= i) throw UsageError(c.command + " needs " + std::to_string(i + 1) + " --input file(s)");
  return c.input_paths[i];
}

inline WeightSequence load_sequence(const RunConfig& c, std::size_t i) {
  return io::sequence_from_json(io::read_json(input(c, i)), c.prefix);
}

inline json trend_json(const TrendFit& f) {
  return {{"verdict", trend_name(f.verdict)},
          {"best_model", f.best_model},
          {"divergent_score", io::num(f.divergent_score)},
          {"convergent_score", io::num(f.convergent_score)},
          {"window_points", f.window_points}};
}

inline json qa_json(const QaReport& r) {
  json j = {{"trend", trend_name(r.trend)},
            {"t_trend", trend_name(r.t_trend)},
            {"fit", trend_json(r.fit)},
            {"carleman_ok", r.carleman_ok},
            {"lc_trend", trend_name(r.lc_trend)},
            {"root_minorant_trend", trend_name(r.root_minorant_trend)},
            {"prefix", r.s_partial.size()}};
  j["carleman_violation"] = r.carleman_violation ? json(*r.carleman_violation) : json(nullptr);
  if (!r.s_partial.empty()) {
    j["S_final"] = io::num(r.s_partial.back());
    j["T_final"] = io::num(r.t_partial.back());
  }
  return j;
}

inline json regularization_json(const RegularizationResult& r) {
  return {{"minorant", io::to_json(r.minorant)},
          {"touched_indices", r.touched_indices},
          {"boundary_provisional", r.boundary_provisional}};
}

inline json block_json(const Block& b) {
  return {{"i", b.level},
          {"d", b.d},
          {"start", b.start},
          {"end", b.end},
          {"certificate", io::num(b.certificate)},
          {"completed", b.completed},
          {"max_log_ratio_root", io::num(b.max_log_ratio_root)},
          {"dominated", b.dominated}};
}

inline json domination_json(const DominationResult& r) {
  json blocks = json::array();
  for (const auto& b : r.blocks) blocks.push_back(block_json(b));
  return {{"blocks", blocks},
          {"completed_blocks", r.completed_blocks},
          {"L_tilde", io::to_json(r.L_tilde)},
          {"L", io::to_json(r.L)}};
}

inline std::string domination_csv(const DominationResult& r) {
  io::Csv csv({"i", "d_i", "j_i", "certificate", "max_ratio_root", "completed"});
  for (const auto& b : r.blocks)
    csv.row({csv_int(b.level), csv_num(b.d), csv_int(b.start), csv_num(b.certificate),
             csv_num(std::exp(b.max_log_ratio_root)), b.completed ? "1" : "0"});
  return csv.str();
}

inline std::string witness_csv(const Witness& w) {
  io::Csv csv({"p", "k_p", "constraint", "log10_constraint", "growth", "growth_target"});
  for (const auto& st : w.constraint_log) {
    LogReal c = st.log_constraint;
    csv.row({csv_int(st.p), st.k.str(), csv_num(static_cast<double>(exp(c))), log10_str(c),
             csv_num(std::exp(st.log_root_F)), csv_num(std::exp(st.log_schedule))});
  }
  return csv.str();
}

inline std::vector<double> levels_or(const RunConfig& c, std::vector<double> fallback) {
  return c.levels.empty() ? fallback : c.levels;
}

// ---- commands

inline void inspect(const RunConfig& c, Artifacts& a) {
  auto s = load_sequence(c, 0);
  auto lc = is_log_convex(s);
  json j = {{"sequence", io::to_json(s)},
            {"size", s.size()},
            {"log_convex", lc.log_convex},
            {"containment", containment_name(strict_analytic_containment(s))}};
  j["first_violation"] = lc.first_violation ? json(*lc.first_violation) : json(nullptr);
  a.json_file("inspect.json", j);
  if (c.format == "csv") {
    auto roots = log_roots(s);
    io::Csv csv({"p", "log_M", "log_m", "log_root"});
    for (std::size_t p = 0; p < s.size(); ++p)
      csv.row({csv_int(p), csv_num(s.log_values[p]), csv_num(s.log_little_m(p)), csv_num(roots[p])});
    a.text_file("inspect.csv", csv.str());
  }
}

inline void regularize(const RunConfig& c, Artifacts& a) {
  auto s = load_sequence(c, 0);
  auto lc = lc_minorant(s);
  auto inc = increasing_root_minorant(s);
  a.json_file("regularize.json", {{"input", io::to_json(s)},
                                  {"log_convex_minorant", regularization_json(lc)},
                                  {"root_minorant", regularization_json(inc)}});
  if (c.format == "csv") {
    io::Csv csv({"p", "log_M", "log_M_lc", "log_M_I", "provisional"});
    for (std::size_t p = 0; p < s.size(); ++p)
      csv.row({csv_int(p), csv_num(s.log_values[p]), csv_num(lc.minorant.log_values[p]),
               csv_num(inc.minorant.log_values[p]), lc.provisional(p) || inc.provisional(p) ? "1" : "0"});
    a.text_file("regularize.csv", csv.str());
  }
}

inline void qa_check(const RunConfig& c, Artifacts& a) {
  auto s = load_sequence(c, 0);
  auto r = qa_diagnose(s);
  json j = qa_json(r);
  j["name"] = s.name;
  j["containment"] = containment_name(strict_analytic_containment(s));
  a.json_file("qa-check.json", j);
  if (c.format == "csv") {
    io::Csv csv({"P", "S", "T", "log_S", "log_T"});
    for (std::size_t i = 0; i < r.s_partial.size(); ++i)
      csv.row({csv_int(i + 1), csv_num(r.s_partial[i]), csv_num(r.t_partial[i]), csv_num(r.log_s_partial[i]),
               csv_num(r.log_t_partial[i])});
    a.text_file("qa-check.csv", csv.str());
  }
}

inline void relate_cmd(const RunConfig& c, Artifacts& a) {
  auto m = load_sequence(c, 0);
  auto n = load_sequence(c, 1);
  auto r = relate(m, n);
  a.json_file("relate.json", {{"M", m.name},
                              {"N", n.name},
                              {"verdict", relation_name(r.verdict)},
                              {"tail_trend", io::num(r.tail_trend)},
                              {"log_window_sup", io::num(r.log_window_sup)},
                              {"window_sup", io::num(r.window_sup)},
                              {"interpretation", r.interpretation}});
  if (c.format == "csv") {
    io::Csv csv({"p", "log_ratio_root"});
    for (std::size_t i = 0; i < r.log_ratio_roots.size(); ++i)
      csv.row({csv_int(i + 1), csv_num(r.log_ratio_roots[i])});
    a.text_file("relate.csv", csv.str());
  }
}

inline void matrix_dominate(const RunConfig& c, Artifacts& a) {
  WeightMatrix mat = c.input_paths.empty() ? canonical_matrix() : io::matrix_from_json(io::read_json(c.input_paths[0]), c.prefix);
  auto d = c.d_schedule.empty() ? default_d_schedule(64) : c.d_schedule;
  auto emit = [&](const DominationResult& r, const char* status) {
    json j = domination_json(r);
    j["matrix"] = io::to_json(mat);
    j["prefix"] = c.prefix;
    j["status"] = status;
    if (r.completed_blocks >= 2) {
      auto rel = relate(mat.level(1.0, c.prefix), r.L);
      j["relation_M1_L"] = {{"verdict", relation_name(rel.verdict)}, {"tail_trend", io::num(rel.tail_trend)},
                            {"window_sup", io::num(rel.window_sup)}};
      j["L_qa"] = qa_json(qa_diagnose(r.L));
    }
    a.json_file("matrix-dominate.json", j);
    if (c.format == "csv") a.text_file("matrix-dominate.csv", domination_csv(r));
  };
  try {
    emit(dominate(mat, d, c.prefix), "complete");
  } catch (const IncompleteConstruction& e) {
    emit(e.partial, "incomplete");
    throw;
  }
}

inline std::vector<double> conjugate_grid(std::size_t prefix) {
  std::vector<double> x(prefix);
  for (std::size_t i = 0; i < prefix; ++i) x[i] = static_cast<double>(i);
  return x;
}

inline json flags_json(const ConditionFlags& f) {
  return {{"omega0", verdict_name(f.omega0)},
          {"omega1", verdict_name(f.omega1)},
          {"omega2", verdict_name(f.omega2)},
          {"omega3", verdict_name(f.omega3)},
          {"omega4", verdict_name(f.omega4)},
          {"omega5", verdict_name(f.omega5)},
          {"omega_q", trend_name(f.omega_q)},
          {"w1_property_iii", verdict_name(f.w1_property_iii)},
          {"omega2_consistent", f.omega2_consistent}};
}

inline void conjugate_cmd(const RunConfig& c, Artifacts& a) {
  auto w = io::weight_function_from_json(io::read_json(input(c, 0)));
  auto t = conjugate(w, conjugate_grid(c.prefix));
  json overflow = json::array();
  for (bool o : t.overflow) overflow.push_back(o);
  a.json_file("conjugate.json", {{"weight_function", io::to_json(w)},
                                 {"conditions", flags_json(check_conditions(w))},
                                 {"x", io::doubles(t.x_grid)},
                                 {"phi_star", io::doubles(t.phi_star)},
                                 {"argmax", io::doubles(t.argmax)},
                                 {"overflow", overflow},
                                 {"convexified", t.convexified},
                                 {"refined", t.refined}});
  if (c.format == "csv") {
    io::Csv csv({"x", "phi_star", "argmax", "overflow"});
    for (std::size_t i = 0; i < t.x_grid.size(); ++i)
      csv.row({csv_num(t.x_grid[i]), csv_num(t.phi_star[i]), csv_num(t.argmax[i]), t.overflow[i] ? "1" : "0"});
    a.text_file("conjugate.csv", csv.str());
  }
}

inline void assoc_matrix(const RunConfig& c, Artifacts& a) {
  auto w = io::weight_function_from_json(io::read_json(input(c, 0)));
  auto am = associated_matrix(w, levels_or(c, {0.5, 1.0, 2.0, 4.0}), c.prefix);
  a.json_file("assoc-matrix.json", {{"matrix", io::to_json(am.matrix)},
                                    {"levels", io::doubles(am.levels)},
                                    {"prefix", am.prefix},
                                    {"warnings", am.warnings},
                                    {"normalized", am.normalized},
                                    {"log_convex", am.log_convex},
                                    {"ordered", am.ordered}});
  if (c.format == "csv") {
    std::vector<std::string> header = {"j"};
    for (double l : am.levels) header.push_back("log_W[" + csv_num(l) + "]");
    io::Csv csv(header);
    std::size_t n = am.matrix.table.front().size();
    for (const auto& s : am.matrix.table) n = std::min(n, s.size());
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::string> row = {csv_int(j)};
      for (const auto& s : am.matrix.table) row.push_back(csv_num(s.log_values[j]));
      csv.row(row);
    }
    a.text_file("assoc-matrix.csv", csv.str());
  }
}

inline void witness(const RunConfig& c, Artifacts& a) {
  json in = io::read_json(input(c, 0));
  WitnessTarget target = in.is_object() && in.contains("family")
                             ? WitnessTarget::beurling(io::matrix_from_json(in, c.prefix))
                             : WitnessTarget::single(io::sequence_from_json(in, c.prefix));
  WitnessOptions opt;
  opt.a0 = c.a0;
  opt.max_p = c.max_p;
  opt.budget_digits = c.budget_digits;
  opt.check_prefix = c.prefix;
  auto model = io::model_from_string(c.model);
  auto emit = [&](const Witness& w, const char* status) {
    json j = io::to_json(w);
    j["status"] = status;
    a.json_file("witness.json", j);
    if (c.format == "csv") a.text_file("witness.csv", witness_csv(w));
  };
  try {
    emit(build_witness(target, model, opt), "complete");
  } catch (const BudgetError& e) {
    emit(e.partial, "budget_exhausted");
    throw;
  }
}

inline void partial_sums_cmd(const RunConfig& c, Artifacts& a) {
  json in = io::read_json(input(c, 0));
  FormalSequence b;
  std::vector<Index> ks;
  std::string model = c.model;
  double a0 = c.a0;
  if (in.is_object() && in.contains("k_indices")) {
    auto w = io::witness_from_json(in);
    b = w.F;
    ks = past_indices(w.k_indices);
    a0 = w.a0;
    model = w.model;
  } else {
    b = io::formal_from_json(in);
  }
  if (!c.k_list.empty()) {
    ks.clear();
    for (const auto& k : c.k_list) ks.push_back(io::get_index(json(k)));
  }
  if (ks.empty()) throw UsageError("partial-sums needs a witness input or --k indices");
  auto sums = partial_sums(b, io::model_from_string(model), a0, ks);
  json rows = json::array();
  for (std::size_t i = 0; i < ks.size(); ++i)
    rows.push_back({{"k", io::index(ks[i])}, {"sign", sums[i].sign}, {"log_abs", io::log_real(sums[i].log_abs)}});
  a.json_file("partial-sums.json", {{"a0", a0}, {"model", model}, {"sums", rows}});
  if (c.format == "csv") {
    io::Csv csv({"k", "sign", "ln_magnitude", "log10_magnitude"});
    for (std::size_t i = 0; i < ks.size(); ++i) {
      bool zero = sums[i].sign == 0;
      csv.row({ks[i].str(), std::to_string(sums[i].sign), zero ? "-inf" : csv_log_real(sums[i].log_abs),
               zero ? "-inf" : log10_str(sums[i].log_abs)});
    }
    a.text_file("partial-sums.csv", csv.str());
  }
}

inline json probe_json(const ProbeResult& r) {
  return {{"alpha", r.alpha},
          {"exceeded", r.exceeded},
          {"k", r.k ? io::index(*r.k) : json(nullptr)},
          {"last_sign", r.last.sign},
          {"last_log_abs", io::log_real(r.last.log_abs)}};
}

// Random dense b fixtures: 16 coefficients uniform in [-1, 1].
inline FormalSequence random_fixture(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(16);
  for (auto& x : v) x = u(rng);
  return dense_sequence(v);
}

inline void probe_scan(const RunConfig& c, Artifacts& a) {
  auto w = io::witness_from_json(io::read_json(input(c, 0)));
  FormalSequence b = c.input_paths.size() > 1 ? io::formal_from_json(io::read_json(c.input_paths[1])) : FormalSequence{};
  auto model = io::model_from_string(w.model);
  auto scan = probe_line_scan(b, w, model, w.a0, c.alphas, c.bound);
  json results = json::array();
  for (const auto& r : scan.results) results.push_back(probe_json(r));
  json density = json::array();
  std::mt19937_64 rng(c.seed);
  for (std::size_t t = 0; t < c.trials; ++t) {
    auto fb = random_fixture(rng);
    auto [plus, minus] = density_step(fb, w, model, w.a0, 1.0, c.bound);
    density.push_back({{"trial", t}, {"plus", probe_json(plus)}, {"minus", probe_json(minus)},
                       {"some_exceeded", plus.exceeded || minus.exceeded}});
  }
  a.json_file("probe-scan.json", {{"bound", c.bound},
                                  {"seed", c.seed},
                                  {"results", results},
                                  {"bounded_count", scan.bounded_count},
                                  {"at_most_one_bounded", scan.at_most_one_bounded},
                                  {"density", density}});
  if (c.format == "csv") {
    io::Csv csv({"alpha", "exceeded", "k", "last_sign", "last_log10_magnitude"});
    for (const auto& r : scan.results)
      csv.row({csv_num(r.alpha), r.exceeded ? "1" : "0", r.k ? r.k->str() : "", std::to_string(r.last.sign),
               r.last.sign == 0 ? "-inf" : log10_str(r.last.log_abs)});
    a.text_file("probe-scan.csv", csv.str());
  }
}

inline void dispatch(const RunConfig& c, Artifacts& a) {
  const auto& cmd = c.command;
  if (cmd == "inspect") inspect(c, a);
  else if (cmd == "regularize") regularize(c, a);
  else if (cmd == "qa-check") qa_check(c, a);
  else if (cmd == "relate") relate_cmd(c, a);
  else if (cmd == "matrix-dominate") matrix_dominate(c, a);
  else if (cmd == "conjugate") conjugate_cmd(c, a);
  else if (cmd == "assoc-matrix") assoc_matrix(c, a);
  else if (cmd == "witness") witness(c, a);
  else if (cmd == "partial-sums") partial_sums_cmd(c, a);
  else if (cmd == "probe-scan") probe_scan(c, a);
  else throw UsageError("unknown command: " + cmd);
}

inline void write_artifacts(const RunConfig& c, const Artifacts& a) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(c.output, ec);
  if (!fs::is_directory(c.output)) throw PreconditionError("output directory not usable: " + c.output);
  for (const auto& [name, text] : a.files) io::write_text((fs::path(c.output) / name).string(), text);
}

inline void error_json(std::ostream& err, const std::string& kind, const std::string& msg) {
  err << json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

}  // namespace detail

// Runs one command. Artifacts are written even when the command ends with a
// budget or incomplete-construction error (the partial result).
inline int run(const RunConfig& c, std::ostream& err = std::cerr) {
  Artifacts a;
  auto flush = [&]() {
    try {
      detail::write_artifacts(c, a);
      return 0;
    } catch (const Error& e) {
      detail::error_json(err, e.kind(), e.what());
      return 2;
    }
  };
  try {
    if (c.format != "json" && c.format != "csv") throw UsageError("format must be json or csv");
    if (c.prefix < kMinGeneratedPrefix) throw SizeError("prefix must be >= 8");
    detail::dispatch(c, a);
  } catch (const UsageError& e) {
    detail::error_json(err, e.kind(), e.what());
    return 1;
  } catch (const BudgetError& e) {
    flush();
    detail::error_json(err, e.kind(), e.what());
    return 3;
  } catch (const IncompleteConstruction& e) {
    flush();
    detail::error_json(err, e.kind(), e.what());
    return 3;
  } catch (const Error& e) {
    detail::error_json(err, e.kind(), e.what());
    return 2;
  } catch (const json::exception& e) {
    detail::error_json(err, "schema", e.what());
    return 2;
  }
  return flush();
}

}  // namespace qaw::cli
