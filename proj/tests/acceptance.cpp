// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qaw/cli.hpp"
#include "support.hpp"

using namespace qaw;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  bool ok = true;
  std::ostringstream notes;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) notes << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

int failures = 0;

void report(int n, const std::string& title, Check& c, double secs, double limit = 0) {
  if (limit > 0) c.require(secs < limit, "runtime " + std::to_string(secs) + " s over " + std::to_string(limit) + " s");
  std::printf("C%d %s: %s (%.3f s) %s\n", n, c.ok ? "PASS" : "FAIL", title.c_str(), secs, c.notes.str().c_str());
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

double rel_gap(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

void carleman_suite() {
  Check c;
  auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    auto lv = oracle::random_log_values(rng, 513, -3.0, 3.0);
    auto r = qa_diagnose(from_log_values(lv));
    c.require(r.carleman_ok, "carleman flag");
    auto d = oracle::direct_sums(lv);
    for (std::size_t i = 0; i < r.log_s_partial.size(); ++i) {
      double margin = r.log_t_partial[i] - 1.0 - r.log_s_partial[i];
      worst = std::max(worst, margin);
      c.require(margin <= 1e-12 * std::max(1.0, std::fabs(r.log_s_partial[i]) + 1), "T_P <= e S_P");
      c.require(rel_gap(r.s_partial[i], static_cast<double>(d.s[i])) <= 1e-12, "S_P matches direct sum");
      c.require(rel_gap(r.t_partial[i], static_cast<double>(d.t[i])) <= 1e-12, "T_P matches direct sum");
    }
  }
  c.notes << "max ln(T/(e S)) = " << worst;
  report(1, "Carleman inequality on 100 random sequences, P = 512", c, seconds_since(t0), 1.0);
}

void envelope_suite() {
  Check c;
  auto t0 = Clock::now();
  std::mt19937_64 rng(20240602);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto lv = oracle::random_log_values(rng, 256);
    auto s = from_log_values(lv);
    auto lc = lc_minorant(s);
    auto in = increasing_root_minorant(s);
    auto want = oracle::gift_wrap_envelope(lv);
    for (std::size_t p = 0; p < lv.size(); ++p) {
      worst = std::max(worst, std::fabs(lc.minorant.log_values[p] - want[p]));
      if (!lc.provisional(p) && !in.provisional(p)) {
        c.require(lc.minorant.log_values[p] <= in.minorant.log_values[p] + 1e-12, "M^lc <= M^I");
        c.require(in.minorant.log_values[p] <= lv[p] + 1e-12, "M^I <= M");
      }
    }
    auto lc2 = lc_minorant(lc.minorant).minorant.log_values;
    auto in2 = increasing_root_minorant(in.minorant).minorant.log_values;
    for (std::size_t p = 0; p < lv.size(); ++p) {
      c.require(std::fabs(lc2[p] - lc.minorant.log_values[p]) <= 1e-12, "lc idempotent");
      c.require(std::fabs(in2[p] - in.minorant.log_values[p]) <= 1e-12, "root minorant idempotent");
    }
  }
  c.require(worst <= 1e-12, "envelope matches gift-wrapping oracle");
  c.notes << "max |delta log| = " << worst;
  report(2, "log-convex envelope vs oracle, sandwich, idempotence (P = 256)", c, seconds_since(t0), 2.0);
}

void divergence_suite() {
  Check c;
  auto t0 = Clock::now();
  auto fact = qa_diagnose(make_sequence(Generator::custom("factorial"), 2048));
  auto sq = qa_diagnose(make_sequence(Generator::gevrey(1.0), 2048));
  auto flp = qa_diagnose(make_sequence(Generator::factorial_log_power(1.0), 2048));
  c.require(std::fabs(fact.s_partial[99] - oracle::harmonic(100)) <= 1e-6, "S_100 = H_100");
  c.require(std::fabs(fact.s_partial[99] - 5.187378) <= 1e-6, "S_100 ~ 5.187378");
  c.require(sq.s_partial[999] > 1.6429 && sq.s_partial[999] < 1.644934, "S_1000 for (p!)^2 in range");
  c.require(fact.trend == Trend::diverging, "p! diverging");
  c.require(sq.trend == Trend::converging, "(p!)^2 converging");
  c.require(flp.trend == Trend::diverging, "factorial_log_power(1) diverging");
  c.notes.precision(10);
  c.notes << "S_100 = " << fact.s_partial[99] << ", S_1000 = " << sq.s_partial[999] << ", verdicts "
          << trend_name(fact.trend) << "/" << trend_name(sq.trend) << "/" << trend_name(flp.trend);
  report(3, "divergence diagnostics", c, seconds_since(t0));
}

void conjugate_suite() {
  Check c;
  auto t0 = Clock::now();
  std::mt19937_64 rng(20240604);
  double worst = 0;
  auto nondecreasing = [](const ConjugateTable& t) {
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.argmax.size(); ++i) {
      if (t.overflow[i]) continue;
      if (t.argmax[i] < prev) return false;
      prev = t.argmax[i];
    }
    return true;
  };
  for (int trial = 0; trial < 20; ++trial) {
    auto f = oracle::random_convex_pl(rng, 32);
    std::vector<double> xs = {0.0};
    for (std::size_t k = 0; k + 1 < f.xs.size(); ++k) xs.push_back(f.slope(k));
    auto t = conjugate_pl(f, xs);
    c.require(nondecreasing(t), "argmax nondecreasing (random)");
    for (std::size_t k = 1; k + 1 < f.xs.size(); ++k)
      worst = std::max(worst, std::fabs(oracle::discrete_conjugate(xs, t.phi_star, f.xs[k]) - f.ys[k]));
  }
  c.require(worst <= 1e-9, "biconjugate");
  auto w = from_formula("max0_t_minus_1", 512, 12);
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(i * 0.25);
  grid.insert(std::upper_bound(grid.begin(), grid.end(), std::numbers::e), std::numbers::e);
  auto t = conjugate(w, grid);
  std::size_t ie = std::find(grid.begin(), grid.end(), std::numbers::e) - grid.begin();
  double at_e = t.phi_star[ie];
  c.require(std::fabs(at_e - 1.0) <= 1e-6, "phi*(e) = 1");
  c.require(nondecreasing(t), "argmax nondecreasing (formula)");
  c.notes << "max biconjugate gap = " << worst << ", phi*(e) - 1 = " << at_e - 1.0;
  report(4, "conjugate suite", c, seconds_since(t0));
}

void associated_matrix_suite() {
  Check c;
  auto t0 = Clock::now();
  auto am = associated_matrix(from_formula("max0_t_minus_1"), {0.5, 1.0, 2.0, 4.0}, 2048);
  const auto& w1 = am.matrix.table[1];
  double worst = 0;
  for (std::size_t j = 2; j <= 100; ++j) {
    double jj = static_cast<double>(j);
    double gap = std::fabs(w1.log_values[j] - (jj * std::log(jj) - jj + 1));
    c.require(gap <= 0.01 * jj, "log W^(1)_j near j ln j - j + 1");
    worst = std::max(worst, gap / jj);
  }
  for (const auto& s : am.matrix.table) {
    c.require(s.log_values[0] == 0.0, "normalized");
    c.require(is_log_convex(s).log_convex, "log-convex");
  }
  for (std::size_t l = 1; l < am.matrix.table.size(); ++l) {
    const auto& lo = am.matrix.table[l - 1];
    const auto& hi = am.matrix.table[l];
    for (std::size_t j = 0; j < std::min(lo.size(), hi.size()); ++j)
      c.require(lo.log_values[j] <= hi.log_values[j] + 1e-9, "order in l");
  }
  c.require(am.normalized && am.log_convex && am.ordered, "module flags");
  c.notes << "max gap/j = " << worst << ", levels " << am.matrix.table.size();
  report(5, "associated weight matrix", c, seconds_since(t0));
}

void domination_suite() {
  Check c;
  auto t0 = Clock::now();
  auto mat = canonical_matrix();
  try {
    auto r = dominate(mat, default_d_schedule(64), 4096);
    for (const auto& b : r.blocks) {
      if (b.completed) c.require(b.certificate >= b.d, "certificate >= d_i");
      c.require(b.dominated, "levels dominated");
    }
    auto rt = log_roots(r.L_tilde);
    for (std::size_t j = 2; j < rt.size(); ++j)
      c.require(rt[j] >= rt[j - 1] - 1e-12 * std::fabs(rt[j]), "roots of L~ nondecreasing");
    long double sum = 0;
    for (const auto& b : r.blocks)
      if (b.completed)
        for (std::size_t j = b.start; j < b.end; ++j)
          sum += std::exp(-static_cast<long double>(r.L_tilde.log_values[j]) / j);
    c.require(sum >= r.completed_blocks, "divergence certificate");
    auto rel = relate(mat.level(1.0, 4096), r.L);
    c.require(rel.verdict == RelationVerdict::strictly_smaller, "relate(M^(1), L) strictly smaller");
    c.notes << "completed blocks " << r.completed_blocks << ", starts";
    for (auto s : r.block_starts()) c.notes << " " << s;
    c.notes << ", certificate sum " << static_cast<double>(sum) << ", tail slope " << rel.tail_trend;
  } catch (const Error& e) {
    c.require(false, std::string("threw ") + e.what());
  }
  report(6, "diagonal domination on the canonical matrix (prefix 4096)", c, seconds_since(t0), 5.0);
}

struct WitnessRun {
  Witness F;
  double build_seconds = 0;
};

WitnessRun roumieu_witness() {
  auto t0 = Clock::now();
  WitnessOptions opt;
  opt.max_p = 149;
  auto n = make_sequence(Generator::factorial_log_power(1.0), 16, "flp1");
  WitnessRun r{build_witness(WitnessTarget::single(n), CoefficientModel::unit(), opt), 0};
  r.build_seconds = seconds_since(t0);
  return r;
}

const LogReal kLn10 = boost::math::constants::ln_ten<LogReal>();

void witness_suite(const WitnessRun& run) {
  Check c;
  auto t0 = Clock::now();
  const auto& w = run.F;
  auto ks = past_indices(w.k_indices);
  auto sums = partial_sums(w.F, CoefficientModel::unit(), 0.5, ks);
  bool exceeded_1e6 = false, exceeded_1e100 = false;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    LogReal l10 = sums[i].log_abs / kLn10;
    if (sums[i].sign > 0 && l10 > 6) exceeded_1e6 = true;
    if (ks[i] > 1000) c.require(sums[i].sign > 0 && l10 > 100, "sum past index 1000 exceeds 1e100");
    if (ks[i] > 1000 && sums[i].sign > 0 && l10 > 100) exceeded_1e100 = true;
  }
  c.require(exceeded_1e6 && exceeded_1e100, "blow-up");
  for (const auto& st : w.constraint_log) c.require(st.log_constraint <= 0, "Roumieu constraint <= 1");

  auto n = make_sequence(Generator::factorial_log_power(1.0), 16);
  auto fixture = lacunary_sequence(n, {Index(100), Index(1000), Index(10000)});
  auto fs = partial_sums(fixture, CoefficientModel::unit(), 0.5, {Index(1001)});
  double fixture10 = static_cast<double>(fs[0].log_abs / kLn10);
  c.require(std::fabs(fixture10 - 118.72) < 0.01, "fixture log10 at 1001");

  WitnessOptions opt;
  opt.max_p = 3;
  auto mat = canonical_matrix();
  auto b = build_witness(WitnessTarget::beurling(mat), CoefficientModel::unit(), opt);
  for (std::size_t i = 0; i < b.k_indices.size(); ++i) {
    LogReal k = to_log_real(b.k_indices[i]);
    c.require(b.F.log_magnitudes[i] >= k * log(LogReal(static_cast<double>(i + 1))), "F^{1/k_p} >= p");
    c.require(b.constraint_log[i].log_constraint <= 0, "Beurling constraint <= 1");
  }
  for (double l : {0.5, 1.0, 2.0, 4.0})
    c.require(classify_membership(b.F, mat.full_level(l)) == Membership::beurling_window, "beurling_window");
  c.notes << "Roumieu p = " << w.k_indices.size() << " (build " << run.build_seconds << " s, k_149 has "
          << w.k_indices.back().str().size() << " digits), first log10 sum past 1000: ";
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] > 1000) {
      c.notes << static_cast<double>(sums[i].log_abs / kLn10);
      break;
    }
  c.notes << ", Beurling p = " << b.k_indices.size();
  report(7, "witness suite", c, seconds_since(t0) + run.build_seconds);
}

FormalSequence random_b(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> idx(20, 5000);
  std::vector<double> d(32);
  for (auto& x : d) x = u(rng);
  FormalSequence b = dense_sequence(d);
  std::vector<int> js = {idx(rng), idx(rng), idx(rng)};
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  for (int j : js) {
    b.support.push_back(Index(j));
    b.log_magnitudes.push_back(LogReal(u(rng)));
    b.signs.push_back(u(rng) > 0 ? 1 : -1);
  }
  b.validate();
  return b;
}

void probe_suite(const WitnessRun& run) {
  Check c;
  auto t0 = Clock::now();
  const auto& w = run.F;
  auto unit = CoefficientModel::unit();
  auto scan = probe_line_scan(FormalSequence{}, w, unit, 0.5, {1.0, -1.0, 0.5, -0.5}, 1e6);
  for (const auto& r : scan.results) c.require(r.exceeded, "probe alpha exceeded");
  std::mt19937_64 rng(20240608);
  std::size_t ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto b = random_b(rng);
    auto [plus, minus] = density_step(b, w, unit, 0.5, 1.0, 1e6);
    c.require(plus.exceeded || minus.exceeded, "density step");
    ok += plus.exceeded || minus.exceeded;
  }
  auto g = lineability_combination(w.F, {1.0, 2.0}, {1.0, -2.0});
  auto gs = partial_sums(g, unit, 0.5, past_indices(g.support));
  bool big = false;
  for (const auto& s : gs) big = big || (s.sign != 0 && s.log_abs > log(LogReal(1e6)));
  c.require(big, "G partial sums exceed 1e6");
  double best_root = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.support.size(); ++i)
    best_root = std::max(best_root, static_cast<double>(g.log_magnitudes[i] / to_log_real(g.support[i])));
  c.require(best_root > 5, "ln|G_k|/k exceeds 5");
  c.notes << "density " << ok << "/20, max ln|G_k|/k = " << best_root;
  report(8, "probe, density and lineability", c, seconds_since(t0));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  std::string cmd = std::string(QAW_CLI) + " " + args + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void cli_suite() {
  Check c;
  auto t0 = Clock::now();
  std::string data = QAW_DATA_DIR;
  auto root = fs::temp_directory_path() / ("qaw_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    std::string out = (root / run).string();
    c.require(cli("qa-check -i " + data + "/factorial.json --format csv --out " + out) == 0, "qa-check");
    c.require(cli("matrix-dominate -i " + data + "/matrix.json --prefix 4096 --format csv --out " + out) == 0,
              "matrix-dominate");
    c.require(cli("witness -i " + data + "/flp1.json --max-p 40 --format csv --out " + out) == 0, "witness");
    c.require(cli("partial-sums -i " + out + "/witness.json --format csv --out " + out) == 0, "partial-sums");
    c.require(cli("regularize -i " + data + "/bumpy.json --format csv --out " + out) == 0, "regularize");
    c.require(cli("assoc-matrix -i " + data + "/weight_t_minus_1.json --format csv --out " + out) == 0,
              "assoc-matrix");
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++files;
    c.require(slurp(e.path()) == slurp(root / "b" / e.path().filename()), "deterministic " + e.path().filename().string());
  }
  c.require(files == 12, "artifact count");

  // Round trips against in-memory results.
  try {
    auto out = root / "a";
    auto dj = io::read_json(out / "matrix-dominate.json");
    auto L = io::sequence_from_json(dj.at("L"), 8);
    auto direct = dominate(canonical_matrix(), default_d_schedule(64), 4096);
    for (std::size_t j = 0; j < L.size(); ++j)
      c.require(std::fabs(L.log_values[j] - direct.L.log_values[j]) <= 1e-12 * std::max(1.0, std::fabs(direct.L.log_values[j])),
                "L round trip");
    auto rj = io::read_json(out / "regularize.json");
    auto in = io::sequence_from_json(rj.at("input"), 8);
    auto lc = io::sequence_from_json(rj.at("log_convex_minorant").at("minorant"), 8);
    auto want = lc_minorant(in).minorant;
    for (std::size_t j = 0; j < lc.size(); ++j) c.require(std::fabs(lc.log_values[j] - want.log_values[j]) <= 1e-12, "lc round trip");
    auto am = io::matrix_from_json(io::read_json(out / "assoc-matrix.json").at("matrix"), 8);
    auto amd = associated_matrix(from_formula("max0_t_minus_1"), {0.5, 1, 2, 4}, 2048);
    for (std::size_t l = 0; l < am.table.size(); ++l)
      for (std::size_t j = 0; j < am.table[l].size(); ++j)
        c.require(std::fabs(am.table[l].log_values[j] - amd.matrix.table[l].log_values[j]) <=
                      1e-12 * std::max(1.0, std::fabs(amd.matrix.table[l].log_values[j])),
                  "associated matrix round trip");
    auto wj = io::witness_from_json(io::read_json(out / "witness.json"));
    auto again = io::witness_from_json(io::json::parse(io::to_json(wj).dump()));
    c.require(again.k_indices == wj.k_indices, "witness indices round trip");
    for (std::size_t i = 0; i < wj.k_indices.size(); ++i)
      c.require(abs(again.F.log_magnitudes[i] - wj.F.log_magnitudes[i]) <= abs(wj.F.log_magnitudes[i]) * LogReal("1e-45"),
                "witness magnitudes round trip");
    WitnessOptions opt;
    opt.max_p = 40;
    auto wd = build_witness(WitnessTarget::single(make_sequence(Generator::factorial_log_power(1.0), 16)),
                            CoefficientModel::unit(), opt);
    c.require(wd.k_indices == wj.k_indices, "witness matches library run");
  } catch (const std::exception& e) {
    c.require(false, std::string("round trip threw ") + e.what());
  }
  fs::remove_all(root);
  c.notes << files << " artifacts per run";
  report(9, "CLI pipelines, round trips, determinism", c, seconds_since(t0), 30.0);
}

}  // namespace

int main() {
  carleman_suite();
  envelope_suite();
  divergence_suite();
  conjugate_suite();
  associated_matrix_suite();
  domination_suite();
  auto w = roumieu_witness();
  witness_suite(w);
  probe_suite(w);
  cli_suite();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
