#include <gtest/gtest.h>

#include <random>

#include "qaw/borel_witness.hpp"
#include "support.hpp"

using namespace qaw;

namespace {

FormalSequence sparse(std::size_t from, std::size_t to, const std::function<double(std::size_t)>& log_mag) {
  FormalSequence b;
  for (std::size_t j = from; j <= to; ++j) {
    b.support.push_back(Index(j));
    b.log_magnitudes.push_back(LogReal(log_mag(j)));
    b.signs.push_back(j % 3 ? 1 : -1);
  }
  b.validate();
  return b;
}

double value(const SeminormResult& r) { return static_cast<double>(r.log_value); }

}  // namespace

TEST(Seminorm, ZeroSequence) {
  auto r = seminorm(FormalSequence{}, make_sequence(Generator::custom("factorial"), 16), 1.0);
  EXPECT_TRUE(boost::multiprecision::isinf(r.log_value));
  EXPECT_LT(r.log_value, 0);
  EXPECT_FALSE(r.argmax);
}

TEST(Seminorm, SingleEntryOverFactorial) {
  FormalSequence b;
  b.support = {Index(5)};
  b.log_magnitudes = {LogReal(0)};
  b.signs = {1};
  auto r = seminorm(b, make_sequence(Generator::custom("factorial"), 16), 1.0);
  EXPECT_NEAR(value(r), 0.0, 1e-12);
  EXPECT_EQ(*r.argmax, Index(5));
}

TEST(Seminorm, LacunaryFixture) {
  auto n = make_sequence(Generator::factorial_log_power(1.0), 16);
  auto f = lacunary_sequence(n, {Index(100), Index(1000), Index(10000)});
  auto r = seminorm(f, n, 1.0);
  EXPECT_EQ(*r.argmax, Index(100));
  EXPECT_NEAR(value(r), -50 * std::log(std::log(std::numbers::e + 100.0)), 1e-9);
  EXPECT_NEAR(value(r), -76.65, 0.01);
}

TEST(Seminorm, ExplicitSequenceCountsOutOfWindow) {
  FormalSequence b;
  b.support = {Index(2), Index(50)};
  b.log_magnitudes = {LogReal(0), LogReal(0)};
  b.signs = {1, 1};
  auto r = seminorm(b, from_values({1, 1, 2, 6}), 1.0);
  EXPECT_EQ(r.out_of_window, 1u);
}

TEST(Membership, InverseFactorialIsBeurling) {
  auto fact = make_sequence(Generator::custom("factorial"), 16);
  auto b = sparse(1, 3000, [](std::size_t j) { return -ln_factorial(j); });
  EXPECT_EQ(classify_membership(b, fact), Membership::beurling_window);
}

TEST(Membership, GeometricIsRoumieu) {
  auto fact = make_sequence(Generator::custom("factorial"), 16);
  auto b = sparse(1, 3000, [](std::size_t j) { return static_cast<double>(j) * std::log(2.0); });
  EXPECT_EQ(classify_membership(b, fact), Membership::roumieu_window);
  auto grid = h_grid();
  auto fin = finite_on_grid(rate_profile(b, fact), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(fin[i], grid[i] >= 2.0) << grid[i];
}

TEST(Membership, FactorialGrowthIsOutside) {
  auto fact = make_sequence(Generator::custom("factorial"), 16);
  auto b = sparse(1, 3000, [](std::size_t j) { return ln_factorial(j); });
  EXPECT_EQ(classify_membership(b, fact), Membership::outside_window);
}

TEST(SeminormProperty, NonincreasingInH) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0, 5);
  auto seq = make_sequence(Generator::gevrey(0.5), 16);
  for (int trial = 0; trial < 8; ++trial) {
    auto b = sparse(0, 300, [&](std::size_t) { return nd(rng); });
    double prev = std::numeric_limits<double>::infinity();
    for (double h : h_grid()) {
      double v = value(seminorm(b, seq, h));
      EXPECT_LE(v, prev + 1e-12);
      prev = v;
    }
  }
}

TEST(SeminormProperty, Scaling) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd(0, 5);
  auto seq = make_sequence(Generator::factorial_log_power(0.5), 16);
  for (int trial = 0; trial < 20; ++trial) {
    auto b = sparse(0, 200, [&](std::size_t) { return nd(rng); });
    for (double c : {-3.0, 0.25, 7.5})
      for (double h : {0.5, 1.0, 4.0})
        EXPECT_NEAR(value(seminorm(scale(b, c), seq, h)), std::log(std::fabs(c)) + value(seminorm(b, seq, h)), 1e-12);
  }
}

TEST(SeminormProperty, PerturbationIdentity) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1, 1);
  auto n = make_sequence(Generator::factorial_log_power(1.0), 16);
  auto f = lacunary_sequence(n, {Index(40), Index(400), Index(4000)});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> d(32);
    for (auto& x : d) x = u(rng);
    auto b = dense_sequence(d);
    for (double eps : {0.5, 1e-3})
      for (double sgn : {1.0, -1.0}) {
        auto moved = combine({{1.0, &b}, {sgn * eps, &f}});
        auto diff = combine({{1.0, &b}, {-1.0, &moved}});
        for (double h : {0.25, 1.0, 8.0})
          EXPECT_NEAR(value(seminorm(diff, n, h)), std::log(eps) + value(seminorm(f, n, h)), 1e-12);
      }
  }
}

TEST(FormalSequence, Validation) {
  FormalSequence b;
  b.support = {Index(3), Index(2)};
  b.log_magnitudes = {LogReal(0), LogReal(0)};
  b.signs = {1, 1};
  EXPECT_THROW(b.validate(), SchemaError);
  b.support = {Index(2), Index(3)};
  b.signs = {1, 0};
  EXPECT_THROW(b.validate(), SchemaError);
  b.signs = {1, 1};
  b.dense = {1, 1, 1};
  EXPECT_THROW(b.validate(), SchemaError);
  b.dense = {1, 1};
  EXPECT_NO_THROW(b.validate());
}
