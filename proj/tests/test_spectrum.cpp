#include "crab/spectrum.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace crab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

}  // namespace

TEST(Spectrum, CircleWindows) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(kSqrt2);
  const SpectrumWindow w = spectrum(*c, h, 0.0, 5.0);
  EXPECT_EQ(w.count, 7);
  EXPECT_EQ(w.dim_proxy, 14);
  ASSERT_EQ(w.values.size(), 7u);
  const SpectrumWindow v = spectrum(*c, h, 1.0, 2.0);
  ASSERT_EQ(v.count, 1);
  EXPECT_NEAR(v.values[0].first, kSqrt2, 1e-8);
}

TEST(Spectrum, FlatTorusLevels) {
  SearchOptions o;
  o.points_per_dim = 16;
  const SpectrumWindow w = spectrum(*make_flat_torus(2), constant_hamiltonian(1.0), 0.0, 2.5, o);
  const std::vector<std::pair<double, int>> expected{{1.0, 4}, {kSqrt2, 4}, {2.0, 4}, {std::sqrt(5.0), 8}};
  ASSERT_EQ(w.values.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(w.values[i].first, expected[i].first, 1e-8);
    EXPECT_EQ(w.values[i].second, expected[i].second);
  }
  EXPECT_EQ(w.count, 20);
}

TEST(Spectrum, ChordWindow) {
  const Vec q0 = Vec::Zero(2);
  const Vec q1 = (Vec(2) << 0.5, 0.0).finished();
  const SpectrumWindow w = chord_spectrum(*make_flat_torus(2), constant_hamiltonian(1.0), q0, q1, 0.0, 1.2);
  ASSERT_EQ(w.values.size(), 2u);
  EXPECT_EQ(w.values[0].second, 2);
  EXPECT_EQ(w.values[1].second, 4);
  EXPECT_EQ(w.count, 6);
}

TEST(MuProxy, CircleExamples) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(kSqrt2);
  EXPECT_EQ(mu_proxy(*c, h, 1.0), 1);
  EXPECT_EQ(mu_proxy(*c, h, 5.0), 7);
  EXPECT_EQ(mu_proxy(*c, h, 0.5), 0);
  EXPECT_THROW(mu_proxy(*c, h, 0.0), std::invalid_argument);
}

TEST(Growth, CircleIsLinear) {
  const GrowthReport g = growth_rate(*make_circle(), constant_hamiltonian(kSqrt2), {2, 4, 8, 16, 32});
  EXPECT_EQ(g.mu, (std::vector<int>{2, 5, 11, 22, 45}));
  EXPECT_FALSE(g.undefined);
  EXPECT_NEAR(g.exponent, 1.0, 0.2);
  EXPECT_EQ(g.classification, GrowthClass::Linear);
}

TEST(Growth, TorusChordsAreSuperlinear) {
  const Vec q0 = Vec::Zero(2);
  const Vec q1 = (Vec(2) << 0.5, 0.0).finished();
  const GrowthReport g = chord_growth_rate(*make_flat_torus(2), constant_hamiltonian(1.0), q0, q1, {2, 4, 8, 16});
  EXPECT_NEAR(g.exponent, 2.0, 0.25);
  EXPECT_EQ(g.classification, GrowthClass::Superlinear);
}

TEST(Growth, FitEdgeCases) {
  EXPECT_TRUE(fit_growth({1, 2, 4, 8}, {0, 0, 0, 5}).undefined);
  EXPECT_TRUE(fit_growth({1, 2, 4, 8}, {0, 0, 0, 0}).undefined);
  const GrowthReport g = fit_growth({1, 2, 4, 8}, {3, 12, 48, 192});
  EXPECT_NEAR(g.exponent, 2.0, 1e-12);
  EXPECT_EQ(g.classification, GrowthClass::Superlinear);
  EXPECT_EQ(fit_growth({1, 2, 4, 8}, {5, 6, 7, 8}).classification, GrowthClass::Sublinear);
  EXPECT_THROW(fit_growth({1, 2}, {1}), std::invalid_argument);
}

TEST(CircleOracle, Examples) {
  const CircleOracle o = circle_oracle(kSqrt2, 0.0, 5.0);
  EXPECT_EQ(o.bruteforce_count, 7);
  EXPECT_EQ(o.component_count, 7);
  EXPECT_EQ(o.formula_value, 6);
  EXPECT_FALSE(o.note.empty());
  EXPECT_FALSE(o.rational_warning);
  const CircleOracle z = circle_oracle(kSqrt2, 0.0, 0.0);
  EXPECT_EQ(z.bruteforce_count, 0);
  EXPECT_EQ(z.formula_value, 0);
  EXPECT_TRUE(z.eta_values.empty());
  const CircleOracle neg = circle_oracle(kSqrt2, -5.0, 0.0);
  EXPECT_EQ(neg.bruteforce_count, 7);
  EXPECT_TRUE(circle_oracle(2.0, 0.0, 5.0).rational_warning);
}

// Properties

TEST(SpectrumProperties, OracleConsistency) {
  const ModelPtr c = make_circle();
  for (double a : {kSqrt2, std::sqrt(3.0), std::numbers::pi / 2}) {
    const SpectrumWindow w = spectrum(*c, constant_hamiltonian(a), 0.0, 6.0);
    const CircleOracle o = circle_oracle(a, 0.0, 6.0);
    ASSERT_EQ(static_cast<int>(w.values.size()), o.bruteforce_count) << a;
    for (std::size_t i = 0; i < w.values.size(); ++i) EXPECT_NEAR(w.values[i].first, o.eta_values[i], 1e-8);
  }
}

TEST(SpectrumProperties, MonotoneAndAdditive) {
  const ModelPtr c = make_circle();
  SinusoidalParams sp;
  sp.base = 1.3;
  sp.amplitude = 0.2;
  sp.kx = 1.0;
  const IsotopySpec h = sinusoidal_hamiltonian(sp);
  int prev = 0;
  for (double m = 0.5; m <= 8.0; m += 0.5) {
    const int mu = mu_proxy(*c, h, m);
    EXPECT_GE(mu, prev) << m;
    prev = mu;
  }
  const SpectrumWindow whole = spectrum(*c, h, 0.0, 6.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.9);
  int tested = 0;
  while (tested < 8) {
    const double p = u(rng);
    if (std::any_of(whole.values.begin(), whole.values.end(), [&](const auto& v) { return std::abs(v.first - p) < 1e-3; }))
      continue;
    EXPECT_EQ(spectrum(*c, h, 0.0, p).count + spectrum(*c, h, p, 6.0).count, whole.count) << p;
    ++tested;
  }
}

TEST(SpectrumProperties, LoopGrowthIsEventuallyPeriodic) {
  // h = 1 on the circle generates a loop; mu_proxy(m + 1) - mu_proxy(m) is constant.
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(1.0);
  std::vector<int> diffs;
  for (double m = 1.5; m <= 6.5; m += 1.0) diffs.push_back(mu_proxy(*c, h, m + 1.0) - mu_proxy(*c, h, m));
  for (int d : diffs) EXPECT_EQ(d, diffs.front());
  EXPECT_EQ(diffs.front(), 1);
}

TEST(SpectrumProperties, WindowInvariants) {
  const SpectrumWindow w = spectrum(*make_circle(), constant_hamiltonian(std::sqrt(3.0)), 0.5, 4.0);
  int total = 0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    EXPECT_GT(w.values[i].first, 0.5);
    EXPECT_LE(w.values[i].first, 4.0);
    if (i > 0) EXPECT_LT(w.values[i - 1].first, w.values[i].first);
    total += w.values[i].second;
  }
  EXPECT_EQ(total, w.count);
}
