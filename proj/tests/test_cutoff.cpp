#include "crab/cutoff.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace crab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

IsotopySpec sinusoid(double base, double amp, double kx, double kt) {
  SinusoidalParams p;
  p.base = base;
  p.amplitude = amp;
  p.kx = kx;
  p.kt = kt;
  return sinusoidal_hamiltonian(p);
}

CutoffProfile profile(double kappa, double R, double m, double M) {
  CutoffProfile p;
  p.kappa = kappa;
  p.R = R;
  p.m = m;
  p.M = M;
  return p;
}

ConePoint cp(double x, double r) { return {Vec::Constant(1, x), r}; }

}  // namespace

TEST(BoundsMM, Examples) {
  const ModelPtr c = make_circle();
  GridBounds b = bounds_mM(*c, constant_hamiltonian(kSqrt2));
  EXPECT_NEAR(b.m, 0.99 * kSqrt2, 1e-12);
  EXPECT_NEAR(b.M, 1.01 * kSqrt2, 1e-12);
  EXPECT_NEAR(b.m, 1.4000, 1e-4);
  EXPECT_NEAR(b.M, 1.4284, 1e-4);
  b = bounds_mM(*c, sinusoid(1.0, 0.5, 0.0, 1.0), PathGrid{32, 32});
  EXPECT_NEAR(b.m, 0.495, 1e-3);
  EXPECT_NEAR(b.M, 1.515, 1e-3);
  b = bounds_mM(*c, constant_hamiltonian(1.0));
  EXPECT_NEAR(b.m, 0.99, 1e-14);
  EXPECT_NEAR(b.M, 1.01, 1e-14);
}

TEST(BoundsMM, NonpositiveThrows) {
  const ModelPtr c = make_circle();
  EXPECT_THROW(bounds_mM(*c, constant_hamiltonian(-1.0)), PositivityError);
  EXPECT_THROW(bounds_mM(*c, sinusoid(0.5, 1.0, 1.0, 0.0)), PositivityError);
}

TEST(ConstantC, AutonomousReebFlowsGiveZero) {
  EXPECT_EQ(constant_C(*make_circle(), constant_hamiltonian(kSqrt2), 0.0, 5.0), 0.0);
  EXPECT_EQ(constant_C(*make_circle(), constant_hamiltonian(kSqrt2), -2.0, 1.0), 0.0);
  EXPECT_NEAR(constant_C(*make_flat_torus(2), constant_hamiltonian(1.0), 0.0, 3.0), 0.0, 1e-12);
}

TEST(ConstantC, CircleWaveRegression) {
  // For autonomous h on the circle the integrand is |eta h'(y) h(x) / h(y)|, whose
  // supremum for h = 1 + 0.1 sin(2 pi x) and |eta| <= 3 is 3 * 1.1 * 0.2 pi / sqrt(0.99).
  const double exact = 3.0 * 1.1 * 0.2 * std::numbers::pi / std::sqrt(0.99);
  const ModelPtr c = make_circle();
  const IsotopySpec h = sinusoid(1.0, 0.1, 1.0, 0.0);
  ConstantCGrid coarse;
  coarse.refine = false;
  const double grid = constant_C(*c, h, 0.0, 3.0, coarse);
  EXPECT_NEAR(grid, 2.0837690897243966, 1e-9);
  EXPECT_LE(grid, exact + 1e-9);
  EXPECT_NEAR(constant_C(*c, h, 0.0, 3.0), exact, 1e-6);
}

TEST(AdmissibleConstants, Examples) {
  const ModelPtr c = make_circle();
  const WindowConstants w = admissible_constants(*c, constant_hamiltonian(kSqrt2), 0.0, 5.0);
  EXPECT_EQ(w.C, 0.0);
  EXPECT_NEAR(w.kappa0, 1.05 * 3 * 1.01 * kSqrt2, 1e-12);
  EXPECT_NEAR(w.kappa0, 4.50, 5e-3);
  EXPECT_NEAR(w.R0, 1.05 * (1.0 / (0.99 * kSqrt2) + 1.0), 1e-12);
  EXPECT_NEAR(w.R0, 1.80, 5e-3);
  EXPECT_EQ(admissible_constants(*c, constant_hamiltonian(0.3), 0.0, 3.0).kappa0, 1.05);
  EXPECT_NEAR(admissible_constants(*c, constant_hamiltonian(1.0), 0.0, 3.0).kappa0, 1.05 * 3.03, 1e-12);
}

TEST(AdmissibleConstants, RejectsEmptyWindow) {
  EXPECT_THROW(admissible_constants(*make_circle(), constant_hamiltonian(1.0), 2.0, 1.0), std::invalid_argument);
}

TEST(MakeProfile, RejectsFactorsBelowOne) {
  const WindowConstants w = admissible_constants(*make_circle(), constant_hamiltonian(1.0), 0.0, 3.0);
  EXPECT_THROW(make_profile(w, 0.9, 1.05), std::invalid_argument);
  EXPECT_THROW(make_profile(w, 1.05, 0.5), std::invalid_argument);
  const CutoffProfile p = make_profile(w, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(p.kappa, 2.0 * w.kappa0);
  EXPECT_DOUBLE_EQ(p.R, 3.0 * w.R0);
}

TEST(FEval, Examples) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(kSqrt2);
  const CutoffProfile p = profile(10.0, 5.0, 1.4, 1.43);
  EXPECT_NEAR(F_eval(p, *c, h, 0.0, cp(0.2, 3.0)), 3 * kSqrt2 - 10, 1e-14);
  EXPECT_NEAR(F_eval(p, *c, h, 0.0, cp(0.2, 0.5)), -9.3, 1e-14);
  EXPECT_DOUBLE_EQ(p.beta(1.5), 0.5);
  EXPECT_NEAR(F_eval(p, *c, h, 0.0, cp(0.2, 1.5)), 1.5 * (0.5 * kSqrt2 + 0.5 * 1.4) - 10, 1e-14);
  EXPECT_NEAR(F_eval(p, *c, h, 0.0, cp(0.2, 1.5)), -7.889, 1e-3);
}

TEST(Beta, ShapeAndSlopes) {
  const CutoffProfile p = profile(3.0, 2.0, 1.0, 1.0);
  const double outer = p.outer();
  EXPECT_EQ(p.beta(0.3), 0.0);
  EXPECT_EQ(p.beta(1.0), 0.0);
  EXPECT_EQ(p.beta(2.0), 1.0);
  EXPECT_EQ(p.beta(outer), 1.0);
  EXPECT_EQ(p.beta(outer + 1.0), 0.0);
  EXPECT_EQ(p.beta(outer + 7.0), 0.0);
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    EXPECT_GE(p.beta_prime(1.0 + s), 0.0);
    EXPECT_LE(p.beta_prime(1.0 + s), 2.0);
    EXPECT_LE(p.beta_prime(outer + s), 0.0);
    EXPECT_GE(p.beta_prime(outer + s), -2.0);
    EXPECT_EQ(p.beta_prime(2.0 + s * (outer - 2.0)), 0.0);
  }
}

TEST(Beta, DerivativeMatchesDifferences) {
  const CutoffProfile p = profile(3.0, 2.0, 1.0, 1.0);
  for (double r : {1.1, 1.37, 1.9, 6.2, 6.5, 6.93}) {
    const double h = 1e-6;
    EXPECT_NEAR(p.beta_prime(r), (p.beta(r + h) - p.beta(r - h)) / (2 * h), 1e-7) << r;
  }
}

// Properties

class CutoffProperties : public ::testing::TestWithParam<int> {};

TEST_P(CutoffProperties, RampSignContinuityAndPlateau) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ModelPtr c = make_circle();
  const IsotopySpec h = sinusoid(1.0 + u(rng), 0.3 * u(rng), 1.0, 1.0);
  ConstantsOptions opts;
  opts.c_grid.points_per_dim = 16;
  opts.c_grid.time_samples = 16;
  const WindowConstants w = admissible_constants(*c, h, 0.0, 1.0 + 3.0 * u(rng), opts);
  EXPECT_GT(w.kappa0, 2.0 * w.M);
  EXPECT_GT(w.R0 * w.m, 1.0);
  EXPECT_GT(w.kappa0, std::max(1.0, 3.0 * w.M * std::exp(w.C)));
  EXPECT_GT(w.R0, std::max(std::exp(w.C) / w.m + 1.0, 1.0 / w.M));
  const CutoffProfile p = make_profile(w, 1.0 + u(rng), 1.0 + u(rng));
  const CutoffHamiltonian F(*c, h, p);
  // Ramp sign on a dense grid.
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j < 16; ++j) {
      const double x = j / 16.0;
      const double t = u(rng);
      for (double r : {1.0 + i / 200.0, p.outer() + i / 200.0}) {
        const double hv = h.value(Vec::Constant(1, x), t);
        EXPECT_GE(p.beta_prime(r) * (hv - p.frak_h(r)), 0.0);
      }
    }
  }
  // Continuity across r = 2 and r = R kappa, and the exact plateau.
  for (int j = 0; j < 16; ++j) {
    const double x = u(rng);
    const double t = u(rng);
    for (double knot : {2.0, p.outer()}) {
      const double lo = F_eval(p, *c, h, t, cp(x, knot - 1e-9));
      const double hi = F_eval(p, *c, h, t, cp(x, knot + 1e-9));
      EXPECT_NEAR(lo, hi, 1e-6 * std::max(1.0, knot));
    }
    const double r = 2.0 + (p.outer() - 2.0) * u(rng);
    const double lifted = r * h.value(Vec::Constant(1, x), t);
    EXPECT_NEAR(F_eval(p, *c, h, t, cp(x, r)) + p.kappa, lifted, 1e-14 * (lifted + p.kappa));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CutoffProperties, ::testing::Range(1, 7));
