#include "crab/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace crab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

IsotopySpec sin_in_x(double base, double amp) {
  SinusoidalParams p;
  p.base = base;
  p.amplitude = amp;
  p.kx = 1.0;
  return sinusoidal_hamiltonian(p);
}

IsotopySpec sin_in_t(double base, double amp) {
  SinusoidalParams p;
  p.base = base;
  p.amplitude = amp;
  p.kt = 1.0;
  return sinusoidal_hamiltonian(p);
}

}  // namespace

TEST(ContactVectorField, ConstantOnCircleIsRotation) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(kSqrt2);
  for (double x : {0.0, 0.3, 0.9}) {
    const Vec y = contact_vector_field(*c, h, 0.0, vec({x}));
    EXPECT_NEAR(y[0], kSqrt2, 1e-14);
    EXPECT_NEAR(c->alpha(vec({x})).dot(y), kSqrt2, 1e-10);
  }
}

TEST(ContactVectorField, CircleHasNoXiComponent) {
  const ModelPtr c = make_circle();
  const Vec y = contact_vector_field(*c, sin_in_x(1.0, 0.5), 0.0, vec({0.0}));
  EXPECT_NEAR(y[0], 1.0, 1e-12);
}

TEST(ContactVectorField, TorusUnitHamiltonianIsReeb) {
  const ModelPtr t = make_flat_torus(2);
  const Vec x = vec({0, 0, 1, 0});
  const Vec y = contact_vector_field(*t, constant_hamiltonian(1.0), 0.0, x);
  EXPECT_NEAR(t->alpha(x).dot(y), 1.0, 1e-12);
  EXPECT_LE((y - t->reeb(x)).norm(), 1e-12);
}

TEST(ContactVectorField, AlphaOfFieldIsH) {
  KineticEnergyParams kp;
  kp.weights = {2.0, 3.0};
  kp.modulation = 0.2;
  const ModelPtr t = make_flat_torus(2);
  const IsotopySpec h = kinetic_energy_hamiltonian(2, kp);
  const ModelPtr e = make_ellipsoid({1.0, kSqrt2});
  SinusoidalParams sp;
  sp.base = 1.5;
  sp.amplitude = 0.3;
  sp.kx = 1.0;
  sp.kt = 1.0;
  sp.coordinate = 1;
  const IsotopySpec he = sinusoidal_hamiltonian(sp);
  for (const Vec& x : t->sample(4))
    EXPECT_NEAR(t->alpha(x).dot(contact_vector_field(*t, h, 0.3, x)), h.value(x, 0.3), 1e-10);
  for (const Vec& x : e->sample(4))
    EXPECT_NEAR(e->alpha(x).dot(contact_vector_field(*e, he, 0.7, x)), he.value(x, 0.7), 1e-10);
}

TEST(ContactVectorField, OutsideChartThrows) {
  const ModelPtr t = make_flat_torus(2);
  EXPECT_THROW(contact_vector_field(*t, constant_hamiltonian(1.0), 0.0, vec({0, 0, 2, 0})), DomainError);
}

TEST(ContactModel, ReebNormalization) {
  for (const ModelPtr& m : {make_circle(), make_flat_torus(2), make_flat_torus(3), make_ellipsoid({1.0, 2.0})}) {
    for (const Vec& x : m->sample(4)) {
      const Vec r = m->reeb(x);
      EXPECT_NEAR(m->alpha(x).dot(r), 1.0, 1e-10) << m->name();
      const Mat B = m->tangent_basis(x);
      EXPECT_LE((B.transpose() * m->dalpha(x) * r).norm(), 1e-10) << m->name();
    }
  }
}

TEST(ContactModel, ContactCondition) {
  // alpha ^ (d alpha)^n != 0 on the grid: d alpha restricted to T Sigma has a
  // one-dimensional kernel (the Reeb line) and alpha does not vanish on it.
  for (const ModelPtr& m : {make_flat_torus(2), make_flat_torus(3), make_ellipsoid({1.0, 2.0})}) {
    for (const Vec& x : m->sample(4)) {
      const Mat B = m->tangent_basis(x);
      const Eigen::JacobiSVD<Mat> svd(B.transpose() * m->dalpha(x) * B);
      const Vec s = svd.singularValues();
      int zero = 0;
      for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] < 1e-8) ++zero;
      EXPECT_EQ(zero, 1) << m->name();
      EXPECT_GT(std::abs(m->alpha(x).dot(m->reeb(x))), 0.5) << m->name();
    }
  }
}

TEST(Flow, CircleRotationExample) {
  const ModelPtr c = make_circle();
  const FlowResult r = flow(*c, constant_hamiltonian(kSqrt2), vec({0.25}), 0.5);
  EXPECT_NEAR(r.x_end[0], std::fmod(0.25 + 0.5 * kSqrt2, 1.0), 1e-10);
  EXPECT_NEAR(r.x_end[0], 0.95711, 1e-5);
  EXPECT_EQ(r.rho, 1.0);
}

TEST(Flow, TimeZeroIsIdentity) {
  for (const ModelPtr& m : {make_circle(), make_flat_torus(2), make_ellipsoid({1.0, 1.5})}) {
    const Vec x = m->sample(3)[1];
    const FlowResult r = flow(*m, sin_in_x(1.5, 0.2), x, 0.0);
    EXPECT_EQ(r.x_end, x);
    EXPECT_EQ(r.rho, 1.0);
  }
}

TEST(Flow, TorusGeodesicExample) {
  const ModelPtr t = make_flat_torus(2);
  const FlowResult r = flow(*t, constant_hamiltonian(1.0), vec({0, 0, 1, 0}), 0.3);
  EXPECT_LE((r.x_end - vec({0.3, 0, 1, 0})).norm(), 1e-10);
  EXPECT_NEAR(r.rho, 1.0, 1e-12);
}

TEST(Flow, NegativeTimeInverts) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = sin_in_x(1.2, 0.3);
  const FlowResult f = flow(*c, h, vec({0.4}), 0.7);
  const FlowSample back = flow_between(*c, h, f.x_end, f.rho, 0.7, 0.0);
  EXPECT_LE(c->distance(back.x, vec({0.4})), 1e-9);
  EXPECT_NEAR(back.rho, 1.0, 1e-9);
}

TEST(ValidatePath, Examples) {
  const ModelPtr c = make_circle();
  const PathReport a = validate_path(*c, constant_hamiltonian(kSqrt2));
  EXPECT_TRUE(a.positive);
  EXPECT_TRUE(a.twisted_periodic);
  EXPECT_FALSE(validate_path(*c, constant_hamiltonian(-1.0)).positive);
  const PathReport b = validate_path(*c, sin_in_t(1.0, 0.5), PathGrid{32, 32});
  EXPECT_TRUE(b.positive);
  EXPECT_TRUE(b.twisted_periodic);
  EXPECT_LE(b.max_violation, 1e-6);
}

TEST(ValidatePath, NonPeriodicTimeDependenceFails) {
  const ModelPtr c = make_circle();
  SinusoidalParams p;
  p.base = 1.0;
  p.amplitude = 0.5;
  p.kx = 1.0;
  p.kt = 0.5;
  const PathReport r = validate_path(*c, sinusoidal_hamiltonian(p), PathGrid{8, 8});
  EXPECT_TRUE(r.positive);
  EXPECT_FALSE(r.twisted_periodic);
}

// Properties

class FlowProperties : public ::testing::TestWithParam<int> {};

TEST_P(FlowProperties, CompositionAndCocycle) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ModelPtr models[] = {make_circle(), make_flat_torus(2), make_ellipsoid({1.0, 1.3})};
  for (const ModelPtr& m : models) {
    SinusoidalParams p;
    p.base = 1.5;
    p.amplitude = 0.3 * u(rng);
    p.kx = 1.0;
    p.coordinate = m->kind() == ModelKind::Circle ? 0 : 1;
    const IsotopySpec h = sinusoidal_hamiltonian(p);
    const auto pts = m->sample(4);
    const Vec x = pts[rng() % pts.size()];
    const double s = 2.0 * u(rng);
    const double t = 2.0 * u(rng);
    const FlowResult ft = flow(*m, h, x, t);
    const FlowResult fst = flow(*m, h, ft.x_end, s);
    const FlowResult whole = flow(*m, h, x, s + t);
    EXPECT_LE(m->distance(fst.x_end, whole.x_end), 1e-6) << m->name();
    EXPECT_NEAR(whole.rho, fst.rho * ft.rho, 1e-6) << m->name();
    EXPECT_GT(whole.rho, 0.0);
  }
}

TEST_P(FlowProperties, IntegerTimesArePowers) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SinusoidalParams p;
  p.base = 1.3;
  p.amplitude = 0.2;
  p.kx = 1.0;
  p.kt = 1.0;
  p.phase = u(rng);
  const IsotopySpec h = sinusoidal_hamiltonian(p);
  const ModelPtr c = make_circle();
  Vec x = Vec::Constant(1, u(rng));
  const Vec x0 = x;
  for (int k = 1; k <= 5; ++k) {
    x = flow(*c, h, x, 1.0).x_end;
    EXPECT_LE(c->distance(x, flow(*c, h, x0, k).x_end), 1e-6) << "m=" << k;
  }
}

TEST_P(FlowProperties, TimeOnlyHamiltonianKeepsRhoOne) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 200);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ModelPtr c = make_circle();
  const IsotopySpec h = sin_in_t(1.0 + u(rng), 0.5 * u(rng));
  const FlowResult r = flow(*c, h, Vec::Constant(1, u(rng)), 3.0 * u(rng));
  EXPECT_NEAR(r.rho, 1.0, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Seeds, FlowProperties, ::testing::Range(1, 9));
