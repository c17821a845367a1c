#include "crab/cutoff.hpp"
#include "crab/symplectization.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace crab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

ConePoint cp(double x, double r) { return {Vec::Constant(1, x), r}; }

IsotopySpec wave_x() {
  SinusoidalParams p;
  p.base = 1.0;
  p.amplitude = 0.5;
  p.kx = 1.0;
  return sinusoidal_hamiltonian(p);
}

Vec fd_gradient(const ConeFunction& F, const Vec& z, double t, double h = 1e-6) {
  Vec g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Vec a = z, b = z;
    a[i] += h;
    b[i] -= h;
    g[i] = (F.value(a, t) - F.value(b, t)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(LiftPoint, RotationKeepsRadius) {
  const ModelPtr c = make_circle();
  const ConePoint q = lift_point(*c, constant_hamiltonian(kSqrt2), 0.5, cp(0.25, 2.0));
  EXPECT_NEAR(q.x[0], 0.95711, 1e-5);
  EXPECT_NEAR(q.r, 2.0, 1e-14);
}

TEST(LiftPoint, TimeZeroIsIdentity) {
  const ModelPtr t = make_flat_torus(2);
  const ConePoint p{t->sample(3)[2], 1.7};
  const ConePoint q = lift_point(*t, constant_hamiltonian(1.3), 0.0, p);
  EXPECT_EQ(q.x, p.x);
  EXPECT_EQ(q.r, p.r);
}

TEST(LiftPoint, WaveOnCirclePreservesLiouvilleForm) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = wave_x();
  const ConePoint q = lift_point(*c, h, 0.2, cp(0.1, 1.0));
  const FlowResult f = flow(*c, h, Vec::Constant(1, 0.1), 0.2);
  EXPECT_NEAR(q.r, 1.0 / f.rho, 1e-12);
  EXPECT_LE(lift_pullback_defect(*c, h, 0.2, cp(0.1, 1.0)), 1e-6);
}

TEST(LiftPoint, RejectsNonpositiveRadius) {
  const ModelPtr c = make_circle();
  EXPECT_THROW(lift_point(*c, constant_hamiltonian(1.0), 0.1, cp(0.1, 0.0)), DomainError);
}

TEST(HamiltonianField, RotationLift) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(kSqrt2);
  const LiftedHamiltonian F(*c, h, 3.0);
  const Vec X = hamiltonian_vector_field(*c, F, 0.0, c->to_cone(cp(0.4, 2.5))).X;
  EXPECT_NEAR(X[0], kSqrt2, 1e-14);
  EXPECT_NEAR(X[1], 0.0, 1e-14);
}

TEST(HamiltonianField, RadialFunctionOnCircle) {
  const ModelPtr c = make_circle();
  const RadialFunction F(*c, [](double r) { return r * r * r; }, [](double r) { return 3 * r * r; });
  const Vec X = hamiltonian_vector_field(*c, F, 0.0, c->to_cone(cp(0.7, 1.5))).X;
  EXPECT_NEAR(X[0], 3 * 1.5 * 1.5, 1e-12);
  EXPECT_NEAR(X[1], 0.0, 1e-14);
}

TEST(HamiltonianField, InteriorProductMatchesDifferential) {
  KineticEnergyParams kp;
  kp.weights = {2.0, 3.0};
  kp.modulation = 0.2;
  const ModelPtr models[] = {make_circle(), make_flat_torus(2), make_ellipsoid({1.0, 1.4})};
  const IsotopySpec specs[] = {wave_x(), kinetic_energy_hamiltonian(2, kp), wave_x()};
  for (int k = 0; k < 3; ++k) {
    const ContactModel& m = *models[k];
    const LiftedHamiltonian F(m, specs[k], 1.0);
    for (const ConeSample& s : random_cone_samples(m, 20, 0.5, 4.0, 0.0, 1.0, 5 + k)) {
      const Vec X = hamiltonian_vector_field(m, F, s.t, s.z).X;
      const Vec dF = fd_gradient(F, s.z, s.t);
      // omega(X, v) = X^T Omega v must equal -dF(v) for every v.
      const Vec lhs = m.symplectic_matrix().transpose() * X;
      EXPECT_LE((lhs + dF).norm(), 1e-8 * std::max(1.0, dF.norm())) << m.name();
    }
  }
}

TEST(HamiltonianField, CutoffPlateauMatchesLift) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = wave_x();
  CutoffProfile prof;
  prof.kappa = 10.0;
  prof.R = 5.0;
  prof.m = 0.49;
  prof.M = 1.51;
  const CutoffHamiltonian F(*c, h, prof);
  const LiftedHamiltonian L(*c, h, prof.kappa);
  for (const ConeSample& s : random_cone_samples(*c, 100, 2.0, prof.outer(), 0.0, 1.0, 3)) {
    const Vec a = hamiltonian_vector_field(*c, F, s.t, s.z).X;
    const Vec b = hamiltonian_vector_field(*c, L, s.t, s.z).X;
    EXPECT_LE((a - b).norm(), 1e-8);
  }
}

TEST(HamiltonianField, KnotIsFlaggedOneSided) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(1.0);
  CutoffProfile prof;
  prof.kappa = 10.0;
  prof.R = 5.0;
  prof.m = 0.9;
  prof.M = 1.1;
  const CutoffHamiltonian F(*c, h, prof);
  EXPECT_TRUE(hamiltonian_vector_field(*c, F, 0.0, c->to_cone(cp(0.3, 2.0))).one_sided);
  EXPECT_FALSE(hamiltonian_vector_field(*c, F, 0.0, c->to_cone(cp(0.3, 3.0))).one_sided);
}

TEST(LiouvilleIdentity, ExactLift) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(kSqrt2);
  const double kappa = 4.0;
  const LiftedHamiltonian F(*c, h, kappa);
  const auto samples = random_cone_samples(*c, 50, 0.1, 20.0, 0.0, 1.0, 1);
  EXPECT_LE(verify_liouville_identity(*c, F, kappa, samples), 1e-12);
}

TEST(LiouvilleIdentity, CutoffPlateauAndRamp) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = wave_x();
  CutoffProfile prof;
  prof.kappa = 10.0;
  prof.R = 5.0;
  prof.m = 0.49;
  prof.M = 1.51;
  const CutoffHamiltonian F(*c, h, prof);
  const ConeSample plateau{c->to_cone(cp(0.3, 3.0)), 0.4};
  EXPECT_LE(std::abs(liouville_defect(*c, F, prof.kappa, plateau)), 1e-6);
  for (double x : {0.0, 0.2, 0.45, 0.8}) {
    const ConeSample ramp{c->to_cone(cp(x, 1.5)), 0.1};
    const double d = liouville_defect(*c, F, prof.kappa, ramp);
    const double expected = 1.5 * 1.5 * prof.beta_prime(1.5) * (h.value(Vec::Constant(1, x), 0.1) - prof.frak_h(1.5));
    EXPECT_NEAR(d, expected, 1e-6);
    EXPECT_GE(d, 0.0);
  }
}

// Properties

TEST(SymplectizationProperties, LiftPreservesLiouvilleForm) {
  KineticEnergyParams kp;
  kp.weights = {2.0, 3.0};
  kp.modulation = 0.3;
  const ModelPtr models[] = {make_circle(), make_flat_torus(2)};
  SinusoidalParams sp;
  sp.base = 1.5;
  sp.amplitude = 0.4;
  sp.kx = 1.0;
  sp.kt = 1.0;
  const IsotopySpec specs[] = {sinusoidal_hamiltonian(sp), kinetic_energy_hamiltonian(2, kp)};
  for (int k = 0; k < 2; ++k)
    for (const ConeSample& s : random_cone_samples(*models[k], 100, 0.5, 5.0, 0.0, 2.0, 40 + k))
      EXPECT_LE(lift_pullback_defect(*models[k], specs[k], s.t, models[k]->from_cone(s.z)), 1e-6);
}

TEST(SymplectizationProperties, DiscriminantEquivalence) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = constant_hamiltonian(kSqrt2);
  const double eta = 1.0 / kSqrt2;
  for (double r : {1.0, 2.0, 5.0}) {
    const ConePoint q = lift_point(*c, h, eta, cp(0.3, r));
    EXPECT_LE(c->distance(q.x, Vec::Constant(1, 0.3)), 1e-10);
    EXPECT_NEAR(q.r, r, 1e-12);
    const ConePoint w = lift_point(*c, h, 0.5, cp(0.3, r));
    EXPECT_GT(c->distance(w.x, Vec::Constant(1, 0.3)), 1e-3);
  }
  // On the torus, a closed geodesic of length 1 returns with the same r.
  const ModelPtr t = make_flat_torus(2);
  Vec x(4);
  x << 0.2, 0.7, 0.0, 1.0;
  for (double r : {1.0, 2.0, 5.0}) {
    const ConePoint q = lift_point(*t, constant_hamiltonian(1.0), 1.0, {x, r});
    EXPECT_LE(t->distance(q.x, x), 1e-9);
    EXPECT_NEAR(q.r, r, 1e-10);
  }
}

TEST(SymplectizationProperties, Homogeneity) {
  const ModelPtr c = make_circle();
  const IsotopySpec h = wave_x();
  const LiftedHamiltonian F(*c, h);
  for (double x : {0.1, 0.5, 0.77})
    for (double r : {0.3, 1.0, 7.5})
      EXPECT_EQ(F.value(c->to_cone(cp(x, 2 * r)), 0.2), 2 * F.value(c->to_cone(cp(x, r)), 0.2));
  const ModelPtr t = make_flat_torus(2);
  const LiftedHamiltonian G(*t, constant_hamiltonian(1.7));
  for (const Vec& x : t->sample(3)) {
    const double one = G.value(t->to_cone({x, 1.3}), 0.0);
    EXPECT_GT(one, 0.0);
    EXPECT_NEAR(G.value(t->to_cone({x, 2.6}), 0.0), 2 * one, 1e-14);
  }
}
