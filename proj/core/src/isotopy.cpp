#include "crab/isotopy.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>
#include <utility>

namespace crab {

namespace {
constexpr double kFdStep = 1e-6;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

IsotopySpec::IsotopySpec(std::string label, ScalarField h, ScalarField dh_dt,
                         GradientField dh_dx, bool autonomous)
    : label_(std::move(label)),
      h_(std::move(h)),
      dh_dt_(std::move(dh_dt)),
      dh_dx_(std::move(dh_dx)),
      autonomous_(autonomous),
      warned_(std::make_shared<bool>(false)) {
  if (!h_) throw std::invalid_argument("IsotopySpec: missing Hamiltonian");
}

void IsotopySpec::warn_fallback(const char* which) const {
  if (*warned_) return;
  *warned_ = true;
  spdlog::warn("isotopy '{}': {} not supplied, using central differences (step {})", label_,
               which, kFdStep);
}

double IsotopySpec::time_derivative(const Vec& x, double t) const {
  if (dh_dt_) return dh_dt_(x, t);
  if (autonomous_) return 0.0;
  warn_fallback("dh_dt");
  return (h_(x, t + kFdStep) - h_(x, t - kFdStep)) / (2.0 * kFdStep);
}

Vec IsotopySpec::gradient(const Vec& x, double t) const {
  if (dh_dx_) return dh_dx_(x, t);
  warn_fallback("dh_dx");
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + kFdStep;
    const double fp = h_(xp, t);
    xp[i] = x[i] - kFdStep;
    const double fm = h_(xp, t);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * kFdStep);
  }
  return g;
}

IsotopySpec constant_hamiltonian(double c) {
  return IsotopySpec(
      "constant", [c](const Vec&, double) { return c; }, [](const Vec&, double) { return 0.0; },
      [](const Vec& x, double) { return Vec::Zero(x.size()).eval(); }, true);
}

IsotopySpec sinusoidal_hamiltonian(const SinusoidalParams& p) {
  if (p.coordinate < 0) throw std::invalid_argument("sinusoidal: negative coordinate index");
  auto phase = [p](const Vec& x, double t) {
    const double xc = p.kx != 0.0 ? x[p.coordinate] : 0.0;
    return kTwoPi * (p.kx * xc + p.kt * t) + p.phase;
  };
  return IsotopySpec(
      "sinusoidal",
      [p, phase](const Vec& x, double t) { return p.base + p.amplitude * std::sin(phase(x, t)); },
      [p, phase](const Vec& x, double t) {
        return p.amplitude * kTwoPi * p.kt * std::cos(phase(x, t));
      },
      [p, phase](const Vec& x, double t) {
        Vec g = Vec::Zero(x.size());
        if (p.kx != 0.0) g[p.coordinate] = p.amplitude * kTwoPi * p.kx * std::cos(phase(x, t));
        return g;
      },
      p.kt == 0.0);
}

IsotopySpec kinetic_energy_hamiltonian(int n, const KineticEnergyParams& params) {
  if (n < 1) throw std::invalid_argument("kinetic-energy: torus dimension must be positive");
  std::vector<double> w = params.weights;
  if (w.empty()) w.assign(static_cast<std::size_t>(n), 1.0);
  if (static_cast<int>(w.size()) != n)
    throw std::invalid_argument("kinetic-energy: need one weight per torus dimension");
  const double eps = params.modulation;
  return IsotopySpec(
      "kinetic-energy",
      [n, w, eps](const Vec& x, double) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
          const double pj = x[n + j];
          s += w[j] * (1.0 + eps * std::cos(kTwoPi * x[j])) * pj * pj;
        }
        return 0.5 * s;
      },
      [](const Vec&, double) { return 0.0; },
      [n, w, eps](const Vec& x, double) {
        Vec g(2 * n);
        for (int j = 0; j < n; ++j) {
          const double pj = x[n + j];
          g[j] = -0.5 * w[j] * eps * kTwoPi * std::sin(kTwoPi * x[j]) * pj * pj;
          g[n + j] = w[j] * (1.0 + eps * std::cos(kTwoPi * x[j])) * pj;
        }
        return g;
      },
      true);
}

}  // namespace crab
