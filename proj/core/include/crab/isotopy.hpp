#pragma once

#include "crab/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace crab {

using ScalarField = std::function<double(const Vec& x, double t)>;
using GradientField = std::function<Vec(const Vec& x, double t)>;

/// A contact Hamiltonian h_t on Σ, given in the ambient point coordinates of
/// a model, together with its derivatives.
///
/// The path φ_t it generates is positive when h > 0 and twisted periodic
/// when h is 1-periodic in t. Both properties are checked on grids by
/// validate_path(); nothing here enforces them.
///
/// Missing derivatives fall back to central differences with step 1e-6 and
/// emit a single warning per spec.
class IsotopySpec {
 public:
  IsotopySpec(std::string label, ScalarField h, ScalarField dh_dt = {},
              GradientField dh_dx = {}, bool autonomous = false);

  const std::string& label() const { return label_; }
  bool autonomous() const { return autonomous_; }
  bool has_time_derivative() const { return static_cast<bool>(dh_dt_); }
  bool has_gradient() const { return static_cast<bool>(dh_dx_); }

  double value(const Vec& x, double t) const { return h_(x, t); }
  double time_derivative(const Vec& x, double t) const;
  /// Ambient gradient; only its tangential part is meaningful.
  Vec gradient(const Vec& x, double t) const;

 private:
  void warn_fallback(const char* which) const;

  std::string label_;
  ScalarField h_;
  ScalarField dh_dt_;
  GradientField dh_dx_;
  bool autonomous_ = false;
  std::shared_ptr<bool> warned_;
};

/// h ≡ c.
IsotopySpec constant_hamiltonian(double c);

/// h(x, t) = base + amplitude * sin(2π (kx * x[coordinate] + kt * t) + phase).
/// Integer kx keeps h periodic in a periodic coordinate; integer kt keeps it
/// 1-periodic in time.
struct SinusoidalParams {
  double base = 1.0;
  double amplitude = 0.0;
  double kx = 0.0;
  double kt = 0.0;
  double phase = 0.0;
  int coordinate = 0;
};
IsotopySpec sinusoidal_hamiltonian(const SinusoidalParams& params);

/// Kinetic energy on the unit cotangent bundle of the flat torus T^n:
/// h(q, p) = 1/2 * sum_j w_j (1 + modulation * cos(2π q_j)) p_j^2.
/// Positive on |p| = 1 whenever all w_j > 0 and |modulation| < 1.
struct KineticEnergyParams {
  std::vector<double> weights;
  double modulation = 0.0;
};
IsotopySpec kinetic_energy_hamiltonian(int torus_dim, const KineticEnergyParams& params);

}  // namespace crab
