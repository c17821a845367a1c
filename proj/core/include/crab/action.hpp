#pragma once

#include "crab/cutoff.hpp"
#include "crab/geometry.hpp"
#include "crab/symplectization.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crab {

/// A discretized loop in the cone chart, node i at time i/N, with multiplier η.
/// Consecutive nodes are joined by the shortest chart displacement, so
/// periodic coordinates need not be unwrapped.
struct Loop {
  std::vector<Vec> z;
  double eta = 0.0;

  std::size_t size() const { return z.size(); }
};

/// A discretized path with endpoints on two Lagrangians, node i at time i/(N−1).
struct Chord {
  std::vector<Vec> z;
  double eta = 0.0;
};

struct GradientVector {
  std::vector<Vec> loop_part;
  double eta_part = 0.0;
};

/// Normalized Rabinowitz functional (1/κ)(∫u^*λ − η∫F_{ηt}(u) dt) for the
/// cutoff Hamiltonian F = F^{κ,R}, discretized on loops.
///
/// ∫u^*λ is the midpoint sum Σ λ_{z̄_i}(Δz_i), exact for the bilinear chart
/// form, and ∫F uses the trapezoid rule on [0, 1] with u(1) = u(0). The
/// loop part of the gradient at node i is the central difference
/// (z_{i+1} − z_{i−1}) N/2 minus η times X_F averaged as the trapezoid
/// weights dictate; with these choices it is the exact gradient of the
/// discrete action in the pairing of pairing().
class RabinowitzFunctional {
 public:
  RabinowitzFunctional(const ContactModel& model, const IsotopySpec& spec,
                       const CutoffProfile& profile)
      : model_(model), spec_(spec), F_(model, spec, profile) {}

  const ContactModel& model() const { return model_; }
  const IsotopySpec& spec() const { return spec_; }
  const CutoffHamiltonian& hamiltonian() const { return F_; }
  double kappa() const { return F_.profile().kappa; }

  double action(const Loop& loop) const;
  GradientVector gradient(const Loop& loop) const;
  /// ‖∇𝒜‖²_κ = (1/κ)(1/N)Σ|G_i|² + (1/κ)G_η², square-rooted.
  double gradient_norm(const GradientVector& g) const;
  double gradient_norm(const Loop& loop) const { return gradient_norm(gradient(loop)); }
  /// d𝒜 applied to the variation (ξ, l) given the gradient at the same loop.
  double pairing(const GradientVector& g, const std::vector<Vec>& xi, double l) const;

  /// Moves every node by `step` times the variation, η by step·l.
  Loop displaced(const Loop& loop, const std::vector<Vec>& xi, double l, double step) const;

 private:
  const ContactModel& model_;
  const IsotopySpec& spec_;
  CutoffHamiltonian F_;
};

void check_loop(const ContactModel& model, const Loop& loop);

enum class DescentMode {
  /// Damped Gauss-Newton on ½‖∇𝒜‖²_κ; the gradient norm never increases.
  Residual,
  /// Steepest descent on 𝒜 itself; the action never increases.
  Action,
};

struct DescendOptions {
  DescentMode mode = DescentMode::Residual;
  int max_steps = 200;
  double tol = 1e-8;
  double armijo = 1e-4;
  int max_backtracks = 40;
  /// Initial Levenberg-Marquardt damping, relative to the largest diagonal entry.
  double damping = 1e-10;
};

struct DescendResult {
  Loop loop;
  bool converged = false;
  int accepted_steps = 0;
  double gradient_norm = 0.0;
  double action = 0.0;
  /// One entry per iterate, starting with the input.
  std::vector<double> action_history;
  std::vector<double> norm_history;
};

DescendResult descend(const RabinowitzFunctional& A, const Loop& start,
                      const DescendOptions& opts = {});

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 30;
  /// Newton is abandoned when η leaves [η₀ − radius, η₀ + radius].
  double eta_radius = 0.1;
  double fd_step = 1e-7;
  double integrator_tol = 1e-12;
  /// Singular values below this fraction of the largest are dropped.
  double svd_cutoff = 1e-9;
  int nodes = 256;
};

struct RefineResult {
  Loop loop;
  bool converged = false;
  int iterations = 0;
  /// Chart distance between the shooting return and the start.
  double residual_z = 0.0;
  /// |F_η(u(1))|.
  double residual_F = 0.0;
  /// 𝒜 evaluated along the integrated trajectory.
  double action = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  /// Smallest singular value of the shooting Jacobian relative to the largest.
  double relative_sigma_min = 0.0;
  std::string message;
};

/// Single shooting on (u(0), η) for u̇ = ηX_{F_{ηt}}(u), u(1) = u(0),
/// F_η(u(1)) = 0. The least-squares Newton step drops singular directions,
/// which absorbs Morse-Bott families.
RefineResult refine_newton(const RabinowitzFunctional& A, const Loop& guess,
                           const NewtonOptions& opts = {});

struct Trajectory {
  std::vector<Vec> z;
  double lambda_integral = 0.0;
  double F_integral = 0.0;
};

/// Integrates u̇ = ηX_{F_{ηt}}(u) from z0 over [0, 1], sampling `nodes`
/// equally spaced times in [0, 1) and the endpoint (nodes + 1 states), and
/// accumulating ∫λ(u̇) and ∫F_{ηt}(u).
Trajectory shoot(const RabinowitzFunctional& A, const Vec& z0, double eta, int nodes,
                 double tol = 1e-12);

/// Loop through z(t) = φ̂_{ηt}(x, r₀) with r₀ = κ / h_η(x), so that F_η(u(1)) = 0
/// when (x, η) is a discriminant point.
Loop loop_from_discriminant(const RabinowitzFunctional& A, const Vec& x, double eta,
                            int nodes = 256);

/// Constant loop at the cone point p.
Loop constant_loop(const ContactModel& model, const ConePoint& p, double eta, int nodes);

/// Smooth random perturbation: each chart coordinate gets a few Fourier modes
/// with total amplitude about `amplitude`.
std::vector<Vec> random_variation(std::size_t nodes, int dim, double amplitude, int modes,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Chords

/// ∫u^*λ − η∫(H_{ηt}(u) − 1) dt for a chord sampled from a flow line of the
/// pure lift H = r h, using trapezoid/midpoint rules as for loops.
double chord_action(const ContactModel& model, const IsotopySpec& spec, const Chord& chord);

/// The chord t ↦ φ̂_{ηt}(x, 1/h_0(x)) with `nodes` samples, starting on the
/// level H = 1.
Chord chord_from_point(const ContactModel& model, const IsotopySpec& spec, const Vec& x,
                       double eta, int nodes = 257);

// ---------------------------------------------------------------------------
// Fundamental-lemma probe

struct ProbeOptions {
  int samples = 200;
  double max_amplitude = 0.5;
  double max_eta_shift = 0.5;
  std::uint64_t seed = 0;
};

struct ProbeResult {
  /// Largest ε (capped at 1) such that every sample with ‖∇𝒜‖ < ε obeys
  /// |η| ≤ (𝒜 + 1)/ε.
  double epsilon = 0.0;
  int samples = 0;
  double min_gradient_norm = 0.0;
  double max_gradient_norm = 0.0;
};

ProbeResult fundamental_lemma_probe(const RabinowitzFunctional& A, const Loop& critical,
                                    const ProbeOptions& opts = {});

/// Delimiter-separated dump: comment header lines, then t, chart coordinates, r.
std::string loop_table(const ContactModel& model, const Loop& loop, double action,
                       double gradient_norm);

}  // namespace crab
