#pragma once

#include "crab/geometry.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace crab {

/// (x, η) with φ_η(x) = x and ρ_η(x) = 1.
struct DiscriminantPoint {
  Vec x;
  double eta = 0.0;
  /// Normalized action; equals η at every discriminant point.
  double action = 0.0;
  double residual_x = 0.0;
  double residual_rho = 0.0;
  int component_id = -1;
  bool nondegenerate = false;
  double sigma_min = 0.0;
};

/// x ∈ Λ₀ (unit fibre over q₀) with φ_η(x) over q₁.
struct LegendrianChordPoint {
  Vec x;
  double eta = 0.0;
  Vec endpoint;
  double residual = 0.0;
  double action = 0.0;
};

/// (dist(φ_η(x), x), |ρ_η(x) − 1|).
std::pair<double, double> residual(const ContactModel& model, const IsotopySpec& spec,
                                   const Vec& x, double eta, double tol = 1e-12);

struct SearchOptions {
  /// η grid density along each seed's flow line.
  int seeds_per_unit = 32;
  /// Seeds per chart dimension on Σ.
  int points_per_dim = 32;
  double tol = 1e-10;
  /// Grid minima of dist + |ρ − 1| below this are refined.
  double candidate_threshold = 0.3;
  double dedup_tol = 1e-4;
  double cluster_tol = 1e-6;
  /// Points of one component are chained within this multiple of the seed spacing.
  double chain_factor = 2.5;
  double nondegeneracy_tol = 1e-6;
  double fd_step = 1e-6;
  int max_newton = 30;
  int threads = 1;
};

struct Component {
  int id = 0;
  double eta = 0.0;
  /// Number of refined points in the component.
  int multiplicity = 0;
  bool nondegenerate = false;
  DiscriminantPoint representative;
};

struct SearchStats {
  long seeds = 0;
  long candidates = 0;
  long converged = 0;
  long unique = 0;
};

struct DiscriminantResult {
  std::vector<DiscriminantPoint> points;
  std::vector<Component> components;
  SearchStats stats;
};

/// Discriminant points with η ∈ (a, b]. Each seed x is flowed once across the
/// window; local minima of the return defect become Gauss-Newton starts in
/// (tangent directions of x, η). Results are sorted on (η, coordinates) and
/// grouped into components, so the output does not depend on threading.
DiscriminantResult find_discriminant(const ContactModel& model, const IsotopySpec& spec,
                                     double a, double b, const SearchOptions& opts = {});

/// Union-find grouping: two points join when |Δη| ≤ cluster_tol and their
/// distance is at most `link_distance`. Points are renumbered in place.
std::vector<Component> cluster_components(std::vector<DiscriminantPoint>& points,
                                          const ContactModel& model, double cluster_tol,
                                          double link_distance);

struct ChordOptions {
  int seeds_per_unit = 32;
  /// Minimum number of fibre directions; the count grows with b.
  int min_directions = 64;
  double tol = 1e-10;
  double candidate_threshold = 0.3;
  double dedup_tol = 1e-6;
  double fd_step = 1e-6;
  int max_newton = 30;
  int threads = 1;
};

/// Chords from the unit fibre over q0 to the fibre over q1 with η ∈ (a, b].
/// Only for the flat torus; throws UnsupportedError otherwise and
/// std::invalid_argument if the fibres coincide.
std::vector<LegendrianChordPoint> find_chords(const ContactModel& model, const IsotopySpec& spec,
                                              const Vec& q0, const Vec& q1, double a, double b,
                                              const ChordOptions& opts = {});

/// True iff no found η ≠ 0 lies within 1e-6 of an integer.
bool check_nonresonant(const std::vector<DiscriminantPoint>& points, double tol = 1e-6);
bool check_nonresonant(const ContactModel& model, const IsotopySpec& spec, double a, double b,
                       const SearchOptions& opts = {});

/// A contactomorphism from the supported catalog, with ψ^*α = f α.
struct Contactomorphism {
  enum class Kind { Identity, CircleRotation, CircleDiffeo, TorusTranslation };
  Kind kind = Kind::Identity;
  /// Rotation angle for CircleRotation, ε in x ↦ x + ε sin 2πx for CircleDiffeo.
  double parameter = 0.0;
  /// Translation for TorusTranslation.
  Vec shift;

  static Contactomorphism identity() { return {}; }
  static Contactomorphism circle_rotation(double c) { return {Kind::CircleRotation, c, {}}; }
  /// Requires |2πε| < 1.
  static Contactomorphism circle_diffeo(double eps);
  static Contactomorphism torus_translation(Vec c) { return {Kind::TorusTranslation, 0.0, std::move(c)}; }

  Vec apply(const Vec& x) const;
  Vec inverse(const Vec& y) const;
  double factor(const Vec& x) const;
  double factor_derivative(const Vec& x) const;
};

/// The IsotopySpec of ψ φ_t ψ⁻¹, whose Hamiltonian is (f h_t) ∘ ψ⁻¹. Throws
/// UnsupportedError if ψ does not belong to the model.
IsotopySpec conjugate_spec(const ContactModel& model, const IsotopySpec& spec,
                           const Contactomorphism& psi);

struct EquivarianceReport {
  int components_original = 0;
  int components_conjugate = 0;
  /// Largest |Δη| between matched components.
  double max_eta_gap = 0.0;
  /// Largest return defect of the conjugated flow at (ψ(x), η) over original points.
  double max_x_gap = 0.0;
  bool matched = false;
};

EquivarianceReport conjugation_equivariance(const ContactModel& model, const IsotopySpec& spec,
                                            const Contactomorphism& psi, double a, double b,
                                            const SearchOptions& opts = {});

/// Runs body(i) for i in [0, n) on up to `threads` threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace crab
