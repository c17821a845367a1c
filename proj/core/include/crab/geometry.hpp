#pragma once

#include "crab/integrator.hpp"
#include "crab/isotopy.hpp"
#include "crab/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace crab {

enum class ModelKind { Circle, EllipsoidBoundary, FlatTorusUnitCotangent };

/// A coordinatized contact manifold (Σ, α) together with a linear chart of
/// its symplectization cone.
///
/// Points of Σ are stored in ambient coordinates (`point_size()` numbers),
/// some of which may be periodic. Points of the cone Σ×ℝ_{>0} are stored in
/// a chart in which the Liouville form is bilinear, λ_z(v) = zᵀ A v, so that
/// ω = dλ has the constant matrix Ω = A − Aᵀ. Every model maps (x, r) into
/// this chart with r = 1 on Σ itself.
class ContactModel {
 public:
  virtual ~ContactModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::string name() const = 0;
  /// Dimension of Σ.
  virtual int dim() const = 0;
  virtual int point_size() const = 0;
  int cone_size() const { return static_cast<int>(liouville_.rows()); }

  /// Period of each point coordinate; 0 means not periodic.
  const std::vector<double>& point_periods() const { return point_periods_; }
  const std::vector<double>& cone_periods() const { return cone_periods_; }

  /// Wraps periodic coordinates and projects onto Σ.
  virtual Vec normalize(const Vec& x) const = 0;
  /// Throws DomainError unless x has the right size, is finite and lies on Σ
  /// to within 1e-3.
  virtual void check_domain(const Vec& x) const;

  /// Shortest representative of `to − from` modulo the coordinate periods.
  Vec displacement(const Vec& from, const Vec& to) const;
  double distance(const Vec& a, const Vec& b) const { return displacement(a, b).norm(); }
  Vec cone_displacement(const Vec& from, const Vec& to) const;

  virtual Vec alpha(const Vec& x) const = 0;
  /// Matrix of dα in ambient coordinates: dα(u, v) = uᵀ M v.
  virtual Mat dalpha(const Vec& x) const = 0;
  virtual Vec reeb(const Vec& x) const = 0;
  /// Orthonormal basis of T_xΣ as columns in ambient coordinates.
  virtual Mat tangent_basis(const Vec& x) const = 0;

  /// The contact vector field of h at x: α(Y) = h and i_Y dα = dh(R)α − dh.
  /// Models override this with closed forms; the default is
  /// contact_field_generic().
  virtual Vec contact_field(const Vec& x, double h, const Vec& grad_h) const;
  /// Solves for the ξ-component of Y by restricting dα to a basis of ξ.
  Vec contact_field_generic(const Vec& x, double h, const Vec& grad_h) const;

  virtual Vec to_cone(const ConePoint& p) const = 0;
  /// Inverse of to_cone. Periodic coordinates are not wrapped.
  virtual ConePoint from_cone(const Vec& z) const = 0;
  /// Jacobian of z ↦ x (point_size × cone_size).
  virtual Mat projection_jacobian(const Vec& z) const = 0;
  /// Gradient of z ↦ r.
  virtual Vec radius_gradient(const Vec& z) const = 0;

  const Mat& liouville_matrix() const { return liouville_; }
  const Mat& symplectic_matrix() const { return omega_; }
  const Mat& symplectic_inverse() const { return omega_inv_; }

  /// Deterministic sample of Σ with roughly `per_dim` points per dimension.
  virtual std::vector<Vec> sample(int per_dim) const = 0;
  /// Typical ambient distance between neighbouring points of sample(per_dim).
  virtual double sample_spacing(int per_dim) const = 0;
  virtual std::vector<std::string> coordinate_names() const = 0;

 protected:
  void set_charts(std::vector<double> point_periods, std::vector<double> cone_periods,
                  Mat liouville);

 private:
  std::vector<double> point_periods_;
  std::vector<double> cone_periods_;
  Mat liouville_;
  Mat omega_;
  Mat omega_inv_;
};

using ModelPtr = std::shared_ptr<const ContactModel>;

/// S¹ = ℝ/ℤ with α = dx.
ModelPtr make_circle();
/// Unit cotangent bundle of the flat torus ℝⁿ/ℤⁿ with α = p·dq, points (q, p), |p| = 1.
ModelPtr make_flat_torus(int n);
/// Boundary of the ellipsoid Σ_j |z_j|²/a_j² = 1 in ℂⁿ with α = ½ Σ (x dy − y dx).
ModelPtr make_ellipsoid(std::vector<double> radii);

// ---------------------------------------------------------------------------
// Contact flows

/// Y_t(x) for the contact Hamiltonian of `spec`.
Vec contact_vector_field(const ContactModel& model, const IsotopySpec& spec, double t,
                         const Vec& x);

struct FlowSample {
  double t = 0.0;
  Vec x;
  double rho = 1.0;
};

struct FlowResult {
  Vec x_end;
  double rho = 1.0;
  std::vector<FlowSample> trajectory;
};

/// φ_t(x) and ρ_t(x), where φ_t^*α = ρ_t α. ρ is integrated alongside x via
/// ρ' = dh_t(R)(φ_t(x)) ρ. With trajectory_samples > 0 the trajectory is
/// also sampled at that many equally spaced times in [0, t].
FlowResult flow(const ContactModel& model, const IsotopySpec& spec, const Vec& x, double t,
                double tol = 1e-12, int trajectory_samples = 0);

/// Advances (x, ρ) given at time t0 to time t1.
FlowSample flow_between(const ContactModel& model, const IsotopySpec& spec, const Vec& x,
                        double rho, double t0, double t1, double tol = 1e-12);

/// φ_t(x), ρ_t(x) at each of the monotone `times`; the flow starts at t = 0.
std::vector<FlowSample> flow_at(const ContactModel& model, const IsotopySpec& spec,
                                const Vec& x, std::span<const double> times,
                                double tol = 1e-12);

/// The ODE (x, ρ)' integrated by flow(); exposed for callers that extend the state.
OdeRhs contact_flow_rhs(const ContactModel& model, const IsotopySpec& spec);

struct PathGrid {
  int points_per_dim = 32;
  int time_samples = 32;
};

struct PathReport {
  bool positive = false;
  bool twisted_periodic = false;
  /// max dist(φ_{t+1}(x), φ_t(φ_1(x))) over the grid.
  double max_violation = 0.0;
  double min_h = 0.0;
  double max_h = 0.0;
  /// max |h(x, t+1) − h(x, t)| over the grid.
  double periodicity_defect = 0.0;
};

PathReport validate_path(const ContactModel& model, const IsotopySpec& spec,
                         const PathGrid& grid = {}, double tol = 1e-12);

}  // namespace crab
