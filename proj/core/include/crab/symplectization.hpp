#pragma once

#include "crab/geometry.hpp"

#include <span>
#include <vector>

namespace crab {

/// A time-dependent function on the cone, in the model's cone chart.
class ConeFunction {
 public:
  virtual ~ConeFunction() = default;
  virtual double value(const Vec& z, double t) const = 0;
  /// Chart gradient ∂F/∂z.
  virtual Vec gradient(const Vec& z, double t) const = 0;
  /// ∂F/∂t.
  virtual double time_derivative(const Vec& z, double t) const = 0;
  /// True when z sits on a knot of a piecewise definition, where the
  /// gradient above is the one-sided (outer) value.
  virtual bool at_knot(const Vec&) const { return false; }
};

/// H(x, r, t) = r h_t(x) − offset.
class LiftedHamiltonian final : public ConeFunction {
 public:
  LiftedHamiltonian(const ContactModel& model, const IsotopySpec& spec, double offset = 0.0)
      : model_(model), spec_(spec), offset_(offset) {}

  double value(const Vec& z, double t) const override;
  Vec gradient(const Vec& z, double t) const override;
  double time_derivative(const Vec& z, double t) const override;

  const ContactModel& model() const { return model_; }
  const IsotopySpec& spec() const { return spec_; }

 private:
  const ContactModel& model_;
  const IsotopySpec& spec_;
  double offset_;
};

/// F(x, r, t) = f(r), with f and f' supplied.
class RadialFunction final : public ConeFunction {
 public:
  RadialFunction(const ContactModel& model, std::function<double(double)> f,
                 std::function<double(double)> df)
      : model_(model), f_(std::move(f)), df_(std::move(df)) {}

  double value(const Vec& z, double) const override { return f_(model_.from_cone(z).r); }
  Vec gradient(const Vec& z, double) const override {
    return df_(model_.from_cone(z).r) * model_.radius_gradient(z);
  }
  double time_derivative(const Vec&, double) const override { return 0.0; }

 private:
  const ContactModel& model_;
  std::function<double(double)> f_;
  std::function<double(double)> df_;
};

/// φ̂_t(x, r) = (φ_t(x), r / ρ_t(x)).
ConePoint lift_point(const ContactModel& model, const IsotopySpec& spec, double t,
                     const ConePoint& p, double tol = 1e-12);

struct HamiltonianField {
  Vec X;
  bool one_sided = false;
};

/// X_F in the cone chart, from dF = −i_X ω, i.e. Ω X = ∇F.
HamiltonianField hamiltonian_vector_field(const ContactModel& model, const ConeFunction& F,
                                          double t, const Vec& z);

/// λ_z(v) = zᵀ A v.
double liouville_form(const ContactModel& model, const Vec& z, const Vec& v);
/// V with i_V ω = λ; on every model this is r ∂_r.
Vec liouville_vector_field(const ContactModel& model, const Vec& z);

struct ConeSample {
  Vec z;
  double t = 0.0;
};

/// λ(X_F) − F − κ at one point.
double liouville_defect(const ContactModel& model, const ConeFunction& F, double kappa,
                        const ConeSample& s);
/// max |λ(X_F) − F − κ| over the samples.
double verify_liouville_identity(const ContactModel& model, const ConeFunction& F,
                                 double kappa, std::span<const ConeSample> samples);

/// max_i |(φ̂_t^*λ)(e_i) − λ(e_i)| at (x, r), with Dφ̂_t taken by central
/// differences of step `step` in the cone chart.
double lift_pullback_defect(const ContactModel& model, const IsotopySpec& spec, double t,
                            const ConePoint& p, double step = 1e-5, double tol = 1e-13);

/// Uniform random cone samples: x from the model's sampler perturbed and
/// normalized, r in [r_lo, r_hi], t in [t_lo, t_hi].
std::vector<ConeSample> random_cone_samples(const ContactModel& model, std::size_t count,
                                            double r_lo, double r_hi, double t_lo,
                                            double t_hi, std::uint64_t seed);

}  // namespace crab
