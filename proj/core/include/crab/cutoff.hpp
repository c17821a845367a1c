#pragma once

#include "crab/geometry.hpp"
#include "crab/symplectization.hpp"

namespace crab {

/// Constants (κ, R, m, M, C) and the radial cutoff β_R built from them.
///
/// β is a C¹ cubic smoothstep rising on [1, 2], equal to 1 on [2, Rκ] and
/// falling back on [Rκ, Rκ+1]. 𝔥(r) is m for r ≤ 2 and M beyond.
struct CutoffProfile {
  double kappa = 0.0;
  double R = 0.0;
  double m = 0.0;
  double M = 0.0;
  double C = 0.0;

  double outer() const { return R * kappa; }
  double beta(double r) const;
  double beta_prime(double r) const;
  double frak_h(double r) const { return r <= 2.0 ? m : M; }
  /// True within 1e-12 of one of the knots 1, 2, Rκ, Rκ+1.
  bool at_knot(double r) const;
};

struct GridBounds {
  double m = 0.0;
  double M = 0.0;
  double min_h = 0.0;
  double max_h = 0.0;
};

/// m = 0.99 min h and M = 1.01 max h over the grid. Throws PositivityError
/// if some sampled h is not positive.
GridBounds bounds_mM(const ContactModel& model, const IsotopySpec& spec,
                     const PathGrid& grid = {}, double margin = 0.01);

struct ConstantCGrid {
  int points_per_dim = 64;
  int time_samples = 64;
  /// Number of η values, split evenly between the two signs.
  int eta_samples = 8;
  /// Caps the number of x samples; per_dim is lowered until it fits.
  long max_points = 4096;
  bool refine = true;
  double tol = 1e-10;
};

/// max |η ρ̇_{ηt}(x) / ρ_{ηt}(x)²| over x ∈ Σ, t ∈ [0, 1], |η| ≤ max(|a|, |b|),
/// taken on a grid and improved by a local compass search from the best node.
double constant_C(const ContactModel& model, const IsotopySpec& spec, double a, double b,
                  const ConstantCGrid& grid = {});

struct WindowConstants {
  double a = 0.0;
  double b = 0.0;
  double C = 0.0;
  double m = 0.0;
  double M = 0.0;
  double kappa0 = 0.0;
  double R0 = 0.0;
};

struct ConstantsOptions {
  PathGrid bounds_grid{};
  ConstantCGrid c_grid{};
  double headroom = 1.05;
};

/// κ₀ = 1.05 max{1, 3M e^C} and R₀ = 1.05 max{e^C/m + 1, 1/M}.
WindowConstants admissible_constants(const ContactModel& model, const IsotopySpec& spec,
                                     double a, double b, const ConstantsOptions& opts = {});

/// Profile with κ = kappa_factor κ₀ and R = R_factor R₀. Throws
/// std::invalid_argument if a factor is below 1.
CutoffProfile make_profile(const WindowConstants& w, double kappa_factor = 1.05,
                           double R_factor = 1.05);

/// F^{κ,R}(x, r, t) = r [β(r) h_t(x) + (1 − β(r)) 𝔥(r)] − κ.
class CutoffHamiltonian final : public ConeFunction {
 public:
  CutoffHamiltonian(const ContactModel& model, const IsotopySpec& spec,
                    const CutoffProfile& profile)
      : model_(model), spec_(spec), profile_(profile) {}

  double value(const Vec& z, double t) const override;
  Vec gradient(const Vec& z, double t) const override;
  double time_derivative(const Vec& z, double t) const override;
  bool at_knot(const Vec& z) const override;

  const CutoffProfile& profile() const { return profile_; }
  const ContactModel& model() const { return model_; }
  const IsotopySpec& spec() const { return spec_; }

 private:
  const ContactModel& model_;
  const IsotopySpec& spec_;
  CutoffProfile profile_;
};

double F_eval(const CutoffProfile& profile, const ContactModel& model, const IsotopySpec& spec,
              double t, const ConePoint& p);

}  // namespace crab
