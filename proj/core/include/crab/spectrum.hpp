#pragma once

#include "crab/discriminant.hpp"

#include <string>
#include <utility>
#include <vector>

namespace crab {

/// Content of the action window (n, m].
struct SpectrumWindow {
  double n = 0.0;
  double m = 0.0;
  /// (η level, number of components at that level), ascending.
  std::vector<std::pair<double, int>> values;
  /// Number of components, the sum of the level multiplicities.
  int count = 0;
  /// 2 per degenerate (Morse-Bott) component, 1 per nondegenerate one.
  int dim_proxy = 0;
  std::vector<Component> components;
};

/// Groups η values into levels (|Δη| ≤ level_tol) within (n, m].
SpectrumWindow window_from_components(const std::vector<Component>& components, double n,
                                      double m, double level_tol = 1e-6);
/// Each chord is one nondegenerate component.
SpectrumWindow window_from_chords(const std::vector<LegendrianChordPoint>& chords, double n,
                                  double m, double level_tol = 1e-6);

SpectrumWindow spectrum(const ContactModel& model, const IsotopySpec& spec, double n, double m,
                        const SearchOptions& opts = {});
SpectrumWindow chord_spectrum(const ContactModel& model, const IsotopySpec& spec, const Vec& q0,
                              const Vec& q1, double n, double m, const ChordOptions& opts = {});

/// Number of components with η ∈ (0, m]; a proxy for the persistent rank μ(m).
int mu_proxy(const ContactModel& model, const IsotopySpec& spec, double m,
             const SearchOptions& opts = {});

enum class GrowthClass { Sublinear, Linear, Superlinear, Undefined };
std::string to_string(GrowthClass c);

struct GrowthReport {
  std::vector<double> m;
  std::vector<int> mu;
  /// Fitted exponent p in μ̂ ≈ c m^p and the intercept log c.
  double exponent = 0.0;
  double intercept = 0.0;
  GrowthClass classification = GrowthClass::Undefined;
  bool undefined = true;
};

/// Least squares on (log m, log μ̂), skipping zero counts. Fewer than two
/// nonzero samples leave the growth undefined. p < 0.8 is sublinear,
/// p > 1.2 superlinear, linear in between.
GrowthReport fit_growth(const std::vector<double>& m, const std::vector<int>& mu);

/// μ̂ on the discriminant spectrum, computed from one search over (0, max m].
GrowthReport growth_rate(const ContactModel& model, const IsotopySpec& spec,
                         const std::vector<double>& m_list, const SearchOptions& opts = {});
/// Same for chord counts between two fibres of the flat torus.
GrowthReport chord_growth_rate(const ContactModel& model, const IsotopySpec& spec, const Vec& q0,
                               const Vec& q1, const std::vector<double>& m_list,
                               const ChordOptions& opts = {});

/// Counts for the rotation x ↦ x + at of the circle.
struct CircleOracle {
  double a = 0.0;
  double n = 0.0;
  double m = 0.0;
  /// k/a for every k ≠ 0 with n < k/a ≤ m, ascending.
  std::vector<double> eta_values;
  int component_count = 0;
  int bruteforce_count = 0;
  /// 2(⌊m/a⌋ − ⌊n/a⌋).
  int formula_value = 0;
  bool rational_warning = false;
  /// Empty when the two counts agree.
  std::string note;
};

CircleOracle circle_oracle(double a, double n, double m);

}  // namespace crab
