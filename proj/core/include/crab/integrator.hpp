#pragma once

#include "crab/types.hpp"

#include <functional>
#include <span>

namespace crab {

/// Right-hand side y' = f(t, y), written into the third argument.
using OdeRhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

struct IntegratorOptions {
  /// Bound on the local error of each accepted step, measured as
  /// max_i |err_i| / (1 + |y_i|).
  double tol = 1e-12;
  double initial_step = 1e-2;
  /// Relative step floor; stepping below it raises NumericError.
  double min_step = 1e-13;
  /// Zero means unbounded.
  double max_step = 0.0;
  long max_steps = 5'000'000;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  double last_step = 0.0;
};

/// Adaptive Dormand-Prince 5(4) integration of y from t0 to t1 (either direction).
Vec integrate(const OdeRhs& rhs, Vec y, double t0, double t1,
              const IntegratorOptions& opts = {}, IntegrationStats* stats = nullptr);

/// Integrates from t0 through the monotone sequence `times`, calling
/// observe(i, y(times[i])) at each. Steps are clipped to land on every
/// requested time exactly.
void integrate_observed(const OdeRhs& rhs, Vec y, double t0, std::span<const double> times,
                        const std::function<void(std::size_t, const Vec&)>& observe,
                        const IntegratorOptions& opts = {}, IntegrationStats* stats = nullptr);

}  // namespace crab
