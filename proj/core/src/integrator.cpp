#include "crab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crab {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const OdeRhs& rhs, const IntegratorOptions& opts, IntegrationStats* stats)
      : rhs_(rhs), opts_(opts), stats_(stats) {}

  /// Advances (t, y) to exactly t_end. `h` carries the step size between calls.
  void advance(double& t, Vec& y, double t_end, double& h, long& steps) {
    const double dir = t_end >= t ? 1.0 : -1.0;
    if (t == t_end) return;
    const std::size_t n = static_cast<std::size_t>(y.size());
    if (k1_.size() != y.size()) {
      for (Vec* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_})
        k->resize(static_cast<Eigen::Index>(n));
      have_k1_ = false;
    }
    if (!have_k1_ || k1_t_ != t) {
      rhs_(t, y, k1_);
      have_k1_ = true;
      k1_t_ = t;
    }
    h = dir * std::abs(h);
    while (dir * (t_end - t) > 0.0) {
      if (++steps > opts_.max_steps) fail("step budget exhausted", t, h, y);
      if (opts_.max_step > 0.0 && std::abs(h) > opts_.max_step) h = dir * opts_.max_step;
      bool clipped = false;
      double h_try = h;
      if (dir * (t + h_try - t_end) > 0.0) {
        h_try = t_end - t;
        clipped = true;
      }
      const double floor = opts_.min_step * std::max(1.0, std::abs(t));
      if (std::abs(h_try) < floor && !clipped) fail("step size underflow", t, h_try, y);

      tmp_ = y + h_try * a21 * k1_;
      rhs_(t + c2 * h_try, tmp_, k2_);
      tmp_ = y + h_try * (a31 * k1_ + a32 * k2_);
      rhs_(t + c3 * h_try, tmp_, k3_);
      tmp_ = y + h_try * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      rhs_(t + c4 * h_try, tmp_, k4_);
      tmp_ = y + h_try * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      rhs_(t + c5 * h_try, tmp_, k5_);
      tmp_ = y + h_try * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      rhs_(t + h_try, tmp_, k6_);
      ynew_ = y + h_try * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      const double t_new = clipped ? t_end : t + h_try;
      rhs_(t_new, ynew_, k7_);

      double err = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double e = h_try * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                  e6 * k6_[i] + e7 * k7_[i]);
        const double scale = opts_.tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew_[i])));
        err = std::max(err, std::abs(e) / scale);
      }
      if (!std::isfinite(err)) {
        if (stats_) ++stats_->rejected;
        h = 0.2 * h_try;
        if (std::abs(h) < floor) fail("non-finite state", t, h_try, y);
        continue;
      }
      if (err <= 1.0) {
        t = t_new;
        y.swap(ynew_);
        k1_.swap(k7_);
        k1_t_ = t;
        if (stats_) {
          ++stats_->accepted;
          stats_->last_step = h_try;
        }
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A clipped step says nothing about the natural step; keep the larger one.
        h = clipped ? dir * std::max(std::abs(h), std::abs(h_try * grow)) : h_try * grow;
      } else {
        if (stats_) ++stats_->rejected;
        h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      }
    }
  }

 private:
  [[noreturn]] static void fail(const char* what, double t, double h, const Vec& y) {
    std::ostringstream os;
    os << "integrator failure: " << what << " at t=" << t << " (h=" << h
       << ", |y|=" << y.norm() << ", dim=" << y.size() << ")";
    throw NumericError(os.str());
  }

  const OdeRhs& rhs_;
  const IntegratorOptions& opts_;
  IntegrationStats* stats_;
  Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_;
  bool have_k1_ = false;
  double k1_t_ = 0.0;
};

}  // namespace

Vec integrate(const OdeRhs& rhs, Vec y, double t0, double t1, const IntegratorOptions& opts,
              IntegrationStats* stats) {
  Stepper stepper(rhs, opts, stats);
  double t = t0;
  double h = opts.initial_step;
  long steps = 0;
  stepper.advance(t, y, t1, h, steps);
  return y;
}

void integrate_observed(const OdeRhs& rhs, Vec y, double t0, std::span<const double> times,
                        const std::function<void(std::size_t, const Vec&)>& observe,
                        const IntegratorOptions& opts, IntegrationStats* stats) {
  Stepper stepper(rhs, opts, stats);
  double t = t0;
  double h = opts.initial_step;
  long steps = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    stepper.advance(t, y, times[i], h, steps);
    observe(i, y);
  }
}

}  // namespace crab
