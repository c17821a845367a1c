#include "crab/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crab {

namespace {
double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }
double smoothstep_prime(double s) { return 6.0 * s * (1.0 - s); }
}  // namespace

double CutoffProfile::beta(double r) const {
  const double o = outer();
  if (r <= 1.0 || r >= o + 1.0) return 0.0;
  if (r < 2.0) return smoothstep(r - 1.0);
  if (r <= o) return 1.0;
  return smoothstep(o + 1.0 - r);
}

double CutoffProfile::beta_prime(double r) const {
  const double o = outer();
  if (r <= 1.0 || r >= o + 1.0) return 0.0;
  if (r < 2.0) return smoothstep_prime(r - 1.0);
  if (r <= o) return 0.0;
  return -smoothstep_prime(o + 1.0 - r);
}

bool CutoffProfile::at_knot(double r) const {
  const double o = outer();
  for (double k : {1.0, 2.0, o, o + 1.0})
    if (std::abs(r - k) <= 1e-12 * std::max(1.0, k)) return true;
  return false;
}

GridBounds bounds_mM(const ContactModel& model, const IsotopySpec& spec, const PathGrid& grid,
                     double margin) {
  if (grid.points_per_dim < 1 || grid.time_samples < 1)
    throw std::invalid_argument("bounds_mM: grid must be nonempty");
  GridBounds out;
  out.min_h = std::numeric_limits<double>::infinity();
  out.max_h = -std::numeric_limits<double>::infinity();
  for (const Vec& x : model.sample(grid.points_per_dim)) {
    for (int j = 0; j <= grid.time_samples; ++j) {
      const double h = spec.value(x, double(j) / grid.time_samples);
      out.min_h = std::min(out.min_h, h);
      out.max_h = std::max(out.max_h, h);
    }
  }
  if (!(out.min_h > 0.0))
    throw PositivityError("contact Hamiltonian '" + spec.label() +
                          "' is not positive on the sample grid (min h = " +
                          std::to_string(out.min_h) + ")");
  out.m = (1.0 - margin) * out.min_h;
  out.M = (1.0 + margin) * out.max_h;
  return out;
}

namespace {

/// |η dh_s(R)(φ_s x) / ρ_s(x)| at s = ηt, the integrand of C.
double c_integrand(const ContactModel& model, const IsotopySpec& spec, const Vec& x, double eta,
                   double t, double tol) {
  const double s = eta * t;
  const FlowSample f = flow_between(model, spec, x, 1.0, 0.0, s, tol);
  const double rate = spec.gradient(f.x, s).dot(model.reeb(f.x));
  return std::abs(eta * rate / f.rho);
}

}  // namespace

double constant_C(const ContactModel& model, const IsotopySpec& spec, double a, double b,
                  const ConstantCGrid& grid) {
  const double E = std::max(std::abs(a), std::abs(b));
  if (E == 0.0) return 0.0;
  const int half = std::max(1, grid.eta_samples / 2);
  std::vector<double> etas;
  for (int k = 1; k <= half; ++k) {
    etas.push_back(E * k / half);
    etas.push_back(-E * k / half);
  }
  const int nt = std::max(1, grid.time_samples);

  int per_dim = std::max(1, grid.points_per_dim);
  while (per_dim > 1 && std::pow(double(per_dim), model.dim()) > double(grid.max_points)) --per_dim;

  double best = 0.0;
  Vec best_x;
  double best_eta = 0.0, best_t = 0.0;
  for (const Vec& x : model.sample(per_dim)) {
    for (double eta : etas) {
      std::vector<double> times(static_cast<std::size_t>(nt) + 1);
      for (int j = 0; j <= nt; ++j) times[static_cast<std::size_t>(j)] = eta * j / nt;
      const std::vector<FlowSample> traj = flow_at(model, spec, x, times, grid.tol);
      for (int j = 0; j <= nt; ++j) {
        const FlowSample& f = traj[static_cast<std::size_t>(j)];
        const double rate = spec.gradient(f.x, f.t).dot(model.reeb(f.x));
        const double v = std::abs(eta * rate / f.rho);
        if (v > best || best_x.size() == 0) {
          best = v;
          best_x = x;
          best_eta = eta;
          best_t = double(j) / nt;
        }
      }
    }
  }
  if (!grid.refine || best == 0.0) return best;

  // Compass search over (tangent displacement of x, t, η).
  const int d = model.dim();
  double step = 0.5 / per_dim;
  Vec x = best_x;
  double t = best_t, eta = best_eta;
  for (int iter = 0; iter < 40 && step > 1e-6; ++iter) {
    bool improved = false;
    const Mat tb = model.tangent_basis(x);
    for (int dir = 0; dir < d + 2 && !improved; ++dir) {
      for (double sgn : {1.0, -1.0}) {
        Vec xn = x;
        double tn = t, en = eta;
        if (dir < d) {
          xn = model.normalize(x + sgn * step * tb.col(dir));
        } else if (dir == d) {
          tn = std::clamp(t + sgn * step, 0.0, 1.0);
        } else {
          en = std::clamp(eta + sgn * step * E, -E, E);
        }
        const double v = c_integrand(model, spec, xn, en, tn, grid.tol);
        if (v > best) {
          best = v;
          x = xn;
          t = tn;
          eta = en;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

WindowConstants admissible_constants(const ContactModel& model, const IsotopySpec& spec,
                                     double a, double b, const ConstantsOptions& opts) {
  if (!(a < b)) throw std::invalid_argument("admissible_constants: need a < b");
  const GridBounds mm = bounds_mM(model, spec, opts.bounds_grid);
  WindowConstants w;
  w.a = a;
  w.b = b;
  w.m = mm.m;
  w.M = mm.M;
  w.C = constant_C(model, spec, a, b, opts.c_grid);
  const double eC = std::exp(w.C);
  w.kappa0 = opts.headroom * std::max(1.0, 3.0 * w.M * eC);
  w.R0 = opts.headroom * std::max(eC / w.m + 1.0, 1.0 / w.M);
  return w;
}

CutoffProfile make_profile(const WindowConstants& w, double kappa_factor, double R_factor) {
  if (kappa_factor < 1.0 || R_factor < 1.0)
    throw std::invalid_argument("make_profile: factors must be at least 1");
  CutoffProfile p;
  p.kappa = kappa_factor * w.kappa0;
  p.R = R_factor * w.R0;
  p.m = w.m;
  p.M = w.M;
  p.C = w.C;
  if (p.outer() < 2.0)
    throw std::invalid_argument("make_profile: R*kappa must be at least 2");
  return p;
}

double CutoffHamiltonian::value(const Vec& z, double t) const {
  const ConePoint p = model_.from_cone(z);
  const double b = profile_.beta(p.r);
  const double h = b > 0.0 ? spec_.value(model_.normalize(p.x), t) : 0.0;
  return p.r * (b * h + (1.0 - b) * profile_.frak_h(p.r)) - profile_.kappa;
}

Vec CutoffHamiltonian::gradient(const Vec& z, double t) const {
  const ConePoint p = model_.from_cone(z);
  const double r = p.r;
  const double b = profile_.beta(r);
  const double bp = profile_.beta_prime(r);
  const double hh = profile_.frak_h(r);
  const Vec dr = model_.radius_gradient(z);
  if (b == 0.0 && bp == 0.0) return hh * dr;
  const Vec x = model_.normalize(p.x);
  const double h = spec_.value(x, t);
  const Vec dH = h * dr + r * model_.projection_jacobian(z).transpose() * spec_.gradient(x, t);
  return b * dH + (bp * r * (h - hh) + (1.0 - b) * hh) * dr;
}

double CutoffHamiltonian::time_derivative(const Vec& z, double t) const {
  const ConePoint p = model_.from_cone(z);
  const double b = profile_.beta(p.r);
  if (b == 0.0) return 0.0;
  return p.r * b * spec_.time_derivative(model_.normalize(p.x), t);
}

bool CutoffHamiltonian::at_knot(const Vec& z) const {
  return profile_.at_knot(model_.from_cone(z).r);
}

double F_eval(const CutoffProfile& profile, const ContactModel& model, const IsotopySpec& spec,
              double t, const ConePoint& p) {
  if (p.r < 0.0) throw DomainError("F_eval: r must be nonnegative");
  const double b = profile.beta(p.r);
  const double h = b > 0.0 ? spec.value(model.normalize(p.x), t) : 0.0;
  return p.r * (b * h + (1.0 - b) * profile.frak_h(p.r)) - profile.kappa;
}

}  // namespace crab
