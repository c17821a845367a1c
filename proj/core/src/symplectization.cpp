#include "crab/symplectization.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace crab {

double LiftedHamiltonian::value(const Vec& z, double t) const {
  const ConePoint p = model_.from_cone(z);
  const Vec x = model_.normalize(p.x);
  return p.r * spec_.value(x, t) - offset_;
}

Vec LiftedHamiltonian::gradient(const Vec& z, double t) const {
  const ConePoint p = model_.from_cone(z);
  const Vec x = model_.normalize(p.x);
  return spec_.value(x, t) * model_.radius_gradient(z) +
         p.r * model_.projection_jacobian(z).transpose() * spec_.gradient(x, t);
}

double LiftedHamiltonian::time_derivative(const Vec& z, double t) const {
  const ConePoint p = model_.from_cone(z);
  return p.r * spec_.time_derivative(model_.normalize(p.x), t);
}

ConePoint lift_point(const ContactModel& model, const IsotopySpec& spec, double t,
                     const ConePoint& p, double tol) {
  if (!(p.r > 0.0)) throw DomainError("lift_point: r must be positive");
  const FlowResult f = flow(model, spec, p.x, t, tol);
  return {f.x_end, p.r / f.rho};
}

HamiltonianField hamiltonian_vector_field(const ContactModel& model, const ConeFunction& F,
                                          double t, const Vec& z) {
  return {model.symplectic_inverse() * F.gradient(z, t), F.at_knot(z)};
}

double liouville_form(const ContactModel& model, const Vec& z, const Vec& v) {
  return z.dot(model.liouville_matrix() * v);
}

Vec liouville_vector_field(const ContactModel& model, const Vec& z) {
  return -(model.symplectic_inverse() * (model.liouville_matrix().transpose() * z));
}

double liouville_defect(const ContactModel& model, const ConeFunction& F, double kappa,
                        const ConeSample& s) {
  const Vec x = hamiltonian_vector_field(model, F, s.t, s.z).X;
  return liouville_form(model, s.z, x) - F.value(s.z, s.t) - kappa;
}

double verify_liouville_identity(const ContactModel& model, const ConeFunction& F,
                                 double kappa, std::span<const ConeSample> samples) {
  double worst = 0.0;
  for (const ConeSample& s : samples)
    worst = std::max(worst, std::abs(liouville_defect(model, F, kappa, s)));
  return worst;
}

double lift_pullback_defect(const ContactModel& model, const IsotopySpec& spec, double t,
                            const ConePoint& p, double step, double tol) {
  const Vec z0 = model.to_cone(p);
  const Vec w0 = model.to_cone(lift_point(model, spec, t, p, tol));
  auto image = [&](const Vec& z) { return model.to_cone(lift_point(model, spec, t, model.from_cone(z), tol)); };
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z0.size(); ++i) {
    Vec zp = z0, zm = z0;
    zp[i] += step;
    zm[i] -= step;
    // Differences are taken against w0 so periodic wrapping never tears them.
    const Vec dp = model.cone_displacement(w0, image(zp));
    const Vec dm = model.cone_displacement(w0, image(zm));
    const Vec dw = (dp - dm) / (2.0 * step);
    Vec e = Vec::Zero(z0.size());
    e[i] = 1.0;
    const double pulled = liouville_form(model, w0, dw);
    worst = std::max(worst, std::abs(pulled - liouville_form(model, z0, e)));
  }
  return worst;
}

std::vector<ConeSample> random_cone_samples(const ContactModel& model, std::size_t count,
                                            double r_lo, double r_hi, double t_lo,
                                            double t_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  const std::vector<Vec> base = model.sample(8);
  std::uniform_int_distribution<std::size_t> pick(0, base.size() - 1);
  std::vector<ConeSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vec x = base[pick(rng)];
    const Mat tb = model.tangent_basis(x);
    Vec u(tb.cols());
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = 0.3 * gauss(rng);
    x = model.normalize(x + tb * u);
    const double r = r_lo + (r_hi - r_lo) * unit(rng);
    const double t = t_lo + (t_hi - t_lo) * unit(rng);
    out.push_back({model.to_cone({x, r}), t});
  }
  return out;
}

}  // namespace crab
