#include "crab/action.hpp"

#include <Eigen/Sparse>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace crab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Trapezoid weight of the two evaluations at node 0 (times 0 and 1) and of the others.
constexpr double kHalf = 0.5;

struct NodeTerms {
  Vec Xbar;        // X_F averaged with trapezoid weights at this node
  double F = 0.0;  // weighted F contribution to ∫F
  double G = 0.0;  // weighted (F + ηtḞ) contribution to G_η
};

NodeTerms node_terms(const ContactModel& model, const ConeFunction& F, const Vec& z,
                     std::size_t i, std::size_t N, double eta) {
  NodeTerms out;
  if (i == 0) {
    const Vec x0 = model.symplectic_inverse() * F.gradient(z, 0.0);
    const Vec x1 = model.symplectic_inverse() * F.gradient(z, eta);
    out.Xbar = kHalf * (x0 + x1);
    const double f0 = F.value(z, 0.0);
    const double f1 = F.value(z, eta);
    out.F = kHalf * (f0 + f1);
    out.G = kHalf * (f0 + f1 + eta * F.time_derivative(z, eta));
  } else {
    const double t = double(i) / double(N);
    const double s = eta * t;
    out.Xbar = model.symplectic_inverse() * F.gradient(z, s);
    out.F = F.value(z, s);
    out.G = out.F + eta * t * F.time_derivative(z, s);
  }
  return out;
}

std::vector<Vec> segments(const ContactModel& model, const Loop& loop) {
  const std::size_t N = loop.size();
  std::vector<Vec> d(N);
  for (std::size_t i = 0; i < N; ++i) d[i] = model.cone_displacement(loop.z[i], loop.z[(i + 1) % N]);
  return d;
}

}  // namespace

void check_loop(const ContactModel& model, const Loop& loop) {
  if (loop.size() < 16) throw std::invalid_argument("loop: need at least 16 nodes");
  if (!std::isfinite(loop.eta)) throw std::invalid_argument("loop: eta must be finite");
  for (const Vec& z : loop.z) {
    if (z.size() != model.cone_size()) throw DomainError("loop: node has wrong dimension");
    if (!z.allFinite()) throw DomainError("loop: non-finite node");
    if (!(model.from_cone(z).r > 0.0)) throw DomainError("loop: r must be positive");
  }
}

double RabinowitzFunctional::action(const Loop& loop) const {
  check_loop(model_, loop);
  const std::size_t N = loop.size();
  const std::vector<Vec> d = segments(model_, loop);
  double lam = 0.0;
  double fint = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const Vec mid = loop.z[i] + 0.5 * d[i];
    lam += liouville_form(model_, mid, d[i]);
    if (i == 0) {
      fint += kHalf * (F_.value(loop.z[0], 0.0) + F_.value(loop.z[0], loop.eta));
    } else {
      fint += F_.value(loop.z[i], loop.eta * double(i) / double(N));
    }
  }
  fint /= double(N);
  return (lam - loop.eta * fint) / kappa();
}

GradientVector RabinowitzFunctional::gradient(const Loop& loop) const {
  check_loop(model_, loop);
  const std::size_t N = loop.size();
  const std::vector<Vec> d = segments(model_, loop);
  GradientVector g;
  g.loop_part.resize(N);
  double geta = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const NodeTerms nt = node_terms(model_, F_, loop.z[i], i, N, loop.eta);
    const Vec D = (d[(i + N - 1) % N] + d[i]) * (0.5 * double(N));
    g.loop_part[i] = D - loop.eta * nt.Xbar;
    geta += nt.G;
  }
  g.eta_part = geta / double(N);
  return g;
}

double RabinowitzFunctional::gradient_norm(const GradientVector& g) const {
  double s = 0.0;
  for (const Vec& v : g.loop_part) s += v.squaredNorm();
  s /= double(g.loop_part.size());
  return std::sqrt((s + g.eta_part * g.eta_part) / kappa());
}

double RabinowitzFunctional::pairing(const GradientVector& g, const std::vector<Vec>& xi,
                                     double l) const {
  const Mat& omega = model_.symplectic_matrix();
  double s = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) s += xi[i].dot(omega * g.loop_part[i]);
  const double N = double(g.loop_part.size());
  return s / (kappa() * N) - g.eta_part * l / kappa();
}

Loop RabinowitzFunctional::displaced(const Loop& loop, const std::vector<Vec>& xi, double l,
                                     double step) const {
  Loop out = loop;
  for (std::size_t i = 0; i < out.z.size(); ++i) out.z[i] += step * xi[i];
  out.eta += step * l;
  return out;
}

// ---------------------------------------------------------------------------
// Descent

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Flattened residual (G_0, …, G_{N−1}, G_η).
Vec flatten(const GradientVector& g) {
  const Eigen::Index d = g.loop_part.front().size();
  const Eigen::Index N = static_cast<Eigen::Index>(g.loop_part.size());
  Vec out(N * d + 1);
  for (Eigen::Index i = 0; i < N; ++i) out.segment(i * d, d) = g.loop_part[static_cast<std::size_t>(i)];
  out[N * d] = g.eta_part;
  return out;
}

/// Jacobian of the flattened residual with respect to (z_0, …, z_{N−1}, η),
/// split into the loop rows (sparse, arrowhead with the η column) and the
/// dense η row.
struct ResidualJacobian {
  SpMat loop_rows;
  Vec eta_row;
};

ResidualJacobian residual_jacobian(const ContactModel& model, const ConeFunction& F,
                                   const Loop& loop) {
  const std::size_t N = loop.size();
  const Eigen::Index d = model.cone_size();
  const Eigen::Index n = static_cast<Eigen::Index>(N) * d + 1;
  const double half_n = 0.5 * double(N);
  const double eta = loop.eta;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(3 * d + 2));
  Vec eta_row = Vec::Zero(n);
  const double deta = 1e-6 * std::max(1.0, std::abs(eta));

  for (std::size_t i = 0; i < N; ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(i) * d;
    const Eigen::Index next = static_cast<Eigen::Index>((i + 1) % N) * d;
    const Eigen::Index prev = static_cast<Eigen::Index>((i + N - 1) % N) * d;
    for (Eigen::Index k = 0; k < d; ++k) {
      trips.emplace_back(row + k, next + k, half_n);
      trips.emplace_back(row + k, prev + k, -half_n);
    }
    const Vec& z = loop.z[i];
    for (Eigen::Index k = 0; k < d; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(z[k]));
      Vec zp = z, zm = z;
      zp[k] += h;
      zm[k] -= h;
      const NodeTerms tp = node_terms(model, F, zp, i, N, eta);
      const NodeTerms tm = node_terms(model, F, zm, i, N, eta);
      const Vec dX = (tp.Xbar - tm.Xbar) / (2.0 * h);
      for (Eigen::Index r = 0; r < d; ++r) trips.emplace_back(row + r, row + k, -eta * dX[r]);
      eta_row[row + k] = (tp.G - tm.G) / (2.0 * h) / double(N);
    }
    const NodeTerms ep = node_terms(model, F, z, i, N, eta + deta);
    const NodeTerms em = node_terms(model, F, z, i, N, eta - deta);
    const NodeTerms e0 = node_terms(model, F, z, i, N, eta);
    const Vec dXe = (ep.Xbar - em.Xbar) / (2.0 * deta);
    for (Eigen::Index r = 0; r < d; ++r)
      trips.emplace_back(row + r, n - 1, -e0.Xbar[r] - eta * dXe[r]);
    eta_row[n - 1] += (ep.G - em.G) / (2.0 * deta) / double(N);
  }
  ResidualJacobian out;
  out.loop_rows.resize(n - 1, n);
  out.loop_rows.setFromTriplets(trips.begin(), trips.end());
  out.eta_row = eta_row;
  return out;
}

Loop apply_flat(const Loop& loop, const Vec& delta, double step) {
  Loop out = loop;
  const Eigen::Index d = loop.z.front().size();
  for (std::size_t i = 0; i < out.z.size(); ++i)
    out.z[i] += step * delta.segment(static_cast<Eigen::Index>(i) * d, d);
  out.eta += step * delta[delta.size() - 1];
  return out;
}

bool loop_valid(const ContactModel& model, const Loop& loop) {
  for (const Vec& z : loop.z) {
    if (!z.allFinite()) return false;
    try {
      if (!(model.from_cone(z).r > 0.0)) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return std::isfinite(loop.eta);
}

DescendResult descend_residual(const RabinowitzFunctional& A, const Loop& start,
                               const DescendOptions& opts) {
  const ContactModel& model = A.model();
  const double N = double(start.size());
  const double w_loop = 1.0 / (A.kappa() * N);
  const double w_eta = 1.0 / A.kappa();

  DescendResult res;
  res.loop = start;
  GradientVector g = A.gradient(res.loop);
  double norm = A.gradient_norm(g);
  res.action_history.push_back(A.action(res.loop));
  res.norm_history.push_back(norm);
  double mu_rel = opts.damping;

  while (norm > opts.tol && res.accepted_steps < opts.max_steps) {
    const Vec G = flatten(g);
    const Eigen::Index n = G.size();
    const ResidualJacobian J = residual_jacobian(model, A.hamiltonian(), res.loop);
    // Normal equations: (w_loop J_LᵀJ_L + w_eta r rᵀ + μ I) δ = −∇Φ.
    SpMat B = (J.loop_rows.transpose() * J.loop_rows) * w_loop;
    const Vec grad_phi = w_loop * (J.loop_rows.transpose() * G.head(n - 1)) +
                         w_eta * G[n - 1] * J.eta_row;
    double diag_max = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) diag_max = std::max(diag_max, B.coeff(k, k));
    diag_max = std::max(diag_max, w_eta * J.eta_row.squaredNorm());

    bool accepted = false;
    for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
      SpMat Bm = B;
      const double mu = std::max(mu_rel * diag_max, 1e-300);
      for (Eigen::Index k = 0; k < n; ++k) Bm.coeffRef(k, k) += mu;
      Eigen::SimplicialLDLT<SpMat> ldlt(Bm);
      if (ldlt.info() != Eigen::Success) {
        mu_rel *= 100.0;
        continue;
      }
      // Sherman-Morrison for the rank-one η row.
      const Vec y = ldlt.solve(-grad_phi);
      const Vec u = ldlt.solve(J.eta_row);
      const Vec delta = y - u * (w_eta * J.eta_row.dot(y) / (1.0 + w_eta * J.eta_row.dot(u)));
      const double slope = grad_phi.dot(delta);
      if (!(slope < 0.0)) {
        mu_rel *= 100.0;
        continue;
      }
      const double phi0 = 0.5 * norm * norm;
      double step = 1.0;
      for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= 0.5) {
        const Loop trial = apply_flat(res.loop, delta, step);
        if (!loop_valid(model, trial)) continue;
        const GradientVector gt = A.gradient(trial);
        const double nt = A.gradient_norm(gt);
        if (0.5 * nt * nt <= phi0 + opts.armijo * step * slope) {
          res.loop = trial;
          g = gt;
          norm = nt;
          accepted = true;
          break;
        }
      }
      if (accepted) {
        mu_rel = std::max(opts.damping, mu_rel / 10.0);
      } else {
        mu_rel *= 100.0;
      }
    }
    if (!accepted) break;
    ++res.accepted_steps;
    res.action_history.push_back(A.action(res.loop));
    res.norm_history.push_back(norm);
    spdlog::debug("descend[residual] step {}: |grad| = {:.3e}, eta = {:.12f}", res.accepted_steps,
                  norm, res.loop.eta);
  }
  res.gradient_norm = norm;
  res.converged = norm <= opts.tol;
  res.action = A.action(res.loop);
  return res;
}

DescendResult descend_action(const RabinowitzFunctional& A, const Loop& start,
                             const DescendOptions& opts) {
  const ContactModel& model = A.model();
  const Mat& omega = model.symplectic_matrix();
  DescendResult res;
  res.loop = start;
  GradientVector g = A.gradient(res.loop);
  double norm = A.gradient_norm(g);
  double act = A.action(res.loop);
  res.action_history.push_back(act);
  res.norm_history.push_back(norm);

  while (norm > opts.tol && res.accepted_steps < opts.max_steps) {
    // Metric gradient of 𝒜 is (ΩG_i, −G_η); move against it.
    std::vector<Vec> xi(g.loop_part.size());
    for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = -(omega * g.loop_part[i]);
    const double l = g.eta_part;
    const double slope = A.pairing(g, xi, l);
    if (!(slope < 0.0)) break;
    bool accepted = false;
    double step = 1.0;
    for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= 0.5) {
      const Loop trial = A.displaced(res.loop, xi, l, step);
      if (!loop_valid(model, trial)) continue;
      const double at = A.action(trial);
      if (at <= act + opts.armijo * step * slope) {
        res.loop = trial;
        act = at;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    g = A.gradient(res.loop);
    norm = A.gradient_norm(g);
    ++res.accepted_steps;
    res.action_history.push_back(act);
    res.norm_history.push_back(norm);
  }
  res.gradient_norm = norm;
  res.converged = norm <= opts.tol;
  res.action = act;
  return res;
}

}  // namespace

DescendResult descend(const RabinowitzFunctional& A, const Loop& start,
                      const DescendOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("descend: tol must be positive");
  check_loop(A.model(), start);
  return opts.mode == DescentMode::Residual ? descend_residual(A, start, opts)
                                            : descend_action(A, start, opts);
}

// ---------------------------------------------------------------------------
// Shooting

Trajectory shoot(const RabinowitzFunctional& A, const Vec& z0, double eta, int nodes,
                 double tol) {
  const ContactModel& model = A.model();
  const ConeFunction& F = A.hamiltonian();
  const Eigen::Index d = z0.size();
  OdeRhs rhs = [&](double t, const Vec& y, Vec& dy) {
    const Vec z = y.head(d);
    const double s = eta * t;
    const Vec X = model.symplectic_inverse() * F.gradient(z, s);
    dy.head(d) = eta * X;
    dy[d] = eta * liouville_form(model, z, X);
    dy[d + 1] = F.value(z, s);
  };
  Vec y0 = Vec::Zero(d + 2);
  y0.head(d) = z0;
  const int n = std::max(nodes, 1);
  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) times[static_cast<std::size_t>(i)] = double(i) / n;
  Trajectory tr;
  tr.z.resize(times.size());
  IntegratorOptions io;
  io.tol = tol;
  integrate_observed(
      rhs, y0, 0.0, times,
      [&](std::size_t i, const Vec& y) {
        tr.z[i] = y.head(d);
        if (i + 1 == times.size()) {
          tr.lambda_integral = y[d];
          tr.F_integral = y[d + 1];
        }
      },
      io);
  return tr;
}

namespace {

Vec shooting_residual(const RabinowitzFunctional& A, const Vec& v, double tol) {
  const Eigen::Index d = v.size() - 1;
  const Vec z0 = v.head(d);
  const double eta = v[d];
  const Trajectory tr = shoot(A, z0, eta, 1, tol);
  Vec r(d + 1);
  r.head(d) = A.model().cone_displacement(z0, tr.z.back());
  r[d] = A.hamiltonian().value(tr.z.back(), eta);
  return r;
}

}  // namespace

RefineResult refine_newton(const RabinowitzFunctional& A, const Loop& guess,
                           const NewtonOptions& opts) {
  const ContactModel& model = A.model();
  check_loop(model, guess);
  const Eigen::Index d = model.cone_size();
  Vec v(d + 1);
  v.head(d) = guess.z.front();
  v[d] = guess.eta;
  const double eta0 = guess.eta;

  RefineResult out;
  auto finish = [&](const Vec& vv) {
    const Trajectory tr = shoot(A, vv.head(d), vv[d], opts.nodes, opts.integrator_tol);
    out.loop.eta = vv[d];
    out.loop.z.assign(tr.z.begin(), tr.z.end() - 1);
    out.action = (tr.lambda_integral - vv[d] * tr.F_integral) / A.kappa();
    out.r_min = std::numeric_limits<double>::infinity();
    out.r_max = 0.0;
    for (const Vec& z : out.loop.z) {
      const double r = model.from_cone(z).r;
      out.r_min = std::min(out.r_min, r);
      out.r_max = std::max(out.r_max, r);
    }
  };

  try {
    Vec r = shooting_residual(A, v, opts.integrator_tol);
    for (int it = 0;; ++it) {
      out.residual_z = r.head(d).norm();
      out.residual_F = std::abs(r[d]);
      out.iterations = it;
      if (out.residual_z <= opts.tol && out.residual_F <= opts.tol) {
        out.converged = true;
        break;
      }
      if (it >= opts.max_iterations) {
        out.message = "iteration limit reached";
        break;
      }
      Mat J(d + 1, d + 1);
      for (Eigen::Index k = 0; k <= d; ++k) {
        const double h = opts.fd_step * std::max(1.0, std::abs(v[k]));
        Vec vp = v, vm = v;
        vp[k] += h;
        vm[k] -= h;
        J.col(k) = (shooting_residual(A, vp, opts.integrator_tol) -
                    shooting_residual(A, vm, opts.integrator_tol)) / (2.0 * h);
      }
      Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Vec& sv = svd.singularValues();
      out.relative_sigma_min = sv[0] > 0.0 ? sv[sv.size() - 1] / sv[0] : 0.0;
      svd.setThreshold(opts.svd_cutoff);
      const Vec delta = -svd.solve(r);
      double step = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 12; ++bt, step *= 0.5) {
        const Vec vt = v + step * delta;
        if (std::abs(vt[d] - eta0) > opts.eta_radius) continue;
        Vec rt;
        try {
          if (!(model.from_cone(vt.head(d)).r > 0.0)) continue;
          rt = shooting_residual(A, vt, opts.integrator_tol);
        } catch (const std::exception&) {
          continue;
        }
        if (rt.norm() < r.norm() || bt == 11) {
          v = vt;
          r = rt;
          moved = true;
          break;
        }
      }
      if (!moved) {
        out.message = std::abs(v[d] + delta[d] - eta0) > opts.eta_radius
                          ? "Newton step leaves the eta trust region"
                          : "no admissible Newton step";
        break;
      }
    }
    finish(v);
  } catch (const NumericError& e) {
    out.converged = false;
    out.message = e.what();
    out.loop = guess;
  } catch (const DomainError& e) {
    out.converged = false;
    out.message = e.what();
    out.loop = guess;
  }
  return out;
}

Loop loop_from_discriminant(const RabinowitzFunctional& A, const Vec& x, double eta, int nodes) {
  if (nodes < 16) throw std::invalid_argument("loop_from_discriminant: need at least 16 nodes");
  const ContactModel& model = A.model();
  const IsotopySpec& spec = A.spec();
  const Vec xn = model.normalize(x);
  const double r0 = A.kappa() / spec.value(xn, eta);
  std::vector<double> times(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) times[static_cast<std::size_t>(i)] = eta * i / nodes;
  const std::vector<FlowSample> fs = flow_at(model, spec, xn, times);
  Loop loop;
  loop.eta = eta;
  for (const FlowSample& s : fs) loop.z.push_back(model.to_cone({s.x, r0 / s.rho}));
  return loop;
}

Loop constant_loop(const ContactModel& model, const ConePoint& p, double eta, int nodes) {
  Loop loop;
  loop.eta = eta;
  loop.z.assign(static_cast<std::size_t>(nodes), model.to_cone(p));
  return loop;
}

std::vector<Vec> random_variation(std::size_t nodes, int dim, double amplitude, int modes,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Mat a(dim, modes + 1), b(dim, modes + 1);
  for (int k = 0; k < dim; ++k)
    for (int m = 0; m <= modes; ++m) {
      a(k, m) = gauss(rng);
      b(k, m) = gauss(rng);
    }
  const double scale = amplitude / std::sqrt(double(2 * modes + 1));
  std::vector<Vec> out(nodes, Vec::Zero(dim));
  for (std::size_t i = 0; i < nodes; ++i) {
    const double t = double(i) / double(nodes);
    for (int k = 0; k < dim; ++k) {
      double v = a(k, 0);
      for (int m = 1; m <= modes; ++m)
        v += a(k, m) * std::cos(kTwoPi * m * t) + b(k, m) * std::sin(kTwoPi * m * t);
      out[i][k] = scale * v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chords

double chord_action(const ContactModel& model, const IsotopySpec& spec, const Chord& chord) {
  const std::size_t N = chord.z.size();
  if (N < 2) throw std::invalid_argument("chord_action: need at least two nodes");
  LiftedHamiltonian H(model, spec, 1.0);
  double lam = 0.0, hint = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const Vec d = model.cone_displacement(chord.z[i], chord.z[i + 1]);
    lam += liouville_form(model, chord.z[i] + 0.5 * d, d);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double t = double(i) / double(N - 1);
    const double w = (i == 0 || i + 1 == N) ? 0.5 : 1.0;
    hint += w * H.value(chord.z[i], chord.eta * t);
  }
  hint /= double(N - 1);
  return lam - chord.eta * hint;
}

Chord chord_from_point(const ContactModel& model, const IsotopySpec& spec, const Vec& x,
                       double eta, int nodes) {
  if (nodes < 2) throw std::invalid_argument("chord_from_point: need at least two nodes");
  const Vec xn = model.normalize(x);
  const double r0 = 1.0 / spec.value(xn, 0.0);
  std::vector<double> times(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) times[static_cast<std::size_t>(i)] = eta * i / (nodes - 1);
  Chord c;
  c.eta = eta;
  for (const FlowSample& s : flow_at(model, spec, xn, times))
    c.z.push_back(model.to_cone({s.x, r0 / s.rho}));
  return c;
}

// ---------------------------------------------------------------------------

ProbeResult fundamental_lemma_probe(const RabinowitzFunctional& A, const Loop& critical,
                                    const ProbeOptions& opts) {
  check_loop(A.model(), critical);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ProbeResult out;
  out.epsilon = 1.0;
  out.min_gradient_norm = std::numeric_limits<double>::infinity();
  auto consider = [&](const Loop& l) {
    const double g = A.gradient_norm(l);
    const double a = A.action(l);
    double bound;
    if (a + 1.0 <= 0.0) {
      bound = 0.0;
    } else if (l.eta == 0.0) {
      bound = std::numeric_limits<double>::infinity();
    } else {
      bound = (a + 1.0) / std::abs(l.eta);
    }
    out.epsilon = std::min(out.epsilon, std::max(g, bound));
    out.min_gradient_norm = std::min(out.min_gradient_norm, g);
    out.max_gradient_norm = std::max(out.max_gradient_norm, g);
    ++out.samples;
  };
  consider(critical);
  const int dim = A.model().cone_size();
  for (int s = 0; s < opts.samples; ++s) {
    const double amp = opts.max_amplitude * unit(rng);
    const double shift = opts.max_eta_shift * (2.0 * unit(rng) - 1.0);
    const std::vector<Vec> xi = random_variation(critical.size(), dim, amp, 3, rng());
    const Loop l = A.displaced(critical, xi, shift, 1.0);
    if (!loop_valid(A.model(), l)) continue;
    consider(l);
  }
  return out;
}

std::string loop_table(const ContactModel& model, const Loop& loop, double action,
                       double gradient_norm) {
  std::ostringstream os;
  os.precision(17);
  os << "# loop table; t is loop time in [0,1), coordinates in chart units, r radial\n";
  os << "# eta=" << loop.eta << "\n# action=" << action << "\n# gradient_norm=" << gradient_norm
     << "\n";
  os << "t";
  for (const std::string& n : model.coordinate_names()) os << "," << n;
  os << ",r\n";
  const std::size_t N = loop.size();
  for (std::size_t i = 0; i < N; ++i) {
    const ConePoint p = model.from_cone(loop.z[i]);
    const Vec x = model.normalize(p.x);
    os << double(i) / double(N);
    for (Eigen::Index k = 0; k < x.size(); ++k) os << "," << x[k];
    os << "," << p.r << "\n";
  }
  return os.str();
}

}  // namespace crab
