#include "crab/discriminant.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <thread>

namespace crab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_unit(double v) {
  double w = std::fmod(v, 1.0);
  if (w < 0.0) w += 1.0;
  if (w >= 1.0) w -= 1.0;
  return w;
}

double wrap_centered(double v) { return v - std::round(v); }

/// Lexicographic order on (η, coordinates).
bool point_less(const Vec& xa, double ea, const Vec& xb, double eb) {
  if (ea != eb) return ea < eb;
  for (Eigen::Index k = 0; k < xa.size(); ++k)
    if (xa[k] != xb[k]) return xa[k] < xb[k];
  return false;
}

/// Sample times on each side of 0 covering (a − δ, b + δ], in flow order.
struct EtaGrid {
  std::vector<double> forward;
  std::vector<double> backward;
};

EtaGrid eta_grid(double a, double b, int per_unit) {
  const double delta = 1.0 / std::max(1, per_unit);
  EtaGrid g;
  if (b > 0.0) {
    const long K = static_cast<long>(std::ceil((b + delta) / delta));
    for (long k = 1; k <= K; ++k) g.forward.push_back(delta * double(k));
  }
  if (a < 0.0) {
    const long K = static_cast<long>(std::ceil((-a + delta) / delta));
    for (long k = 1; k <= K; ++k) g.backward.push_back(-delta * double(k));
  }
  return g;
}

/// Indices of local minima of `vals` below `threshold`, restricted to
/// entries whose time lies within [lo, hi].
std::vector<std::size_t> local_minima(const std::vector<double>& vals,
                                      const std::vector<double>& times, double lo, double hi,
                                      double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (times[k] < lo || times[k] > hi || !(vals[k] < threshold)) continue;
    const bool left = k == 0 || vals[k] <= vals[k - 1];
    const bool right = k + 1 == vals.size() || vals[k] <= vals[k + 1];
    if (left && right) out.push_back(k);
  }
  return out;
}

struct Candidate {
  Vec x;
  double eta = 0.0;
};

struct NewtonOutcome {
  bool converged = false;
  Vec x;
  double eta = 0.0;
  double residual_x = 0.0;
  double residual_rho = 0.0;
  double sigma_min = 0.0;
};

/// (φ_η(x) − x, ρ_η(x) − 1) in ambient coordinates, and the flow end point.
Vec return_map_residual(const ContactModel& model, const IsotopySpec& spec, const Vec& x,
                        double eta, double tol, FlowSample* end = nullptr) {
  const FlowSample f = flow_between(model, spec, x, 1.0, 0.0, eta, tol);
  Vec r(model.point_size() + 1);
  r.head(model.point_size()) = model.displacement(x, f.x);
  r[model.point_size()] = f.rho - 1.0;
  if (end) *end = f;
  return r;
}

NewtonOutcome refine_candidate(const ContactModel& model, const IsotopySpec& spec,
                               const Candidate& c, double eta_lo, double eta_hi,
                               const SearchOptions& opts) {
  const int ps = model.point_size();
  const int d = model.dim();
  const double flow_tol = 1e-12;
  NewtonOutcome out;
  Vec x = model.normalize(c.x);
  double eta = c.eta;
  FlowSample end;
  Vec r = return_map_residual(model, spec, x, eta, flow_tol, &end);
  Mat J(ps + 1, d + 1);
  Mat T;
  auto jacobian = [&]() {
    T = model.tangent_basis(x);
    for (int j = 0; j < d; ++j) {
      const Vec xp = model.normalize(x + opts.fd_step * T.col(j));
      const Vec xm = model.normalize(x - opts.fd_step * T.col(j));
      J.col(j) = (return_map_residual(model, spec, xp, eta, flow_tol) -
                  return_map_residual(model, spec, xm, eta, flow_tol)) /
                 (2.0 * opts.fd_step);
    }
    const Vec g = spec.gradient(end.x, eta);
    J.col(d).head(ps) = model.contact_field(end.x, spec.value(end.x, eta), g);
    J(ps, d) = g.dot(model.reeb(end.x)) * end.rho;
  };

  for (int it = 0; it < opts.max_newton; ++it) {
    if (r.norm() <= opts.tol) {
      out.converged = true;
      break;
    }
    jacobian();
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Vec delta = -svd.solve(r);
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 10; ++bt, step *= 0.5) {
      const Vec xt = model.normalize(x + step * (T * delta.head(d)));
      const double et = eta + step * delta[d];
      if (et < eta_lo || et > eta_hi) continue;
      FlowSample et_end;
      Vec rt;
      try {
        rt = return_map_residual(model, spec, xt, et, flow_tol, &et_end);
      } catch (const NumericError&) {
        continue;
      }
      if (rt.norm() < r.norm()) {
        x = xt;
        eta = et;
        r = rt;
        end = et_end;
        moved = true;
        break;
      }
    }
    if (!moved) {
      // Stagnation at the integrator's noise floor still counts.
      out.converged = r.norm() <= 1e3 * opts.tol;
      break;
    }
  }
  if (!out.converged && r.norm() <= opts.tol) out.converged = true;
  out.x = x;
  out.eta = eta;
  out.residual_x = r.head(ps).norm();
  out.residual_rho = std::abs(r[ps]);
  if (out.converged) {
    jacobian();
    Mat sq(d + 1, d + 1);
    sq.topRows(d) = T.transpose() * J.topRows(ps);
    sq.row(d) = J.row(ps);
    out.sigma_min = Eigen::JacobiSVD<Mat>(sq).singularValues().minCoeff();
  }
  return out;
}

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t t = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < t; ++k) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::pair<double, double> residual(const ContactModel& model, const IsotopySpec& spec,
                                   const Vec& x, double eta, double tol) {
  model.check_domain(x);
  if (eta == 0.0) return {0.0, 0.0};
  const FlowSample f = flow_between(model, spec, x, 1.0, 0.0, eta, tol);
  return {model.distance(f.x, model.normalize(x)), std::abs(f.rho - 1.0)};
}

std::vector<Component> cluster_components(std::vector<DiscriminantPoint>& points,
                                          const ContactModel& model, double cluster_tol,
                                          double link_distance) {
  std::sort(points.begin(), points.end(), [](const DiscriminantPoint& p, const DiscriminantPoint& q) {
    return point_less(p.x, p.eta, q.x, q.eta);
  });
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && points[j].eta - points[i].eta <= cluster_tol; ++j) {
      if (model.distance(points[i].x, points[j].x) <= link_distance) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  // Roots are the first (smallest) member of each set, so ids follow the sort order.
  std::vector<int> id_of(n, -1);
  std::vector<Component> comps;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (id_of[root] < 0) {
      id_of[root] = static_cast<int>(comps.size());
      Component c;
      c.id = id_of[root];
      c.eta = points[root].eta;
      c.nondegenerate = true;
      c.representative = points[root];
      comps.push_back(c);
    }
    Component& c = comps[static_cast<std::size_t>(id_of[root])];
    points[i].component_id = c.id;
    ++c.multiplicity;
    c.nondegenerate = c.nondegenerate && points[i].nondegenerate;
  }
  for (Component& c : comps) c.representative.component_id = c.id;
  std::stable_sort(comps.begin(), comps.end(), [](const Component& p, const Component& q) {
    return point_less(p.representative.x, p.eta, q.representative.x, q.eta);
  });
  std::vector<int> remap(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    remap[static_cast<std::size_t>(comps[k].id)] = static_cast<int>(k);
  }
  for (Component& c : comps) {
    c.id = remap[static_cast<std::size_t>(c.id)];
    c.representative.component_id = c.id;
  }
  for (DiscriminantPoint& p : points) p.component_id = remap[static_cast<std::size_t>(p.component_id)];
  return comps;
}

DiscriminantResult find_discriminant(const ContactModel& model, const IsotopySpec& spec,
                                     double a, double b, const SearchOptions& opts) {
  if (!(a < b)) throw std::invalid_argument("find_discriminant: need a < b");
  const std::vector<Vec> seeds = model.sample(opts.points_per_dim);
  const double delta = 1.0 / std::max(1, opts.seeds_per_unit);
  const EtaGrid grid = eta_grid(a, b, opts.seeds_per_unit);
  DiscriminantResult result;
  result.stats.seeds = static_cast<long>(seeds.size());

  // Scan each seed's flow line for near-returns.
  std::vector<std::vector<Candidate>> per_seed(seeds.size());
  parallel_for(seeds.size(), opts.threads, [&](std::size_t s) {
    const Vec& x = seeds[s];
    for (const std::vector<double>* times : {&grid.forward, &grid.backward}) {
      if (times->empty()) continue;
      const std::vector<FlowSample> fs = flow_at(model, spec, x, *times, 1e-10);
      std::vector<double> vals(fs.size());
      for (std::size_t k = 0; k < fs.size(); ++k)
        vals[k] = model.distance(fs[k].x, x) + std::abs(fs[k].rho - 1.0);
      for (std::size_t k : local_minima(vals, *times, a - delta, b + delta, opts.candidate_threshold))
        per_seed[s].push_back({x, (*times)[k]});
    }
  });
  std::vector<Candidate> candidates;
  for (auto& v : per_seed) candidates.insert(candidates.end(), v.begin(), v.end());
  result.stats.candidates = static_cast<long>(candidates.size());

  std::vector<NewtonOutcome> outcomes(candidates.size());
  const double eta_lo = a - 2.0 * delta, eta_hi = b + 2.0 * delta;
  parallel_for(candidates.size(), opts.threads, [&](std::size_t i) {
    try {
      outcomes[i] = refine_candidate(model, spec, candidates[i], eta_lo, eta_hi, opts);
    } catch (const NumericError& e) {
      spdlog::debug("discriminant candidate {} abandoned: {}", i, e.what());
    }
  });

  std::vector<DiscriminantPoint> found;
  for (const NewtonOutcome& o : outcomes) {
    if (!o.converged) continue;
    ++result.stats.converged;
    if (std::abs(o.eta) < 1e-7 || !(o.eta > a) || o.eta > b) continue;
    DiscriminantPoint p;
    p.x = o.x;
    p.eta = o.eta;
    p.action = o.eta;
    p.residual_x = o.residual_x;
    p.residual_rho = o.residual_rho;
    p.sigma_min = o.sigma_min;
    p.nondegenerate = o.sigma_min > opts.nondegeneracy_tol;
    found.push_back(p);
  }
  if (a < 0.0 && 0.0 <= b && !seeds.empty()) {
    DiscriminantPoint id;
    id.x = seeds.front();
    id.eta = 0.0;
    found.push_back(id);
  }

  std::sort(found.begin(), found.end(), [](const DiscriminantPoint& p, const DiscriminantPoint& q) {
    return point_less(p.x, p.eta, q.x, q.eta);
  });
  std::vector<DiscriminantPoint> unique;
  for (const DiscriminantPoint& p : found) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend() && p.eta - it->eta <= opts.dedup_tol; ++it) {
      if (model.distance(p.x, it->x) + std::abs(p.eta - it->eta) <= opts.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(p);
  }
  result.stats.unique = static_cast<long>(unique.size());
  result.components = cluster_components(
      unique, model, opts.cluster_tol, opts.chain_factor * model.sample_spacing(opts.points_per_dim));
  result.points = std::move(unique);
  return result;
}

// ---------------------------------------------------------------------------
// Chords

namespace {

std::vector<Vec> fibre_directions(int n, int count) {
  std::vector<Vec> out;
  if (n == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
  } else if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double th = kTwoPi * i / count;
      Vec d(2);
      d << std::cos(th), std::sin(th);
      out.push_back(d);
    }
  } else {
    // Equal-area spiral with about the same angular spacing as the planar case.
    const long total = std::max(4L, static_cast<long>(double(count) * count / std::numbers::pi));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (long i = 0; i < total; ++i) {
      const double zc = 1.0 - 2.0 * (double(i) + 0.5) / double(total);
      const double rho = std::sqrt(1.0 - zc * zc);
      Vec d(3);
      d << rho * std::cos(golden * double(i)), rho * std::sin(golden * double(i)), zc;
      out.push_back(d);
    }
  }
  return out;
}

Vec fibre_miss(const Vec& q, const Vec& q1) {
  Vec d = q - q1;
  for (Eigen::Index k = 0; k < d.size(); ++k) d[k] = wrap_centered(d[k]);
  return d;
}

}  // namespace

std::vector<LegendrianChordPoint> find_chords(const ContactModel& model, const IsotopySpec& spec,
                                              const Vec& q0, const Vec& q1, double a, double b,
                                              const ChordOptions& opts) {
  if (model.kind() != ModelKind::FlatTorusUnitCotangent)
    throw UnsupportedError("find_chords: only the flat torus unit cotangent bundle is supported");
  if (!(a < b)) throw std::invalid_argument("find_chords: need a < b");
  const int n = model.point_size() / 2;
  if (q0.size() != n || q1.size() != n)
    throw std::invalid_argument("find_chords: base points must have the torus dimension");
  if (fibre_miss(q0, q1).norm() < 1e-12)
    throw std::invalid_argument("find_chords: fibres must be distinct (q0 == q1)");

  const double reach = std::max(std::abs(a), std::abs(b));
  const int count = std::max(
      opts.min_directions, static_cast<int>(std::ceil(kTwoPi * reach / (0.5 * opts.candidate_threshold))));
  const std::vector<Vec> dirs = fibre_directions(n, count);
  const double delta = 1.0 / std::max(1, opts.seeds_per_unit);
  const EtaGrid grid = eta_grid(a, b, opts.seeds_per_unit);
  Vec q0w = q0;
  for (Eigen::Index k = 0; k < n; ++k) q0w[k] = wrap_unit(q0[k]);

  auto make_point = [&](const Vec& p) {
    Vec x(2 * n);
    x << q0w, p;
    return x;
  };

  std::vector<std::vector<Candidate>> per_dir(dirs.size());
  parallel_for(dirs.size(), opts.threads, [&](std::size_t s) {
    const Vec x = make_point(dirs[s]);
    for (const std::vector<double>* times : {&grid.forward, &grid.backward}) {
      if (times->empty()) continue;
      const std::vector<FlowSample> fs = flow_at(model, spec, x, *times, 1e-10);
      std::vector<double> vals(fs.size());
      for (std::size_t k = 0; k < fs.size(); ++k) vals[k] = fibre_miss(fs[k].x.head(n), q1).norm();
      for (std::size_t k : local_minima(vals, *times, a - delta, b + delta, opts.candidate_threshold))
        per_dir[s].push_back({x, (*times)[k]});
    }
  });
  std::vector<Candidate> candidates;
  for (auto& v : per_dir) candidates.insert(candidates.end(), v.begin(), v.end());

  const double eta_lo = a - 2.0 * delta, eta_hi = b + 2.0 * delta;
  std::vector<std::optional<LegendrianChordPoint>> results(candidates.size());
  parallel_for(candidates.size(), opts.threads, [&](std::size_t i) {
    Vec p = candidates[i].x.tail(n);
    double eta = candidates[i].eta;
    auto miss = [&](const Vec& pp, double e, FlowSample* end) {
      const FlowSample f = flow_between(model, spec, make_point(pp), 1.0, 0.0, e, 1e-12);
      if (end) *end = f;
      return fibre_miss(f.x.head(n), q1);
    };
    try {
      FlowSample end;
      Vec r = miss(p, eta, &end);
      for (int it = 0; it < opts.max_newton && r.norm() > opts.tol; ++it) {
        Mat T = Mat::Zero(n, std::max(n - 1, 0));
        if (n > 1) {
          Eigen::HouseholderQR<Mat> qr(p);
          T = (qr.householderQ() * Mat::Identity(n, n)).rightCols(n - 1);
        }
        Mat J(n, n);
        for (int j = 0; j + 1 < n; ++j) {
          const Vec pp = (p + opts.fd_step * T.col(j)).normalized();
          const Vec pm = (p - opts.fd_step * T.col(j)).normalized();
          J.col(j) = (miss(pp, eta, nullptr) - miss(pm, eta, nullptr)) / (2.0 * opts.fd_step);
        }
        J.col(n - 1) = model.contact_field(end.x, spec.value(end.x, eta), spec.gradient(end.x, eta)).head(n);
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-10);
        const Vec delta_v = -svd.solve(r);
        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 10; ++bt, step *= 0.5) {
          const Vec pt = n > 1 ? Vec((p + step * (T * delta_v.head(n - 1))).normalized()) : p;
          const double et = eta + step * delta_v[n - 1];
          if (et < eta_lo || et > eta_hi) continue;
          FlowSample e2;
          const Vec rt = miss(pt, et, &e2);
          if (rt.norm() < r.norm()) {
            p = pt;
            eta = et;
            r = rt;
            end = e2;
            moved = true;
            break;
          }
        }
        if (!moved) break;
      }
      if (r.norm() <= 1e3 * opts.tol && std::abs(eta) >= 1e-7 && eta > a && eta <= b) {
        LegendrianChordPoint c;
        c.x = make_point(p);
        c.eta = eta;
        c.endpoint = end.x;
        c.residual = r.norm();
        c.action = eta;
        results[i] = c;
      }
    } catch (const NumericError& e) {
      spdlog::debug("chord candidate {} abandoned: {}", i, e.what());
    }
  });

  std::vector<LegendrianChordPoint> found;
  for (auto& r : results)
    if (r) found.push_back(*r);
  std::sort(found.begin(), found.end(), [](const LegendrianChordPoint& p, const LegendrianChordPoint& q) {
    return point_less(p.x, p.eta, q.x, q.eta);
  });
  std::vector<LegendrianChordPoint> unique;
  for (const LegendrianChordPoint& c : found) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend() && c.eta - it->eta <= opts.dedup_tol; ++it) {
      if ((c.x - it->x).norm() + std::abs(c.eta - it->eta) <= opts.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(c);
  }
  return unique;
}

// ---------------------------------------------------------------------------

bool check_nonresonant(const std::vector<DiscriminantPoint>& points, double tol) {
  for (const DiscriminantPoint& p : points) {
    if (std::abs(p.eta) < 1e-7) continue;
    if (std::abs(p.eta - std::round(p.eta)) <= tol) return false;
  }
  return true;
}

bool check_nonresonant(const ContactModel& model, const IsotopySpec& spec, double a, double b,
                       const SearchOptions& opts) {
  return check_nonresonant(find_discriminant(model, spec, a, b, opts).points);
}

Contactomorphism Contactomorphism::circle_diffeo(double eps) {
  if (!(std::abs(kTwoPi * eps) < 1.0))
    throw std::invalid_argument("circle diffeo x + eps sin(2 pi x) needs |2 pi eps| < 1");
  return {Kind::CircleDiffeo, eps, {}};
}

Vec Contactomorphism::apply(const Vec& x) const {
  Vec y = x;
  switch (kind) {
    case Kind::Identity:
      break;
    case Kind::CircleRotation:
      y[0] = wrap_unit(x[0] + parameter);
      break;
    case Kind::CircleDiffeo:
      y[0] = wrap_unit(x[0] + parameter * std::sin(kTwoPi * x[0]));
      break;
    case Kind::TorusTranslation:
      for (Eigen::Index k = 0; k < shift.size(); ++k) y[k] = wrap_unit(x[k] + shift[k]);
      break;
  }
  return y;
}

Vec Contactomorphism::inverse(const Vec& y) const {
  Vec x = y;
  switch (kind) {
    case Kind::Identity:
      break;
    case Kind::CircleRotation:
      x[0] = wrap_unit(y[0] - parameter);
      break;
    case Kind::CircleDiffeo: {
      double v = y[0];
      for (int it = 0; it < 60; ++it) {
        const double f = v + parameter * std::sin(kTwoPi * v) - y[0];
        const double dv = f / (1.0 + kTwoPi * parameter * std::cos(kTwoPi * v));
        v -= dv;
        if (std::abs(dv) < 1e-16) break;
      }
      x[0] = wrap_unit(v);
      break;
    }
    case Kind::TorusTranslation:
      for (Eigen::Index k = 0; k < shift.size(); ++k) x[k] = wrap_unit(y[k] - shift[k]);
      break;
  }
  return x;
}

double Contactomorphism::factor(const Vec& x) const {
  if (kind == Kind::CircleDiffeo) return 1.0 + kTwoPi * parameter * std::cos(kTwoPi * x[0]);
  return 1.0;
}

double Contactomorphism::factor_derivative(const Vec& x) const {
  if (kind == Kind::CircleDiffeo) return -kTwoPi * kTwoPi * parameter * std::sin(kTwoPi * x[0]);
  return 0.0;
}

IsotopySpec conjugate_spec(const ContactModel& model, const IsotopySpec& spec,
                           const Contactomorphism& psi) {
  using K = Contactomorphism::Kind;
  switch (psi.kind) {
    case K::Identity:
      return spec;
    case K::CircleRotation:
    case K::CircleDiffeo:
      if (model.kind() != ModelKind::Circle)
        throw UnsupportedError("conjugate_spec: circle maps need the circle model");
      break;
    case K::TorusTranslation:
      if (model.kind() != ModelKind::FlatTorusUnitCotangent || psi.shift.size() * 2 != model.point_size())
        throw UnsupportedError("conjugate_spec: torus translations need a flat torus of matching dimension");
      break;
  }
  const IsotopySpec base = spec;
  const Contactomorphism map = psi;
  ScalarField h = [base, map](const Vec& y, double t) {
    const Vec x = map.inverse(y);
    return map.factor(x) * base.value(x, t);
  };
  ScalarField ht = [base, map](const Vec& y, double t) {
    const Vec x = map.inverse(y);
    return map.factor(x) * base.time_derivative(x, t);
  };
  GradientField grad;
  if (psi.kind == K::TorusTranslation) {
    grad = [base, map](const Vec& y, double t) { return base.gradient(map.inverse(y), t); };
  } else {
    grad = [base, map](const Vec& y, double t) {
      const Vec x = map.inverse(y);
      const double f = map.factor(x);
      Vec g(1);
      g[0] = (map.factor_derivative(x) * base.value(x, t) + f * base.gradient(x, t)[0]) / f;
      return g;
    };
  }
  return IsotopySpec(spec.label() + " (conjugated)", h, ht, grad, spec.autonomous());
}

EquivarianceReport conjugation_equivariance(const ContactModel& model, const IsotopySpec& spec,
                                            const Contactomorphism& psi, double a, double b,
                                            const SearchOptions& opts) {
  const IsotopySpec conj = conjugate_spec(model, spec, psi);
  const DiscriminantResult r0 = find_discriminant(model, spec, a, b, opts);
  const DiscriminantResult r1 = find_discriminant(model, conj, a, b, opts);
  EquivarianceReport rep;
  rep.components_original = static_cast<int>(r0.components.size());
  rep.components_conjugate = static_cast<int>(r1.components.size());
  const std::size_t k = std::min(r0.components.size(), r1.components.size());
  for (std::size_t i = 0; i < k; ++i)
    rep.max_eta_gap = std::max(rep.max_eta_gap, std::abs(r0.components[i].eta - r1.components[i].eta));
  for (const DiscriminantPoint& p : r0.points) {
    const auto [dx, drho] = residual(model, conj, psi.apply(p.x), p.eta);
    rep.max_x_gap = std::max(rep.max_x_gap, dx + drho);
  }
  rep.matched = rep.components_original == rep.components_conjugate && rep.max_eta_gap <= 1e-6 &&
                rep.max_x_gap <= 1e-5;
  return rep;
}

}  // namespace crab
