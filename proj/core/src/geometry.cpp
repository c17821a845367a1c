#include "crab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace crab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double wrap(double v, double period) {
  double w = std::fmod(v, period);
  if (w < 0.0) w += period;
  if (w >= period) w -= period;
  return w;
}

/// Orthonormal basis of the complement of a unit-ish vector v in ℝ^k (k × (k−1)).
Mat orthogonal_complement(const Vec& v) {
  const Eigen::Index k = v.size();
  Eigen::HouseholderQR<Mat> qr(v);
  Mat q = qr.householderQ() * Mat::Identity(k, k);
  return q.rightCols(k - 1);
}

// ---------------------------------------------------------------------------

class CircleModel final : public ContactModel {
 public:
  CircleModel() {
    Mat a = Mat::Zero(2, 2);
    a(1, 0) = 1.0;  // λ = r dx
    set_charts({1.0}, {1.0, 0.0}, a);
  }
  ModelKind kind() const override { return ModelKind::Circle; }
  std::string name() const override { return "circle"; }
  int dim() const override { return 1; }
  int point_size() const override { return 1; }

  Vec normalize(const Vec& x) const override {
    Vec y(1);
    y[0] = wrap(x[0], 1.0);
    return y;
  }
  Vec alpha(const Vec&) const override { return Vec::Ones(1); }
  Mat dalpha(const Vec&) const override { return Mat::Zero(1, 1); }
  Vec reeb(const Vec&) const override { return Vec::Ones(1); }
  Mat tangent_basis(const Vec&) const override { return Mat::Ones(1, 1); }
  Vec contact_field(const Vec&, double h, const Vec&) const override {
    Vec y(1);
    y[0] = h;
    return y;
  }

  Vec to_cone(const ConePoint& p) const override {
    Vec z(2);
    z << p.x[0], p.r;
    return z;
  }
  ConePoint from_cone(const Vec& z) const override {
    if (!(z[1] > 0.0)) throw DomainError("circle cone: r must be positive");
    return {z.head(1), z[1]};
  }
  Mat projection_jacobian(const Vec&) const override {
    Mat j = Mat::Zero(1, 2);
    j(0, 0) = 1.0;
    return j;
  }
  Vec radius_gradient(const Vec&) const override {
    Vec g(2);
    g << 0.0, 1.0;
    return g;
  }

  std::vector<Vec> sample(int per_dim) const override {
    std::vector<Vec> out;
    for (int i = 0; i < per_dim; ++i) out.push_back(Vec::Constant(1, double(i) / per_dim));
    return out;
  }
  double sample_spacing(int per_dim) const override { return 1.0 / per_dim; }
  std::vector<std::string> coordinate_names() const override { return {"x"}; }
};

// ---------------------------------------------------------------------------

class FlatTorusModel final : public ContactModel {
 public:
  explicit FlatTorusModel(int n) : n_(n) {
    if (n < 1 || n > 3) throw std::invalid_argument("flat torus: dimension must be 1, 2 or 3");
    Mat a = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) a(n + j, j) = 1.0;  // λ = P·dq
    std::vector<double> periods(2 * n, 0.0);
    std::fill_n(periods.begin(), n, 1.0);
    set_charts(periods, periods, a);
  }
  ModelKind kind() const override { return ModelKind::FlatTorusUnitCotangent; }
  std::string name() const override { return "flat-torus"; }
  int dim() const override { return 2 * n_ - 1; }
  int point_size() const override { return 2 * n_; }
  int torus_dim() const { return n_; }

  Vec normalize(const Vec& x) const override {
    Vec y = x;
    for (int j = 0; j < n_; ++j) y[j] = wrap(x[j], 1.0);
    const double norm = x.tail(n_).norm();
    if (!(norm > 0.0)) throw DomainError("flat torus: p must be nonzero");
    y.tail(n_) /= norm;
    return y;
  }
  void check_domain(const Vec& x) const override {
    ContactModel::check_domain(x);
    if (std::abs(x.tail(n_).norm() - 1.0) > 1e-3)
      throw DomainError("flat torus: point is off the unit cotangent bundle (|p| != 1)");
  }
  Vec alpha(const Vec& x) const override {
    Vec a = Vec::Zero(2 * n_);
    a.head(n_) = x.tail(n_).normalized();
    return a;
  }
  Mat dalpha(const Vec&) const override { return symplectic_matrix(); }
  Vec reeb(const Vec& x) const override { return alpha(x); }
  Mat tangent_basis(const Vec& x) const override {
    Mat t = Mat::Zero(2 * n_, 2 * n_ - 1);
    t.topLeftCorner(n_, n_).setIdentity();
    if (n_ > 1) t.bottomRightCorner(n_, n_ - 1) = orthogonal_complement(x.tail(n_).normalized());
    return t;
  }
  Vec contact_field(const Vec& x, double h, const Vec& grad_h) const override {
    const Vec p = x.tail(n_).normalized();
    const Vec gq = grad_h.head(n_);
    const Vec gp = grad_h.tail(n_);
    Vec y(2 * n_);
    y.head(n_) = h * p + gp - p.dot(gp) * p;
    y.tail(n_) = -(gq - p.dot(gq) * p);
    return y;
  }

  Vec to_cone(const ConePoint& pt) const override {
    Vec z = pt.x;
    z.tail(n_) = pt.r * pt.x.tail(n_).normalized();
    return z;
  }
  ConePoint from_cone(const Vec& z) const override {
    const double r = z.tail(n_).norm();
    if (!(r > 0.0)) throw DomainError("flat torus cone: momentum must be nonzero");
    Vec x = z;
    x.tail(n_) /= r;
    return {x, r};
  }
  Mat projection_jacobian(const Vec& z) const override {
    const double r = z.tail(n_).norm();
    const Vec p = z.tail(n_) / r;
    Mat j = Mat::Zero(2 * n_, 2 * n_);
    j.topLeftCorner(n_, n_).setIdentity();
    j.bottomRightCorner(n_, n_) = (Mat::Identity(n_, n_) - p * p.transpose()) / r;
    return j;
  }
  Vec radius_gradient(const Vec& z) const override {
    Vec g = Vec::Zero(2 * n_);
    g.tail(n_) = z.tail(n_).normalized();
    return g;
  }

  std::vector<Vec> sample(int per_dim) const override {
    std::vector<Vec> dirs = directions(per_dim);
    std::vector<Vec> out;
    const long total = static_cast<long>(std::pow(per_dim, n_));
    for (long k = 0; k < total; ++k) {
      Vec q(n_);
      long rem = k;
      for (int j = 0; j < n_; ++j) {
        q[j] = double(rem % per_dim) / per_dim;
        rem /= per_dim;
      }
      for (const Vec& d : dirs) {
        Vec x(2 * n_);
        x << q, d;
        out.push_back(x);
      }
    }
    return out;
  }
  /// Spacing of the base grid. Seeds of one Morse-Bott family share a fibre
  /// direction after refinement, so they chain along q.
  double sample_spacing(int per_dim) const override { return 1.0 / per_dim; }
  std::vector<std::string> coordinate_names() const override {
    std::vector<std::string> names;
    for (int j = 0; j < n_; ++j) names.push_back("q" + std::to_string(j + 1));
    for (int j = 0; j < n_; ++j) names.push_back("p" + std::to_string(j + 1));
    return names;
  }

  /// Unit vectors used as fibre seeds.
  std::vector<Vec> directions(int per_dim) const {
    std::vector<Vec> out;
    if (n_ == 1) {
      out.push_back(Vec::Constant(1, 1.0));
      out.push_back(Vec::Constant(1, -1.0));
    } else if (n_ == 2) {
      for (int i = 0; i < per_dim; ++i) {
        const double th = kTwoPi * i / per_dim;
        Vec d(2);
        d << std::cos(th), std::sin(th);
        out.push_back(d);
      }
    } else {
      const int count = per_dim * per_dim;
      const double golden = kPi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < count; ++i) {
        const double zc = 1.0 - 2.0 * (i + 0.5) / count;
        const double rho = std::sqrt(1.0 - zc * zc);
        Vec d(3);
        d << rho * std::cos(golden * i), rho * std::sin(golden * i), zc;
        out.push_back(d);
      }
    }
    return out;
  }

 private:
  int n_;
};

// ---------------------------------------------------------------------------

class EllipsoidModel final : public ContactModel {
 public:
  explicit EllipsoidModel(std::vector<double> radii) : radii_(std::move(radii)) {
    n_ = static_cast<int>(radii_.size());
    if (n_ < 1) throw std::invalid_argument("ellipsoid: need at least one radius");
    for (double a : radii_)
      if (!(a > 0.0)) throw std::invalid_argument("ellipsoid: radii must be positive");
    weights_.resize(2 * n_);
    for (int j = 0; j < n_; ++j) weights_[j] = weights_[n_ + j] = 1.0 / (radii_[j] * radii_[j]);
    Mat a = Mat::Zero(2 * n_, 2 * n_);
    for (int j = 0; j < n_; ++j) {
      a(j, n_ + j) = 0.5;  // λ = ½ Σ (x dy − y dx)
      a(n_ + j, j) = -0.5;
    }
    set_charts(std::vector<double>(2 * n_, 0.0), std::vector<double>(2 * n_, 0.0), a);
  }
  ModelKind kind() const override { return ModelKind::EllipsoidBoundary; }
  std::string name() const override { return "ellipsoid"; }
  int dim() const override { return 2 * n_ - 1; }
  int point_size() const override { return 2 * n_; }
  const std::vector<double>& radii() const { return radii_; }

  double quadratic(const Vec& z) const { return (weights_.array() * z.array().square()).sum(); }
  Vec quadratic_gradient(const Vec& z) const { return 2.0 * weights_.cwiseProduct(z); }

  Vec normalize(const Vec& x) const override {
    const double q = quadratic(x);
    if (!(q > 0.0)) throw DomainError("ellipsoid: point must be nonzero");
    return x / std::sqrt(q);
  }
  void check_domain(const Vec& x) const override {
    ContactModel::check_domain(x);
    if (std::abs(quadratic(x) - 1.0) > 1e-3)
      throw DomainError("ellipsoid: point is off the ellipsoid boundary");
  }
  Vec alpha(const Vec& x) const override { return liouville_matrix().transpose() * x; }
  Mat dalpha(const Vec&) const override { return symplectic_matrix(); }
  Vec reeb(const Vec& x) const override {
    const Vec y = symplectic_inverse() * quadratic_gradient(x);
    return y / alpha(x).dot(y);
  }
  Mat tangent_basis(const Vec& x) const override {
    return orthogonal_complement(quadratic_gradient(x).normalized());
  }

  Vec to_cone(const ConePoint& p) const override { return std::sqrt(p.r) * normalize(p.x); }
  ConePoint from_cone(const Vec& z) const override {
    const double q = quadratic(z);
    if (!(q > 0.0)) throw DomainError("ellipsoid cone: point must be nonzero");
    return {z / std::sqrt(q), q};
  }
  Mat projection_jacobian(const Vec& z) const override {
    const double q = quadratic(z);
    const Vec g = quadratic_gradient(z);
    return Mat::Identity(2 * n_, 2 * n_) / std::sqrt(q) -
           z * g.transpose() / (2.0 * std::pow(q, 1.5));
  }
  Vec radius_gradient(const Vec& z) const override { return quadratic_gradient(z); }

  std::vector<Vec> sample(int per_dim) const override {
    std::vector<Vec> out;
    if (n_ == 1) {
      for (int i = 0; i < per_dim; ++i) {
        const double th = kTwoPi * i / per_dim;
        Vec w(2);
        w << std::cos(th), std::sin(th);
        out.push_back(scale(w));
      }
    } else if (n_ == 2) {
      for (int i = 0; i < per_dim; ++i) {
        const double chi = 0.5 * kPi * (i + 0.5) / per_dim;
        for (int j = 0; j < per_dim; ++j) {
          const double f1 = kTwoPi * j / per_dim;
          for (int k = 0; k < per_dim; ++k) {
            const double f2 = kTwoPi * k / per_dim;
            Vec w(4);
            w << std::cos(chi) * std::cos(f1), std::sin(chi) * std::cos(f2),
                std::cos(chi) * std::sin(f1), std::sin(chi) * std::sin(f2);
            out.push_back(scale(w));
          }
        }
      }
    } else {
      std::mt19937_64 rng(0x5eedULL);
      std::normal_distribution<double> gauss;
      const long total = static_cast<long>(std::pow(per_dim, 2 * n_ - 1));
      for (long i = 0; i < total; ++i) {
        Vec w(2 * n_);
        for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = gauss(rng);
        out.push_back(scale(w.normalized()));
      }
    }
    return out;
  }
  double sample_spacing(int per_dim) const override {
    return *std::max_element(radii_.begin(), radii_.end()) * kTwoPi / per_dim;
  }
  std::vector<std::string> coordinate_names() const override {
    std::vector<std::string> names;
    for (int j = 0; j < n_; ++j) names.push_back("x" + std::to_string(j + 1));
    for (int j = 0; j < n_; ++j) names.push_back("y" + std::to_string(j + 1));
    return names;
  }

 private:
  Vec scale(const Vec& w) const {
    Vec z = w;
    for (int j = 0; j < n_; ++j) {
      z[j] *= radii_[j];
      z[n_ + j] *= radii_[j];
    }
    return z;
  }

  std::vector<double> radii_;
  Vec weights_;
  int n_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------

void ContactModel::set_charts(std::vector<double> point_periods, std::vector<double> cone_periods,
                              Mat liouville) {
  point_periods_ = std::move(point_periods);
  cone_periods_ = std::move(cone_periods);
  liouville_ = std::move(liouville);
  omega_ = liouville_ - liouville_.transpose();
  omega_inv_ = omega_.inverse();
}

void ContactModel::check_domain(const Vec& x) const {
  if (x.size() != point_size()) {
    std::ostringstream os;
    os << name() << ": expected " << point_size() << " coordinates, got " << x.size();
    throw DomainError(os.str());
  }
  if (!x.allFinite()) throw DomainError(name() + ": non-finite coordinates");
}

Vec ContactModel::displacement(const Vec& from, const Vec& to) const {
  Vec d = to - from;
  for (std::size_t i = 0; i < point_periods_.size(); ++i) {
    const double per = point_periods_[i];
    if (per > 0.0) d[i] -= per * std::round(d[i] / per);
  }
  return d;
}

Vec ContactModel::cone_displacement(const Vec& from, const Vec& to) const {
  Vec d = to - from;
  for (std::size_t i = 0; i < cone_periods_.size(); ++i) {
    const double per = cone_periods_[i];
    if (per > 0.0) d[i] -= per * std::round(d[i] / per);
  }
  return d;
}

Vec ContactModel::contact_field(const Vec& x, double h, const Vec& grad_h) const {
  return contact_field_generic(x, h, grad_h);
}

Vec ContactModel::contact_field_generic(const Vec& x, double h, const Vec& grad_h) const {
  const Mat t = tangent_basis(x);
  const Vec a = t.transpose() * alpha(x);
  Vec y = h * reeb(x);
  if (t.cols() < 2) return y;
  // ξ = T · (complement of a in tangent coordinates)
  const Mat xi = t * orthogonal_complement(a.normalized());
  const Mat w = xi.transpose() * dalpha(x) * xi;
  const Vec coeff = w.fullPivLu().solve(xi.transpose() * grad_h);
  return y + xi * coeff;
}

ModelPtr make_circle() { return std::make_shared<CircleModel>(); }
ModelPtr make_flat_torus(int n) { return std::make_shared<FlatTorusModel>(n); }
ModelPtr make_ellipsoid(std::vector<double> radii) {
  return std::make_shared<EllipsoidModel>(std::move(radii));
}

// ---------------------------------------------------------------------------

Vec contact_vector_field(const ContactModel& model, const IsotopySpec& spec, double t,
                         const Vec& x) {
  model.check_domain(x);
  const Vec xn = model.normalize(x);
  return model.contact_field(xn, spec.value(xn, t), spec.gradient(xn, t));
}

OdeRhs contact_flow_rhs(const ContactModel& model, const IsotopySpec& spec) {
  const int n = model.point_size();
  return [&model, &spec, n](double t, const Vec& y, Vec& dy) {
    const Vec x = model.normalize(y.head(n));
    const Vec g = spec.gradient(x, t);
    dy.head(n) = model.contact_field(x, spec.value(x, t), g);
    dy[n] = g.dot(model.reeb(x)) * y[n];
  };
}

namespace {
Vec pack(const Vec& x, double rho) {
  Vec y(x.size() + 1);
  y << x, rho;
  return y;
}
}  // namespace

FlowSample flow_between(const ContactModel& model, const IsotopySpec& spec, const Vec& x,
                        double rho, double t0, double t1, double tol) {
  model.check_domain(x);
  if (t0 == t1) return {t1, x, rho};
  IntegratorOptions opts;
  opts.tol = tol;
  const int n = model.point_size();
  const Vec y = integrate(contact_flow_rhs(model, spec), pack(x, rho), t0, t1, opts);
  return {t1, model.normalize(y.head(n)), y[n]};
}

FlowResult flow(const ContactModel& model, const IsotopySpec& spec, const Vec& x, double t,
                double tol, int trajectory_samples) {
  if (!std::isfinite(t)) throw std::invalid_argument("flow: time must be finite");
  if (!(tol > 0.0)) throw std::invalid_argument("flow: tolerance must be positive");
  model.check_domain(x);
  FlowResult out;
  if (trajectory_samples > 0) {
    std::vector<double> times(static_cast<std::size_t>(trajectory_samples) + 1);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = t * double(i) / trajectory_samples;
    out.trajectory = flow_at(model, spec, x, times, tol);
    out.x_end = out.trajectory.back().x;
    out.rho = out.trajectory.back().rho;
    return out;
  }
  const FlowSample s = flow_between(model, spec, x, 1.0, 0.0, t, tol);
  out.x_end = s.x;
  out.rho = s.rho;
  return out;
}

std::vector<FlowSample> flow_at(const ContactModel& model, const IsotopySpec& spec, const Vec& x,
                                std::span<const double> times, double tol) {
  model.check_domain(x);
  IntegratorOptions opts;
  opts.tol = tol;
  const int n = model.point_size();
  std::vector<FlowSample> out(times.size());
  integrate_observed(
      contact_flow_rhs(model, spec), pack(x, 1.0), 0.0, times,
      [&](std::size_t i, const Vec& y) { out[i] = {times[i], model.normalize(y.head(n)), y[n]}; },
      opts);
  return out;
}

PathReport validate_path(const ContactModel& model, const IsotopySpec& spec,
                         const PathGrid& grid, double tol) {
  if (grid.points_per_dim < 1 || grid.time_samples < 1)
    throw std::invalid_argument("validate_path: grid must be nonempty");
  PathReport rep;
  rep.min_h = std::numeric_limits<double>::infinity();
  rep.max_h = -std::numeric_limits<double>::infinity();
  const std::vector<Vec> points = model.sample(grid.points_per_dim);
  std::vector<double> ts(static_cast<std::size_t>(grid.time_samples));
  for (std::size_t j = 0; j < ts.size(); ++j) ts[j] = double(j) / grid.time_samples;

  for (const Vec& x : points) {
    for (double t : ts) {
      const double h = spec.value(x, t);
      rep.min_h = std::min(rep.min_h, h);
      rep.max_h = std::max(rep.max_h, h);
      rep.periodicity_defect = std::max(rep.periodicity_defect, std::abs(spec.value(x, t + 1.0) - h));
    }
  }
  rep.positive = rep.min_h > 0.0;

  // φ_{t+1}(x) against φ_t(φ_1(x))
  std::vector<double> shifted(ts.size() + 1);
  for (std::size_t j = 0; j < ts.size(); ++j) shifted[j] = ts[j];
  shifted.back() = 1.0;
  std::vector<double> late(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) late[j] = 1.0 + ts[j];
  for (const Vec& x : points) {
    std::vector<double> all = shifted;
    all.insert(all.end(), late.begin(), late.end());
    const std::vector<FlowSample> direct = flow_at(model, spec, x, all, tol);
    const Vec x1 = direct[ts.size()].x;
    const std::vector<FlowSample> composed = flow_at(model, spec, x1, ts, tol);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double d = model.distance(direct[ts.size() + 1 + j].x, composed[j].x);
      rep.max_violation = std::max(rep.max_violation, d);
    }
  }
  rep.twisted_periodic = rep.max_violation <= 1e-6;
  return rep;
}

}  // namespace crab
