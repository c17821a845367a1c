#include "crab/spectrum.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crab {

SpectrumWindow window_from_components(const std::vector<Component>& components, double n,
                                      double m, double level_tol) {
  SpectrumWindow w;
  w.n = n;
  w.m = m;
  for (const Component& c : components) {
    if (!(c.eta > n) || c.eta > m) continue;
    w.components.push_back(c);
  }
  std::stable_sort(w.components.begin(), w.components.end(),
                   [](const Component& a, const Component& b) { return a.eta < b.eta; });
  for (const Component& c : w.components) {
    if (!w.values.empty() && c.eta - w.values.back().first <= level_tol) {
      ++w.values.back().second;
    } else {
      w.values.emplace_back(c.eta, 1);
    }
    ++w.count;
    w.dim_proxy += c.nondegenerate ? 1 : 2;
  }
  return w;
}

SpectrumWindow window_from_chords(const std::vector<LegendrianChordPoint>& chords, double n,
                                  double m, double level_tol) {
  std::vector<Component> comps;
  for (const LegendrianChordPoint& c : chords) {
    Component k;
    k.id = static_cast<int>(comps.size());
    k.eta = c.eta;
    k.multiplicity = 1;
    k.nondegenerate = true;
    k.representative.x = c.x;
    k.representative.eta = c.eta;
    k.representative.action = c.action;
    k.representative.residual_x = c.residual;
    k.representative.component_id = k.id;
    k.representative.nondegenerate = true;
    comps.push_back(k);
  }
  return window_from_components(comps, n, m, level_tol);
}

SpectrumWindow spectrum(const ContactModel& model, const IsotopySpec& spec, double n, double m,
                        const SearchOptions& opts) {
  if (!(n < m)) throw std::invalid_argument("spectrum: need n < m");
  const DiscriminantResult r = find_discriminant(model, spec, n, m, opts);
  for (double end : {n, m}) {
    for (const Component& c : r.components) {
      if (std::abs(c.eta - end) <= 1e-6) {
        spdlog::warn("spectrum: critical value {} lies on the window end {}", c.eta, end);
        break;
      }
    }
  }
  return window_from_components(r.components, n, m);
}

SpectrumWindow chord_spectrum(const ContactModel& model, const IsotopySpec& spec, const Vec& q0,
                              const Vec& q1, double n, double m, const ChordOptions& opts) {
  if (!(n < m)) throw std::invalid_argument("chord_spectrum: need n < m");
  return window_from_chords(find_chords(model, spec, q0, q1, n, m, opts), n, m);
}

int mu_proxy(const ContactModel& model, const IsotopySpec& spec, double m,
             const SearchOptions& opts) {
  if (!(m > 0.0)) throw std::invalid_argument("mu_proxy: m must be positive");
  return spectrum(model, spec, 0.0, m, opts).count;
}

std::string to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::Sublinear:
      return "sublinear";
    case GrowthClass::Linear:
      return "linear";
    case GrowthClass::Superlinear:
      return "superlinear";
    case GrowthClass::Undefined:
      break;
  }
  return "undefined";
}

GrowthReport fit_growth(const std::vector<double>& m, const std::vector<int>& mu) {
  if (m.size() != mu.size()) throw std::invalid_argument("fit_growth: size mismatch");
  GrowthReport g;
  g.m = m;
  g.mu = mu;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (mu[i] <= 0 || !(m[i] > 0.0)) continue;
    lx.push_back(std::log(m[i]));
    ly.push_back(std::log(double(mu[i])));
  }
  if (lx.size() < 2) return g;
  const double k = double(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = k * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return g;
  g.exponent = (k * sxy - sx * sy) / den;
  g.intercept = (sy - g.exponent * sx) / k;
  g.undefined = false;
  g.classification = g.exponent < 0.8   ? GrowthClass::Sublinear
                     : g.exponent > 1.2 ? GrowthClass::Superlinear
                                        : GrowthClass::Linear;
  return g;
}

namespace {

void check_m_list(const std::vector<double>& m_list) {
  if (m_list.empty()) throw std::invalid_argument("growth: m_list must be nonempty");
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (!(m_list[i] > 0.0)) throw std::invalid_argument("growth: m values must be positive");
    if (i > 0 && !(m_list[i] > m_list[i - 1]))
      throw std::invalid_argument("growth: m_list must be increasing");
  }
}

std::vector<int> counts_below(const std::vector<double>& etas, const std::vector<double>& m_list) {
  std::vector<int> mu;
  for (double m : m_list) {
    int c = 0;
    for (double e : etas) c += (e > 0.0 && e <= m) ? 1 : 0;
    if (!mu.empty() && c < mu.back())
      throw std::logic_error("mu proxy decreased with m");
    mu.push_back(c);
  }
  return mu;
}

}  // namespace

GrowthReport growth_rate(const ContactModel& model, const IsotopySpec& spec,
                         const std::vector<double>& m_list, const SearchOptions& opts) {
  check_m_list(m_list);
  const SpectrumWindow w = spectrum(model, spec, 0.0, m_list.back(), opts);
  std::vector<double> etas;
  for (const Component& c : w.components) etas.push_back(c.eta);
  return fit_growth(m_list, counts_below(etas, m_list));
}

GrowthReport chord_growth_rate(const ContactModel& model, const IsotopySpec& spec, const Vec& q0,
                               const Vec& q1, const std::vector<double>& m_list,
                               const ChordOptions& opts) {
  check_m_list(m_list);
  std::vector<double> etas;
  for (const LegendrianChordPoint& c : find_chords(model, spec, q0, q1, 0.0, m_list.back(), opts))
    etas.push_back(c.eta);
  return fit_growth(m_list, counts_below(etas, m_list));
}

CircleOracle circle_oracle(double a, double n, double m) {
  if (!(a > 0.0)) throw std::invalid_argument("circle_oracle: a must be positive");
  if (n > m) throw std::invalid_argument("circle_oracle: need n <= m");
  CircleOracle o;
  o.a = a;
  o.n = n;
  o.m = m;
  // a = p/q with small q means the rotation is resonant.
  for (int q = 1; q <= 1000; ++q) {
    if (std::abs(a * q - std::round(a * q)) <= 1e-12 * std::max(1.0, a * q)) {
      o.rational_warning = true;
      spdlog::warn("circle_oracle: a = {} is rational within float precision (q = {})", a, q);
      break;
    }
  }
  const long lo = static_cast<long>(std::floor(n * a)) - 1;
  const long hi = static_cast<long>(std::ceil(m * a)) + 1;
  for (long k = lo; k <= hi; ++k) {
    if (k == 0) continue;
    const double eta = double(k) / a;
    if (eta > n && eta <= m) o.eta_values.push_back(eta);
  }
  o.bruteforce_count = static_cast<int>(o.eta_values.size());
  o.component_count = o.bruteforce_count;
  o.formula_value = 2 * static_cast<int>(std::floor(m / a) - std::floor(n / a));
  if (o.formula_value != o.bruteforce_count) {
    std::ostringstream os;
    os << "the closed formula 2(floor(m/a) - floor(n/a)) = " << o.formula_value
       << " differs from the number of circles eta = k/a in (n, m], which is "
       << o.bruteforce_count << "; the enumeration is used";
    o.note = os.str();
  }
  return o;
}

}  // namespace crab
