#include "malab/regularized_max.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "malab/errors.hpp"
#include "malab/mollifier.hpp"
#include "malab/parallel.hpp"

namespace malab {

namespace {

constexpr int kTableIntervals = 4096;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double bump(double t) { return standard_bump().value(t * t); }

// Cubic Hermite on [0, 1] from end values and end slopes (already scaled).
double hermite(double y0, double y1, double d0, double d1, double s) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * d1;
}

}  // namespace

RegularizedMax::RegularizedMax(double epsilon) : eps_(epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("regularized max: eps must be positive");
  norm_ = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump, -1.0, 1.0, 15,
                                                                        1e-15);
  step_ = 2.0 / kTableIntervals;
  cdf_.assign(kTableIntervals + 1, 0.0);
  psi_.assign(kTableIntervals + 1, 0.0);
  // Running integrals of rho and of t rho; Psi(u) = u F(u) - int_{-1}^{u} t rho.
  double mass = 0.0, moment = 0.0;
  for (int i = 0; i < kTableIntervals; ++i) {
    const double a = -1.0 + i * step_;
    const double b = a + step_;
    mass += boost::math::quadrature::gauss<double, 10>::integrate(
        [&](double t) { return bump(t) / norm_; }, a, b);
    moment += boost::math::quadrature::gauss<double, 10>::integrate(
        [&](double t) { return t * bump(t) / norm_; }, a, b);
    cdf_[i + 1] = mass;
    psi_[i + 1] = b * mass - moment;
  }
  cdf_.back() = 1.0;
  psi_.back() = 1.0;  // Psi(1) = 1 - int t rho = 1
}

double RegularizedMax::density(double u) const { return std::abs(u) < 1.0 ? bump(u) / norm_ : 0.0; }

double RegularizedMax::cdf(double u) const {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double pos = (u + 1.0) / step_;
  const int i = std::min(static_cast<int>(pos), kTableIntervals - 1);
  const double a = -1.0 + i * step_;
  return hermite(cdf_[i], cdf_[i + 1], step_ * density(a), step_ * density(a + step_), pos - i);
}

double RegularizedMax::psi(double u) const {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return u;
  const double pos = (u + 1.0) / step_;
  const int i = std::min(static_cast<int>(pos), kTableIntervals - 1);
  return hermite(psi_[i], psi_[i + 1], step_ * cdf_[i], step_ * cdf_[i + 1], pos - i);
}

double RegularizedMax::operator()(double f, double g) const {
  if (f == kNegInf) return g;
  if (g == kNegInf) return f;
  const double a = f - g;
  if (a >= eps_) return f;
  if (a <= -eps_) return g;
  return g + eps_ * psi(a / eps_);
}

double RegularizedMax::operator()(std::span<const double> values) const {
  if (values.empty()) throw InvalidInput("regularized max: no branches");
  const double eta = 0.5 * eps_;
  double top = kNegInf;
  std::size_t lead = 0;
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] > top) {
      top = values[j];
      lead = j;
    }
  if (top == kNegInf) return kNegInf;
  const double lower = top - eta;
  const double upper = top + eta;
  // Branches that can exceed the lower end of the leader's range.
  std::vector<double> active;
  for (double v : values)
    if (v + eta > lower) active.push_back(v);
  if (active.size() == 1) return values[lead];

  // E max = U - int_L^U prod_j F((s - f_j) / eta) ds, split at the knots f_j +- eta.
  std::vector<double> knots = {lower, upper};
  for (double v : active)
    for (double k : {v - eta, v + eta})
      if (k > lower && k < upper) knots.push_back(k);
  std::sort(knots.begin(), knots.end());
  const double inv = 1.0 / eta;
  auto product = [&](double s) {
    double p = 1.0;
    for (double v : active) p *= cdf((s - v) * inv);
    return p;
  };
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    if (knots[k + 1] > knots[k])
      integral += boost::math::quadrature::gauss<double, 20>::integrate(product, knots[k],
                                                                        knots[k + 1]);
  return upper - integral;
}

SampledFunction regularized_max(const SampledFunction& f, const SampledFunction& g,
                                double epsilon) {
  if (!f.same_grid(g)) throw InvalidInput("regularized max: domain mismatch");
  const RegularizedMax tmax(epsilon);
  std::vector<double> out(f.size());
  parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = tmax(f[i], g[i]);
  });
  PointFunction closed;
  if (f.has_closed_form() && g.has_closed_form())
    closed = [tmax, cf = f.closed_form(), cg = g.closed_form()](std::span<const double> x) {
      return tmax(cf(x), cg(x));
    };
  return SampledFunction(f.dimension(), f.domain(), f.radius(), f.points_per_axis(),
                         std::move(out), std::move(closed));
}

SampledFunction regularized_max(std::span<const SampledFunction> fs, double epsilon) {
  if (fs.empty()) throw InvalidInput("regularized max: no branches");
  for (const auto& f : fs)
    if (!f.same_grid(fs[0])) throw InvalidInput("regularized max: domain mismatch");
  const RegularizedMax tmax(epsilon);
  const std::size_t count = fs[0].size();
  std::vector<double> out(count);
  parallel_for(count, [&](std::size_t b, std::size_t e) {
    std::vector<double> v(fs.size());
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = 0; j < fs.size(); ++j) v[j] = fs[j][i];
      out[i] = tmax(std::span<const double>(v));
    }
  });
  PointFunction closed;
  if (std::all_of(fs.begin(), fs.end(), [](const auto& f) { return f.has_closed_form(); })) {
    std::vector<PointFunction> parts;
    for (const auto& f : fs) parts.push_back(f.closed_form());
    closed = [tmax, parts](std::span<const double> x) {
      std::vector<double> v(parts.size());
      for (std::size_t j = 0; j < parts.size(); ++j) v[j] = parts[j](x);
      return tmax(std::span<const double>(v));
    };
  }
  return SampledFunction(fs[0].dimension(), fs[0].domain(), fs[0].radius(),
                         fs[0].points_per_axis(), std::move(out), std::move(closed));
}

}  // namespace malab
