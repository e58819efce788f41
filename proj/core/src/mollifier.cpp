#include "malab/mollifier.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "malab/errors.hpp"

namespace malab {

RadialProfile standard_bump() {
  RadialProfile p;
  p.value = [](double q) { return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0; };
  p.d1 = [](double q) {
    if (q >= 1.0) return 0.0;
    const double u = 1.0 - q;
    return -std::exp(-1.0 / u) / (u * u);
  };
  p.d2 = [](double q) {
    if (q >= 1.0) return 0.0;
    const double u = 1.0 - q;
    const double u2 = u * u;
    return std::exp(-1.0 / u) * (1.0 - 2.0 * u) / (u2 * u2);
  };
  return p;
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, n) / std::tgamma(static_cast<double>(n));
}

namespace {

// Integral of rho(|y|^2) over the unit ball of R^{2n}, radially.
double radial_mass(int n, const RadialProfile& p) {
  auto integrand = [&](double r) { return p.value(r * r) * std::pow(r, 2 * n - 1); };
  const double radial =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-15);
  return sphere_area(n) * radial;
}

}  // namespace

Mollifier::Mollifier(int n, double epsilon, RadialProfile profile)
    : n_(n), eps_(epsilon), profile_(std::move(profile)) {
  if (n < 1 || n > 3) throw InvalidInput("mollifier: complex dimension must be 1, 2 or 3");
  if (!(epsilon > 0.0)) throw InvalidInput("mollifier: radius must be positive");
  if (!profile_.value || !profile_.d1 || !profile_.d2)
    throw InvalidInput("mollifier: profile needs value and two derivatives");
  mass_ = radial_mass(n, profile_);
  if (!(mass_ > 0.0)) throw InvalidInput("mollifier: profile has no mass");
  scale_ = 1.0 / (mass_ * std::pow(eps_, 2 * n_));
}

double Mollifier::density(double s) const {
  return scale_ * profile_.value(s / (eps_ * eps_));
}

double Mollifier::density_d1(double s) const {
  const double e2 = eps_ * eps_;
  return scale_ * profile_.d1(s / e2) / e2;
}

double Mollifier::density_d2(double s) const {
  const double e2 = eps_ * eps_;
  return scale_ * profile_.d2(s / e2) / (e2 * e2);
}

std::vector<double> Mollifier::profile_samples(int count) const {
  if (count < 2) throw InvalidInput("mollifier: need at least two profile samples");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = profile_.value(static_cast<double>(i) / (count - 1));
  return out;
}

double Mollifier::total_mass() const {
  auto integrand = [&](double r) { return density(r * r) * std::pow(r, 2 * n_ - 1); };
  return sphere_area(n_) * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                               integrand, 0.0, eps_, 15, 1e-15);
}

}  // namespace malab
