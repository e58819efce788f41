#pragma once

#include <functional>
#include <vector>

namespace malab {

/// Radial profile as a function of q = |y|^2 on [0, 1], with its first two
/// q-derivatives. Must vanish for q >= 1.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// exp(-1 / (1 - q)) for q < 1, zero beyond.
RadialProfile standard_bump();

/// rho_eps(y) = eps^{-2n} rho(|y| / eps) on C^n, normalized so its integral
/// over R^{2n} is one. The constant is computed by quadrature.
class Mollifier {
 public:
  Mollifier(int n, double epsilon, RadialProfile profile = standard_bump());

  int dimension() const { return n_; }
  double epsilon() const { return eps_; }
  const RadialProfile& profile() const { return profile_; }

  /// rho_eps as k(s) with s = |y|^2, and dk/ds, d^2k/ds^2.
  double density(double s) const;
  double density_d1(double s) const;
  double density_d2(double s) const;

  /// Integral of the raw profile over the unit ball of R^{2n}.
  double profile_mass() const { return mass_; }
  /// Profile samples rho(s_i) at s_i = i / (count - 1).
  std::vector<double> profile_samples(int count) const;
  /// Integral of rho_eps over R^{2n}; 1 up to quadrature error.
  double total_mass() const;

 private:
  int n_;
  double eps_;
  RadialProfile profile_;
  double mass_;
  double scale_;  // 1 / (mass eps^{2n})
};

/// Surface area of the unit sphere S^{2n-1}.
double sphere_area(int n);

}  // namespace malab
