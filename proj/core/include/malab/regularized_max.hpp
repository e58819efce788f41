#pragma once

#include <span>
#include <vector>

#include "malab/sampled_function.hpp"

namespace malab {

/// The even density rho_1(t) = bump(t^2) / c on [-1, 1] and the tables behind
/// the regularized maxima:
///   binary:   tmax_eps(f, g) = int max(f - t, g) rho_eps(t) dt
///                            = g + eps Psi((f - g) / eps),
///   variadic: tmax_eps{f_j} = E max_j (f_j + h_j), h_j independent with
///             density rho_{eps/2}.
/// Both return a branch exactly once it leads the others by at least eps.
class RegularizedMax {
 public:
  explicit RegularizedMax(double epsilon);

  double epsilon() const { return eps_; }
  double operator()(double f, double g) const;
  double operator()(std::span<const double> values) const;

  /// kappa_rho = int max(-t, 0) rho_eps(t) dt, the lift at f = g.
  double kappa() const { return eps_ * psi(0.0); }

  /// Unit-scale density, CDF and Psi(u) = int max(u - t, 0) rho_1(t) dt.
  double density(double u) const;
  double cdf(double u) const;
  double psi(double u) const;

 private:
  double eps_;
  double norm_;
  double step_;
  std::vector<double> cdf_;  // on the uniform table over [-1, 1]
  std::vector<double> psi_;
};

/// Pointwise binary regularized maximum on a shared grid.
SampledFunction regularized_max(const SampledFunction& f, const SampledFunction& g,
                                double epsilon);
/// Pointwise variadic form; permutation invariant.
SampledFunction regularized_max(std::span<const SampledFunction> fs, double epsilon);

}  // namespace malab
