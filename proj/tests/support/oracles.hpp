#pragma once

// Reference computations for the tests. Each one takes a different route
// from the library: permutation expansions instead of eigenvalues,
// finite differences instead of spectral derivatives, Simpson sums instead
// of Gauss rules.

#include <complex>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "malab/trig_series.hpp"

namespace oracle {

using malab::cplx;
using Matrix = Eigen::MatrixXcd;

/// Random source for test data, deliberately not malab::Rng.
class Gen {
 public:
  explicit Gen(unsigned long long seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  cplx complex(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

 private:
  std::mt19937_64 engine_;
};

Matrix random_matrix(Gen& gen, int n, double scale = 1.0);
/// G G^* + floor I.
Matrix random_positive(Gen& gen, int n, double floor = 0.2);
Matrix diagonal(std::span<const double> d);

/// A band-limited real series with `terms` random modes of frequency <= kmax.
malab::TrigSeries random_series(Gen& gen, int n, int kmax, int terms, double amplitude);

/// Mixed discriminant D(A_1, ..., A_n) from the double permutation sum
/// (1/n!) sum_{s,t} sgn(s) sgn(t) prod_i A_i(s(i), t(i)), so D(A, ..., A) = det A.
/// This is the coefficient of i dz_1 ^ dzbar_1 ^ ... in the wedge product
/// of the (1,1)-forms with matrices A_i, divided by n!.
cplx mixed_discriminant(std::span<const Matrix> forms);

/// chi^{n-k} ^ omega^k / chi^n by exterior-algebra expansion.
double wedge_ratio(const Matrix& chi, const Matrix& omega, int k);

/// Least value of Theta ^ beta / N(beta) over rank-one positive (1,1)-forms
/// beta, for the (n-1,n-1)-form Theta = d/ds F(omega + s beta) given by the
/// multilinear expansion. GMA: F = omega^n - sum_k c_k chi^{n-k} ^ omega^k,
/// N(beta) = n chi^{n-1} ^ beta.
double gma_cone_margin(const Matrix& chi, const Matrix& omega, std::span<const double> ck);
/// J: Theta = c omega^{n-1} - (n-1) chi ^ omega^{n-2}, N(beta) = omega^{n-1} ^ beta.
double j_cone_margin(const Matrix& chi, const Matrix& omega, double c);

/// d^2 f / dz_p dzbar_q by fourth-order central differences in R^{2n}.
malab::HermitianMatrix fd_complex_hessian(const std::function<double(std::span<const double>)>& f,
                                          std::span<const double> x, int n, double h);

/// Composite Simpson rule with an even number of intervals.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals);

/// |S^{2n-1}| = 2 pi^n / (n-1)!.
double sphere_area(int n);

/// Integral of exp(-1/(1-|y|^2)) over the unit ball of R^{2n}.
double bump_mass(int n);

/// int max(f - t, g) rho_eps(t) dt with rho_1(t) proportional to exp(-1/(1-t^2)).
double tmax_binary(double f, double g, double eps);
/// The lift at f = g.
double tmax_kappa(double eps);

}  // namespace oracle
