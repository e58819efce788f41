#pragma once

#include <span>
#include <vector>

#include "malab/torus_grid.hpp"

namespace malab {

/// Eigenvalues of omega relative to chi at one point, ascending, together
/// with the frame that diagonalizes both: with chi = L L^*, the columns of
/// `frame` = L^{-*} V satisfy frame^* chi frame = I and
/// frame^* omega frame = diag(values).
struct EigenSpectrum {
  RealVector values;
  HermitianMatrix frame;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values(i); }
};

/// Spectrum of the pencil (omega, chi) via Cholesky congruence followed by a
/// Hermitian eigensolve. Throws InvalidInput if chi is not positive definite.
EigenSpectrum relative_eigenvalues(const HermitianMatrix& chi, const HermitianMatrix& omega);

/// Elementary symmetric polynomial sigma_k, with sigma_0 = 1.
double elementary_symmetric(std::span<const double> lambda, int k);
double elementary_symmetric(const RealVector& lambda, int k);
/// sigma_k of lambda with entry `skip` removed.
double elementary_symmetric_without(const RealVector& lambda, int k, int skip);

double binomial(int n, int k);

/// chi^{n-k} ^ omega^k / chi^n at one point: sigma_k(lambda) / C(n, k).
double wedge_ratio(const HermitianMatrix& chi, const HermitianMatrix& omega, int k);

/// Pointwise wedge ratio over the grid.
PotentialField wedge_density(const HermitianFormField& chi, const HermitianFormField& omega, int k);

/// min_k ( c - sum_{i != k} 1/lambda_i ) at one point.
double j_cone_margin_at(const RealVector& lambda, double c);
/// Smallest derivative dPhi/dlambda_j of Phi = prod(lambda) - sum c_k sigma_k / C(n,k).
double gma_cone_margin_at(const RealVector& lambda, std::span<const double> coefficients);
/// dPhi/dlambda_j for the generalized Monge-Ampere operator.
RealVector gma_gradient(const RealVector& lambda, std::span<const double> coefficients);

/// J-equation cone margin over the grid; positive iff
/// c omega^{n-1} - (n-1) chi ^ omega^{n-2} > 0 everywhere.
double j_cone_margin(const HermitianFormField& chi, const HermitianFormField& omega, double c);
/// Generalized Monge-Ampere cone margin over the grid; positive iff
/// n omega^{n-1} - sum_k k c_k chi^{n-k} ^ omega^{k-1} > 0 everywhere.
double gma_cone_margin(const HermitianFormField& chi, const HermitianFormField& omega,
                       std::span<const double> coefficients);

/// Smallest eigenvalue over the grid (no positivity requirement).
double positivity_margin(const HermitianFormField& omega);

struct WorstPoint {
  double value = 0.0;
  std::size_t index = 0;
};
/// Smallest eigenvalue together with the grid point where it occurs.
WorstPoint positivity_worst(const HermitianFormField& omega);

}  // namespace malab
