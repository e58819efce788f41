#pragma once

#include "malab/trig_series.hpp"

namespace malab {

// Closed-form kernels for the n <= 3 Hermitian matrices stored per grid
// point. Eigen's dynamic-size paths (LU for determinants, blocked solves)
// dominate the per-point cost at these sizes.

/// Real part of det(m); exact cofactor expansion.
double hermitian_det(const HermitianMatrix& m);

/// m^{-1} by the adjugate formula. The caller guarantees m is invertible.
HermitianMatrix small_inverse(const HermitianMatrix& m);

struct HermitianEigen {
  RealVector values;       // ascending
  HermitianMatrix vectors; // unitary, columns paired with values
};

/// Eigen-decomposition of a Hermitian matrix: closed form for n <= 2,
/// Eigen's tridiagonal QR for n = 3.
HermitianEigen hermitian_eigen(const HermitianMatrix& m, bool with_vectors = true);

/// Lower Cholesky factor; returns false if m is not positive definite.
bool small_cholesky(const HermitianMatrix& m, HermitianMatrix& lower);

}  // namespace malab
