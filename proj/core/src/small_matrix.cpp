#include "malab/small_matrix.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace malab {

double hermitian_det(const HermitianMatrix& m) {
  switch (m.rows()) {
    case 1: return m(0, 0).real();
    case 2: return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    case 3:
      return (m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
              m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
              m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)))
          .real();
    default: return m.determinant().real();
  }
}

HermitianMatrix small_inverse(const HermitianMatrix& m) {
  const int n = static_cast<int>(m.rows());
  HermitianMatrix out(n, n);
  switch (n) {
    case 1: out(0, 0) = 1.0 / m(0, 0); return out;
    case 2: {
      const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      out << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
      return out / det;
    }
    case 3: {
      out(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
      out(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
      out(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
      out(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
      out(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
      out(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
      out(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
      out(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
      out(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      const cplx det = m(0, 0) * out(0, 0) + m(0, 1) * out(1, 0) + m(0, 2) * out(2, 0);
      return out / det;
    }
    default: return m.inverse();
  }
}

HermitianEigen hermitian_eigen(const HermitianMatrix& m, bool with_vectors) {
  const int n = static_cast<int>(m.rows());
  HermitianEigen out;
  if (n == 1) {
    out.values = RealVector::Constant(1, m(0, 0).real());
    out.vectors = HermitianMatrix::Identity(1, 1);
    return out;
  }
  if (n == 2) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    // Average the off-diagonal pair so slightly non-Hermitian input is symmetrized.
    const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    const double mid = 0.5 * (a + d);
    const double r = std::hypot(0.5 * (a - d), std::abs(b));
    out.values.resize(2);
    out.values << mid - r, mid + r;
    if (!with_vectors) return out;
    out.vectors = HermitianMatrix::Identity(2, 2);
    if (std::abs(b) == 0.0) {
      if (a > d) out.vectors << 0.0, 1.0, 1.0, 0.0;
      return out;
    }
    // Two candidate null vectors of (m - lambda0); keep the better conditioned one.
    const double lam = out.values(0);
    const cplx u0 = b, u1 = lam - a;
    const cplx w0 = lam - d, w1 = std::conj(b);
    const double nu = std::sqrt(std::norm(u0) + std::norm(u1));
    const double nw = std::sqrt(std::norm(w0) + std::norm(w1));
    cplx v0, v1;
    if (nu >= nw) {
      v0 = u0 / nu;
      v1 = u1 / nu;
    } else {
      v0 = w0 / nw;
      v1 = w1 / nw;
    }
    out.vectors << v0, -std::conj(v1), v1, std::conj(v0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<HermitianMatrix> eig(
      m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  out.values = eig.eigenvalues();
  if (with_vectors) out.vectors = eig.eigenvectors();
  return out;
}

bool small_cholesky(const HermitianMatrix& m, HermitianMatrix& lower) {
  const int n = static_cast<int>(m.rows());
  lower = HermitianMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double diag = m(j, j).real();
    for (int k = 0; k < j; ++k) diag -= std::norm(lower(j, k));
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    lower(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      cplx s = m(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * std::conj(lower(j, k));
      lower(i, j) = s / ljj;
    }
  }
  return true;
}

}  // namespace malab
