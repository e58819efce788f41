#include "malab/form_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "malab/errors.hpp"
#include "malab/parallel.hpp"
#include "malab/small_matrix.hpp"

namespace malab {

namespace {

// Solves L Y = B for lower-triangular L.
HermitianMatrix forward_solve(const HermitianMatrix& l, const HermitianMatrix& b) {
  const int n = static_cast<int>(l.rows());
  HermitianMatrix y(n, b.cols());
  for (int c = 0; c < b.cols(); ++c)
    for (int i = 0; i < n; ++i) {
      cplx s = b(i, c);
      for (int k = 0; k < i; ++k) s -= l(i, k) * y(k, c);
      y(i, c) = s / l(i, i);
    }
  return y;
}

// Solves L^* Y = B for lower-triangular L.
HermitianMatrix adjoint_back_solve(const HermitianMatrix& l, const HermitianMatrix& b) {
  const int n = static_cast<int>(l.rows());
  HermitianMatrix y(n, b.cols());
  for (int c = 0; c < b.cols(); ++c)
    for (int i = n - 1; i >= 0; --i) {
      cplx s = b(i, c);
      for (int k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * y(k, c);
      y(i, c) = s / std::conj(l(i, i));
    }
  return y;
}

}  // namespace

EigenSpectrum relative_eigenvalues(const HermitianMatrix& chi, const HermitianMatrix& omega) {
  if (chi.rows() != omega.rows() || chi.rows() != chi.cols() || omega.rows() != omega.cols())
    throw InvalidInput("relative_eigenvalues: matrix shape mismatch");
  HermitianMatrix l;
  if (!small_cholesky(chi, l))
    throw InvalidInput("relative_eigenvalues: reference form is not positive definite");
  const HermitianMatrix y = forward_solve(l, omega);
  HermitianMatrix m = forward_solve(l, HermitianMatrix(y.adjoint()));
  m = 0.5 * (m + m.adjoint()).eval();
  const HermitianEigen eig = hermitian_eigen(m);
  EigenSpectrum s;
  s.values = eig.values;
  s.frame = adjoint_back_solve(l, eig.vectors);
  return s;
}

double elementary_symmetric(std::span<const double> lambda, int k) {
  if (k < 0 || k > static_cast<int>(lambda.size())) return 0.0;
  // e[j] accumulates sigma_j of the prefix processed so far.
  std::array<double, kMaxComplexDim + 1> e{};
  e[0] = 1.0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t j = i + 1; j >= 1; --j) e[j] += lambda[i] * e[j - 1];
  return e[static_cast<std::size_t>(k)];
}

double elementary_symmetric(const RealVector& lambda, int k) {
  return elementary_symmetric(std::span<const double>(lambda.data(), lambda.size()), k);
}

double elementary_symmetric_without(const RealVector& lambda, int k, int skip) {
  std::array<double, kMaxComplexDim> rest{};
  int m = 0;
  for (int i = 0; i < lambda.size(); ++i)
    if (i != skip) rest[m++] = lambda(i);
  return elementary_symmetric(std::span<const double>(rest.data(), m), k);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double wedge_ratio(const HermitianMatrix& chi, const HermitianMatrix& omega, int k) {
  const int n = static_cast<int>(chi.rows());
  if (k < 0 || k > n)
    throw InvalidInput("wedge_density: k = " + std::to_string(k) + " outside [0, " +
                       std::to_string(n) + "]");
  const auto s = relative_eigenvalues(chi, omega);
  return elementary_symmetric(s.values, k) / binomial(n, k);
}

PotentialField wedge_density(const HermitianFormField& chi, const HermitianFormField& omega,
                             int k) {
  if (!(chi.grid == omega.grid)) throw InvalidInput("wedge_density: grid mismatch");
  const int n = chi.grid.dimension();
  if (k < 0 || k > n)
    throw InvalidInput("wedge_density: k = " + std::to_string(k) + " outside [0, " +
                       std::to_string(n) + "]");
  PotentialField out(chi.grid);
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out.values[i] = wedge_ratio(chi[i], omega[i], k);
  });
  return out;
}

double j_cone_margin_at(const RealVector& lambda, double c) {
  const int n = static_cast<int>(lambda.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += 1.0 / lambda(i);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) worst = std::min(worst, c - (total - 1.0 / lambda(k)));
  return worst;
}

RealVector gma_gradient(const RealVector& lambda, std::span<const double> coefficients) {
  const int n = static_cast<int>(lambda.size());
  RealVector g(n);
  for (int j = 0; j < n; ++j) {
    double d = elementary_symmetric_without(lambda, n - 1, j);
    for (std::size_t idx = 0; idx < coefficients.size(); ++idx) {
      const int k = static_cast<int>(idx) + 1;
      d -= coefficients[idx] * elementary_symmetric_without(lambda, k - 1, j) / binomial(n, k);
    }
    g(j) = d;
  }
  return g;
}

double gma_cone_margin_at(const RealVector& lambda, std::span<const double> coefficients) {
  return gma_gradient(lambda, coefficients).minCoeff();
}

namespace {

void require_positive_spectrum(const RealVector& lambda, std::size_t point, const char* op) {
  if (lambda.minCoeff() <= 0.0)
    throw InvalidInput(std::string(op) + ": form is not positive at grid point " +
                       std::to_string(point) + " (smallest relative eigenvalue " +
                       std::to_string(lambda.minCoeff()) + ")");
}

template <typename PointMargin>
double grid_min(const HermitianFormField& chi, const HermitianFormField& omega,
                PointMargin&& margin) {
  if (!(chi.grid == omega.grid)) throw InvalidInput("cone margin: grid mismatch");
  std::vector<double> values(chi.size());
  parallel_for(values.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) values[i] = margin(relative_eigenvalues(chi[i], omega[i]).values, i);
  });
  return *std::min_element(values.begin(), values.end());
}

}  // namespace

double j_cone_margin(const HermitianFormField& chi, const HermitianFormField& omega, double c) {
  return grid_min(chi, omega, [c](const RealVector& lambda, std::size_t i) {
    require_positive_spectrum(lambda, i, "j_cone_margin");
    return j_cone_margin_at(lambda, c);
  });
}

double gma_cone_margin(const HermitianFormField& chi, const HermitianFormField& omega,
                       std::span<const double> coefficients) {
  for (double ck : coefficients)
    if (ck < 0.0) throw InvalidInput("gma_cone_margin: coefficients must be non-negative");
  return grid_min(chi, omega, [&](const RealVector& lambda, std::size_t i) {
    require_positive_spectrum(lambda, i, "gma_cone_margin");
    return gma_cone_margin_at(lambda, coefficients);
  });
}

WorstPoint positivity_worst(const HermitianFormField& omega) {
  std::vector<double> values(omega.size());
  parallel_for(values.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      values[i] = hermitian_eigen(omega[i], false).values(0);
    }
  });
  const auto it = std::min_element(values.begin(), values.end());
  return {*it, static_cast<std::size_t>(it - values.begin())};
}

double positivity_margin(const HermitianFormField& omega) { return positivity_worst(omega).value; }

}  // namespace malab
