#include "malab/linear_solver.hpp"

#include <cmath>
#include <sstream>

#include "malab/errors.hpp"

namespace malab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace

GmresResult gmres(const VectorMap& op, const VectorMap& precond, std::span<const double> rhs,
                  const GmresOptions& options) {
  if (options.restart < 1 || options.max_iterations < 1)
    throw InvalidInput("gmres: restart and iteration cap must be positive");
  const std::size_t n = rhs.size();
  GmresResult out;
  out.x.assign(n, 0.0);
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) return out;

  const int m = options.restart;
  std::vector<double> r(rhs.begin(), rhs.end());
  double beta = bnorm;

  while (true) {
    std::vector<std::vector<double>> basis;
    basis.reserve(m + 1);
    basis.emplace_back(r);
    for (double& v : basis[0]) v /= beta;

    // Hessenberg columns after Givens rotation, stored column-major.
    std::vector<std::vector<double>> h(m, std::vector<double>(m + 1, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    g[0] = beta;

    int k = 0;
    double estimate = beta / bnorm;
    for (; k < m && out.iterations < options.max_iterations; ++k) {
      std::vector<double> w = op(precond(basis[k]));
      ++out.iterations;
      for (int i = 0; i <= k; ++i) {
        h[k][i] = dot(w, basis[i]);
        axpy(-h[k][i], basis[i], w);
      }
      h[k][k + 1] = norm(w);
      for (int i = 0; i < k; ++i) {
        const double a = h[k][i];
        const double b = h[k][i + 1];
        h[k][i] = cs[i] * a + sn[i] * b;
        h[k][i + 1] = -sn[i] * a + cs[i] * b;
      }
      const double denom = std::hypot(h[k][k], h[k][k + 1]);
      cs[k] = denom == 0.0 ? 1.0 : h[k][k] / denom;
      sn[k] = denom == 0.0 ? 0.0 : h[k][k + 1] / denom;
      h[k][k] = denom;
      h[k][k + 1] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      estimate = std::abs(g[k + 1]) / bnorm;

      const double next_norm = norm(w);
      if (estimate <= options.tolerance || next_norm == 0.0) {
        ++k;
        break;
      }
      basis.emplace_back(std::move(w));
      for (double& v : basis.back()) v /= next_norm;
    }

    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[j][i] * y[j];
      y[i] = h[i][i] == 0.0 ? 0.0 : s / h[i][i];
    }
    std::vector<double> combo(n, 0.0);
    for (int i = 0; i < k; ++i) axpy(y[i], basis[i], combo);
    const std::vector<double> dx = precond(combo);
    axpy(1.0, dx, out.x);

    const std::vector<double> ax = op(out.x);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
    beta = norm(r);
    out.relative_residual = beta / bnorm;
    if (out.relative_residual <= options.tolerance || beta == 0.0) return out;
    if (out.iterations >= options.max_iterations) break;
  }

  if (out.relative_residual > options.stagnation_tolerance) {
    std::ostringstream msg;
    msg << "linear solve stagnated: relative residual " << out.relative_residual << " after "
        << out.iterations << " iterations";
    throw NumericFailure(msg.str());
  }
  return out;
}

}  // namespace malab
