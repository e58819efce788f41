#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace oracle {

Matrix random_matrix(Gen& gen, int n, double scale) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gen.complex(scale);
  return m;
}

Matrix random_positive(Gen& gen, int n, double floor) {
  const Matrix g = random_matrix(gen, n);
  return g * g.adjoint() + floor * Matrix::Identity(n, n);
}

Matrix diagonal(std::span<const double> d) {
  const int n = static_cast<int>(d.size());
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = d[i];
  return m;
}

malab::TrigSeries random_series(Gen& gen, int n, int kmax, int terms, double amplitude) {
  std::vector<malab::TrigMode> modes;
  for (int t = 0; t < terms; ++t) {
    malab::TrigMode mode;
    for (int a = 0; a < 2 * n; ++a) mode.k[a] = gen.integer(-kmax, kmax);
    mode.cos_amp = gen.uniform(-amplitude, amplitude);
    mode.sin_amp = gen.uniform(-amplitude, amplitude);
    modes.push_back(mode);
  }
  return malab::TrigSeries(n, modes);
}

namespace {

int sign_of(const std::vector<int>& perm) {
  int s = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) s = -s;
  return s;
}

std::vector<std::pair<std::vector<int>, int>> signed_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::pair<std::vector<int>, int>> out;
  do out.emplace_back(p, sign_of(p));
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// F(omega + s beta) derivative paired as a Hermitian form in the vector w of
// beta = w w^*: returns M with w^* M w = sum_ab w_a conj(w_b) pairing(E_ab).
template <class Pairing>
Matrix pairing_matrix(int n, Pairing pairing) {
  Matrix m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Matrix e = Matrix::Zero(n, n);
      e(a, b) = 1.0;
      m(b, a) = pairing(e);
    }
  return m;
}

double least_ratio(const Matrix& num, const Matrix& den) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(
      0.5 * (num + num.adjoint()), 0.5 * (den + den.adjoint()), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("oracle: generalized eigensolve failed");
  return solver.eigenvalues().minCoeff();
}

std::vector<Matrix> repeat(const Matrix& a, int count) { return std::vector<Matrix>(count, a); }

std::vector<Matrix> join(std::vector<Matrix> a, const std::vector<Matrix>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

cplx mixed_discriminant(std::span<const Matrix> forms) {
  const int n = static_cast<int>(forms.size());
  const auto perms = signed_permutations(n);
  cplx sum = 0.0;
  for (const auto& [s, ss] : perms)
    for (const auto& [t, st] : perms) {
      cplx prod = static_cast<double>(ss * st);
      for (int i = 0; i < n; ++i) prod *= forms[i](s[i], t[i]);
      sum += prod;
    }
  return sum / factorial(n);
}

double wedge_ratio(const Matrix& chi, const Matrix& omega, int k) {
  const int n = static_cast<int>(chi.rows());
  const auto forms = join(repeat(chi, n - k), repeat(omega, k));
  const auto top = repeat(chi, n);
  return (mixed_discriminant(forms) / mixed_discriminant(top)).real();
}

double gma_cone_margin(const Matrix& chi, const Matrix& omega, std::span<const double> ck) {
  const int n = static_cast<int>(chi.rows());
  auto theta = [&](const Matrix& beta) {
    cplx v = static_cast<double>(n) * mixed_discriminant(join(repeat(omega, n - 1), {beta}));
    for (int k = 1; k < n; ++k) {
      const auto forms = join(join(repeat(chi, n - k), repeat(omega, k - 1)), {beta});
      v -= ck[k - 1] * static_cast<double>(k) * mixed_discriminant(forms);
    }
    return v;
  };
  auto norm = [&](const Matrix& beta) {
    return static_cast<double>(n) * mixed_discriminant(join(repeat(chi, n - 1), {beta}));
  };
  return least_ratio(pairing_matrix(n, theta), pairing_matrix(n, norm));
}

double j_cone_margin(const Matrix& chi, const Matrix& omega, double c) {
  const int n = static_cast<int>(chi.rows());
  auto theta = [&](const Matrix& beta) {
    cplx v = c * mixed_discriminant(join(repeat(omega, n - 1), {beta}));
    if (n >= 2)
      v -= static_cast<double>(n - 1) *
           mixed_discriminant(join(join({chi}, repeat(omega, n - 2)), {beta}));
    return v;
  };
  auto norm = [&](const Matrix& beta) { return mixed_discriminant(join(repeat(omega, n - 1), {beta})); };
  return least_ratio(pairing_matrix(n, theta), pairing_matrix(n, norm));
}

malab::HermitianMatrix fd_complex_hessian(const std::function<double(std::span<const double>)>& f,
                                          std::span<const double> x, int n, double h) {
  const int d = 2 * n;
  static constexpr double c1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};  // / 12h
  std::vector<double> y(x.begin(), x.end());
  auto at = [&](int a, double sa, int b, double sb) {
    std::copy(x.begin(), x.end(), y.begin());
    y[a] += sa;
    y[b] += sb;
    return f(y);
  };
  Eigen::MatrixXd real(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          if (c1[i] == 0.0 || c1[j] == 0.0) continue;
          s += c1[i] * c1[j] * at(a, (i - 2) * h, b, (j - 2) * h);
        }
      real(a, b) = s / (144.0 * h * h);
    }
  malab::HermitianMatrix out(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const int xp = 2 * p, yp = 2 * p + 1, xq = 2 * q, yq = 2 * q + 1;
      out(p, q) = 0.25 * cplx(real(xp, xq) + real(yp, yq), real(xp, yq) - real(yp, xq));
    }
  return out;
}

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, n) / factorial(n - 1); }

namespace {
double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }
double bump_norm() {
  static const double z = simpson(bump, -1.0, 1.0, 20000);
  return z;
}
}  // namespace

double bump_mass(int n) {
  return sphere_area(n) *
         simpson([n](double r) { return bump(r) * std::pow(r, 2 * n - 1); }, 0.0, 1.0, 20000);
}

double tmax_binary(double f, double g, double eps) {
  auto integrand = [&](double t) { return std::max(f - t, g) * bump(t / eps) / (eps * bump_norm()); };
  const double kink = std::clamp(f - g, -eps, eps);
  return simpson(integrand, -eps, kink, 20000) + simpson(integrand, kink, eps, 20000);
}

double tmax_kappa(double eps) { return tmax_binary(0.0, 0.0, eps); }

}  // namespace oracle
