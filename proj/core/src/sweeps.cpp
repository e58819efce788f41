#include "malab/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "malab/errors.hpp"
#include "malab/form_algebra.hpp"
#include "malab/random.hpp"
#include "malab/small_matrix.hpp"

namespace malab {

HermitianMatrix random_positive_hermitian(Rng& rng, int n, double floor) {
  HermitianMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.complex(1.0);
  HermitianMatrix m = g * g.adjoint();
  for (int i = 0; i < n; ++i) m(i, i) += floor;
  return m;
}

SweepSummary cone_preservation_sweep(std::size_t trials, std::uint64_t seed) {
  SweepSummary out{"cone preservation", 0, 0, 0, std::numeric_limits<double>::infinity(), 1.0};
  Rng rng(seed);
  while (out.trials < trials) {
    const int n = 2 + static_cast<int>(out.trials % 2);
    RealVector lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = rng.log_uniform(0.2, 5.0);
    double sum = 0.0, prod = 1.0;
    for (int i = 0; i < n; ++i) {
      sum += 1.0 / lambda(i);
      prod *= lambda(i);
    }
    // c at or above max_k sum_{i != k} 1/lambda_i gives the weak cone for every k;
    // f then follows from the equation.
    const double weak = sum - 1.0 / lambda.maxCoeff();
    const double c = rng.uniform(weak, sum + 1.0);
    const double f = (c - sum) * prod;
    if (!(f > twist_lower_bound(c, n))) {
      ++out.rejected;
      continue;
    }
    const ConePreservation check = cone_preservation_check(lambda, f, c);
    if (check.status == ConeCheck::Inapplicable) {
      ++out.rejected;
      continue;
    }
    ++out.trials;
    if (check.status == ConeCheck::Fails) ++out.failures;
    out.worst = std::min(out.worst, check.slack_ratio);
  }
  return out;
}

SweepSummary concavity_sweep(PhiFamily family, std::size_t trials, std::uint64_t seed) {
  SweepSummary out{family == PhiFamily::MongeAmpere ? "MA concavity" : "J concavity", trials, 0,
                   0, std::numeric_limits<double>::infinity(), -1e-10};
  Rng rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    const int n = 2 + static_cast<int>(k % 2);
    const HermitianMatrix a = random_positive_hermitian(rng, n);
    const HermitianMatrix b = random_positive_hermitian(rng, n);
    const double t = rng.uniform(0.01, 0.99);
    const double defect = phi_concavity_probe(family, a, b, t);
    out.worst = std::min(out.worst, defect);
    if (!(defect >= out.tolerance)) ++out.failures;
  }
  return out;
}

SweepSummary gradient_sweep(PhiFamily family, std::size_t trials, std::uint64_t seed) {
  SweepSummary out{family == PhiFamily::MongeAmpere ? "MA gradient" : "J gradient", trials, 0, 0,
                   0.0, 1e-6};
  Rng rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    const int n = 2 + static_cast<int>(k % 2);
    RealVector lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = rng.log_uniform(0.2, 5.0);
    const RealVector grad = phi_gradient(family, lambda);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double h = 1e-5 * lambda(i);
      RealVector up = lambda, down = lambda;
      up(i) += h;
      down(i) -= h;
      const double fd = (phi_operator(family, up) - phi_operator(family, down)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad(i)) / std::abs(grad(i)));
    }
    out.worst = std::max(out.worst, worst);
    if (!(worst <= out.tolerance)) ++out.failures;
  }
  return out;
}

SweepSummary wedge_identity_sweep(int n, std::size_t trials, std::uint64_t seed) {
  if (n < 1 || n > kMaxComplexDim) throw InvalidInput("wedge sweep: n must be in 1..3");
  SweepSummary out{"wedge identity n=" + std::to_string(n), trials, 0, 0, 0.0, 1e-9};
  Rng rng(seed);
  // Vandermonde system for p(t) = sum_k a_k t^k sampled at t = 0..n.
  Eigen::MatrixXd vandermonde(n + 1, n + 1);
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k) vandermonde(j, k) = std::pow(static_cast<double>(j), k);
  const auto lu = vandermonde.fullPivLu();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const HermitianMatrix chi = random_positive_hermitian(rng, n);
    const HermitianMatrix omega = random_positive_hermitian(rng, n);
    const double base = hermitian_det(chi);
    Eigen::VectorXd samples(n + 1);
    for (int j = 0; j <= n; ++j)
      samples(j) = hermitian_det(HermitianMatrix(chi + static_cast<double>(j) * omega)) / base;
    const Eigen::VectorXd coeff = lu.solve(samples);
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double expected = coeff(k) / binomial(n, k);
      worst = std::max(worst, std::abs(wedge_ratio(chi, omega, k) - expected));
    }
    out.worst = std::max(out.worst, worst);
    if (!(worst <= out.tolerance)) ++out.failures;
  }
  return out;
}

}  // namespace malab
