#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "malab/errors.hpp"
#include "malab/form_algebra.hpp"
#include "oracles.hpp"

using namespace malab;

namespace {

HermitianMatrix diag(std::initializer_list<double> d) {
  const std::vector<double> v(d);
  return oracle::diagonal(v);
}

HermitianFormField field_of(const TorusGrid& g, const HermitianMatrix& m) {
  return HermitianFormField::constant(g, m);
}

RealVector vec(std::initializer_list<double> d) {
  RealVector v(static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return v;
}

}  // namespace

TEST(RelativeEigenvalues, Examples) {
  auto s = relative_eigenvalues(diag({1, 1}), diag({2, 3}));
  EXPECT_NEAR(s[0], 2.0, 1e-14);
  EXPECT_NEAR(s[1], 3.0, 1e-14);
  s = relative_eigenvalues(diag({2, 2}), diag({1, 1}));
  EXPECT_NEAR(s[0], 0.5, 1e-14);
  EXPECT_NEAR(s[1], 0.5, 1e-14);
}

TEST(RelativeEigenvalues, SolveTheCharacteristicEquation) {
  oracle::Gen gen(1);
  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 50; ++trial) {
      const oracle::Matrix chi = oracle::random_positive(gen, n);
      oracle::Matrix w = oracle::random_matrix(gen, n);
      w = (w + w.adjoint()).eval();
      const auto s = relative_eigenvalues(chi, w);
      ASSERT_TRUE(std::is_sorted(s.values.data(), s.values.data() + n));
      const double scale = std::pow(w.norm() + s.values.cwiseAbs().maxCoeff() * chi.norm(), n);
      for (int i = 0; i < n; ++i)
        EXPECT_LT(std::abs((w - s[i] * chi).determinant()), 1e-10 * scale);
    }
}

TEST(RelativeEigenvalues, RejectsNonPositiveChi) {
  EXPECT_THROW(relative_eigenvalues(diag({1, -1}), diag({1, 1})), InvalidInput);
  EXPECT_THROW(relative_eigenvalues(diag({0, 1}), diag({1, 1})), InvalidInput);
}

TEST(WedgeDensity, Examples) {
  const auto g = make_grid(2, 8);
  const auto chi = field_of(g, diag({1, 1}));
  const auto omega = field_of(g, diag({2, 3}));
  EXPECT_NEAR(wedge_density(chi, omega, 2)[5], 6.0, 1e-13);
  EXPECT_NEAR(wedge_density(chi, omega, 0)[5], 1.0, 1e-15);
  EXPECT_NEAR(wedge_density(chi, omega, 1)[5], 2.5, 1e-13);
  EXPECT_THROW(wedge_density(chi, omega, 3), InvalidInput);
  EXPECT_THROW(wedge_density(chi, omega, -1), InvalidInput);
}

TEST(WedgeDensity, DiagonalOracleCase) {
  // omega ^ chi / chi^2 for chi = I, omega = diag(2, 3): the expansion has
  // the two cross terms 2 * 1 and 1 * 3, halved.
  const oracle::Matrix chi = diag({1, 1}), omega = diag({2, 3});
  EXPECT_NEAR(oracle::wedge_ratio(chi, omega, 1), 2.5, 1e-14);
}

TEST(JConeMargin, Examples) {
  EXPECT_NEAR(j_cone_margin_at(vec({1, 1}), 2.0), 1.0, 1e-14);
  EXPECT_NEAR(j_cone_margin_at(vec({0.5, 1}), 2.4), 0.4, 1e-14);
  EXPECT_NEAR(j_cone_margin_at(vec({0.1, 1}), 2.0), -8.0, 1e-13);
  const auto g = make_grid(2, 8);
  EXPECT_NEAR(j_cone_margin(field_of(g, diag({1, 1})), field_of(g, diag({0.5, 1})), 2.4), 0.4, 1e-13);
  EXPECT_THROW(j_cone_margin(field_of(g, diag({1, 1})), field_of(g, diag({-0.5, 1})), 2.4), InvalidInput);
}

TEST(GmaConeMargin, Examples) {
  const std::vector<double> zero = {0.0}, one = {1.0}, ten = {10.0};
  EXPECT_NEAR(gma_cone_margin_at(vec({2, 5}), zero), 2.0, 1e-14);
  EXPECT_NEAR(gma_cone_margin_at(vec({2, 2}), one), 1.5, 1e-14);
  EXPECT_NEAR(gma_cone_margin_at(vec({1, 1}), ten), -4.0, 1e-14);
  const std::vector<double> zeros3 = {0.0, 0.0};
  EXPECT_NEAR(gma_cone_margin_at(vec({1, 2, 3}), zeros3), 2.0, 1e-14);
  const auto g = make_grid(2, 8);
  const std::vector<double> negative = {-1.0};
  EXPECT_THROW(gma_cone_margin(field_of(g, diag({1, 1})), field_of(g, diag({1, 1})), negative), InvalidInput);
  EXPECT_THROW(gma_cone_margin(field_of(g, diag({1, 1})), field_of(g, diag({-1, 1})), one), InvalidInput);
}

TEST(PositivityMargin, Examples) {
  const auto g = make_grid(2, 8);
  EXPECT_DOUBLE_EQ(positivity_margin(HermitianFormField::identity(g)), 1.0);
  EXPECT_DOUBLE_EQ(positivity_margin(field_of(g, diag({1, -1}))), -1.0);
}

TEST(PositivityMargin, MatchesDenseEigensolver) {
  oracle::Gen gen(2);
  const auto g = make_grid(2, 8);
  const auto omega = HermitianFormField::identity(g) +
                     ddbar(PotentialField::sample(g, oracle::random_series(gen, 2, 2, 4, 0.01)));
  double ref = 1e300;
  for (const auto& m : omega.matrices) {
    Eigen::ComplexEigenSolver<oracle::Matrix> es(oracle::Matrix(m), false);
    for (int i = 0; i < 2; ++i) ref = std::min(ref, es.eigenvalues()(i).real());
  }
  EXPECT_NEAR(positivity_margin(omega), ref, 1e-10);
}

// -- properties ---------------------------------------------------------------

TEST(FormAlgebraProperty, CongruenceInvariance) {
  oracle::Gen gen(3);
  for (int n = 2; n <= 3; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      const oracle::Matrix chi = oracle::random_positive(gen, n);
      const oracle::Matrix omega = oracle::random_positive(gen, n);
      oracle::Matrix a = oracle::random_matrix(gen, n) + 1.5 * oracle::Matrix::Identity(n, n);
      const auto s0 = relative_eigenvalues(chi, omega);
      const auto s1 = relative_eigenvalues(a * chi * a.adjoint(), a * omega * a.adjoint());
      for (int i = 0; i < n; ++i) EXPECT_NEAR(s1[i], s0[i], 1e-8 * std::max(1.0, std::abs(s0[i])));
    }
}

TEST(FormAlgebraProperty, WedgeRatioIsSymmetricUnderRelabeling) {
  oracle::Gen gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const oracle::Matrix chi = oracle::random_positive(gen, 3);
    const oracle::Matrix omega = oracle::random_positive(gen, 3);
    std::vector<int> perm = {0, 1, 2};
    while (std::next_permutation(perm.begin(), perm.end())) {
      oracle::Matrix p = oracle::Matrix::Zero(3, 3);
      for (int i = 0; i < 3; ++i) p(i, perm[i]) = 1.0;
      for (int k = 0; k <= 3; ++k)
        EXPECT_NEAR(wedge_ratio(p * chi * p.transpose(), p * omega * p.transpose(), k),
                    wedge_ratio(chi, omega, k), 1e-10 * std::max(1.0, std::abs(wedge_ratio(chi, omega, k))));
    }
  }
}

TEST(FormAlgebraProperty, JMarginDecreasesWithAnyEigenvalue) {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 2;
    RealVector lam(n);
    for (int i = 0; i < n; ++i) lam(i) = gen.uniform(0.2, 3.0);
    const double c = gen.uniform(0.5, 4.0);
    const double base = j_cone_margin_at(lam, c);
    for (int i = 0; i < n; ++i) {
      RealVector lower = lam;
      lower(i) *= gen.uniform(0.3, 0.99);
      EXPECT_LE(j_cone_margin_at(lower, c), base + 1e-15);
    }
  }
}

TEST(FormAlgebraProperty, AgreesWithExteriorAlgebraExpansion) {
  oracle::Gen gen(6);
  for (int n = 2; n <= 3; ++n)
    for (int trial = 0; trial < 200; ++trial) {
      const bool diagonal = trial < 100;
      oracle::Matrix chi, omega;
      if (diagonal) {
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
          a[i] = gen.uniform(0.3, 3.0);
          b[i] = gen.uniform(0.3, 3.0);
        }
        chi = oracle::diagonal(a);
        omega = oracle::diagonal(b);
      } else {
        chi = oracle::random_positive(gen, n);
        omega = oracle::random_positive(gen, n);
      }
      for (int k = 0; k <= n; ++k)
        EXPECT_NEAR(wedge_ratio(chi, omega, k), oracle::wedge_ratio(chi, omega, k),
                    1e-9 * std::max(1.0, std::abs(oracle::wedge_ratio(chi, omega, k))));

      std::vector<double> ck(n - 1);
      for (double& c : ck) c = gen.uniform(0.0, 2.0);
      const auto s = relative_eigenvalues(chi, omega);
      EXPECT_NEAR(gma_cone_margin_at(s.values, ck), oracle::gma_cone_margin(chi, omega, ck), 1e-9)
          << "n=" << n << " trial " << trial;
      const double c = gen.uniform(0.5, 4.0);
      EXPECT_NEAR(j_cone_margin_at(s.values, c), oracle::j_cone_margin(chi, omega, c), 1e-9);
    }
}
