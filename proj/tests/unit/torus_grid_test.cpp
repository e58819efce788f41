#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "malab/errors.hpp"
#include "malab/parallel.hpp"
#include "malab/torus_grid.hpp"
#include "oracles.hpp"

using namespace malab;
using std::numbers::pi;

namespace {

double max_entry_error(const HermitianFormField& a, const TrigSeries& s) {
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = a.grid.point(i);
    err = std::max(err, (a[i] - s.ddbar(x)).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

TEST(MakeGrid, CountsAndWeights) {
  const auto g1 = make_grid(1, 16);
  EXPECT_EQ(g1.size(), 256u);
  EXPECT_NEAR(g1.weight() * g1.size(), 1.0, 1e-15);
  EXPECT_EQ(make_grid(2, 16).size(), 65536u);
}

TEST(MakeGrid, RejectsBadAxisCounts) {
  EXPECT_THROW(make_grid(2, 7), InvalidInput);
  EXPECT_THROW(make_grid(2, 6), InvalidInput);
  EXPECT_THROW(make_grid(4, 8), InvalidInput);
  EXPECT_THROW(make_grid(0, 8), InvalidInput);
}

TEST(MakeGrid, IndicesWrap) {
  const auto g = make_grid(2, 8);
  const int idx[] = {-1, 8, 3, 17};
  const int wrapped[] = {7, 0, 3, 1};
  EXPECT_EQ(g.flat_index(idx), g.flat_index(wrapped));
  for (std::size_t i : {0ul, 13ul, 4095ul}) {
    const auto k = g.index_of(i);
    EXPECT_EQ(g.flat_index(std::span<const int>(k.data(), 4)), i);
  }
}

TEST(Ddbar, ZeroField) {
  const auto g = make_grid(2, 8);
  const auto h = ddbar(PotentialField(g));
  for (const auto& m : h.matrices) EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ddbar, CosineMatchesAnalyticHessian) {
  const double a = 0.7;
  const auto g = make_grid(1, 16);
  const auto phi = PotentialField::sample(g, [a](std::span<const double> x) { return a * std::cos(2 * pi * x[0]); });
  const auto h = ddbar(phi);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expected = a * (2 * pi) * (2 * pi) * std::cos(2 * pi * g.point(i)[0]) * (-0.25);
    EXPECT_NEAR(h[i](0, 0).real(), expected, 1e-12);
    EXPECT_NEAR(h[i](0, 0).imag(), 0.0, 1e-12);
  }
}

TEST(Ddbar, MatchesFiniteDifferenceOracle) {
  oracle::Gen gen(11);
  for (int n = 1; n <= 3; ++n) {
    const auto s = oracle::random_series(gen, n, 2, 4, 0.3);
    const auto g = make_grid(n, 8);
    const auto h = ddbar(PotentialField::sample(g, s));
    for (std::size_t i = 0; i < g.size(); i += 97) {
      const auto x = g.point(i);
      const auto ref = oracle::fd_complex_hessian(
          [&](std::span<const double> y) { return s.value(y); }, std::span<const double>(x.data(), 2 * n), n, 1e-3);
      EXPECT_LT((h[i] - ref).cwiseAbs().maxCoeff(), 1e-6) << "n=" << n << " point " << i;
    }
  }
}

TEST(Ddbar, FirstAndThirdDerivativesMatchClosedForms) {
  oracle::Gen gen(5);
  const auto s = oracle::random_series(gen, 2, 2, 5, 0.2);
  const auto g = make_grid(2, 8);
  const auto phi = PotentialField::sample(g, s);
  const auto first = dz(phi);
  const auto third = third_derivatives(phi);
  double err1 = 0.0, err3 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.point(i);
    const auto d = s.dz(x);
    const auto t = s.third(x);
    for (int p = 0; p < 2; ++p) err1 = std::max(err1, std::abs(first[p][i] - d[p]));
    for (int k = 0; k < 8; ++k) err3 = std::max(err3, std::abs(third[k][i] - t[k]));
  }
  EXPECT_LT(err1, 1e-11);
  EXPECT_LT(err3, 1e-9);
}

TEST(Integrate, ConstantsAndModes) {
  const auto g = make_grid(2, 8);
  EXPECT_DOUBLE_EQ(integrate(PotentialField(g, 3.0)), 3.0);
  const auto c = PotentialField::sample(g, [](std::span<const double> x) { return std::cos(2 * pi * x[0]); });
  EXPECT_NEAR(integrate(c), 0.0, 1e-12);
}

TEST(Integrate, ExponentialTwistMatchesBesselProduct) {
  // int_T exp(a cos 2 pi x0 + b cos 2 pi x1) = I0(a) I0(b).
  const double a = 0.4, b = -0.3;
  const double exact = std::cyl_bessel_i(0.0, a) * std::cyl_bessel_i(0.0, std::abs(b));
  for (int m : {8, 16}) {
    const auto g = make_grid(1, m);
    const auto e = PotentialField::sample(g, [&](std::span<const double> x) {
      return std::exp(a * std::cos(2 * pi * x[0]) + b * std::cos(2 * pi * x[1]));
    });
    EXPECT_NEAR(integrate(e), exact, 1e-8) << "m=" << m;
  }
}

TEST(FlatOperatorInverse, InvertsTheConstantCoefficientOperator) {
  oracle::Gen gen(3);
  const auto g = make_grid(2, 8);
  const HermitianMatrix b = oracle::random_positive(gen, 2);
  const FlatOperatorInverse inv(g, b, -1.0);
  const auto w = PotentialField::sample(g, oracle::random_series(gen, 2, 2, 6, 0.5));
  const auto h = ddbar(w);
  const double mw = mean(w);
  std::vector<double> rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -(b * h[i]).trace().real() + mw;
  const auto back = inv.apply(rhs);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(back[i], w[i], 1e-11);
}

// -- properties ---------------------------------------------------------------

TEST(TorusGridProperty, DdbarIsLinear) {
  oracle::Gen gen(21);
  const auto g = make_grid(2, 8);
  const auto phi = PotentialField::sample(g, oracle::random_series(gen, 2, 3, 6, 0.4));
  const auto psi = PotentialField::sample(g, oracle::random_series(gen, 2, 3, 6, 0.4));
  const double a = 1.7, b = -0.6;
  PotentialField mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) mix[i] = a * phi[i] + b * psi[i];
  const auto hm = ddbar(mix), hp = ddbar(phi), hq = ddbar(psi);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, (hm[i] - (a * hp[i] + b * hq[i])).cwiseAbs().maxCoeff());
    scale = std::max(scale, hm[i].cwiseAbs().maxCoeff());
  }
  EXPECT_LT(err, 1e-13 * std::max(1.0, scale));
}

TEST(TorusGridProperty, DiagonalEntriesIntegrateToZero) {
  oracle::Gen gen(22);
  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 5; ++trial) {
      const auto g = make_grid(n, 8);
      const auto h = ddbar(PotentialField::sample(g, oracle::random_series(gen, n, 3, 5, 1.0)));
      for (int p = 0; p < n; ++p) {
        double s = 0.0;
        for (const auto& m : h.matrices) s += m(p, p).real();
        EXPECT_NEAR(s * g.weight(), 0.0, 1e-10);
      }
    }
}

TEST(TorusGridProperty, OutputIsHermitian) {
  oracle::Gen gen(23);
  for (int n = 1; n <= 3; ++n) {
    const auto g = make_grid(n, 8);
    const auto h = ddbar(PotentialField::sample(g, oracle::random_series(gen, n, 3, 8, 1.0)));
    EXPECT_LT(h.hermitian_defect(), 1e-12);
  }
}

TEST(TorusGridProperty, SpectralConvergenceOrder) {
  // Band-limited input: round-off at every resolution that resolves it.
  oracle::Gen gen(24);
  const auto s = oracle::random_series(gen, 1, 3, 6, 0.5);
  for (int m : {8, 16, 32}) EXPECT_LT(max_entry_error(ddbar(PotentialField::sample(make_grid(1, m), s)), s), 1e-10);

  // Analytic but not band-limited: exp(a cos 2 pi x0). Doubling the grid
  // must shrink the error by far more than any fixed algebraic order would.
  const double a = 1.5;
  auto exact = [a](double x) {
    const double th = 2 * pi * x;
    const double e = std::exp(a * std::cos(th));
    return 0.25 * e * (std::pow(2 * pi * a * std::sin(th), 2) - 4 * pi * pi * a * std::cos(th));
  };
  std::vector<double> errors;
  for (int m : {8, 16, 32}) {
    const auto g = make_grid(1, m);
    const auto h = ddbar(PotentialField::sample(g, [a](std::span<const double> x) { return std::exp(a * std::cos(2 * pi * x[0])); }));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(h[i](0, 0).real() - exact(g.point(i)[0])));
    errors.push_back(err);
  }
  EXPECT_GT(errors[0] / errors[1], 1e3);  // more than a tenth-order method would give
  EXPECT_LT(errors[2], 1e-9);
}

TEST(TorusGridProperty, ThreadCountDoesNotChangeValues) {
  oracle::Gen gen(25);
  const auto g = make_grid(2, 8);
  const auto phi = PotentialField::sample(g, oracle::random_series(gen, 2, 3, 6, 0.4));
  set_thread_count(1);
  const auto h1 = ddbar(phi);
  set_thread_count(3);
  const auto h3 = ddbar(phi);
  set_thread_count(1);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT((h1[i] - h3[i]).cwiseAbs().maxCoeff(), 1e-12);
}
