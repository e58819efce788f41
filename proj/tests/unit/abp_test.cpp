#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "malab/abp.hpp"
#include "malab/errors.hpp"

using namespace malab;
using std::numbers::pi;

namespace {

double quadratic(std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] - 1.0; }

}  // namespace

TEST(Abp, QuadraticContactIntegral) {
  // D v = 2x, so P = B(0, 1/4) and det D^2 v = 4: the integral is pi / 4.
  const auto v = SampledFunction::on_ball(1, 1.0, 256, quadratic);
  const auto r = abp_verify(v, 1.0);
  EXPECT_NEAR(r.integral, pi / 4, 0.02 * pi / 4);
  EXPECT_NEAR(r.contact_measure, pi / 16, 0.02 * pi / 16);
  EXPECT_EQ(r.contact_points, r.candidates);
  EXPECT_NEAR(r.center_value, -1.0, 1e-3);
  EXPECT_NEAR(r.boundary_inf, 0.0, 1e-12);
}

TEST(Abp, ConcaveDentLeavesCandidatesOffTheContactSet) {
  // A bump at the origin makes a local maximum: small gradient, no support.
  const auto v = SampledFunction::on_ball(1, 1.0, 128, [](std::span<const double> x) {
    return quadratic(x) + 0.5 * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 0.04);
  });
  const auto r = abp_verify(v, 0.4);
  EXPECT_LT(r.contact_points, r.candidates);
  EXPECT_GT(r.candidates, 0u);
}

TEST(Abp, RejectsBadInput) {
  const auto v = SampledFunction::on_ball(1, 1.0, 64, quadratic);
  EXPECT_THROW(abp_verify(v, 1.5), InvalidInput);  // v(0) + eps > 0 on the boundary
  EXPECT_THROW(abp_verify(v, 0.0), InvalidInput);
  const auto t = SampledFunction::on_torus(1, 16, quadratic);
  EXPECT_THROW(abp_verify(t, 0.5), InvalidInput);
}

// -- properties ---------------------------------------------------------------

TEST(AbpProperty, ConvexPerturbationsKeepTheLowerBound) {
  // Convex v: D v(P) covers B(0, eps/2), so the integral is at least pi eps^2 / 4.
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::array<double, 2> origin{};
  double worst = 1e300;
  for (int k = 0; k < 20; ++k) {
    const double rad = 0.5 * u(gen), ang = 2 * pi * u(gen);
    const double cx = rad * std::cos(ang), cy = rad * std::sin(ang);
    const double s = 0.2 + 0.2 * u(gen);
    const double height = (u(gen) < 0.5 ? -1.0 : 1.0) * 0.9 * s * s * (0.2 + 0.8 * u(gen));
    const PointFunction f = [=](std::span<const double> x) {
      const double q = ((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) / (s * s);
      return quadratic(x) + height * std::exp(-q);
    };
    const auto v = SampledFunction::on_ball(1, 1.0, 256, f);
    const double eps = abp_boundary_infimum(v) - f(origin);
    ASSERT_GT(eps, 0.0);
    worst = std::min(worst, abp_verify(v, eps).ratio);
  }
  EXPECT_GE(worst, 0.95 * pi / 4);
}
