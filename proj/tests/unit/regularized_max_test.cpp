#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "malab/errors.hpp"
#include "malab/psh_bank.hpp"
#include "malab/psh_sweeps.hpp"
#include "malab/regularized_max.hpp"
#include "oracles.hpp"

using namespace malab;

TEST(RegularizedMax, LeaderIsReturnedExactly) {
  const RegularizedMax t(1.0);
  EXPECT_EQ(t(5.0, 0.0), 5.0);
  EXPECT_EQ(t(0.0, 5.0), 5.0);
  EXPECT_EQ(t(1.0, 0.0), 1.0);  // lead of exactly eps
  const std::vector<double> v = {2.0, 0.5, -3.0};
  EXPECT_EQ(t(v), 2.0);
}

TEST(RegularizedMax, TieLiftMatchesQuadratureOracle) {
  for (double eps : {0.1, 0.5, 2.0}) {
    const RegularizedMax t(eps);
    const double kappa = oracle::tmax_kappa(eps);
    EXPECT_GT(kappa, 0.0);
    EXPECT_NEAR(t.kappa(), kappa, 1e-9 * eps);
    EXPECT_NEAR(t(0.7, 0.7), 0.7 + kappa, 1e-9 * eps);
  }
}

TEST(RegularizedMax, BinaryFormMatchesDefiningIntegral) {
  oracle::Gen gen(5);
  const RegularizedMax t(0.4);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = gen.uniform(-1, 1), g = gen.uniform(-1, 1);
    EXPECT_NEAR(t(f, g), oracle::tmax_binary(f, g, 0.4), 1e-9);
  }
}

TEST(RegularizedMax, FieldsAndDomainMismatch) {
  const auto f = SampledFunction::on_ball(1, 1.0, 21, [](std::span<const double> x) { return x[0]; });
  const auto g = SampledFunction::on_ball(1, 1.0, 21, [](std::span<const double> x) { return -x[0]; });
  const auto h = regularized_max(f, g, 0.2);
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_GE(h[i], std::max(f[i], g[i]) - 1e-15);
    if (std::abs(f[i] - g[i]) >= 0.2) { EXPECT_EQ(h[i], std::max(f[i], g[i])); }
  }
  const auto other = SampledFunction::on_ball(1, 1.0, 23, [](std::span<const double>) { return 0.0; });
  EXPECT_THROW(regularized_max(f, other, 0.2), InvalidInput);
  EXPECT_THROW(RegularizedMax(0.0), InvalidInput);
}

TEST(RegularizedMax, VariadicFormIsPermutationInvariant) {
  const auto a = SampledFunction::on_ball(1, 1.0, 21, [](std::span<const double> x) { return x[0]; });
  const auto b = SampledFunction::on_ball(1, 1.0, 21, [](std::span<const double> x) { return x[1]; });
  const auto c = SampledFunction::on_ball(1, 1.0, 21, [](std::span<const double> x) { return 0.1 - x[0] * x[1]; });
  const std::vector<SampledFunction> abc = {a, b, c}, cab = {c, a, b}, bca = {b, c, a};
  const auto r1 = regularized_max(abc, 0.3), r2 = regularized_max(cab, 0.3), r3 = regularized_max(bca, 0.3);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_NEAR(r1[i], r2[i], 1e-14);
    EXPECT_NEAR(r1[i], r3[i], 1e-14);
  }
}

// -- properties ---------------------------------------------------------------

TEST(RegularizedMaxProperty, PointwiseLaws) {
  const auto s = regularized_max_sweep(2000, 99);
  EXPECT_TRUE(s.passed()) << s.failures << " failures";
  EXPECT_GE(s.worst, -1e-12);
}

TEST(RegularizedMaxProperty, MonotoneInBothArguments) {
  oracle::Gen gen(6);
  const RegularizedMax t(0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const double f = gen.uniform(-1, 1), g = gen.uniform(-1, 1), d = gen.uniform(0, 0.3);
    EXPECT_GE(t(f + d, g), t(f, g) - 1e-15);
    EXPECT_GE(t(f, g + d), t(f, g) - 1e-15);
  }
}

TEST(RegularizedMaxProperty, PreservesPshOnTheBank) {
  const auto bank = psh_test_bank(2, 12, 4);
  const auto s = regularized_max_psh_sweep(bank, 3, 17);
  EXPECT_TRUE(s.passed()) << s.failures << " failures, worst " << s.worst;
  EXPECT_GE(s.worst, -1e-6);
}
