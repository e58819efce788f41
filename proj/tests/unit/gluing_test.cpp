#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "malab/errors.hpp"
#include "malab/gluing.hpp"
#include "oracles.hpp"

using namespace malab;
using std::numbers::pi;

namespace {

constexpr double kR = 0.27;
constexpr int kPoints = 64;

std::vector<LocalPotential> locals_from(int n, const PointFunction& f, double violation = 0.0) {
  std::vector<LocalPotential> out;
  int j = 0;
  for (const auto& c : lattice_centers(n, 0.25)) {
    const double offset = (j++ % 2) ? violation : 0.0;
    out.push_back({c, [f, offset](std::span<const double> x) { return f(x) + offset; }});
  }
  return out;
}

double psi(std::span<const double> x) { return 0.01 * std::cos(2 * pi * x[0]) + 0.004 * std::sin(2 * pi * (x[0] + x[1])); }

}  // namespace

TEST(Gluing, LatticeCentersCoverTheTorus) {
  EXPECT_EQ(lattice_centers(1, 0.25).size(), 16u);
  EXPECT_EQ(lattice_centers(2, 0.5).size(), 16u);
  EXPECT_THROW(lattice_centers(1, 0.3), InvalidInput);
}

TEST(Gluing, ConstantLocalsGiveASmoothField) {
  const double eps = 0.5 * kR * kR;
  const auto locals = locals_from(1, [](std::span<const double>) { return 1.0; });
  const auto glued = glue_local_potentials(1, kPoints, locals, kR, eps);
  const auto report = crease_report(glued, locals, kR);
  EXPECT_GT(report.dominant_nodes, 0u);
  EXPECT_LT(report.dominant_error, 1e-12);  // a dominant branch is returned exactly
  EXPECT_LE(report.ratio, 10.0);
  EXPECT_GE(report.hessian_slack, -1e-6);
  // Near a centre the field is C - |z - x_j|^2.
  const std::array<double, 2> c = {0.25, 0.5};
  const std::size_t node = glued.field.nearest_node(c);
  EXPECT_EQ(glued.dominant[node] >= 0, true);
  EXPECT_NEAR(glued.field[node], 1.0, 1e-12);
}

TEST(Gluing, GlobalPotentialIsRecoveredUpToTheDistanceTerms) {
  const double eps = 0.5 * kR * kR;
  const auto locals = locals_from(1, psi);
  const auto glued = glue_local_potentials(1, kPoints, locals, kR, eps);
  EXPECT_LT(glued.worst_closeness, 1e-15);
  const auto& f = glued.field;
  double worst_dev = 0.0, worst_hess = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = f.point(i);
    double hard = -1e300;
    for (const auto& l : locals) {
      const double d = displacement_norm(f, x, l.center);
      if (d < 2 * kR) hard = std::max(hard, psi(x) - d * d);
    }
    worst_dev = std::max(worst_dev, std::abs(f[i] - hard));
    if (glued.dominant[i] >= 0) {
      const auto h = difference_hessian(f, i);
      const auto exact = oracle::fd_complex_hessian(psi, std::span<const double>(x.data(), 2), 1, 1e-3);
      worst_hess = std::max(worst_hess, std::abs(h(0, 0) - (exact(0, 0) - 1.0)));
    }
  }
  EXPECT_LE(worst_dev, eps);
  EXPECT_LT(worst_hess, 1e-3);  // second-order difference error at h = 1/64
  const auto report = crease_report(glued, locals, kR);
  EXPECT_LE(report.ratio, 10.0);
}

TEST(Gluing, ClosenessViolationNamesThePair) {
  const double eps = 0.5 * kR * kR;
  const auto locals = locals_from(1, psi, kR * kR / 50.0);
  try {
    glue_local_potentials(1, kPoints, locals, kR, eps);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("pair ("), std::string::npos) << msg;
    EXPECT_NE(msg.find("r^2/100"), std::string::npos) << msg;
  }
}

TEST(Gluing, CoverGapAndBadEpsilonAreRejected) {
  auto zero = [](std::span<const double>) { return 0.0; };
  const auto locals = locals_from(1, zero);
  EXPECT_THROW(glue_local_potentials(1, kPoints, locals, 0.1, 0.005), InvalidInput);
  EXPECT_THROW(glue_local_potentials(1, kPoints, locals, kR, kR * kR), InvalidInput);
  EXPECT_THROW(glue_local_potentials(1, kPoints, locals, kR, 0.0), InvalidInput);
}
