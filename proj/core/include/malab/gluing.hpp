#pragma once

#include <array>
#include <span>
#include <vector>

#include "malab/sampled_function.hpp"

namespace malab {

/// A local potential f_j on B(x_j, 2r), called with points in the chart
/// around x_j (x_j plus the minimal-image displacement), so it never sees
/// the periodic wrap.
struct LocalPotential {
  std::array<double, kMaxRealDim> center{};
  PointFunction f;
};

struct GlueResult {
  SampledFunction field;
  /// Index of the branch that leads by at least eps at each node, or -1.
  std::vector<int> dominant;
  /// Largest |f_j - f_j'| seen on a doubled overlap, against the bound r^2/100.
  double worst_closeness = 0.0;
};

/// f = tmax_eps { f_j - |z - x_j|^2 } on the torus C^n / Z^{2n}, with branch
/// j taking part within distance 2r of x_j. Requires the balls B(x_j, r) to
/// cover the grid, |f_j - f_j'| < r^2/100 on overlaps of the doubled balls,
/// and 0 < eps < r^2.
GlueResult glue_local_potentials(int n, int points_per_axis,
                                 std::span<const LocalPotential> locals, double r,
                                 double epsilon);

/// Finite-difference checks on a glued field. Branch quantities are taken
/// in each chart with the grid step, at the nodes of B(x_j, r).
struct CreaseReport {
  double glued_max = 0.0;   // max |second difference| of f over nodes and axis pairs
  double branch_max = 0.0;  // the same for f_j - |z - x_j|^2
  double ratio = 0.0;       // glued_max / branch_max
  /// min over nodes of lambda_min(ddbar f) - (min over branches within 2r of
  /// lambda_min(ddbar f_j) - 1); non-negative up to difference error.
  double hessian_slack = 0.0;
  /// max |f - (f_j - |z - x_j|^2)| over nodes where branch j dominates.
  double dominant_error = 0.0;
  std::size_t dominant_nodes = 0;
};

CreaseReport crease_report(const GlueResult& glued, std::span<const LocalPotential> locals,
                           double r);

/// Centres of the cubic lattice with the given spacing (which divides 1).
std::vector<std::array<double, kMaxRealDim>> lattice_centers(int n, double spacing);

/// Central second differences along two real axes at a node of a torus grid.
double second_difference(const SampledFunction& f, std::size_t node, int a, int b);

/// Complex Hessian d^2 / dz_p dzbar_q by central differences at a torus node.
HermitianMatrix difference_hessian(const SampledFunction& f, std::size_t node);

}  // namespace malab
