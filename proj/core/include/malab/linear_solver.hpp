#pragma once

#include <functional>
#include <span>
#include <vector>

namespace malab {

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

struct GmresOptions {
  int restart = 40;
  int max_iterations = 400;
  double tolerance = 1e-10;             // relative, target
  double stagnation_tolerance = 1e-8;   // relative, accepted at the cap
};

struct GmresResult {
  std::vector<double> x;
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Restarted GMRES with right preconditioning: solves op(x) = rhs with
/// x = precond(y). The reported residual is recomputed from op at the end.
/// Throws NumericFailure if the relative residual is still above
/// stagnation_tolerance after max_iterations.
GmresResult gmres(const VectorMap& op, const VectorMap& precond, std::span<const double> rhs,
                  const GmresOptions& options = {});

}  // namespace malab
