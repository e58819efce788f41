#pragma once

#include <cstddef>

#include "malab/sampled_function.hpp"

namespace malab {

struct AbpResult {
  double contact_measure = 0.0;  // |P|
  double integral = 0.0;         // int_P det D^2 v, negative-curvature points counted as 0
  double ratio = 0.0;            // integral / eps^m
  std::size_t contact_points = 0;
  std::size_t candidates = 0;    // nodes with |Dv| < eps/2
  double center_value = 0.0;
  double boundary_inf = 0.0;
};

/// Discrete contact set P = { |Dv(x)| < eps/2, v(y) >= v(x) + Dv(x).(y - x)
/// for every grid node y } of v on a ball in R^m, m = 2n, with derivatives
/// from central differences. Checks v(0) + eps <= inf over the boundary
/// sphere first (closed form on the sphere if available, otherwise the
/// outermost nodes extrapolated radially).
AbpResult abp_verify(const SampledFunction& v, double epsilon);

/// The boundary infimum used by the precondition check.
double abp_boundary_infimum(const SampledFunction& v);

}  // namespace malab
