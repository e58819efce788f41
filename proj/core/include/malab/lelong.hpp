#pragma once

#include <array>
#include <span>
#include <vector>

#include "malab/sampled_function.hpp"

namespace malab {

struct LelongProfile {
  std::array<double, kMaxRealDim> x{};
  double reference_radius = 0.0;
  double hat_reference = 0.0;       // hat phi_r(x)
  std::vector<double> deltas;       // decreasing
  std::vector<double> hat_values;   // hat phi_delta(x): max over grid nodes in B(x, delta)
  std::vector<double> half_hat;     // hat phi_{delta/2}(x)
  std::vector<double> mean_values;  // means over the sphere S(x, delta)
  std::vector<double> smooth_values;  // (rho_delta * phi)(x)
  std::vector<double> quotients;    // nu(x, delta)
  /// (hat - smooth) / nu per radius; logged, not bounded (NaN where nu = 0).
  std::vector<double> smooth_ratio;

  /// Worst slack of each inequality (negative means violated): nu
  /// non-increasing as delta decreases, the log 2 nu gap bound, and the two
  /// sides of the Poisson comparison; smoothing lower bound hat >= smooth.
  double monotone_slack = 0.0;
  double gap_slack = 0.0;
  double poisson_lower_slack = 0.0;
  double poisson_upper_slack = 0.0;
  double smooth_slack = 0.0;
};

struct LelongOptions {
  double tolerance = 1e-6;
  /// Run the smoothing-sense psh pre-check (margin >= -tolerance).
  bool check_psh = true;
  /// Throw NumericFailure when one of the asserted inequalities fails.
  bool enforce = true;
};

/// The Poisson-kernel constant 3^{2n-1} / 2^{2n-2}.
double poisson_constant(int n);

/// Radii r 2^{-k}, k = 1..count, rounded to even multiples of the grid step
/// (so delta/2 stays on the lattice) and kept >= 2 steps. The reference
/// radius is rounded the same way.
struct Ladder {
  double reference = 0.0;
  std::vector<double> deltas;
};
Ladder dyadic_ladder(double r, int count, double spacing);

LelongProfile lelong_profile(const SampledFunction& phi, std::span<const double> x,
                             std::span<const double> deltas, double r,
                             const LelongOptions& options = {});

struct LelongEstimate {
  double value = 0.0;        // the smallest-delta quotient, an upper bound
  double chord_slope = 0.0;  // slope of hat between the two smallest radii
  double resolution = 0.0;   // value - chord_slope, clamped at 0
};

/// Needs at least three radii.
LelongEstimate lelong_number(const LelongProfile& profile);

/// hat phi_delta(x): max of the samples at grid nodes within delta of x,
/// skipping singular nodes.
double ball_maximum(const SampledFunction& phi, std::span<const double> x, double delta);

/// Mean of phi over the sphere S(x, delta) (closed form if present,
/// interpolated samples otherwise).
double sphere_mean(const SampledFunction& phi, std::span<const double> x, double delta);

}  // namespace malab
