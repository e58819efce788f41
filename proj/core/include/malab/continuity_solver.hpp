#pragma once

#include <optional>
#include <string>
#include <vector>

#include "malab/equations.hpp"
#include "malab/linear_solver.hpp"

namespace malab {

struct SzekelyhidiParams {
  double A = 1.0;
  double tau = 0.5;
};

/// Quantities bounded by the a priori estimates, logged per path point.
/// sup_phi is the supremum of the stored (mean-zero) potential; the
/// sup-normalized potential is phi - sup_phi - 1, so it never needs storing.
struct MonitorBundle {
  double sup_phi = 0.0;
  double osc_phi = 0.0;
  double trace_bound = 0.0;   // max tr_{omega_0} omega_phi = n + Delta phi
  double cone_margin = 0.0;
  double min_eigen = 0.0;
  double calabi_S = 0.0;
  double szekelyhidi_G_max = 0.0;
};

/// Pointwise Calabi third-order quantity
/// g^{i jbar} g^{k lbar} g^{m nbar} phi_{i lbar m} conj(phi_{j kbar n}) with g = omega_phi.
PotentialField calabi_S_field(const EquationSpec& spec, const PotentialField& phi);

/// G = log lambda_1 + vphi(|d phi|^2) + psi(phi), with lambda_1 the largest
/// eigenvalue of omega_phi relative to omega_0, |d phi|^2 measured by omega_0,
/// vphi(s) = -log(1 - s / 2K) / 2, K = sup |d phi|^2 + 1 and
/// psi(s) = -2 A s + (A tau / 2) s^2.
PotentialField szekelyhidi_G_field(const EquationSpec& spec, const PotentialField& phi,
                                   const SzekelyhidiParams& params = {});

MonitorBundle compute_monitors(const EquationSpec& spec, const PotentialField& phi,
                               const SzekelyhidiParams& params = {});

struct SolverOptions {
  double newton_tolerance = 1e-10;  // sup |R - b| at each path point
  int max_newton_iterations = 30;
  GmresOptions linear;
  double min_damping = 1e-4;
  /// Empty means 10 uniform steps ending at t = 1.
  std::vector<double> schedule;
  double min_step = 1e-3;
  double trace_cap = 1e4;
  double osc_cap = 1e4;
  SzekelyhidiParams szekelyhidi;
};

std::vector<double> uniform_schedule(int steps);

/// GMA path constant int omega_0^n / int chi^n, which makes the t = 0
/// endpoint omega^n = c_0 chi^n compatible.
double gma_path_constant(const EquationSpec& spec);

/// The equation at parameter t of the family's continuity path.
///   CMA: twist t f.
///   J:   on [0, 1/2] with s = 2t the background is chi_s = s chi + (1-s)(c/n) omega_0
///        with constant twist s D / int chi_s^n, D = c int omega_0^n - n int chi ^ omega_0^{n-1};
///        on [1/2, 1] with s = 2t - 1 the twist moves from its chi^n-average to f.
///   GMA: coefficients t c_k and twist t f + (1-t) c_0.
/// Every member satisfies the family's integral identity when the base does.
EquationSpec path_spec(const EquationSpec& base, double t);

/// Operator w -> orientation tr(coeff ddbar w) + <w>, with <w> the omega_0^n mean.
std::vector<double> apply_newton_operator(const Linearization& lin,
                                          const HermitianFormField& omega0,
                                          std::span<const double> w);

struct NewtonStepResult {
  PotentialField phi;
  double linear_residual = 0.0;
  int linear_iterations = 0;
  double damping = 1.0;
  double residual_norm = 0.0;  // sup |R - b| at the returned potential
  double shift = 0.0;          // b, the omega_0^n mean of R
};

/// sup |R - <R>| and <R> for the residual at phi.
struct ResidualNorm {
  double sup = 0.0;
  double shift = 0.0;
};
ResidualNorm residual_norm(const EquationSpec& spec, const PotentialField& phi);

/// One damped Newton step. The unknown constant b in R(phi) = b is solved
/// for together with a mean-zero update; the step is halved until positivity,
/// the cone margin and a residual decrease all hold.
NewtonStepResult newton_step(const EquationSpec& spec, const PotentialField& phi,
                             const SolverOptions& options = {});

struct ContinuityState {
  double t = 0.0;
  PotentialField phi;
  double residual_norm = 0.0;
  MonitorBundle monitors;
  int step_count = 0;
};

struct PathPoint {
  double t = 0.0;
  int iterations = 0;
  double residual_sup = 0.0;
  double shift = 0.0;
  MonitorBundle monitors;
};

struct SolveReport {
  bool success = false;
  std::string failure;
  std::vector<PathPoint> trace;
  std::optional<ContinuityState> last_good;  // empty if t = 0 never converged
  /// sup |R - b| after every accepted Newton step, across the whole run.
  std::vector<double> residual_history;
  std::string path_note;
};

/// Runs the family's continuity path. InvalidInput for inputs that violate
/// the preconditions (integral identity, cone condition, twist bound);
/// Newton failure or monitor blow-up returns success = false with the last
/// good state.
SolveReport solve_continuity(const EquationSpec& base, const SolverOptions& options = {});

struct ManufactureParams {
  std::optional<double> c;   // J constant; defaults to compute_constant_c(chi, omega_0)
  std::vector<double> ck;    // GMA coefficients
};

/// The equation solved exactly by phi_star (up to round-off).
EquationSpec manufacture(Family family, const HermitianFormField& omega0,
                         const HermitianFormField& chi, const PotentialField& phi_star,
                         const ManufactureParams& params = {});

}  // namespace malab
