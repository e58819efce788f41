#pragma once

#include <optional>
#include <string>
#include <vector>

#include "malab/form_algebra.hpp"
#include "malab/torus_grid.hpp"

namespace malab {

enum class Family { CMA, J, GMA };

std::string to_string(Family f);
Family parse_family(const std::string& s);

/// One member of an equation family on a fixed background.
///
///   CMA: omega_phi^n = e^f omega_0^n
///   J:   f chi^n = c omega_phi^n - n chi ^ omega_phi^{n-1}   (twisted J)
///   GMA: f chi^n = omega_phi^n - sum_k c_k chi^{n-k} ^ omega_phi^k
///
/// omega_phi = omega_0 + i ddbar(phi). `chi` is unused by CMA. `c0` is the
/// GMA path constant, carried as data and set by the caller.
struct EquationSpec {
  Family family = Family::CMA;
  HermitianFormField omega0;
  HermitianFormField chi;
  PotentialField f;
  double c = 0.0;
  std::vector<double> ck;
  double c0 = 0.0;

  EquationSpec(Family fam, const HermitianFormField& omega0_, const HermitianFormField& chi_,
               const PotentialField& f_);

  const TorusGrid& grid() const { return omega0.grid; }
  int dimension() const { return omega0.grid.dimension(); }
  /// Throws InvalidInput when an invariant of the family is violated.
  void validate() const;
};

/// omega_0 + ddbar(phi).
HermitianFormField perturbed_form(const EquationSpec& spec, const PotentialField& phi);

/// c = n * int chi ^ omega_0^{n-1} / int omega_0^n.
double compute_constant_c(const HermitianFormField& chi, const HermitianFormField& omega0);

/// Integral of a top-degree form ratio: int (alpha^n / base^n) base^n, with
/// base^n measured by det(base) (the n! is dropped consistently).
double integrate_against(const PotentialField& ratio, const HermitianFormField& base);

/// Signed defect of the family's integral identity.
///   CMA: int e^f omega_0^n - int omega_0^n
///   J:   int f chi^n - (c int omega_0^n - n int chi ^ omega_0^{n-1})
///   GMA: int f chi^n - (int omega_0^n - sum_k c_k int chi^{n-k} ^ omega_0^k)
/// `required_mass` is the bracketed right-hand side, which must be >= 0 for
/// J and GMA.
struct CompatibilityReport {
  double defect = 0.0;
  double required_mass = 0.0;
  bool admissible(double tol) const { return std::abs(defect) <= tol && required_mass >= -tol; }
};
CompatibilityReport compatibility_residual(const EquationSpec& spec);

/// Pointwise residual density of the equation at phi.
///   CMA: sum log lambda - f            (lambda of omega_phi relative to omega_0)
///   J:   sum 1/lambda + f/prod lambda - c   (relative to chi)
///   GMA: prod lambda - sum c_k sigma_k / C(n,k) - f   (relative to chi)
/// Throws NumericFailure naming the worst point if omega_phi is not positive.
PotentialField residual(const EquationSpec& spec, const PotentialField& phi);
PotentialField residual_from_form(const EquationSpec& spec, const HermitianFormField& omega_phi);

/// Family cone margin at omega_phi: smallest relative eigenvalue for CMA,
/// j_cone_margin for J, gma_cone_margin for GMA.
double cone_margin(const EquationSpec& spec, const HermitianFormField& omega_phi);

/// The derivative of residual at phi in direction u equals
/// orientation * tr(coeff * ddbar(u)) pointwise; coeff is positive definite.
/// CMA: coeff = omega_phi^{-1}. J: coeff is the linearized J operator
/// omega^{-1} chi omega^{-1} + f (det chi / det omega) omega^{-1}, with
/// orientation -1. GMA: coeff = F diag(dPhi/dlambda) F^* in the
/// simultaneous diagonalizing frame F.
struct Linearization {
  HermitianFormField coeff;
  double orientation = 1.0;
};
/// Throws NumericFailure("lost ellipticity ...") if the family cone margin is <= 0.
Linearization linearization_coeff(const EquationSpec& spec, const PotentialField& phi);
/// Same operator assembled from eigenvalue derivatives in the diagonalizing
/// frame for every family; used to cross-check the closed forms.
Linearization spectral_linearization(const EquationSpec& spec, const PotentialField& phi);

/// -(1 / 2n) (1/c)^{n-1}: twists above this keep the J cone condition along
/// the continuity path.
double twist_lower_bound(double c, int n);

enum class ConeCheck { Holds, Fails, Inapplicable };
struct ConePreservation {
  ConeCheck status = ConeCheck::Inapplicable;
  /// min over k with the weak cone of
  /// (c - sum_{i != k} 1/lambda_i) / (1 / (2 lambda_k)); >= 1 when the lemma holds.
  double slack_ratio = 0.0;
  std::string reason;
};
/// Checks that on the twisted J equation, the weak cone sum_{i!=k} 1/lambda_i <= c
/// upgrades to the strict cone with slack (1/lambda_k)(1 + f / prod_{i!=k} lambda_i)
/// >= 1/(2 lambda_k).
ConePreservation cone_preservation_check(const RealVector& lambda, double f_value, double c);

inline constexpr double kEquationTolerance = 1e-9;

enum class PhiFamily { MongeAmpere, J };
/// Concave operator form used by Evans-Krylov: log prod lambda for MA,
/// -sum 1/lambda - f / prod lambda for (twisted) J.
double phi_operator(PhiFamily family, const RealVector& lambda, double f_value = 0.0);
/// dPhi/dlambda_i: 1/lambda_i (MA) and 1/lambda_i^2 (untwisted J).
RealVector phi_gradient(PhiFamily family, const RealVector& lambda);
/// Phi(tB + (1-t)A) - t Phi(B) - (1-t) Phi(A) for Hermitian A, B with
/// positive spectra (eigenvalues relative to the identity).
double phi_concavity_probe(PhiFamily family, const HermitianMatrix& a, const HermitianMatrix& b,
                           double t);

}  // namespace malab
