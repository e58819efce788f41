#include "malab/equations.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "malab/errors.hpp"
#include "malab/parallel.hpp"
#include "malab/small_matrix.hpp"

namespace malab {

std::string to_string(Family f) {
  switch (f) {
    case Family::CMA: return "CMA";
    case Family::J: return "J";
    case Family::GMA: return "GMA";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "CMA" || s == "cma") return Family::CMA;
  if (s == "J" || s == "j") return Family::J;
  if (s == "GMA" || s == "gma") return Family::GMA;
  throw InvalidInput("unknown equation family '" + s + "'");
}

EquationSpec::EquationSpec(Family fam, const HermitianFormField& omega0_,
                           const HermitianFormField& chi_, const PotentialField& f_)
    : family(fam), omega0(omega0_), chi(chi_), f(f_) {}

void EquationSpec::validate() const {
  const TorusGrid& g = grid();
  if (!(chi.grid == g) || !(f.grid == g)) throw InvalidInput("equation: grid mismatch");
  for (double v : f.values)
    if (!std::isfinite(v)) throw InvalidInput("equation: twist f has non-finite values");
  if (positivity_margin(omega0) <= 0.0) throw InvalidInput("equation: omega_0 is not positive");
  if (family != Family::CMA && positivity_margin(chi) <= 0.0)
    throw InvalidInput("equation: chi is not positive");
  if (family == Family::J && !(c > 0.0))
    throw InvalidInput("equation: J constant c must be positive (got " + std::to_string(c) + ")");
  if (family == Family::GMA) {
    if (static_cast<int>(ck.size()) != dimension() - 1)
      throw InvalidInput("equation: GMA needs n-1 = " + std::to_string(dimension() - 1) +
                         " coefficients c_k (got " + std::to_string(ck.size()) + ")");
    bool all_zero = true;
    for (double v : ck) {
      if (v < 0.0) throw InvalidInput("equation: GMA coefficients must be non-negative");
      if (v != 0.0) all_zero = false;
    }
    bool f_zero = true;
    for (double v : f.values) f_zero = f_zero && v == 0.0;
    if (all_zero && f_zero && c0 <= 0.0)
      throw InvalidInput("equation: GMA with zero coefficients, zero twist and c0 <= 0 is degenerate");
  }
}

HermitianFormField perturbed_form(const EquationSpec& spec, const PotentialField& phi) {
  if (!(phi.grid == spec.grid())) throw InvalidInput("perturbed_form: grid mismatch");
  return spec.omega0 + ddbar(phi);
}

double integrate_against(const PotentialField& ratio, const HermitianFormField& base) {
  PotentialField density(base.grid);
  for (std::size_t i = 0; i < density.size(); ++i)
    density.values[i] = ratio.values[i] * hermitian_det(base[i]);
  return integrate(density);
}

double compute_constant_c(const HermitianFormField& chi, const HermitianFormField& omega0) {
  const int n = omega0.grid.dimension();
  PotentialField one(omega0.grid, 1.0);
  const double volume = integrate_against(one, omega0);
  if (!(volume > 0.0)) throw InvalidInput("compute_constant_c: omega_0 has non-positive volume");
  // chi ^ omega_0^{n-1} / omega_0^n = sigma_1(chi rel omega_0) / n.
  const double mixed = integrate_against(wedge_density(omega0, chi, 1), omega0);
  return n * mixed / volume;
}

CompatibilityReport compatibility_residual(const EquationSpec& spec) {
  const int n = spec.dimension();
  PotentialField one(spec.grid(), 1.0);
  const double vol0 = integrate_against(one, spec.omega0);
  CompatibilityReport r;
  switch (spec.family) {
    case Family::CMA: {
      PotentialField ef(spec.grid());
      for (std::size_t i = 0; i < ef.size(); ++i) ef.values[i] = std::exp(spec.f.values[i]);
      r.defect = integrate_against(ef, spec.omega0) - vol0;
      r.required_mass = vol0;
      break;
    }
    case Family::J: {
      const double mixed = integrate_against(wedge_density(spec.omega0, spec.chi, 1), spec.omega0);
      r.required_mass = spec.c * vol0 - n * mixed;
      r.defect = integrate_against(spec.f, spec.chi) - r.required_mass;
      break;
    }
    case Family::GMA: {
      double mass = vol0;
      for (int k = 1; k <= n - 1; ++k)
        mass -= spec.ck[k - 1] * integrate_against(wedge_density(spec.chi, spec.omega0, k), spec.chi);
      r.required_mass = mass;
      r.defect = integrate_against(spec.f, spec.chi) - mass;
      break;
    }
  }
  return r;
}

namespace {

double pointwise_residual(const EquationSpec& spec, const HermitianMatrix& omega_phi,
                          std::size_t i) {
  const int n = spec.dimension();
  const double f = spec.f.values[i];
  switch (spec.family) {
    case Family::CMA: {
      const auto s = relative_eigenvalues(spec.omega0[i], omega_phi);
      double logdet = 0.0;
      for (int k = 0; k < n; ++k) logdet += std::log(s[k]);
      return logdet - f;
    }
    case Family::J: {
      const auto s = relative_eigenvalues(spec.chi[i], omega_phi);
      double inv = 0.0;
      double prod = 1.0;
      for (int k = 0; k < n; ++k) {
        inv += 1.0 / s[k];
        prod *= s[k];
      }
      return inv + f / prod - spec.c;
    }
    case Family::GMA: {
      const auto s = relative_eigenvalues(spec.chi[i], omega_phi);
      double v = elementary_symmetric(s.values, n);
      for (int k = 1; k <= n - 1; ++k)
        v -= spec.ck[k - 1] * elementary_symmetric(s.values, k) / binomial(n, k);
      return v - f;
    }
  }
  return 0.0;
}

void require_positive(const HermitianFormField& omega_phi, const char* op) {
  const auto worst = positivity_worst(omega_phi);
  if (worst.value <= 0.0) {
    std::ostringstream msg;
    msg << op << ": omega_phi is not positive (left the Kahler cone) at grid point "
        << worst.index << ", smallest eigenvalue " << worst.value;
    throw NumericFailure(msg.str());
  }
}

}  // namespace

PotentialField residual_from_form(const EquationSpec& spec, const HermitianFormField& omega_phi) {
  require_positive(omega_phi, "residual");
  PotentialField out(spec.grid());
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out.values[i] = pointwise_residual(spec, omega_phi[i], i);
  });
  return out;
}

PotentialField residual(const EquationSpec& spec, const PotentialField& phi) {
  return residual_from_form(spec, perturbed_form(spec, phi));
}

double cone_margin(const EquationSpec& spec, const HermitianFormField& omega_phi) {
  switch (spec.family) {
    case Family::CMA: {
      std::vector<double> v(omega_phi.size());
      parallel_for(v.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
          v[i] = relative_eigenvalues(spec.omega0[i], omega_phi[i]).values(0);
      });
      return *std::min_element(v.begin(), v.end());
    }
    case Family::J: return j_cone_margin(spec.chi, omega_phi, spec.c);
    case Family::GMA: return gma_cone_margin(spec.chi, omega_phi, spec.ck);
  }
  return 0.0;
}

namespace {

void require_elliptic(const EquationSpec& spec, const HermitianFormField& omega_phi) {
  require_positive(omega_phi, "linearization");
  const double margin = cone_margin(spec, omega_phi);
  if (!(margin > 0.0)) {
    std::ostringstream msg;
    msg << "lost ellipticity: " << to_string(spec.family) << " cone margin " << margin << " <= 0";
    throw NumericFailure(msg.str());
  }
}

HermitianMatrix frame_operator(const EigenSpectrum& s, const RealVector& weights) {
  return s.frame * weights.asDiagonal() * s.frame.adjoint();
}

}  // namespace

Linearization linearization_coeff(const EquationSpec& spec, const PotentialField& phi) {
  const auto omega_phi = perturbed_form(spec, phi);
  require_elliptic(spec, omega_phi);
  Linearization lin{HermitianFormField(spec.grid()), spec.family == Family::J ? -1.0 : 1.0};
  parallel_for(omega_phi.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const HermitianMatrix& w = omega_phi[i];
      switch (spec.family) {
        case Family::CMA: lin.coeff[i] = small_inverse(w); break;
        case Family::J: {
          const HermitianMatrix winv = small_inverse(w);
          const double ratio = hermitian_det(spec.chi[i]) / hermitian_det(w);
          lin.coeff[i] = winv * spec.chi[i] * winv + spec.f.values[i] * ratio * winv;
          break;
        }
        case Family::GMA: {
          const auto s = relative_eigenvalues(spec.chi[i], w);
          lin.coeff[i] = frame_operator(s, gma_gradient(s.values, spec.ck));
          break;
        }
      }
      lin.coeff[i] = 0.5 * (lin.coeff[i] + lin.coeff[i].adjoint()).eval();
    }
  });
  lin.coeff.positive = true;
  return lin;
}

Linearization spectral_linearization(const EquationSpec& spec, const PotentialField& phi) {
  const auto omega_phi = perturbed_form(spec, phi);
  require_elliptic(spec, omega_phi);
  const int n = spec.dimension();
  Linearization lin{HermitianFormField(spec.grid()), spec.family == Family::J ? -1.0 : 1.0};
  parallel_for(omega_phi.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const HermitianMatrix& ref = spec.family == Family::CMA ? spec.omega0[i] : spec.chi[i];
      const auto s = relative_eigenvalues(ref, omega_phi[i]);
      RealVector d(n);
      double prod = 1.0;
      for (int k = 0; k < n; ++k) prod *= s[k];
      for (int k = 0; k < n; ++k) {
        switch (spec.family) {
          case Family::CMA: d(k) = 1.0 / s[k]; break;
          case Family::J:
            d(k) = 1.0 / (s[k] * s[k]) + spec.f.values[i] / (prod * s[k]);
            break;
          case Family::GMA: break;
        }
      }
      if (spec.family == Family::GMA) d = gma_gradient(s.values, spec.ck);
      lin.coeff[i] = frame_operator(s, d);
    }
  });
  lin.coeff.positive = true;
  return lin;
}

double twist_lower_bound(double c, int n) {
  if (!(c > 0.0)) throw InvalidInput("twist_lower_bound: c must be positive");
  if (n < 1) throw InvalidInput("twist_lower_bound: dimension must be positive");
  return -1.0 / (2.0 * n) * std::pow(1.0 / c, n - 1);
}

ConePreservation cone_preservation_check(const RealVector& lambda, double f_value, double c) {
  const int n = static_cast<int>(lambda.size());
  ConePreservation out;
  if (!(c > 0.0)) {
    out.reason = "c must be positive";
    return out;
  }
  if (lambda.minCoeff() <= 0.0) {
    out.reason = "eigenvalues must be positive";
    return out;
  }
  if (!(f_value > twist_lower_bound(c, n))) {
    out.reason = "twist violates the lower bound -(1/2n)(1/c)^(n-1)";
    return out;
  }
  double inv = 0.0;
  double prod = 1.0;
  for (int i = 0; i < n; ++i) {
    inv += 1.0 / lambda(i);
    prod *= lambda(i);
  }
  if (std::abs(inv + f_value / prod - c) > kEquationTolerance) {
    out.reason = "point is not on the twisted J equation";
    return out;
  }
  out.status = ConeCheck::Holds;
  out.slack_ratio = std::numeric_limits<double>::infinity();
  bool any_weak = false;
  for (int k = 0; k < n; ++k) {
    const double rest = inv - 1.0 / lambda(k);
    if (rest - c > kEquationTolerance) continue;  // weak cone fails for this k
    any_weak = true;
    const double slack = c - rest;
    double rest_prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (i != k) rest_prod *= lambda(i);
    const double explicit_slack = (1.0 / lambda(k)) * (1.0 + f_value / rest_prod);
    const double half = 0.5 / lambda(k);
    const double ratio = slack / half;
    out.slack_ratio = std::min(out.slack_ratio, ratio);
    const bool consistent = std::abs(slack - explicit_slack) <= kEquationTolerance;
    if (!(slack > 0.0) || !(explicit_slack >= half) || !consistent) out.status = ConeCheck::Fails;
  }
  if (!any_weak) {
    out.status = ConeCheck::Inapplicable;
    out.reason = "weak cone condition holds for no index";
  }
  return out;
}

double phi_operator(PhiFamily family, const RealVector& lambda, double f_value) {
  if (lambda.minCoeff() <= 0.0) throw InvalidInput("phi_operator: spectrum must be positive");
  double acc = 0.0;
  double prod = 1.0;
  for (int i = 0; i < lambda.size(); ++i) {
    prod *= lambda(i);
    acc += family == PhiFamily::MongeAmpere ? std::log(lambda(i)) : -1.0 / lambda(i);
  }
  if (family == PhiFamily::J) acc -= f_value / prod;
  return acc;
}

RealVector phi_gradient(PhiFamily family, const RealVector& lambda) {
  if (lambda.minCoeff() <= 0.0) throw InvalidInput("phi_gradient: spectrum must be positive");
  RealVector g(lambda.size());
  for (int i = 0; i < lambda.size(); ++i)
    g(i) = family == PhiFamily::MongeAmpere ? 1.0 / lambda(i) : 1.0 / (lambda(i) * lambda(i));
  return g;
}

double phi_concavity_probe(PhiFamily family, const HermitianMatrix& a, const HermitianMatrix& b,
                           double t) {
  if (t < 0.0 || t > 1.0) throw InvalidInput("phi_concavity_probe: t must lie in [0, 1]");
  auto spectrum = [](const HermitianMatrix& m) {
    return hermitian_eigen(m, false).values;
  };
  const HermitianMatrix mid = t * b + (1.0 - t) * a;
  return phi_operator(family, spectrum(mid)) - t * phi_operator(family, spectrum(b)) -
         (1.0 - t) * phi_operator(family, spectrum(a));
}

}  // namespace malab
