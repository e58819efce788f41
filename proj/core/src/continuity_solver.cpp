#include "malab/continuity_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "malab/errors.hpp"
#include "malab/parallel.hpp"
#include "malab/small_matrix.hpp"

namespace malab {

namespace {

/// det(omega_0) per point and its total, for omega_0^n-weighted means.
struct VolumeWeights {
  std::vector<double> density;
  double total = 0.0;

  explicit VolumeWeights(const HermitianFormField& omega0) : density(omega0.size()) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < density.size(); ++i) {
      density[i] = hermitian_det(omega0[i]);
      acc += density[i];
    }
    total = static_cast<double>(acc);
  }

  double mean(std::span<const double> v) const {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < v.size(); ++i) acc += static_cast<long double>(v[i]) * density[i];
    return static_cast<double>(acc / total);
  }
};

class NewtonOperator {
 public:
  NewtonOperator(const Linearization& lin, const HermitianFormField& omega0)
      : lin_(lin), weights_(omega0) {}

  std::vector<double> operator()(std::span<const double> w) const {
    const TorusGrid& g = lin_.coeff.grid;
    const PotentialField field(g, std::vector<double>(w.begin(), w.end()));
    const auto h = ddbar_upper(field);
    const int n = g.dimension();
    const double shift = weights_.mean(w);
    std::vector<double> out(w.size());
    // tr(B H) = sum_p B_pp H_pp + 2 Re sum_{p<q} B_qp H_pq for Hermitian B, H.
    parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const HermitianMatrix& c = lin_.coeff[i];
        double tr = 0.0;
        std::size_t slot = 0;
        for (int p = 0; p < n; ++p)
          for (int q = p; q < n; ++q, ++slot) {
            if (p == q)
              tr += c(p, p).real() * h[slot][i].real();
            else
              tr += 2.0 * (c(q, p) * h[slot][i]).real();
          }
        out[i] = lin_.orientation * tr + shift;
      }
    });
    return out;
  }

  const VolumeWeights& weights() const { return weights_; }

 private:
  const Linearization& lin_;
  VolumeWeights weights_;
};

HermitianMatrix mean_matrix(const HermitianFormField& field) {
  HermitianMatrix acc = HermitianMatrix::Zero(field.grid.dimension(), field.grid.dimension());
  for (const auto& m : field.matrices) acc += m;
  return acc / static_cast<double>(field.size());
}

/// g^{i jbar} laid out as a matrix indexed (i, j): the transpose of the inverse.
HermitianMatrix inverse_metric(const HermitianMatrix& g) { return small_inverse(g).transpose(); }

}  // namespace

PotentialField calabi_S_field(const EquationSpec& spec, const PotentialField& phi) {
  const int n = spec.dimension();
  const auto omega_phi = perturbed_form(spec, phi);
  const auto third = third_derivatives(phi);
  PotentialField out(spec.grid());
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const HermitianMatrix g = inverse_metric(omega_phi[p]);
      auto t = [&](int a, int bb, int c) { return third[(a * n + bb) * n + c][p]; };
      cplx s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              for (int m = 0; m < n; ++m)
                for (int q = 0; q < n; ++q)
                  s += g(i, j) * g(k, l) * g(m, q) * t(i, l, m) * std::conj(t(j, k, q));
      out.values[p] = s.real();
    }
  });
  return out;
}

PotentialField szekelyhidi_G_field(const EquationSpec& spec, const PotentialField& phi,
                                   const SzekelyhidiParams& params) {
  const int n = spec.dimension();
  const auto omega_phi = perturbed_form(spec, phi);
  const auto grad = dz(phi);
  std::vector<double> grad_sq(phi.size());
  parallel_for(grad_sq.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const HermitianMatrix g = inverse_metric(spec.omega0[p]);
      cplx s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += g(i, j) * grad[i][p] * std::conj(grad[j][p]);
      grad_sq[p] = s.real();
    }
  });
  const double big_k = *std::max_element(grad_sq.begin(), grad_sq.end()) + 1.0;
  PotentialField out(spec.grid());
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const auto s = relative_eigenvalues(spec.omega0[p], omega_phi[p]);
      const double lambda1 = s.values(n - 1);
      const double x = phi.values[p];
      const double gradient_term = -0.5 * std::log(1.0 - grad_sq[p] / (2.0 * big_k));
      const double potential_term = -2.0 * params.A * x + 0.5 * params.A * params.tau * x * x;
      out.values[p] = std::log(lambda1) + gradient_term + potential_term;
    }
  });
  return out;
}

MonitorBundle compute_monitors(const EquationSpec& spec, const PotentialField& phi,
                               const SzekelyhidiParams& params) {
  const auto omega_phi = perturbed_form(spec, phi);
  MonitorBundle m;
  m.sup_phi = sup(phi);
  m.osc_phi = m.sup_phi - inf(phi);
  double trace = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < omega_phi.size(); ++i)
    trace = std::max(trace, (small_inverse(spec.omega0[i]) * omega_phi[i]).trace().real());
  m.trace_bound = trace;
  m.min_eigen = positivity_margin(omega_phi);
  m.cone_margin = cone_margin(spec, omega_phi);
  m.calabi_S = sup(calabi_S_field(spec, phi));
  m.szekelyhidi_G_max = sup(szekelyhidi_G_field(spec, phi, params));
  return m;
}

std::vector<double> uniform_schedule(int steps) {
  if (steps < 1) throw InvalidInput("schedule needs at least one step");
  std::vector<double> out(steps);
  for (int i = 0; i < steps; ++i) out[i] = static_cast<double>(i + 1) / steps;
  out.back() = 1.0;
  return out;
}

double gma_path_constant(const EquationSpec& spec) {
  PotentialField one(spec.grid(), 1.0);
  return integrate_against(one, spec.omega0) / integrate_against(one, spec.chi);
}

EquationSpec path_spec(const EquationSpec& base, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("path_spec: t must lie in [0, 1]");
  EquationSpec out = base;
  const TorusGrid& g = base.grid();
  const int n = base.dimension();
  switch (base.family) {
    case Family::CMA:
      for (double& v : out.f.values) v *= t;
      break;
    case Family::J: {
      PotentialField one(g, 1.0);
      if (t <= 0.5) {
        const double s = 2.0 * t;
        const double vol0 = integrate_against(one, base.omega0);
        const double mixed = integrate_against(wedge_density(base.omega0, base.chi, 1), base.omega0);
        const double mass = base.c * vol0 - n * mixed;
        for (std::size_t i = 0; i < g.size(); ++i)
          out.chi[i] = s * base.chi[i] + (1.0 - s) * (base.c / n) * base.omega0[i];
        const double twist = s * mass / integrate_against(one, out.chi);
        std::fill(out.f.values.begin(), out.f.values.end(), twist);
      } else {
        const double s = 2.0 * t - 1.0;
        const double average = integrate_against(base.f, base.chi) / integrate_against(one, base.chi);
        for (std::size_t i = 0; i < g.size(); ++i)
          out.f.values[i] = (1.0 - s) * average + s * base.f.values[i];
      }
      break;
    }
    case Family::GMA: {
      if (!(base.c0 > 0.0)) throw InvalidInput("path_spec: GMA path constant c0 must be positive");
      for (double& v : out.ck) v *= t;
      for (std::size_t i = 0; i < g.size(); ++i)
        out.f.values[i] = t * base.f.values[i] + (1.0 - t) * base.c0;
      break;
    }
  }
  out.f.normalization = Normalization::Raw;
  return out;
}

std::vector<double> apply_newton_operator(const Linearization& lin,
                                          const HermitianFormField& omega0,
                                          std::span<const double> w) {
  return NewtonOperator(lin, omega0)(w);
}

ResidualNorm residual_norm(const EquationSpec& spec, const PotentialField& phi) {
  const auto r = residual(spec, phi);
  const VolumeWeights weights(spec.omega0);
  ResidualNorm out;
  out.shift = weights.mean(r.values);
  for (double v : r.values) out.sup = std::max(out.sup, std::abs(v - out.shift));
  return out;
}

NewtonStepResult newton_step(const EquationSpec& spec, const PotentialField& phi,
                             const SolverOptions& options) {
  const PotentialField r = residual(spec, phi);
  const Linearization lin = linearization_coeff(spec, phi);
  const NewtonOperator op(lin, spec.omega0);

  NewtonStepResult out{phi};
  out.shift = op.weights().mean(r.values);
  for (double v : r.values) out.residual_norm = std::max(out.residual_norm, std::abs(v - out.shift));
  if (out.residual_norm == 0.0) return out;

  const FlatOperatorInverse flat(spec.grid(), mean_matrix(lin.coeff), lin.orientation);
  std::vector<double> rhs(r.values.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -r.values[i];
  const GmresResult solve = gmres(
      [&](std::span<const double> w) { return op(w); },
      [&](std::span<const double> w) { return flat.apply(w); }, rhs, options.linear);
  out.linear_residual = solve.relative_residual;
  out.linear_iterations = solve.iterations;

  std::vector<double> u = solve.x;
  const double u_mean = op.weights().mean(u);
  for (double& v : u) v -= u_mean;

  // Round-off floor below which a residual "increase" is noise.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       (1.0 + std::abs(out.shift) + out.residual_norm);
  for (double alpha = 1.0; alpha >= options.min_damping; alpha *= 0.5) {
    PotentialField candidate(phi.grid, phi.values, Normalization::MeanZero);
    for (std::size_t i = 0; i < u.size(); ++i) candidate.values[i] += alpha * u[i];
    try {
      const auto omega = perturbed_form(spec, candidate);
      if (positivity_margin(omega) <= 0.0) continue;
      if (cone_margin(spec, omega) <= 0.0) continue;
      const auto rn = residual_norm(spec, candidate);
      if (!std::isfinite(rn.sup)) continue;
      if (rn.sup < out.residual_norm || rn.sup <= floor) {
        out.phi = std::move(candidate);
        out.damping = alpha;
        out.residual_norm = rn.sup;
        out.shift = rn.shift;
        return out;
      }
    } catch (const NumericFailure&) {
      continue;
    }
  }
  std::ostringstream msg;
  msg << "backtracking failed: no damping >= " << options.min_damping
      << " keeps positivity, the cone margin and a residual decrease (residual "
      << out.residual_norm << ")";
  throw NumericFailure(msg.str());
}

namespace {

struct Converged {
  PotentialField phi;
  int iterations = 0;
  ResidualNorm norm;
};

Converged converge(const EquationSpec& spec, const PotentialField& start, const SolverOptions& options,
                   std::vector<double>& history) {
  Converged c{start, 0, {}};
  c.norm = residual_norm(spec, c.phi);
  while (c.norm.sup > options.newton_tolerance) {
    if (c.iterations >= options.max_newton_iterations) {
      std::ostringstream msg;
      msg << "Newton did not reach residual " << options.newton_tolerance << " in "
          << options.max_newton_iterations << " iterations (residual " << c.norm.sup << ")";
      throw NumericFailure(msg.str());
    }
    auto step = newton_step(spec, c.phi, options);
    c.phi = std::move(step.phi);
    c.norm = {step.residual_norm, step.shift};
    history.push_back(step.residual_norm);
    ++c.iterations;
  }
  return c;
}

void check_preconditions(const EquationSpec& base) {
  base.validate();
  const int n = base.dimension();
  PotentialField one(base.grid(), 1.0);
  const double vol0 = integrate_against(one, base.omega0);
  const auto compat = compatibility_residual(base);
  const double tol = 1e-8 * std::max(1.0, vol0);
  if (std::abs(compat.defect) > tol) {
    std::ostringstream msg;
    msg << "the " << to_string(base.family) << " integral identity fails: defect " << compat.defect;
    throw InvalidInput(msg.str());
  }
  if (compat.required_mass < -tol) {
    std::ostringstream msg;
    msg << "the " << to_string(base.family) << " integral condition requires a non-negative mass, got "
        << compat.required_mass;
    throw InvalidInput(msg.str());
  }
  if (base.family == Family::J) {
    const double bound = twist_lower_bound(base.c, n);
    const double fmin = inf(base.f);
    if (!(fmin > bound)) {
      std::ostringstream msg;
      msg << "twist f has minimum " << fmin << ", not above the lower bound -(1/2n)(1/c)^(n-1) = "
          << bound;
      throw InvalidInput(msg.str());
    }
  }
  if (base.family != Family::CMA) {
    const double margin = cone_margin(base, base.omega0);
    if (!(margin > 0.0)) {
      std::ostringstream msg;
      msg << "cone condition fails for omega_0: margin " << margin;
      throw InvalidInput(msg.str());
    }
  }
}

std::string describe_path(Family family) {
  switch (family) {
    case Family::CMA: return "CMA path: twist t*f, constant shift b solved with phi";
    case Family::J:
      return "J path: chi leg on t in [0,1/2] with c fixed and constant compatible twist, then twist "
             "leg on [1/2,1] from the chi^n-average of f to f";
    case Family::GMA:
      return "GMA path: coefficients t*c_k, twist t*f + (1-t)*c0, t=0 bootstrapped by a CMA solve";
  }
  return "";
}

std::string monitor_blowup(const MonitorBundle& m, const SolverOptions& options) {
  std::ostringstream msg;
  if (!std::isfinite(m.trace_bound) || m.trace_bound > options.trace_cap)
    msg << "monitor blow-up: trace_bound = " << m.trace_bound << " exceeds cap " << options.trace_cap;
  else if (!std::isfinite(m.osc_phi) || m.osc_phi > options.osc_cap)
    msg << "monitor blow-up: osc_phi = " << m.osc_phi << " exceeds cap " << options.osc_cap;
  return msg.str();
}

}  // namespace

SolveReport solve_continuity(const EquationSpec& base_in, const SolverOptions& options) {
  EquationSpec base = base_in;
  if (base.family == Family::GMA && !(base.c0 > 0.0)) base.c0 = gma_path_constant(base);
  check_preconditions(base);

  std::vector<double> schedule = options.schedule.empty() ? uniform_schedule(10) : options.schedule;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0 && schedule[i] <= 1.0) || (i > 0 && !(schedule[i] > schedule[i - 1])))
      throw InvalidInput("schedule must be strictly increasing within (0, 1]");
  }
  if (schedule.back() != 1.0) schedule.push_back(1.0);

  SolveReport report;
  report.path_note = describe_path(base.family);
  PotentialField phi(base.grid());
  phi.normalization = Normalization::MeanZero;

  try {
    if (base.family == Family::GMA) {
      PotentialField f_cma(base.grid());
      for (std::size_t i = 0; i < f_cma.size(); ++i)
        f_cma.values[i] =
            std::log(base.c0 * hermitian_det(base.chi[i]) / hermitian_det(base.omega0[i]));
      EquationSpec cma(Family::CMA, base.omega0, base.omega0, f_cma);
      SolverOptions inner = options;
      inner.schedule.clear();
      const SolveReport boot = solve_continuity(cma, inner);
      if (!boot.success) {
        report.failure = "GMA bootstrap (CMA at t=0) failed: " + boot.failure;
        report.last_good = boot.last_good;
        return report;
      }
      phi = boot.last_good->phi;
    }
    const EquationSpec start = path_spec(base, 0.0);
    const Converged c0 = converge(start, phi, options, report.residual_history);
    phi = c0.phi;
    report.last_good = ContinuityState{0.0, phi, c0.norm.sup,
                                       compute_monitors(start, phi, options.szekelyhidi), 0};
  } catch (const NumericFailure& e) {
    report.failure = std::string("continuity start at t=0 failed: ") + e.what();
    return report;
  }

  double t_prev = 0.0;
  int steps = 0;
  for (double goal : schedule) {
    double t_try = goal;
    while (t_prev < goal) {
      const EquationSpec spec = path_spec(base, t_try);
      try {
        const Converged c = converge(spec, phi, options, report.residual_history);
        const MonitorBundle m = compute_monitors(spec, c.phi, options.szekelyhidi);
        phi = c.phi;
        t_prev = t_try;
        ++steps;
        report.trace.push_back({t_try, c.iterations, c.norm.sup, c.norm.shift, m});
        report.last_good = ContinuityState{t_try, phi, c.norm.sup, m, steps};
        const std::string blowup = monitor_blowup(m, options);
        if (!blowup.empty()) {
          report.failure = blowup + " at t = " + std::to_string(t_try);
          return report;
        }
        t_try = goal;
      } catch (const NumericFailure& e) {
        const double half = 0.5 * (t_try - t_prev);
        if (half < options.min_step) {
          std::ostringstream msg;
          msg << "Newton failed at t = " << t_try << " from t = " << t_prev
              << " and the step cannot be bisected below " << options.min_step << ": " << e.what();
          report.failure = msg.str();
          return report;
        }
        t_try = t_prev + half;
      }
    }
  }
  report.success = true;
  return report;
}

EquationSpec manufacture(Family family, const HermitianFormField& omega0,
                         const HermitianFormField& chi, const PotentialField& phi_star,
                         const ManufactureParams& params) {
  const TorusGrid& g = omega0.grid;
  const int n = g.dimension();
  if (!(phi_star.grid == g) || !(chi.grid == g)) throw InvalidInput("manufacture: grid mismatch");
  const HermitianFormField omega_phi = omega0 + ddbar(phi_star);
  const auto worst = positivity_worst(omega_phi);
  if (worst.value <= 0.0)
    throw InvalidInput("manufacture: omega_0 + ddbar(phi_star) is not positive at grid point " +
                       std::to_string(worst.index));

  EquationSpec spec(family, omega0, chi, PotentialField(g));
  switch (family) {
    case Family::CMA: {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = relative_eigenvalues(omega0[i], omega_phi[i]);
        double logdet = 0.0;
        for (int k = 0; k < n; ++k) logdet += std::log(s[k]);
        spec.f.values[i] = logdet;
      }
      break;
    }
    case Family::J: {
      spec.c = params.c ? *params.c : compute_constant_c(chi, omega0);
      if (!(spec.c > 0.0)) throw InvalidInput("manufacture: J constant must be positive");
      const double margin = j_cone_margin(chi, omega_phi, spec.c);
      if (!(margin > 0.0))
        throw InvalidInput("manufacture: phi_star violates the J cone condition (margin " +
                           std::to_string(margin) + ")");
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = relative_eigenvalues(chi[i], omega_phi[i]);
        double inv = 0.0;
        double prod = 1.0;
        for (int k = 0; k < n; ++k) {
          inv += 1.0 / s[k];
          prod *= s[k];
        }
        spec.f.values[i] = (spec.c - inv) * prod;
      }
      const double bound = twist_lower_bound(spec.c, n);
      if (!(inf(spec.f) > bound))
        throw InvalidInput("manufacture: produced twist " + std::to_string(inf(spec.f)) +
                           " is not above the lower bound " + std::to_string(bound));
      break;
    }
    case Family::GMA: {
      if (static_cast<int>(params.ck.size()) != n - 1)
        throw InvalidInput("manufacture: GMA needs n-1 coefficients");
      spec.ck = params.ck;
      const double margin = gma_cone_margin(chi, omega_phi, spec.ck);
      if (!(margin > 0.0))
        throw InvalidInput("manufacture: phi_star violates the GMA cone condition (margin " +
                           std::to_string(margin) + ")");
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = relative_eigenvalues(chi[i], omega_phi[i]);
        double v = elementary_symmetric(s.values, n);
        for (int k = 1; k <= n - 1; ++k)
          v -= spec.ck[k - 1] * elementary_symmetric(s.values, k) / binomial(n, k);
        spec.f.values[i] = v;
      }
      spec.c0 = gma_path_constant(spec);
      break;
    }
  }
  spec.validate();
  return spec;
}

}  // namespace malab
