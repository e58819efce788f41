#include "malab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "malab/abp.hpp"
#include "malab/errors.hpp"
#include "malab/gluing.hpp"
#include "malab/lelong.hpp"
#include "malab/parallel.hpp"
#include "malab/psh_bank.hpp"
#include "malab/psh_sweeps.hpp"
#include "malab/random.hpp"
#include "malab/reports.hpp"
#include "malab/sweeps.hpp"

namespace malab {

namespace {

using Clock = std::chrono::steady_clock;

// key = value lines after the config echo.
class Summary {
 public:
  void add(const std::string& key, const std::string& value) {
    text_ += key + " = " + value + "\n";
  }
  void add(const std::string& key, double value) { add(key, format_number(value)); }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

void write_summary(const RunConfig& config, const Summary& summary, Clock::time_point start) {
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  write_report(config.output_dir, "summary.txt",
               "# config\n" + config.echo() + "# result\n" + summary.text() +
                   "wall_clock_seconds = " + format_number(seconds) + "\n");
}

HermitianFormField build_chi(const RunConfig& config, const TorusGrid& grid) {
  const int n = config.n;
  HermitianMatrix diag = HermitianMatrix::Identity(n, n);
  if (!config.chi_diag.empty()) {
    if (static_cast<int>(config.chi_diag.size()) != n)
      throw InvalidInput("equation.chi_diag needs " + std::to_string(n) + " entries");
    for (int p = 0; p < n; ++p) diag(p, p) = config.chi_diag[p];
  }
  HermitianFormField chi = HermitianFormField::constant(grid, diag);
  if (!config.chi_potential.empty())
    chi = chi + ddbar(PotentialField::sample(grid, TrigSeries::parse(n, config.chi_potential)));
  return chi;
}

// Shift f by a constant so the family's integral identity holds.
void normalize_twist(EquationSpec& spec) {
  const CompatibilityReport compat = compatibility_residual(spec);
  if (spec.family == Family::CMA) {
    PotentialField one(spec.grid(), 1.0);
    const double volume = integrate_against(one, spec.omega0);
    const double shift = std::log(volume / (volume + compat.defect));
    for (double& v : spec.f.values) v += shift;
    return;
  }
  PotentialField one(spec.grid(), 1.0);
  const double chi_volume = integrate_against(one, spec.chi);
  for (double& v : spec.f.values) v -= compat.defect / chi_volume;
}

double sup_error(const PotentialField& phi, const PotentialField& star) {
  const PotentialField a = subtract_mean(phi), b = subtract_mean(star);
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
  return err;
}

int solve(const RunConfig& config, Family family, std::ostream& log, Summary& summary) {
  const EquationSpec spec = build_equation(config, family);
  const SolveReport report = solve_continuity(spec, solver_options(config));
  emit_csv(report, config.output_dir);
  summary.add("family", to_string(family));
  summary.add("path", report.path_note);
  summary.add("success", report.success ? "true" : "false");
  if (!report.failure.empty()) summary.add("failure", report.failure);
  summary.add("path_points", std::to_string(report.trace.size()));
  summary.add("newton_steps", std::to_string(report.residual_history.size()));
  if (!report.trace.empty()) summary.add("final_residual_sup", report.trace.back().residual_sup);
  if (report.last_good) {
    summary.add("last_good_t", report.last_good->t);
    if (!config.phi_star.empty()) {
      const PotentialField star = PotentialField::sample(
          spec.grid(), TrigSeries::parse(config.n, config.phi_star));
      summary.add("sup_error_vs_phi_star", sup_error(report.last_good->phi, star));
    }
  }
  if (!report.success) {
    log << "solve failed: " << report.failure << "\n";
    return kExitNumericFailure;
  }
  log << "solve converged over " << report.trace.size() << " path points\n";
  return kExitSuccess;
}

int check_cone(const RunConfig& config, std::ostream& log, Summary& summary) {
  const EquationSpec spec = build_equation(config, config.cone_family);
  spec.validate();
  bool ok = true;
  summary.add("family", to_string(spec.family));
  const double background = cone_margin(spec, spec.omega0);
  summary.add("cone_margin_omega0", background);
  ok = ok && (spec.family == Family::CMA || background > 0.0);
  if (spec.family == Family::J) {
    const double bound = twist_lower_bound(spec.c, spec.dimension());
    summary.add("c", spec.c);
    summary.add("twist_lower_bound", bound);
    summary.add("twist_min", inf(spec.f));
    ok = ok && inf(spec.f) > bound;
  }
  if (!config.phi_star.empty()) {
    const PotentialField star =
        PotentialField::sample(spec.grid(), TrigSeries::parse(config.n, config.phi_star));
    const double margin = cone_margin(spec, perturbed_form(spec, star));
    summary.add("cone_margin_phi_star", margin);
    ok = ok && margin > 0.0;
  }
  const SweepSummary sweep = cone_preservation_sweep(config.cone_trials, config.seed);
  write_report(config.output_dir, "cone.csv", sweep_csv(std::span<const SweepSummary>(&sweep, 1)));
  summary.add("sweep_failures", std::to_string(sweep.failures));
  summary.add("sweep_worst_slack_ratio", sweep.worst);
  ok = ok && sweep.passed();
  log << "check-cone: " << (ok ? "all checks hold" : "a cone check failed") << "\n";
  return ok ? kExitSuccess : kExitNumericFailure;
}

PointFunction lelong_function(const RunConfig& config) {
  const std::string& name = config.lelong_function;
  const int n = config.lelong_n;
  if (name == "log_norm") return log_norm(n, config.lelong_alpha);
  if (name == "truncated_log") return truncated_log_norm(n, config.lelong_floor);
  if (name == "squared_norm") return squared_norm(n);
  if (name.rfind("bank:", 0) == 0) {
    int index = -1;
    try {
      index = std::stoi(name.substr(5));
    } catch (const std::exception&) {
    }
    if (index < 0 || index >= config.bank_size)
      throw InvalidInput("lelong.function: bank index out of range in '" + name + "'");
    const auto bank = psh_test_bank(n, config.bank_size, config.seed);
    return bank[index].f;
  }
  throw InvalidInput("lelong.function: unknown function '" + name + "'");
}

int lelong(const RunConfig& config, std::ostream& log, Summary& summary) {
  const int n = config.lelong_n;
  const SampledFunction phi =
      SampledFunction::on_ball(n, 1.0, config.lelong_points, lelong_function(config));
  std::vector<double> x(2 * n, 0.0);
  if (!config.lelong_center.empty()) {
    if (static_cast<int>(config.lelong_center.size()) != 2 * n)
      throw InvalidInput("lelong.center needs " + std::to_string(2 * n) + " coordinates");
    x = config.lelong_center;
  }
  const Ladder ladder = dyadic_ladder(config.lelong_reference, config.lelong_count, phi.spacing());
  LelongOptions options;
  options.enforce = false;
  const LelongProfile profile = lelong_profile(phi, x, ladder.deltas, ladder.reference, options);
  write_report(config.output_dir, "lelong.csv", lelong_csv(profile));
  summary.add("reference_radius", profile.reference_radius);
  summary.add("hat_reference", profile.hat_reference);
  summary.add("monotone_slack", profile.monotone_slack);
  summary.add("gap_slack", profile.gap_slack);
  summary.add("poisson_lower_slack", profile.poisson_lower_slack);
  summary.add("poisson_upper_slack", profile.poisson_upper_slack);
  summary.add("smooth_slack", profile.smooth_slack);
  if (profile.deltas.size() >= 3) {
    const LelongEstimate est = lelong_number(profile);
    summary.add("lelong_number", est.value);
    summary.add("chord_slope", est.chord_slope);
    summary.add("resolution", est.resolution);
  }
  const double worst = std::min({profile.monotone_slack, profile.gap_slack,
                                 profile.poisson_lower_slack, profile.poisson_upper_slack,
                                 profile.smooth_slack});
  if (worst < -options.tolerance) {
    log << "lelong: an asserted inequality fails (worst slack " << worst << ")\n";
    return kExitNumericFailure;
  }
  log << "lelong: profile over " << profile.deltas.size() << " radii\n";
  return kExitSuccess;
}

int glue_demo(const RunConfig& config, std::ostream& log, Summary& summary) {
  const int n = config.glue_n;
  const int d = 2 * n;
  std::string psi_text = config.glue_psi;
  if (psi_text.empty()) {
    psi_text = "1";
    for (int a = 1; a < d; ++a) psi_text += " 0";
    psi_text += " : 0.01";
  }
  const TrigSeries psi = TrigSeries::parse(n, psi_text);
  const auto centers = lattice_centers(n, config.glue_spacing);
  std::vector<LocalPotential> locals;
  locals.reserve(centers.size());
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double offset = (j % 2 == 1) ? config.glue_violation : 0.0;
    locals.push_back({centers[j], [psi, offset](std::span<const double> y) {
                        return psi.value(y) + offset;
                      }});
  }
  const double r = config.glue_r;
  const double eps = config.glue_eps * r * r;
  const GlueResult glued = glue_local_potentials(n, config.glue_points, locals, r, eps);
  const CreaseReport crease = crease_report(glued, locals, r);

  // With one global psi, f - psi is the regularized max of -dist^2, which
  // lies within eps of the hard maximum.
  double deviation = 0.0;
  for (std::size_t i = 0; i < glued.field.size(); ++i) {
    const auto z = glued.field.point(i);
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) {
      double dist2 = 0.0;
      for (int a = 0; a < d; ++a) {
        double delta = z[a] - c[a];
        delta -= std::nearbyint(delta);
        dist2 += delta * delta;
      }
      nearest = std::min(nearest, dist2);
    }
    const double hard = psi.value(std::span<const double>(z.data(), d)) - nearest;
    deviation = std::max(deviation, std::abs(glued.field[i] - hard));
  }

  write_report(config.output_dir, "glue.csv", field_csv(glued.field));
  summary.add("branches", std::to_string(locals.size()));
  summary.add("eps", eps);
  summary.add("worst_closeness", glued.worst_closeness);
  summary.add("glued_second_difference_max", crease.glued_max);
  summary.add("branch_second_difference_max", crease.branch_max);
  summary.add("second_difference_ratio", crease.ratio);
  summary.add("hessian_slack", crease.hessian_slack);
  summary.add("dominant_nodes", std::to_string(crease.dominant_nodes));
  summary.add("dominant_error", crease.dominant_error);
  summary.add("deviation_from_hard_max", deviation);
  const bool ok = crease.ratio <= 10.0 && crease.hessian_slack >= -1e-6 &&
                  crease.dominant_error <= 1e-12 && deviation <= eps;
  log << "glue-demo: " << (ok ? "checks hold" : "a gluing check failed") << "\n";
  return ok ? kExitSuccess : kExitNumericFailure;
}

int abp_demo(const RunConfig& config, std::ostream& log, Summary& summary) {
  const int points = config.abp_points;
  std::vector<AbpCase> cases;
  auto quadratic = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] - 1.0; };
  const SampledFunction base = SampledFunction::on_ball(1, 1.0, points, quadratic);
  cases.push_back({"quadratic", config.abp_eps, abp_verify(base, config.abp_eps)});

  Rng rng(config.seed);
  for (int k = 0; k < config.abp_perturbations; ++k) {
    const double radius = rng.uniform(0.0, 0.5), angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double cx = radius * std::cos(angle), cy = radius * std::sin(angle);
    const double s = rng.uniform(0.2, 0.4);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double height = sign * config.abp_amplitude * s * s * rng.uniform(0.2, 1.0);
    // The bump's Hessian is bounded by 2 |height| / s^2 < 2, so v stays convex.
    const PointFunction v = [=](std::span<const double> x) {
      const double q = ((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) / (s * s);
      return x[0] * x[0] + x[1] * x[1] - 1.0 + height * std::exp(-q);
    };
    const SampledFunction field = SampledFunction::on_ball(1, 1.0, points, v);
    const std::array<double, 2> origin{};
    const double eps = abp_boundary_infimum(field) - v(std::span<const double>(origin));
    cases.push_back({"perturbation " + std::to_string(k), eps, abp_verify(field, eps)});
  }
  write_report(config.output_dir, "abp.csv", abp_csv(cases));

  const double target = std::numbers::pi / 4.0;
  const double base_error = std::abs(cases[0].result.integral - target) / target;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < cases.size(); ++k) min_ratio = std::min(min_ratio, cases[k].result.ratio);
  summary.add("quadratic_integral", cases[0].result.integral);
  summary.add("quadratic_relative_error", base_error);
  if (cases.size() > 1) summary.add("perturbation_min_ratio", min_ratio);
  log << "abp-demo: " << cases.size() << " cases\n";
  return kExitSuccess;
}

int props(const RunConfig& config, std::ostream& log, Summary& summary) {
  const std::uint64_t seed = config.seed;
  std::vector<SweepSummary> sweeps;
  sweeps.push_back(cone_preservation_sweep(config.cone_trials, seed));
  sweeps.push_back(concavity_sweep(PhiFamily::MongeAmpere, config.pair_trials, seed + 1));
  sweeps.push_back(concavity_sweep(PhiFamily::J, config.pair_trials, seed + 2));
  sweeps.push_back(gradient_sweep(PhiFamily::MongeAmpere, config.pair_trials, seed + 3));
  sweeps.push_back(gradient_sweep(PhiFamily::J, config.pair_trials, seed + 4));
  sweeps.push_back(wedge_identity_sweep(2, config.wedge_trials, seed + 5));
  sweeps.push_back(wedge_identity_sweep(3, config.wedge_trials, seed + 6));

  const auto bank = psh_test_bank(2, config.bank_size, seed + 7);
  const std::array<double, 2> radii = {0.25, 0.4};
  const auto rows = classify_bank(bank, config.bank_points, radii);
  sweeps.push_back(equivalence_summary(rows));
  sweeps.push_back(analytic_summary(rows));
  sweeps.push_back(regularized_max_sweep(static_cast<std::size_t>(config.pair_trials), seed + 8));
  sweeps.push_back(regularized_max_psh_sweep(bank, 6, config.bank_points));
  sweeps.push_back(smoothing_psh_sweep(6, seed + 9));
  sweeps.push_back(lelong_bank_sweep(bank, 2 * config.bank_points - 1));

  write_report(config.output_dir, "props.csv", sweep_csv(sweeps));
  std::size_t failed = 0;
  for (const auto& s : sweeps) {
    log << (s.passed() ? "PASS " : "FAIL ") << s.name << ": " << s.failures << "/" << s.trials
        << " failures, worst " << format_number(s.worst) << "\n";
    if (!s.passed()) ++failed;
  }
  summary.add("properties", std::to_string(sweeps.size()));
  summary.add("failed", std::to_string(failed));
  return failed == 0 ? kExitSuccess : kExitNumericFailure;
}

}  // namespace

EquationSpec build_equation(const RunConfig& config, Family family) {
  const TorusGrid grid = make_grid(config.n, config.points);
  const HermitianFormField omega0 = HermitianFormField::identity(grid);
  const HermitianFormField chi = family == Family::CMA ? omega0 : build_chi(config, grid);
  if (!config.phi_star.empty()) {
    if (!config.f.empty())
      throw InvalidInput("equation.f and equation.phi_star are mutually exclusive");
    ManufactureParams params;
    params.c = config.c;
    params.ck = config.ck;
    return manufacture(family, omega0, chi,
                       PotentialField::sample(grid, TrigSeries::parse(config.n, config.phi_star)),
                       params);
  }
  EquationSpec spec(family, omega0, chi,
                    PotentialField::sample(grid, TrigSeries::parse(config.n, config.f)));
  spec.c = config.c.value_or(compute_constant_c(chi, omega0));
  spec.ck = config.ck;
  if (family == Family::GMA) spec.c0 = gma_path_constant(spec);
  if (config.normalize_f) normalize_twist(spec);
  return spec;
}

SolverOptions solver_options(const RunConfig& config) {
  SolverOptions o;
  o.newton_tolerance = config.newton_tol;
  o.max_newton_iterations = config.max_newton;
  o.linear.tolerance = config.gmres_tol;
  o.linear.restart = config.gmres_restart;
  o.linear.max_iterations = config.gmres_max;
  o.min_damping = config.min_damping;
  o.schedule = config.schedule.empty() ? uniform_schedule(config.steps) : config.schedule;
  o.min_step = config.min_step;
  o.trace_cap = config.trace_cap;
  o.osc_cap = config.osc_cap;
  return o;
}

int run(const RunConfig& config, std::ostream& log) {
  const auto start = Clock::now();
  Summary summary;
  int code = kExitSuccess;
  try {
    set_thread_count(config.threads);
    write_report(config.output_dir, "config.txt", config.echo());
    switch (config.command) {
      case Command::SolveCma: code = solve(config, Family::CMA, log, summary); break;
      case Command::SolveJ: code = solve(config, Family::J, log, summary); break;
      case Command::SolveGma: code = solve(config, Family::GMA, log, summary); break;
      case Command::CheckCone: code = check_cone(config, log, summary); break;
      case Command::Lelong: code = lelong(config, log, summary); break;
      case Command::GlueDemo: code = glue_demo(config, log, summary); break;
      case Command::AbpDemo: code = abp_demo(config, log, summary); break;
      case Command::Props: code = props(config, log, summary); break;
    }
  } catch (const InvalidInput& e) {
    log << "error: " << e.what() << "\n";
    summary.add("error", e.what());
    code = kExitInvalidInput;
  } catch (const NumericFailure& e) {
    log << "numeric failure: " << e.what() << "\n";
    summary.add("error", e.what());
    code = kExitNumericFailure;
  }
  summary.add("exit_code", std::to_string(code));
  try {
    write_summary(config, summary, start);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return code;
}

}  // namespace malab
