#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "malab/equations.hpp"

namespace malab {

enum class Command { SolveCma, SolveJ, SolveGma, CheckCone, Lelong, GlueDemo, AbpDemo, Props };

std::string to_string(Command c);
/// Throws InvalidInput on an unknown name.
Command parse_command(const std::string& name);

/// Everything a run needs. Built from `key = value` lines with dotted
/// section prefixes; see config_keys() for the full list with defaults.
struct RunConfig {
  Command command = Command::SolveCma;
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path output_dir = ".";

  int n = 2;
  int points = 16;

  // Equation data. Series use the TrigSeries text form.
  std::string f;
  std::string phi_star;  // when set, f is manufactured from it
  bool normalize_f = true;
  std::vector<double> chi_diag;  // empty means the identity
  std::string chi_potential;
  std::optional<double> c;
  std::vector<double> ck;
  Family cone_family = Family::J;  // check-cone only

  int steps = 10;
  std::vector<double> schedule;
  double min_step = 1e-3;
  double newton_tol = 1e-10;
  int max_newton = 30;
  double gmres_tol = 1e-10;
  int gmres_restart = 40;
  int gmres_max = 400;
  double min_damping = 1e-4;
  double trace_cap = 1e4;
  double osc_cap = 1e4;

  std::string lelong_function = "log_norm";
  double lelong_alpha = 1.0;
  double lelong_floor = -10.0;
  int lelong_n = 1;
  int lelong_points = 201;
  double lelong_reference = 0.8;
  int lelong_count = 5;
  std::vector<double> lelong_center;

  int glue_n = 1;
  int glue_points = 64;
  double glue_spacing = 0.25;
  double glue_r = 0.27;
  double glue_eps = 0.5;  // as a fraction of r^2
  std::string glue_psi;
  double glue_violation = 0.0;  // offset added to every other local, to break closeness

  int abp_points = 256;
  double abp_eps = 1.0;
  int abp_perturbations = 20;
  double abp_amplitude = 0.5;  // bump heights as a fraction of s^2, which keeps v convex

  int cone_trials = 10000;
  int pair_trials = 1000;
  int wedge_trials = 200;
  int bank_size = 50;
  int bank_points = 17;

  /// Canonical `key = value` text of every key, in key order. Parsing it
  /// reproduces this config exactly.
  std::string echo() const;
};

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};
const std::vector<ConfigKey>& config_keys();

/// Parses the flat key-value format. '#' starts a comment; unknown keys,
/// repeated keys, malformed lines and out-of-range values are InvalidInput.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace malab
