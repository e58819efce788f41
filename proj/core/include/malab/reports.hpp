#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "malab/abp.hpp"
#include "malab/continuity_solver.hpp"
#include "malab/lelong.hpp"
#include "malab/sampled_function.hpp"
#include "malab/sweeps.hpp"

namespace malab {

// CSV layouts. Every file starts with its header row; numbers use %.17g so
// re-runs compare byte for byte.
inline constexpr const char* kTraceHeader =
    "t,iters,residual_sup,sup_phi,osc_phi,trace_bound,cone_margin,min_eigen,calabi_S,"
    "szekelyhidi_G_max";
inline constexpr const char* kLelongHeader = "delta,hat,mean,smooth,nu";
inline constexpr const char* kSweepHeader = "property,trials,failures,rejected,worst,tolerance,status";
inline constexpr const char* kAbpHeader = "case,eps,contact_measure,integral,ratio,contact_points";

std::string format_number(double v);

/// One row per path point, in t order.
std::string trace_csv(std::span<const PathPoint> trace);
/// (i_0, ..., i_{2n-1}, value) rows; header i0,...,value.
std::string field_csv(const PotentialField& field);
/// Same layout; on a ball only nodes of the domain are listed.
std::string field_csv(const SampledFunction& field);
std::string lelong_csv(const LelongProfile& profile);
std::string sweep_csv(std::span<const SweepSummary> sweeps);

struct AbpCase {
  std::string name;
  double epsilon = 0.0;
  AbpResult result;
};
std::string abp_csv(std::span<const AbpCase> cases);

/// Writes text to dir / name, creating dir. Throws IoError naming the path.
std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& text);

/// The solve artifacts: trace.csv and phi.csv (the last good potential, if any).
void emit_csv(const SolveReport& report, const std::filesystem::path& dir);

}  // namespace malab
