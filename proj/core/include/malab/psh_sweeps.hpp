#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "malab/psh_bank.hpp"
#include "malab/sweeps.hpp"

namespace malab {

struct BankClassification {
  std::string name;
  bool psh = false;  // analytic
  double smoothing = 0.0;
  double distribution = 0.0;
  bool smoothing_psh() const { return smoothing >= -kPshTolerance; }
  bool distribution_psh() const { return distribution >= -kPshTolerance; }
  static constexpr double kPshTolerance = 1e-6;
};

/// Both positivity margins of every member, sampled on B(1) with the given
/// points per axis, over the radius ladder.
std::vector<BankClassification> classify_bank(std::span<const BankMember> bank, int points,
                                              std::span<const double> radii);

/// failures: members whose two senses disagree. worst: the smallest margin
/// of either sense over the psh members.
SweepSummary equivalence_summary(std::span<const BankClassification> rows);
/// failures: members whose smoothing-sense sign contradicts the analytic label.
SweepSummary analytic_summary(std::span<const BankClassification> rows);

/// Lelong profiles at the origin of every psh member on B(1), r = 0.8.
/// failures: profiles with a slack below -1e-6. worst: the smallest slack.
SweepSummary lelong_bank_sweep(std::span<const BankMember> bank, int points);

/// Pointwise laws of the binary and variadic regularized maxima on random
/// values: the lower bound max - eps, monotonicity, the exact bands and
/// permutation invariance. worst: the smallest tmax - (max - eps).
SweepSummary regularized_max_sweep(std::size_t trials, std::uint64_t seed);

/// tmax of pairs of psh members stays psh in the smoothing sense within 1e-6.
SweepSummary regularized_max_psh_sweep(std::span<const BankMember> bank, int pairs, int points);

/// On C^1: smooth() of psh inputs is psh again (margin >= -1e-8).
SweepSummary smoothing_psh_sweep(int count, std::uint64_t seed);

}  // namespace malab
