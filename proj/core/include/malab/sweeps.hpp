#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "malab/equations.hpp"
#include "malab/random.hpp"

namespace malab {

/// Outcome of one randomized property sweep.
struct SweepSummary {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::size_t rejected = 0;  // draws discarded for missing a precondition
  double worst = 0.0;        // sweep-specific extreme, see each sweep
  double tolerance = 0.0;
  bool passed() const { return trials > 0 && failures == 0; }
};

/// Tuples (lambda, f, c), n alternating over {2, 3}, that satisfy the
/// pointwise twisted J equation, the weak cone for every k and the twist
/// bound. worst: the smallest slack ratio (>= 1 when the lemma holds).
SweepSummary cone_preservation_sweep(std::size_t trials, std::uint64_t seed);

/// Random positive-definite pairs (A, B) and t in (0, 1), n alternating over
/// {2, 3}. worst: the smallest segment defect, against -1e-10.
SweepSummary concavity_sweep(PhiFamily family, std::size_t trials, std::uint64_t seed);

/// Central differences of Phi against phi_gradient for random positive
/// spectra. worst: the largest relative error, against 1e-6.
SweepSummary gradient_sweep(PhiFamily family, std::size_t trials, std::uint64_t seed);

/// chi^{n-k} ^ omega^k / chi^n from wedge_ratio against the coefficients of
/// the polynomial t -> det(chi + t omega) / det(chi), recovered from n + 1
/// samples. worst: the largest absolute error, against 1e-9.
SweepSummary wedge_identity_sweep(int n, std::size_t trials, std::uint64_t seed);

/// A random positive-definite Hermitian matrix G G^* + floor I.
HermitianMatrix random_positive_hermitian(Rng& rng, int n, double floor = 0.1);

}  // namespace malab
