#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malab/sampled_function.hpp"

namespace malab {

/// alpha log |z| on C^n (|z| the Euclidean norm); -inf at the origin.
PointFunction log_norm(int n, double alpha = 1.0);

/// max(log |z|, floor), with the hard maximum.
PointFunction truncated_log_norm(int n, double floor);

/// sign * |z|^2.
PointFunction squared_norm(int n, double sign = 1.0);

struct BankMember {
  std::string name;
  bool psh = false;  // known analytically
  PointFunction f;
  int n = 2;
};

/// Members on C^n for n >= 2. Kinds, in a fixed rotation:
///   sums of |affine|^2                    psh
///   alpha log |(z_1^p, z_2^q, ...)|       psh, pole only at the origin
///   negated sums of |affine|^2            not psh
///   -log(|z|^2 + c)                       not psh
///   regularized maxima of psh members     psh
///   |affine|^2 - c |z|^2, c beyond |a|^2  not psh
/// The draw depends only on the seed and the position in the rotation.
std::vector<BankMember> psh_test_bank(int n, int count, std::uint64_t seed);

}  // namespace malab
