#pragma once

#include <array>
#include <span>
#include <vector>

#include "malab/mollifier.hpp"
#include "malab/sampled_function.hpp"

namespace malab {

namespace detail {
struct Node1d {
  double x;  // on [0, 1]
  double w;
};
struct SphereNode {
  std::array<cplx, kMaxComplexDim> w{};  // a point of S^{2n-1}
  double weight = 0.0;
};
}  // namespace detail

/// Product rule on S^{2n-1}: w_p = sqrt(t_p) e^{i a_p} with Gauss-Legendre
/// moduli on the simplex and trapezoid phases. Weights sum to |S^{2n-1}|.
std::vector<detail::SphereNode> sphere_nodes(int n, int moduli, int phases);

/// Node counts of the product rule on B(0, eps): Gauss-Legendre in the
/// radius, Gauss-Legendre in the Hopf moduli t_p = |w_p|^2 on the simplex,
/// and the trapezoid rule in each phase.
struct BallRuleOptions {
  int radial = 0;   // 0 picks a default for the dimension
  int moduli = 0;
  int phases = 0;
};

/// Quadrature for y -> rho_eps(y) and y -> d_p dbar_q rho_eps(y) over the
/// support ball. The radial weights are recalibrated so that the Hessian
/// rule is exact on constants and on quadratics.
class BallRule {
 public:
  explicit BallRule(const Mollifier& mollifier, BallRuleOptions options = {});

  int dimension() const { return n_; }
  double epsilon() const { return eps_; }
  std::size_t size() const { return mass_.size(); }

  /// (rho_eps * f)(x).
  double mollify(const PointFunction& f, std::span<const double> x) const;
  /// Complex Hessian d^2 / dz_p dzbar_q of rho_eps * f at x. poles holds
  /// known singular points (2n coordinates each); when exactly one lies
  /// inside the support the integral is taken in polar coordinates about it.
  HermitianMatrix hessian(const PointFunction& f, std::span<const double> x,
                          std::span<const double> poles = {}) const;

 private:
  int n_;
  double eps_;
  HermitianMatrix hessian_about(const PointFunction& f, std::span<const double> x,
                                std::span<const double> pole, double distance) const;

  Mollifier mollifier_;
  std::vector<detail::Node1d> pole_radial_;
  std::vector<detail::SphereNode> pole_sphere_;
  std::vector<double> offsets_;  // size() rows of 2n coordinates
  std::vector<double> mass_;     // sums to 1
  std::vector<double> a_;        // weight of d^2k/ds^2 * conj(y_p) y_q
  std::vector<double> b_;        // weight of dk/ds * delta_pq
};

/// Lattice version of the same Hessian, for functions known only by samples.
class LatticeStencil {
 public:
  LatticeStencil(const Mollifier& mollifier, const SampledFunction& grid);

  double epsilon() const { return eps_; }
  int reach() const { return reach_; }  // offsets stay within this many nodes per axis
  /// Complex Hessian of the smoothing at a node; every node of the stencil
  /// must lie in the grid.
  HermitianMatrix hessian(const SampledFunction& f, std::size_t node) const;

 private:
  int n_;
  double eps_;
  int reach_;
  std::vector<std::array<int, kMaxRealDim>> offsets_;
  std::vector<std::array<cplx, kMaxComplexDim>> complex_offsets_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Discrete convolution with rho_eps (weights normalized on the lattice).
/// On a ball the result lives on the concentric ball of radius R - eps,
/// snapped down to the grid. Singular nodes enter through their cell average.
SampledFunction smooth(const SampledFunction& phi, const Mollifier& mollifier);

enum class PositivitySense { Distribution, Smoothing };

struct PositivityOptions {
  /// Upper bound on evaluation points (smoothing) or bump centres
  /// (distribution) per radius; 0 picks a default for the dimension.
  int max_points = 0;
  BallRuleOptions rule;
};

struct PositivityResult {
  double margin = 0.0;
  std::array<double, kMaxRealDim> worst_point{};
  double worst_epsilon = 0.0;
  std::size_t evaluations = 0;
};

/// Smoothing sense: the least eigenvalue of the complex Hessian of phi_eps
/// over the ladder and the evaluation points of each valid region.
/// Distribution sense: the least value of int phi i ddbar xi over a fixed
/// bank of strongly positive test forms xi = b (i dw_1 ^ dwbar_1) ^ ... with
/// one factor omitted, where b is a bump of radius in the ladder and w runs
/// over a fixed set of unitary frames; each pairing reduces to
/// int phi d_v dbar_v b for a frame vector v.
PositivityResult positivity(const SampledFunction& phi, PositivitySense sense,
                            std::span<const double> epsilon_ladder,
                            const PositivityOptions& options = {});

/// The unit vectors v tested by the distribution sense: coordinate vectors
/// and (e_p + u e_q)/sqrt 2 for u in {1, -1, i, -i}.
std::vector<std::array<cplx, kMaxComplexDim>> test_form_directions(int n);

}  // namespace malab
