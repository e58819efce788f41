#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "malab/trig_series.hpp"

namespace malab {

using PointFunction = std::function<double(std::span<const double>)>;

enum class DomainKind { Ball, Torus };

/// Values of a real function on a uniform grid in R^{2n} ~ C^n, with
/// z_p = x_{2p} + i x_{2p+1}.
///
/// Ball: the cube [-R, R]^{2n}; an odd node count per axis includes the
/// faces and the origin, an even count uses cell centres. Only nodes with
/// |x| <= R belong to the domain.
/// Torus: R^{2n} / Z^{2n}, node i_a at x_a = i_a / m.
///
/// Values are finite except for -inf at isolated marked singular nodes.
/// An optional closed form is kept alongside; quadratures that need
/// off-grid values use it, and everything else works from the samples.
class SampledFunction {
 public:
  SampledFunction(int n, DomainKind domain, double radius, int points_per_axis,
                  std::vector<double> values, PointFunction closed_form = {});

  static SampledFunction on_ball(int n, double radius, int points_per_axis, PointFunction f);
  static SampledFunction on_torus(int n, int points_per_axis, PointFunction f);

  int dimension() const { return n_; }
  int real_dimension() const { return 2 * n_; }
  DomainKind domain() const { return domain_; }
  double radius() const { return radius_; }  // ball radius; 0.5 on the torus by convention
  int points_per_axis() const { return m_; }
  double spacing() const { return h_; }
  std::size_t size() const { return values_.size(); }

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<std::size_t>& singular_nodes() const { return singular_; }
  bool is_singular(std::size_t flat) const { return !std::isfinite(values_[flat]); }

  bool has_closed_form() const { return static_cast<bool>(closed_form_); }
  const PointFunction& closed_form() const { return closed_form_; }

  std::array<int, kMaxRealDim> index_of(std::size_t flat) const;
  /// Flat index of a multi-index; wraps on the torus, -1 outside the cube on a ball.
  long flat_index(std::span<const int> index) const;
  std::array<double, kMaxRealDim> point(std::size_t flat) const;
  /// Nearest node to x (wrapped on the torus, clamped to the cube on a ball).
  std::size_t nearest_node(std::span<const double> x) const;
  /// Ball: |x| <= R. Torus: always.
  bool in_domain(std::size_t flat) const;

  /// Value at an arbitrary point: the closed form if present, otherwise
  /// multilinear interpolation of the samples.
  double evaluate(std::span<const double> x) const;

  /// Sub-cell average of the closed form over the cell of a node; used in
  /// place of -inf at singular nodes by the convolution routines.
  double cell_average(std::size_t flat) const;

  /// Same grid, same domain.
  bool same_grid(const SampledFunction& other) const;

 private:
  int n_;
  DomainKind domain_;
  double radius_;
  int m_;
  double h_;
  double origin_;  // coordinate of index 0
  std::vector<double> values_;
  PointFunction closed_form_;
  std::vector<std::size_t> singular_;
};

/// |x - y| in R^{2n}, using the minimal image on the torus.
double displacement_norm(const SampledFunction& f, std::span<const double> x,
                         std::span<const double> y);

}  // namespace malab
