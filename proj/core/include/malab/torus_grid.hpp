#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "malab/trig_series.hpp"

namespace malab {

class SpectralPlan;

/// Uniform periodic grid on C^n / Z^{2n} with unit periods in every real
/// direction. Real axis a has coordinate x_a = i_a / points_per_axis; the
/// flat index is row-major with axis 0 slowest.
class TorusGrid {
 public:
  TorusGrid(int n, int points_per_axis);

  int dimension() const { return n_; }
  int real_dimension() const { return 2 * n_; }
  int points_per_axis() const { return m_; }
  double spacing() const { return 1.0 / m_; }
  std::size_t size() const { return size_; }
  /// Quadrature weight of one point; weights sum to the torus volume 1.
  double weight() const { return 1.0 / static_cast<double>(size_); }

  std::array<int, kMaxRealDim> index_of(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> index) const;  // wraps periodically
  std::array<double, kMaxRealDim> point(std::size_t flat) const;

  /// Signed wavenumber of index i along one axis (Nyquist reported as +m/2).
  int wavenumber(int i) const { return i <= m_ / 2 ? i : i - m_; }

  const SpectralPlan& plan() const { return *plan_; }

  bool operator==(const TorusGrid& other) const { return n_ == other.n_ && m_ == other.m_; }

 private:
  int n_;
  int m_;
  std::size_t size_;
  std::shared_ptr<const SpectralPlan> plan_;
};

/// make_grid with the documented contract: n in {1,2,3}, even axis count >= 8.
TorusGrid make_grid(int n, int points_per_axis);

enum class Normalization { Raw, MeanZero, SupMinusOne };

struct PotentialField {
  TorusGrid grid;
  std::vector<double> values;
  Normalization normalization = Normalization::Raw;

  explicit PotentialField(const TorusGrid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}
  PotentialField(const TorusGrid& g, std::vector<double> v,
                 Normalization tag = Normalization::Raw);

  static PotentialField sample(const TorusGrid& g, const TrigSeries& series);
  static PotentialField sample(const TorusGrid& g,
                               const std::function<double(std::span<const double>)>& f);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// One n-by-n Hermitian matrix per grid point.
struct HermitianFormField {
  TorusGrid grid;
  std::vector<HermitianMatrix> matrices;
  bool positive = false;  // set only after a positivity check has passed

  explicit HermitianFormField(const TorusGrid& g);
  static HermitianFormField constant(const TorusGrid& g, const HermitianMatrix& m);
  static HermitianFormField identity(const TorusGrid& g);

  std::size_t size() const { return matrices.size(); }
  const HermitianMatrix& operator[](std::size_t i) const { return matrices[i]; }
  HermitianMatrix& operator[](std::size_t i) { return matrices[i]; }

  HermitianFormField operator+(const HermitianFormField& other) const;
  /// Largest relative deviation |M - M^*| / max(1, |M|) over the grid.
  double hermitian_defect() const;
};

// -- spectral differentiation ------------------------------------------------

/// Complex Hessian (d^2 phi / dz_p dzbar_q) of a periodic field by
/// trigonometric differentiation.
HermitianFormField ddbar(const PotentialField& phi);

/// Upper-triangle entries of ddbar(phi) as separate fields, ordered
/// (0,0), (0,1), ..., (0,n-1), (1,1), ... Cheaper than ddbar when only
/// contractions are needed.
std::vector<std::vector<cplx>> ddbar_upper(const PotentialField& phi);

/// d phi / dz_p, one field per p.
std::vector<std::vector<cplx>> dz(const PotentialField& phi);

/// Third derivatives d^3 phi / dz_a dzbar_b dz_c, indexed [(a*n + b)*n + c].
std::vector<std::vector<cplx>> third_derivatives(const PotentialField& phi);

/// Quadrature of a density over the torus (exact for constants).
double integrate(const PotentialField& density);
double integrate(std::span<const double> density, const TorusGrid& grid);

double mean(const PotentialField& f);
double sup(const PotentialField& f);
double inf(const PotentialField& f);
PotentialField subtract_mean(const PotentialField& f);

/// Inverts w -> orientation * tr(B * ddbar(w)) + mean(w) for a constant
/// Hermitian coefficient B in frequency space. Used as the Newton
/// preconditioner. Frequency zero maps to the mean-shift identity.
class FlatOperatorInverse {
 public:
  FlatOperatorInverse(const TorusGrid& grid, const HermitianMatrix& coeff, double orientation);
  std::vector<double> apply(std::span<const double> rhs) const;

 private:
  TorusGrid grid_;
  std::vector<double> inverse_symbol_;
};

}  // namespace malab
