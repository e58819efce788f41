#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace malab {

using cplx = std::complex<double>;
inline constexpr int kMaxComplexDim = 3;
inline constexpr int kMaxRealDim = 2 * kMaxComplexDim;

/// n-by-n complex matrix with n <= 3 and no heap storage.
using HermitianMatrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                  kMaxComplexDim, kMaxComplexDim>;
using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                                 kMaxComplexDim, 1>;

/// One term a*cos(2*pi*k.x) + b*sin(2*pi*k.x) of a periodic series.
struct TrigMode {
  std::array<int, kMaxRealDim> k{};
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

/// A finite trigonometric series on the unit torus R^{2n}/Z^{2n}. Real
/// coordinates are x_0..x_{2n-1}; complex coordinates are
/// z_p = x_{2p} + i*x_{2p+1}. All derivatives are closed-form.
class TrigSeries {
 public:
  TrigSeries() = default;
  TrigSeries(int n, std::vector<TrigMode> modes);

  /// Parses "k_0 ... k_{2n-1} : a [: b] ; ..." (empty string gives zero).
  static TrigSeries parse(int n, const std::string& text);
  std::string to_string() const;

  int dimension() const { return n_; }
  const std::vector<TrigMode>& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }
  int max_frequency() const;

  double value(std::span<const double> x) const;
  /// d phi / d z_p for p = 0..n-1.
  std::array<cplx, kMaxComplexDim> dz(std::span<const double> x) const;
  /// Complex Hessian H(p,q) = d^2 phi / dz_p dzbar_q.
  HermitianMatrix ddbar(std::span<const double> x) const;
  /// T(a,b,c) = d^3 phi / dz_a dzbar_b dz_c, flattened as a*n*n + b*n + c.
  std::array<cplx, 27> third(std::span<const double> x) const;

  TrigSeries scaled(double s) const;

 private:
  int n_ = 1;
  std::vector<TrigMode> modes_;
};

}  // namespace malab
