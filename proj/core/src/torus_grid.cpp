#include "malab/torus_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "malab/errors.hpp"
#include "malab/parallel.hpp"

namespace malab {

namespace {
constexpr double kPi = std::numbers::pi;
std::mutex g_fftw_planner_mutex;
}  // namespace

// Per-axis wavenumbers for one flat frequency index. `full` keeps the
// Nyquist value; `odd` zeroes it (first-derivative factors of the Nyquist
// mode vanish at grid points).
struct Wavenumbers {
  std::array<double, kMaxRealDim> full{};
  std::array<double, kMaxRealDim> odd{};
};


/// Forward/backward complex transforms over the full 2n-dimensional grid.
/// Plans are created once per grid; execution uses the new-array interface
/// so concurrent transforms on distinct buffers are safe.
class SpectralPlan {
 public:
  SpectralPlan(int real_dims, int m) : size_(1) {
    std::vector<int> dims(real_dims, m);
    for (int d : dims) size_ *= static_cast<std::size_t>(d);
    waves_.resize(size_);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      std::size_t rest = flat;
      for (int a = real_dims - 1; a >= 0; --a) {
        const int i = static_cast<int>(rest % static_cast<std::size_t>(m));
        rest /= static_cast<std::size_t>(m);
        const int k = i <= m / 2 ? i : i - m;
        waves_[flat].full[a] = k;
        waves_[flat].odd[a] = 2 * i == m ? 0.0 : k;
      }
    }
    std::vector<cplx> scratch(size_);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(g_fftw_planner_mutex);
    forward_ = fftw_plan_dft(real_dims, dims.data(), buf, buf, FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft(real_dims, dims.data(), buf, buf, FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~SpectralPlan() {
    std::lock_guard lock(g_fftw_planner_mutex);
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  std::vector<cplx> forward(std::span<const double> values) const {
    std::vector<cplx> data(values.begin(), values.end());
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(forward_, buf, buf);
    return data;
  }

  // Unnormalized inverse, then scaled by 1/size.
  void backward_inplace(std::vector<cplx>& data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(backward_, buf, buf);
    const double s = 1.0 / static_cast<double>(size_);
    for (auto& v : data) v *= s;
  }

  const Wavenumbers& wavenumbers(std::size_t flat) const { return waves_[flat]; }

 private:
  std::size_t size_;
  std::vector<Wavenumbers> waves_;
  fftw_plan forward_;
  fftw_plan backward_;
};

TorusGrid::TorusGrid(int n, int points_per_axis) : n_(n), m_(points_per_axis), size_(1) {
  if (n < 1 || n > kMaxComplexDim)
    throw InvalidInput("torus grid: complex dimension must be 1, 2 or 3 (got " +
                       std::to_string(n) + ")");
  if (points_per_axis < 8 || points_per_axis % 2 != 0)
    throw InvalidInput("torus grid: points_per_axis must be even and >= 8 (got " +
                       std::to_string(points_per_axis) + ")");
  for (int a = 0; a < 2 * n; ++a) size_ *= static_cast<std::size_t>(m_);
  plan_ = std::make_shared<const SpectralPlan>(2 * n, m_);
}

TorusGrid make_grid(int n, int points_per_axis) { return TorusGrid(n, points_per_axis); }

std::array<int, kMaxRealDim> TorusGrid::index_of(std::size_t flat) const {
  std::array<int, kMaxRealDim> idx{};
  for (int a = 2 * n_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(m_));
    flat /= static_cast<std::size_t>(m_);
  }
  return idx;
}

std::size_t TorusGrid::flat_index(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int a = 0; a < 2 * n_; ++a) {
    const int i = ((index[a] % m_) + m_) % m_;
    flat = flat * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i);
  }
  return flat;
}

std::array<double, kMaxRealDim> TorusGrid::point(std::size_t flat) const {
  const auto idx = index_of(flat);
  std::array<double, kMaxRealDim> x{};
  for (int a = 0; a < 2 * n_; ++a) x[a] = idx[a] * spacing();
  return x;
}

PotentialField::PotentialField(const TorusGrid& g, std::vector<double> v, Normalization tag)
    : grid(g), values(std::move(v)), normalization(tag) {
  if (values.size() != grid.size()) throw InvalidInput("potential field: size mismatch with grid");
}

PotentialField PotentialField::sample(const TorusGrid& g, const TrigSeries& series) {
  if (!series.empty() && series.dimension() != g.dimension())
    throw InvalidInput("potential field: series dimension does not match grid");
  return sample(g, [&](std::span<const double> x) { return series.value(x); });
}

PotentialField PotentialField::sample(const TorusGrid& g,
                                      const std::function<double(std::span<const double>)>& f) {
  PotentialField out(g);
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto x = g.point(i);
      out.values[i] = f(std::span<const double>(x.data(), g.real_dimension()));
    }
  });
  return out;
}

HermitianFormField::HermitianFormField(const TorusGrid& g)
    : grid(g), matrices(g.size(), HermitianMatrix::Zero(g.dimension(), g.dimension())) {}

HermitianFormField HermitianFormField::constant(const TorusGrid& g, const HermitianMatrix& m) {
  if (m.rows() != g.dimension() || m.cols() != g.dimension())
    throw InvalidInput("form field: matrix size does not match grid dimension");
  HermitianFormField out(g);
  std::fill(out.matrices.begin(), out.matrices.end(), m);
  return out;
}

HermitianFormField HermitianFormField::identity(const TorusGrid& g) {
  auto out = constant(g, HermitianMatrix::Identity(g.dimension(), g.dimension()));
  out.positive = true;
  return out;
}

HermitianFormField HermitianFormField::operator+(const HermitianFormField& other) const {
  if (!(grid == other.grid)) throw InvalidInput("form field: grid mismatch");
  HermitianFormField out(grid);
  for (std::size_t i = 0; i < size(); ++i) out.matrices[i] = matrices[i] + other.matrices[i];
  return out;
}

double HermitianFormField::hermitian_defect() const {
  double worst = 0.0;
  for (const auto& m : matrices) {
    const double scale = std::max(1.0, m.norm());
    worst = std::max(worst, (m - m.adjoint()).norm() / scale);
  }
  return worst;
}

namespace {

const Wavenumbers& wavenumbers(const TorusGrid& g, std::size_t flat) {
  return g.plan().wavenumbers(flat);
}

// Symbol of d^2/dz_p dzbar_q.
cplx ddbar_symbol(const Wavenumbers& w, int p, int q) {
  if (p == q) {
    const double kx = w.full[2 * p];
    const double ky = w.full[2 * p + 1];
    return {-kPi * kPi * (kx * kx + ky * ky), 0.0};
  }
  const cplx a(w.odd[2 * p], -w.odd[2 * p + 1]);
  const cplx b(w.odd[2 * q], w.odd[2 * q + 1]);
  return -kPi * kPi * a * b;
}

template <typename Symbol>
std::vector<cplx> filtered(const TorusGrid& g, const std::vector<cplx>& spectrum, Symbol&& symbol) {
  std::vector<cplx> out(spectrum.size());
  parallel_for(spectrum.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = spectrum[i] * symbol(wavenumbers(g, i));
  });
  g.plan().backward_inplace(out);
  return out;
}

}  // namespace

std::vector<std::vector<cplx>> ddbar_upper(const PotentialField& phi) {
  const TorusGrid& g = phi.grid;
  const int n = g.dimension();
  for (double v : phi.values)
    if (!std::isfinite(v)) throw InvalidInput("ddbar: potential has non-finite values");
  const auto spectrum = g.plan().forward(phi.values);
  std::vector<std::vector<cplx>> out;
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      out.push_back(filtered(g, spectrum, [&](const Wavenumbers& w) { return ddbar_symbol(w, p, q); }));
      if (p == q)
        for (auto& v : out.back()) v = cplx(v.real(), 0.0);
    }
  return out;
}

HermitianFormField ddbar(const PotentialField& phi) {
  const TorusGrid& g = phi.grid;
  const int n = g.dimension();
  const auto upper = ddbar_upper(phi);
  HermitianFormField out(g);
  std::size_t slot = 0;
  for (int p = 0; p < n; ++p) {
    for (int q = p; q < n; ++q, ++slot) {
      const auto& entry = upper[slot];
      for (std::size_t i = 0; i < g.size(); ++i) {
        out.matrices[i](p, q) = entry[i];
        if (p != q) out.matrices[i](q, p) = std::conj(entry[i]);
      }
    }
  }
  return out;
}

std::vector<std::vector<cplx>> dz(const PotentialField& phi) {
  const TorusGrid& g = phi.grid;
  const auto spectrum = g.plan().forward(phi.values);
  std::vector<std::vector<cplx>> out;
  for (int p = 0; p < g.dimension(); ++p) {
    out.push_back(filtered(g, spectrum, [&](const Wavenumbers& w) {
      return cplx(0.0, kPi) * cplx(w.odd[2 * p], -w.odd[2 * p + 1]);
    }));
  }
  return out;
}

std::vector<std::vector<cplx>> third_derivatives(const PotentialField& phi) {
  const TorusGrid& g = phi.grid;
  const int n = g.dimension();
  const auto spectrum = g.plan().forward(phi.values);
  std::vector<std::vector<cplx>> out(static_cast<std::size_t>(n * n * n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        // Symmetric in (a, c); compute once.
        if (c < a) {
          out[(a * n + b) * n + c] = out[(c * n + b) * n + a];
          continue;
        }
        out[(a * n + b) * n + c] = filtered(g, spectrum, [&](const Wavenumbers& w) {
          const cplx ia(w.odd[2 * a], -w.odd[2 * a + 1]);
          const cplx ib(w.odd[2 * b], w.odd[2 * b + 1]);
          const cplx ic(w.odd[2 * c], -w.odd[2 * c + 1]);
          return std::pow(cplx(0.0, kPi), 3) * ia * ib * ic;
        });
      }
  return out;
}

double integrate(std::span<const double> density, const TorusGrid& grid) {
  if (density.size() != grid.size()) throw InvalidInput("integrate: size mismatch with grid");
  // Serial sum in index order keeps the result independent of the thread count.
  long double s = 0.0L;
  for (double v : density) s += v;
  return static_cast<double>(s) * grid.weight();
}

double integrate(const PotentialField& density) { return integrate(density.values, density.grid); }

double mean(const PotentialField& f) { return integrate(f); }

double sup(const PotentialField& f) { return *std::max_element(f.values.begin(), f.values.end()); }

double inf(const PotentialField& f) { return *std::min_element(f.values.begin(), f.values.end()); }

PotentialField subtract_mean(const PotentialField& f) {
  PotentialField out = f;
  const double m = mean(f);
  for (auto& v : out.values) v -= m;
  out.normalization = Normalization::MeanZero;
  return out;
}

FlatOperatorInverse::FlatOperatorInverse(const TorusGrid& grid, const HermitianMatrix& coeff,
                                         double orientation)
    : grid_(grid), inverse_symbol_(grid.size()) {
  const int n = grid.dimension();
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      if (i == 0) {
        inverse_symbol_[i] = 1.0;
        continue;
      }
      const auto w = wavenumbers(grid, i);
      cplx s = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) s += coeff(q, p) * ddbar_symbol(w, p, q);
      inverse_symbol_[i] = 1.0 / (orientation * s.real());
    }
  });
}

std::vector<double> FlatOperatorInverse::apply(std::span<const double> rhs) const {
  auto spectrum = grid_.plan().forward(rhs);
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= inverse_symbol_[i];
  grid_.plan().backward_inplace(spectrum);
  std::vector<double> out(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) out[i] = spectrum[i].real();
  return out;
}

}  // namespace malab
