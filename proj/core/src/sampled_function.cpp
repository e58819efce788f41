#include "malab/sampled_function.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include "malab/errors.hpp"

namespace malab {

namespace {

std::size_t power(int base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

// Four-point Gauss-Legendre nodes and weights on [-1/2, 1/2], weights summing to 1.
constexpr std::array<double, 4> kCellNodes = {-0.4305681557970263, -0.1699905217924281,
                                              0.1699905217924281, 0.4305681557970263};
constexpr std::array<double, 4> kCellWeights = {0.1739274225687269, 0.3260725774312731,
                                                0.3260725774312731, 0.1739274225687269};

// Ball grids: odd counts put nodes on the cube corners and the origin; even
// counts use cell centres, so the origin sits between nodes.
struct BallAxis {
  double h, origin;
};
BallAxis ball_axis(double radius, int m) {
  if (m % 2 == 1) return {2.0 * radius / (m - 1), -radius};
  const double h = 2.0 * radius / m;
  return {h, -radius + 0.5 * h};
}

}  // namespace

SampledFunction::SampledFunction(int n, DomainKind domain, double radius, int points_per_axis,
                                 std::vector<double> values, PointFunction closed_form)
    : n_(n),
      domain_(domain),
      radius_(radius),
      m_(points_per_axis),
      values_(std::move(values)),
      closed_form_(std::move(closed_form)) {
  if (n < 1 || n > kMaxComplexDim) throw InvalidInput("sampled function: n must be 1, 2 or 3");
  if (domain == DomainKind::Ball) {
    if (!(radius > 0.0)) throw InvalidInput("sampled function: ball radius must be positive");
    if (m_ < 2) throw InvalidInput("sampled function: a ball grid needs >= 2 nodes per axis");
    const BallAxis axis = ball_axis(radius, m_);
    h_ = axis.h;
    origin_ = axis.origin;
  } else {
    if (m_ < 4) throw InvalidInput("sampled function: torus grid needs >= 4 nodes per axis");
    radius_ = 0.5;
    h_ = 1.0 / m_;
    origin_ = 0.0;
  }
  if (values_.size() != power(m_, 2 * n_))
    throw InvalidInput("sampled function: value count does not match the grid");

  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (std::isfinite(v)) continue;
    if (v == -std::numeric_limits<double>::infinity() && in_domain(i)) {
      singular_.push_back(i);
      continue;
    }
    if (!in_domain(i) && domain_ == DomainKind::Ball) continue;
    std::ostringstream msg;
    msg << "sampled function: non-finite value " << v << " at node " << i;
    throw InvalidInput(msg.str());
  }
  // Singular nodes must be isolated: no two within one grid step of each other.
  for (std::size_t a = 0; a < singular_.size(); ++a) {
    const auto ia = index_of(singular_[a]);
    for (std::size_t b = a + 1; b < singular_.size(); ++b) {
      const auto ib = index_of(singular_[b]);
      bool adjacent = true;
      for (int k = 0; k < 2 * n_ && adjacent; ++k) {
        int d = std::abs(ia[k] - ib[k]);
        if (domain_ == DomainKind::Torus) d = std::min(d, m_ - d);
        adjacent = d <= 1;
      }
      if (adjacent) {
        std::ostringstream msg;
        msg << "sampled function: singular nodes " << singular_[a] << " and " << singular_[b]
            << " are adjacent; only isolated poles are supported";
        throw InvalidInput(msg.str());
      }
    }
  }
}

SampledFunction SampledFunction::on_ball(int n, double radius, int points_per_axis,
                                         PointFunction f) {
  if (!f) throw InvalidInput("sampled function: empty closed form");
  if (points_per_axis < 2 || !(radius > 0.0) || n < 1 || n > kMaxComplexDim)
    throw InvalidInput("sampled function: bad ball grid");
  const std::size_t count = power(points_per_axis, 2 * n);
  const BallAxis axis = ball_axis(radius, points_per_axis);
  std::vector<double> values(count);
  std::array<double, kMaxRealDim> x{};
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rest = i;
    for (int a = 2 * n - 1; a >= 0; --a) {
      x[a] = axis.origin + axis.h * static_cast<double>(rest % points_per_axis);
      rest /= points_per_axis;
    }
    values[i] = f(std::span<const double>(x.data(), 2 * n));
  }
  return SampledFunction(n, DomainKind::Ball, radius, points_per_axis, std::move(values),
                         std::move(f));
}

SampledFunction SampledFunction::on_torus(int n, int points_per_axis, PointFunction f) {
  if (!f) throw InvalidInput("sampled function: empty closed form");
  if (points_per_axis < 4) throw InvalidInput("sampled function: torus grid needs >= 4 nodes");
  const std::size_t count = power(points_per_axis, 2 * n);
  std::vector<double> values(count);
  std::array<double, kMaxRealDim> x{};
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rest = i;
    for (int a = 2 * n - 1; a >= 0; --a) {
      x[a] = static_cast<double>(rest % points_per_axis) / points_per_axis;
      rest /= points_per_axis;
    }
    values[i] = f(std::span<const double>(x.data(), 2 * n));
  }
  return SampledFunction(n, DomainKind::Torus, 0.5, points_per_axis, std::move(values),
                         std::move(f));
}

std::array<int, kMaxRealDim> SampledFunction::index_of(std::size_t flat) const {
  std::array<int, kMaxRealDim> idx{};
  for (int a = 2 * n_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % m_);
    flat /= m_;
  }
  return idx;
}

long SampledFunction::flat_index(std::span<const int> index) const {
  long flat = 0;
  for (int a = 0; a < 2 * n_; ++a) {
    int i = index[a];
    if (domain_ == DomainKind::Torus) {
      i %= m_;
      if (i < 0) i += m_;
    } else if (i < 0 || i >= m_) {
      return -1;
    }
    flat = flat * m_ + i;
  }
  return flat;
}

std::array<double, kMaxRealDim> SampledFunction::point(std::size_t flat) const {
  const auto idx = index_of(flat);
  std::array<double, kMaxRealDim> x{};
  for (int a = 0; a < 2 * n_; ++a) x[a] = origin_ + h_ * idx[a];
  return x;
}

std::size_t SampledFunction::nearest_node(std::span<const double> x) const {
  std::array<int, kMaxRealDim> idx{};
  for (int a = 0; a < 2 * n_; ++a) {
    int i = static_cast<int>(std::lround((x[a] - origin_) / h_));
    if (domain_ == DomainKind::Ball) i = std::clamp(i, 0, m_ - 1);
    idx[a] = i;
  }
  return static_cast<std::size_t>(flat_index(std::span<const int>(idx.data(), 2 * n_)));
}

bool SampledFunction::in_domain(std::size_t flat) const {
  if (domain_ == DomainKind::Torus) return true;
  const auto x = point(flat);
  double r2 = 0.0;
  for (int a = 0; a < 2 * n_; ++a) r2 += x[a] * x[a];
  return r2 <= radius_ * radius_ * (1.0 + 1e-12);
}

double SampledFunction::evaluate(std::span<const double> x) const {
  if (closed_form_) return closed_form_(x);
  const int d = 2 * n_;
  std::array<int, kMaxRealDim> base{};
  std::array<double, kMaxRealDim> frac{};
  for (int a = 0; a < d; ++a) {
    double u = (x[a] - origin_) / h_;
    if (domain_ == DomainKind::Ball) u = std::clamp(u, 0.0, static_cast<double>(m_ - 1));
    double fl = std::floor(u);
    if (domain_ == DomainKind::Ball && fl >= m_ - 1) fl = m_ - 2;
    base[a] = static_cast<int>(fl);
    frac[a] = u - fl;
  }
  double sum = 0.0;
  std::array<int, kMaxRealDim> idx{};
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    const long flat = flat_index(std::span<const int>(idx.data(), d));
    sum += w * values_[static_cast<std::size_t>(flat)];
  }
  return sum;
}

double SampledFunction::cell_average(std::size_t flat) const {
  if (!closed_form_)
    throw InvalidInput("sampled function: a singular node needs a closed form to average over");
  const int d = 2 * n_;
  const auto centre = point(flat);
  const std::size_t count = power(4, d);
  std::array<double, kMaxRealDim> x{};
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rest = k;
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const int j = static_cast<int>(rest % 4);
      rest /= 4;
      x[a] = centre[a] + h_ * kCellNodes[j];
      w *= kCellWeights[j];
    }
    sum += w * closed_form_(std::span<const double>(x.data(), d));
  }
  return sum;
}

bool SampledFunction::same_grid(const SampledFunction& other) const {
  return n_ == other.n_ && domain_ == other.domain_ && m_ == other.m_ &&
         (domain_ == DomainKind::Torus || radius_ == other.radius_);
}

double displacement_norm(const SampledFunction& f, std::span<const double> x,
                         std::span<const double> y) {
  double s = 0.0;
  for (int a = 0; a < f.real_dimension(); ++a) {
    double d = x[a] - y[a];
    if (f.domain() == DomainKind::Torus) d -= std::nearbyint(d);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace malab
