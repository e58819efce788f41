#include "malab/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "malab/errors.hpp"
#include "malab/parallel.hpp"
#include "malab/small_matrix.hpp"

namespace malab {

namespace {

// Poles closer than this many radii are integrated about.
constexpr double kPoleReach = 1.05;

using detail::Node1d;
using detail::SphereNode;

// Gauss-Legendre on [0, 1] via Eigen's symmetric tridiagonal eigensolver
// (Golub-Welsch); any order is available this way.
std::vector<Node1d> gauss_unit(int order) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  std::vector<Node1d> out(order);
  for (int k = 0; k < order; ++k) {
    const double v = eig.eigenvectors()(0, k);
    out[k] = {0.5 * (eig.eigenvalues()(k) + 1.0), v * v};  // weights sum to 1 on [0, 1]
  }
  return out;
}

// w_p = sqrt(t_p) e^{i a_p}; surface measure 2^{1-n} dt dphases.
std::vector<SphereNode> sphere_rule(int n, int moduli, int phases) {
  std::vector<std::pair<std::array<double, kMaxComplexDim>, double>> simplex;
  if (n == 1) {
    simplex.push_back({{1.0, 0.0, 0.0}, 1.0});
  } else if (n == 2) {
    for (const auto& g : gauss_unit(moduli)) simplex.push_back({{g.x, 1.0 - g.x, 0.0}, g.w});
  } else {
    const auto g = gauss_unit(moduli);
    for (const auto& u : g)
      for (const auto& v : g)
        simplex.push_back({{u.x, (1.0 - u.x) * v.x, (1.0 - u.x) * (1.0 - v.x)},
                           u.w * v.w * (1.0 - u.x)});
  }
  const double dphase = 2.0 * std::numbers::pi / phases;
  std::size_t phase_count = 1;
  for (int p = 0; p < n; ++p) phase_count *= phases;
  const double scale = std::pow(0.5, n - 1) * std::pow(dphase, n);

  std::vector<SphereNode> out;
  out.reserve(simplex.size() * phase_count);
  for (const auto& [t, tw] : simplex) {
    for (std::size_t k = 0; k < phase_count; ++k) {
      SphereNode node;
      std::size_t rest = k;
      for (int p = 0; p < n; ++p) {
        const double a = (static_cast<double>(rest % phases) + 0.5) * dphase;
        rest /= phases;
        node.w[p] = std::polar(std::sqrt(t[p]), a);
      }
      node.weight = scale * tw;
      out.push_back(node);
    }
  }
  return out;
}

BallRuleOptions resolve(int n, BallRuleOptions o) {
  if (o.radial <= 0) o.radial = n == 1 ? 128 : (n == 2 ? 32 : 24);
  if (o.moduli <= 0) o.moduli = n == 1 ? 1 : (n == 2 ? 8 : 4);
  if (o.phases <= 0) o.phases = n == 1 ? 512 : (n == 2 ? 16 : 8);
  if (o.phases % 2 != 0) throw InvalidInput("ball rule: phase count must be even");
  return o;
}

// Rescales the Hessian weight families a (conj(y_p) y_q d^2k), b (delta dk)
// and adds c (delta k) so that the rule maps 1 to 0, |y_1|^2 to e_1 e_1^*
// and, for n > 1, |y_2|^2 to a matrix with (1,1) entry 0. The continuous
// integrals satisfy all three identities; the discrete sums need the fit.
void calibrate(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
               const std::vector<std::array<cplx, kMaxComplexDim>>& y, int n) {
  Eigen::Matrix3d lhs = Eigen::Matrix3d::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double m1 = std::norm(y[k][0]);
    const double m2 = n > 1 ? std::norm(y[k][1]) : 0.0;
    lhs.row(0) += Eigen::RowVector3d(a[k] * m1, b[k], c[k]);
    lhs.row(1) += Eigen::RowVector3d(a[k] * m1 * m1, b[k] * m1, c[k] * m1);
    lhs.row(2) += Eigen::RowVector3d(a[k] * m1 * m2, b[k] * m2, c[k] * m2);
  }
  Eigen::Vector3d coef;
  if (n == 1) {
    const Eigen::Matrix2d l2 = lhs.topLeftCorner<2, 2>();
    const Eigen::Vector2d c2 = l2.fullPivLu().solve(Eigen::Vector2d(0.0, 1.0));
    coef << c2(0), c2(1), 0.0;
  } else {
    coef = lhs.fullPivLu().solve(Eigen::Vector3d(0.0, 1.0, 0.0));
  }
  if (!coef.allFinite()) throw NumericFailure("hessian rule: degenerate calibration");
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] *= coef(0);
    b[k] = coef(1) * b[k] + coef(2) * c[k];
  }
}

void accumulate(int n, double value, double a, double b,
                           const std::array<cplx, kMaxComplexDim>& y, HermitianMatrix& h) {
  for (int p = 0; p < n; ++p) {
    h(p, p) += value * (a * std::norm(y[p]) + b);
    for (int q = p + 1; q < n; ++q) h(p, q) += value * a * std::conj(y[p]) * y[q];
  }
}

void symmetrize(HermitianMatrix& h) {
  const int n = static_cast<int>(h.rows());
  for (int p = 0; p < n; ++p) {
    h(p, p) = h(p, p).real();
    for (int q = p + 1; q < n; ++q) h(q, p) = std::conj(h(p, q));
  }
}

}  // namespace

std::vector<detail::SphereNode> sphere_nodes(int n, int moduli, int phases) {
  if (n < 1 || n > kMaxComplexDim || moduli < 1 || phases < 2)
    throw InvalidInput("sphere nodes: bad rule size");
  return sphere_rule(n, moduli, phases);
}

BallRule::BallRule(const Mollifier& mollifier, BallRuleOptions options)
    : n_(mollifier.dimension()), eps_(mollifier.epsilon()), mollifier_(mollifier) {
  options = resolve(n_, options);
  pole_radial_ = gauss_unit(2 * options.radial);
  pole_sphere_ = sphere_rule(n_, options.moduli, 2 * options.phases);
  const auto radial = gauss_unit(options.radial);
  const auto sphere = sphere_rule(n_, options.moduli, options.phases);
  const int d = 2 * n_;
  std::vector<std::array<cplx, kMaxComplexDim>> cy;
  for (const auto& g : radial) {
    const double r = eps_ * g.x;
    const double s = r * r;
    const double rw = eps_ * g.w * std::pow(r, d - 1);
    const double k0 = mollifier.density(s), k1 = mollifier.density_d1(s),
                 k2 = mollifier.density_d2(s);
    for (const auto& node : sphere) {
      std::array<cplx, kMaxComplexDim> y{};
      for (int p = 0; p < n_; ++p) {
        y[p] = r * node.w[p];
        offsets_.push_back(y[p].real());
        offsets_.push_back(y[p].imag());
      }
      cy.push_back(y);
      const double w = rw * node.weight;
      mass_.push_back(w * k0);
      a_.push_back(w * k2);
      b_.push_back(w * k1);
    }
  }
  double total = 0.0;
  for (double m : mass_) total += m;
  for (double& m : mass_) m /= total;
  std::vector<double> c = mass_;
  calibrate(a_, b_, c, cy, n_);
}

double BallRule::mollify(const PointFunction& f, std::span<const double> x) const {
  const int d = 2 * n_;
  std::array<double, kMaxRealDim> p{};
  double sum = 0.0;
  for (std::size_t k = 0; k < mass_.size(); ++k) {
    for (int a = 0; a < d; ++a) p[a] = x[a] + offsets_[k * d + a];
    sum += mass_[k] * f(std::span<const double>(p.data(), d));
  }
  return sum;
}

HermitianMatrix BallRule::hessian_about(const PointFunction& f, std::span<const double> x,
                                       std::span<const double> pole, double distance) const {
  const int d = 2 * n_;
  const double reach = distance + eps_;
  // Subtracting f(x) removes the rule's error on constants.
  double ref = f(x);
  if (!std::isfinite(ref)) ref = 0.0;
  HermitianMatrix h = HermitianMatrix::Zero(n_, n_);
  std::array<double, kMaxRealDim> p{};
  std::array<cplx, kMaxComplexDim> y{};
  for (const auto& g : pole_radial_) {
    // s = reach u^2 softens the s^{2n-1} log s behaviour at the pole.
    const double s = reach * g.x * g.x;
    const double rw = 2.0 * reach * g.x * g.w * std::pow(s, d - 1);
    for (const auto& node : pole_sphere_) {
      double y2 = 0.0;
      for (int q = 0; q < n_; ++q) {
        const cplx w = s * node.w[q];
        p[2 * q] = pole[2 * q] + w.real();
        p[2 * q + 1] = pole[2 * q + 1] + w.imag();
        y[q] = cplx(p[2 * q] - x[2 * q], p[2 * q + 1] - x[2 * q + 1]);
        y2 += std::norm(y[q]);
      }
      if (y2 >= eps_ * eps_) continue;
      const double w = rw * node.weight;
      accumulate(n_, f(std::span<const double>(p.data(), d)) - ref, w * mollifier_.density_d2(y2),
                 w * mollifier_.density_d1(y2), y, h);
    }
  }
  symmetrize(h);
  return h;
}

HermitianMatrix BallRule::hessian(const PointFunction& f, std::span<const double> x,
                                  std::span<const double> poles) const {
  const int d = 2 * n_;
  double ref = f(x);
  if (!std::isfinite(ref)) ref = 0.0;
  // A pole inside or near the support puts a kink or a near-singular
  // stretch in the spheres about x; integrate about the pole instead.
  int inside = -1;
  double pole_distance = 0.0;
  const std::size_t pole_count = poles.size() / static_cast<std::size_t>(d);
  for (std::size_t j = 0; j < pole_count; ++j) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += (poles[j * d + a] - x[a]) * (poles[j * d + a] - x[a]);
    const double r = std::sqrt(r2);
    if (r > 0.0 && r < kPoleReach * eps_) {
      if (inside >= 0) {
        inside = -2;  // several poles: stay centred at x
        break;
      }
      inside = static_cast<int>(j);
      pole_distance = r;
    }
  }
  if (inside >= 0) return hessian_about(f, x, poles.subspan(inside * d, d), pole_distance);
  HermitianMatrix h = HermitianMatrix::Zero(n_, n_);
  std::array<double, kMaxRealDim> p{};
  std::array<cplx, kMaxComplexDim> y{};
  for (std::size_t k = 0; k < mass_.size(); ++k) {
    for (int a = 0; a < d; ++a) p[a] = x[a] + offsets_[k * d + a];
    for (int q = 0; q < n_; ++q) y[q] = cplx(offsets_[k * d + 2 * q], offsets_[k * d + 2 * q + 1]);
    const double v = f(std::span<const double>(p.data(), d)) - ref;
    accumulate(n_, v, a_[k], b_[k], y, h);
  }
  symmetrize(h);
  return h;
}

LatticeStencil::LatticeStencil(const Mollifier& mollifier, const SampledFunction& grid)
    : n_(mollifier.dimension()), eps_(mollifier.epsilon()) {
  if (grid.dimension() != n_) throw InvalidInput("lattice stencil: dimension mismatch");
  const double h = grid.spacing();
  reach_ = static_cast<int>(std::floor(eps_ / h));
  if (reach_ < 2) throw InvalidInput("lattice stencil: radius spans fewer than two grid steps");
  const int d = 2 * n_;
  const int width = 2 * reach_ + 1;
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= width;
  const double cell = std::pow(h, d);
  std::vector<double> c;
  for (std::size_t k = 0; k < count; ++k) {
    std::array<int, kMaxRealDim> off{};
    std::size_t rest = k;
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      off[a] = static_cast<int>(rest % width) - reach_;
      rest /= width;
      s += (off[a] * h) * (off[a] * h);
    }
    if (s >= eps_ * eps_) continue;
    std::array<cplx, kMaxComplexDim> y{};
    for (int p = 0; p < n_; ++p) y[p] = cplx(off[2 * p] * h, off[2 * p + 1] * h);
    offsets_.push_back(off);
    complex_offsets_.push_back(y);
    a_.push_back(cell * mollifier.density_d2(s));
    b_.push_back(cell * mollifier.density_d1(s));
    c.push_back(cell * mollifier.density(s));
  }
  calibrate(a_, b_, c, complex_offsets_, n_);
}

HermitianMatrix LatticeStencil::hessian(const SampledFunction& f, std::size_t node) const {
  const int d = 2 * n_;
  const auto base = f.index_of(node);
  auto value_at = [&](std::size_t flat) {
    const double v = f[flat];
    return std::isfinite(v) ? v : f.cell_average(flat);
  };
  const double ref = value_at(node);
  HermitianMatrix h = HermitianMatrix::Zero(n_, n_);
  std::array<int, kMaxRealDim> idx{};
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    for (int a = 0; a < d; ++a) idx[a] = base[a] + offsets_[k][a];
    const long flat = f.flat_index(std::span<const int>(idx.data(), d));
    if (flat < 0) throw InvalidInput("lattice stencil: stencil leaves the grid");
    accumulate(n_, value_at(static_cast<std::size_t>(flat)) - ref, a_[k], b_[k],
               complex_offsets_[k], h);
  }
  symmetrize(h);
  return h;
}

SampledFunction smooth(const SampledFunction& phi, const Mollifier& mollifier) {
  if (mollifier.dimension() != phi.dimension())
    throw InvalidInput("smooth: mollifier and function dimensions differ");
  const int n = phi.dimension();
  const int d = 2 * n;
  const double h = phi.spacing();
  const double eps = mollifier.epsilon();
  const int reach = static_cast<int>(std::floor(eps / h));

  std::vector<std::array<int, kMaxRealDim>> offsets;
  std::vector<double> weights;
  {
    const int width = 2 * reach + 1;
    std::size_t count = 1;
    for (int a = 0; a < d; ++a) count *= width;
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      std::array<int, kMaxRealDim> off{};
      std::size_t rest = k;
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        off[a] = static_cast<int>(rest % width) - reach;
        rest /= width;
        s += (off[a] * h) * (off[a] * h);
      }
      const double w = mollifier.density(s);
      if (w <= 0.0) continue;
      offsets.push_back(off);
      weights.push_back(w);
      total += w;
    }
    for (double& w : weights) w /= total;
  }

  int m_out = phi.points_per_axis();
  int shift = 0;
  double r_out = phi.radius();
  if (phi.domain() == DomainKind::Ball) {
    // Keep the parity of the node count so the output nodes are input nodes.
    const bool odd = phi.points_per_axis() % 2 == 1;
    const double reach_out = (phi.radius() - eps) / h;
    const int half = static_cast<int>(std::floor(reach_out + (odd ? 1e-9 : 0.5 + 1e-9)));
    if (half < 1 || reach_out <= 0.0) {
      std::ostringstream msg;
      msg << "smooth: eps = " << eps << " leaves no valid region in the ball of radius "
          << phi.radius();
      throw InvalidInput(msg.str());
    }
    m_out = odd ? 2 * half + 1 : 2 * half;
    shift = (phi.points_per_axis() - m_out) / 2;
    r_out = half * h;
  }

  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= m_out;
  std::vector<double> out(count);
  std::vector<double> cache(phi.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t s : phi.singular_nodes()) cache[s] = phi.cell_average(s);
  auto value_at = [&](std::size_t flat) {
    return phi.is_singular(flat) ? cache[flat] : phi[flat];
  };

  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxRealDim> idx{}, base{};
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t rest = i;
      for (int a = d - 1; a >= 0; --a) {
        base[a] = static_cast<int>(rest % m_out) + shift;
        rest /= m_out;
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < offsets.size(); ++k) {
        for (int a = 0; a < d; ++a) idx[a] = base[a] - offsets[k][a];
        sum += weights[k] *
               value_at(static_cast<std::size_t>(phi.flat_index(std::span<const int>(idx.data(), d))));
      }
      out[i] = sum;
    }
  });

  PointFunction closed;
  if (phi.has_closed_form() && phi.singular_nodes().empty()) {
    std::vector<double> shifts;
    for (const auto& off : offsets)
      for (int a = 0; a < d; ++a) shifts.push_back(off[a] * h);
    closed = [inner = phi.closed_form(), shifts, weights, d](std::span<const double> x) {
      std::array<double, kMaxRealDim> p{};
      double sum = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        for (int a = 0; a < d; ++a) p[a] = x[a] - shifts[k * d + a];
        sum += weights[k] * inner(std::span<const double>(p.data(), d));
      }
      return sum;
    };
  }
  return SampledFunction(n, phi.domain(), r_out, m_out, std::move(out), std::move(closed));
}

std::vector<std::array<cplx, kMaxComplexDim>> test_form_directions(int n) {
  std::vector<std::array<cplx, kMaxComplexDim>> out;
  for (int p = 0; p < n; ++p) {
    std::array<cplx, kMaxComplexDim> v{};
    v[p] = 1.0;
    out.push_back(v);
  }
  const double s = 1.0 / std::sqrt(2.0);
  const std::array<cplx, 4> units = {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)};
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      for (const cplx u : units) {
        std::array<cplx, kMaxComplexDim> v{};
        v[p] = s;
        v[q] = s * u;
        out.push_back(v);
      }
  return out;
}

namespace {

int default_points(int n) { return n == 1 ? 200 : (n == 2 ? 48 : 8); }

// Evaluation nodes for one radius: valid nodes on a sub-lattice of stride s,
// with s the smallest stride keeping the count within budget. The
// distribution sense uses the sub-lattice shifted by half a stride.
std::vector<std::size_t> select_nodes(const SampledFunction& phi, double eps, int budget,
                                      bool shifted) {
  const int d = phi.real_dimension();
  const int m = phi.points_per_axis();
  const int centre = phi.domain() == DomainKind::Ball ? (m - 1) / 2 : 0;
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!phi.in_domain(i)) continue;
    if (phi.domain() == DomainKind::Ball) {
      const auto x = phi.point(i);
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
      if (std::sqrt(r2) + eps > phi.radius() * (1.0 + 1e-12)) continue;
    }
    valid.push_back(i);
  }
  for (int stride = 1; stride <= m; ++stride) {
    const int offset = shifted ? stride / 2 : 0;
    std::vector<std::size_t> picked;
    for (std::size_t i : valid) {
      const auto idx = phi.index_of(i);
      bool keep = true;
      for (int a = 0; a < d && keep; ++a) {
        int r = (idx[a] - centre - offset) % stride;
        keep = r == 0;
      }
      if (keep) picked.push_back(i);
    }
    if (!picked.empty() && static_cast<int>(picked.size()) <= budget) return picked;
    if (picked.empty() && stride > 1) {
      // The shifted lattice missed the region; fall back to the unshifted one.
      if (shifted) return select_nodes(phi, eps, budget, false);
      break;
    }
  }
  return valid.size() > static_cast<std::size_t>(budget)
             ? std::vector<std::size_t>(valid.begin(), valid.begin() + budget)
             : valid;
}

}  // namespace

PositivityResult positivity(const SampledFunction& phi, PositivitySense sense,
                            std::span<const double> epsilon_ladder,
                            const PositivityOptions& options) {
  if (epsilon_ladder.empty()) throw InvalidInput("positivity: empty radius ladder");
  const int n = phi.dimension();
  const int d = 2 * n;
  const int budget = options.max_points > 0 ? options.max_points : default_points(n);
  const auto directions = test_form_directions(n);

  PointFunction f;
  if (phi.has_closed_form()) {
    if (phi.domain() == DomainKind::Torus) {
      f = [g = phi.closed_form(), d](std::span<const double> x) {
        std::array<double, kMaxRealDim> w{};
        for (int a = 0; a < d; ++a) w[a] = x[a] - std::floor(x[a]);
        return g(std::span<const double>(w.data(), d));
      };
    } else {
      f = phi.closed_form();
    }
  }

  PositivityResult result;
  result.margin = std::numeric_limits<double>::infinity();
  for (double eps : epsilon_ladder) {
    const Mollifier mollifier(n, eps);
    const auto nodes = select_nodes(phi, eps, budget, sense == PositivitySense::Distribution);
    if (nodes.empty()) {
      std::ostringstream msg;
      msg << "positivity: empty valid region for eps = " << eps;
      throw InvalidInput(msg.str());
    }
    std::optional<BallRule> rule;
    std::optional<LatticeStencil> stencil;
    if (f)
      rule.emplace(mollifier, options.rule);
    else
      stencil.emplace(mollifier, phi);

    std::vector<double> values(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const auto x = phi.point(nodes[k]);
        // Poles as seen from x: nearest periodic image on the torus.
        std::vector<double> poles;
        for (std::size_t s : phi.singular_nodes()) {
          const auto y = phi.point(s);
          for (int a = 0; a < d; ++a) {
            double delta = y[a] - x[a];
            if (phi.domain() == DomainKind::Torus) delta -= std::nearbyint(delta);
            poles.push_back(x[a] + delta);
          }
        }
        const HermitianMatrix h =
            rule ? rule->hessian(f, std::span<const double>(x.data(), d), poles)
                 : stencil->hessian(phi, nodes[k]);
        if (sense == PositivitySense::Smoothing) {
          values[k] = hermitian_eigen(h, false).values(0);
        } else {
          double worst = std::numeric_limits<double>::infinity();
          for (const auto& v : directions) {
            cplx s = 0.0;
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q) s += std::conj(v[p]) * h(p, q) * v[q];
            worst = std::min(worst, s.real());
          }
          values[k] = worst;
        }
      }
    });
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (values[k] < result.margin) {
        result.margin = values[k];
        result.worst_point = phi.point(nodes[k]);
        result.worst_epsilon = eps;
      }
    }
    result.evaluations += nodes.size();
  }
  return result;
}

}  // namespace malab
