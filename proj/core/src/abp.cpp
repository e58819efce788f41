#include "malab/abp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "malab/errors.hpp"
#include "malab/parallel.hpp"
#include "malab/positivity.hpp"

namespace malab {

namespace {

struct Derivatives {
  bool ok = false;
  std::array<double, kMaxRealDim> grad{};
};

long neighbour(const SampledFunction& v, std::size_t node, int a, int step) {
  auto idx = v.index_of(node);
  idx[a] += step;
  const long flat = v.flat_index(std::span<const int>(idx.data(), v.real_dimension()));
  if (flat < 0 || !v.in_domain(static_cast<std::size_t>(flat))) return -1;
  return flat;
}

Derivatives gradient(const SampledFunction& v, std::size_t node) {
  Derivatives out;
  const double h = v.spacing();
  for (int a = 0; a < v.real_dimension(); ++a) {
    const long up = neighbour(v, node, a, 1), down = neighbour(v, node, a, -1);
    if (up < 0 || down < 0) return out;
    out.grad[a] = (v[static_cast<std::size_t>(up)] - v[static_cast<std::size_t>(down)]) / (2 * h);
  }
  out.ok = true;
  return out;
}

// Real Hessian by central differences; nan entries if the stencil leaves the ball.
Eigen::MatrixXd real_hessian(const SampledFunction& v, std::size_t node) {
  const int m = v.real_dimension();
  const double h = v.spacing();
  Eigen::MatrixXd hess(m, m);
  auto at = [&](int a, int da, int b, int db) {
    auto idx = v.index_of(node);
    idx[a] += da;
    idx[b] += db;
    const long flat = v.flat_index(std::span<const int>(idx.data(), m));
    if (flat < 0 || !v.in_domain(static_cast<std::size_t>(flat)))
      return std::numeric_limits<double>::quiet_NaN();
    return v[static_cast<std::size_t>(flat)];
  };
  for (int a = 0; a < m; ++a) {
    hess(a, a) = (at(a, 1, a, 0) - 2.0 * v[node] + at(a, -1, a, 0)) / (h * h);
    for (int b = a + 1; b < m; ++b) {
      hess(a, b) = (at(a, 1, b, 1) - at(a, 1, b, -1) - at(a, -1, b, 1) + at(a, -1, b, -1)) /
                   (4 * h * h);
      hess(b, a) = hess(a, b);
    }
  }
  return hess;
}

}  // namespace

double abp_boundary_infimum(const SampledFunction& v) {
  const int n = v.dimension();
  const int m = 2 * n;
  const double R = v.radius();
  if (v.has_closed_form()) {
    const int moduli = n == 1 ? 1 : (n == 2 ? 12 : 6);
    const int phases = n == 1 ? 2048 : (n == 2 ? 32 : 12);
    double best = std::numeric_limits<double>::infinity();
    std::array<double, kMaxRealDim> p{};
    for (const auto& node : sphere_nodes(n, moduli, phases)) {
      for (int q = 0; q < n; ++q) {
        p[2 * q] = R * node.w[q].real();
        p[2 * q + 1] = R * node.w[q].imag();
      }
      best = std::min(best, v.closed_form()(std::span<const double>(p.data(), m)));
    }
    return best;
  }
  // Outermost in-ball nodes, pushed to the sphere along the inward radial difference.
  const double h = v.spacing();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v.in_domain(i)) continue;
    const auto x = v.point(i);
    double r = 0.0;
    for (int a = 0; a < m; ++a) r += x[a] * x[a];
    r = std::sqrt(r);
    if (r < R - 1.5 * h || r == 0.0) continue;
    std::array<double, kMaxRealDim> inner{};
    for (int a = 0; a < m; ++a) inner[a] = x[a] * (1.0 - h / r);
    const double slope = (v[i] - v.evaluate(std::span<const double>(inner.data(), m))) / h;
    best = std::min(best, v[i] + slope * (R - r));
  }
  return best;
}

AbpResult abp_verify(const SampledFunction& v, double epsilon) {
  if (v.domain() != DomainKind::Ball) throw InvalidInput("abp: v must live on a ball");
  if (!(epsilon > 0.0)) throw InvalidInput("abp: eps must be positive");
  if (!v.singular_nodes().empty()) throw InvalidInput("abp: v must be finite");
  const int m = v.real_dimension();
  const double h = v.spacing();
  const double cell = std::pow(h, m);

  AbpResult out;
  const std::array<double, kMaxRealDim> origin{};
  out.center_value = v.evaluate(std::span<const double>(origin.data(), m));
  out.boundary_inf = abp_boundary_infimum(v);
  if (out.center_value + epsilon > out.boundary_inf + 1e-9 * (1.0 + std::abs(out.boundary_inf))) {
    std::ostringstream msg;
    msg << "abp: precondition v(0) + eps <= inf over the boundary violated (v(0) = "
        << out.center_value << ", eps = " << epsilon << ", inf = " << out.boundary_inf << ")";
    throw InvalidInput(msg.str());
  }

  std::vector<std::size_t> domain;
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v.in_domain(i)) {
      domain.push_back(i);
      vmin = std::min(vmin, v[i]);
      vmax = std::max(vmax, v[i]);
    }
  const double tol = 1e-10 * (1.0 + vmax - vmin);

  std::vector<std::size_t> candidates;
  std::vector<Derivatives> grads;
  for (std::size_t i : domain) {
    const Derivatives g = gradient(v, i);
    if (!g.ok) continue;
    double norm = 0.0;
    for (int a = 0; a < m; ++a) norm += g.grad[a] * g.grad[a];
    if (std::sqrt(norm) < 0.5 * epsilon) {
      candidates.push_back(i);
      grads.push_back(g);
    }
  }
  out.candidates = candidates.size();

  std::vector<std::array<double, kMaxRealDim>> points(domain.size());
  for (std::size_t k = 0; k < domain.size(); ++k) points[k] = v.point(domain[k]);

  std::vector<char> contact(candidates.size(), 0);
  std::vector<double> dets(candidates.size(), 0.0);
  parallel_for(candidates.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const std::size_t node = candidates[c];
      const auto x = v.point(node);
      const double vx = v[node];
      bool supporting = true;
      for (std::size_t k = 0; k < domain.size() && supporting; ++k) {
        double plane = vx;
        for (int a = 0; a < m; ++a) plane += grads[c].grad[a] * (points[k][a] - x[a]);
        supporting = v[domain[k]] >= plane - tol;
      }
      if (!supporting) continue;
      contact[c] = 1;
      const Eigen::MatrixXd hess = real_hessian(v, node);
      if (!hess.allFinite()) continue;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess, Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < 0.0) continue;
      dets[c] = eig.eigenvalues().prod();
    }
  });
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!contact[c]) continue;
    ++out.contact_points;
    out.contact_measure += cell;
    out.integral += dets[c] * cell;
  }
  out.ratio = out.integral / std::pow(epsilon, m);
  return out;
}

}  // namespace malab
