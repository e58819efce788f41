#include "malab/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "malab/errors.hpp"
#include "malab/parallel.hpp"
#include "malab/regularized_max.hpp"
#include "malab/small_matrix.hpp"

namespace malab {

namespace {

struct Chart {
  std::array<double, kMaxRealDim> local{};  // x_j + minimal-image displacement
  double dist2 = 0.0;
};

Chart chart(const std::array<double, kMaxRealDim>& z, const std::array<double, kMaxRealDim>& c,
            int d) {
  Chart out;
  for (int a = 0; a < d; ++a) {
    double delta = z[a] - c[a];
    delta -= std::nearbyint(delta);
    out.local[a] = c[a] + delta;
    out.dist2 += delta * delta;
  }
  return out;
}

std::array<double, kMaxRealDim> node_point(int m, int d, std::size_t flat) {
  std::array<double, kMaxRealDim> x{};
  for (int a = d - 1; a >= 0; --a) {
    x[a] = static_cast<double>(flat % m) / m;
    flat /= m;
  }
  return x;
}

std::string describe(const std::array<double, kMaxRealDim>& x, int d) {
  std::ostringstream s;
  s << "(";
  for (int a = 0; a < d; ++a) s << (a ? ", " : "") << x[a];
  s << ")";
  return s.str();
}

}  // namespace

GlueResult glue_local_potentials(int n, int points_per_axis,
                                 std::span<const LocalPotential> locals, double r,
                                 double epsilon) {
  if (n < 1 || n > kMaxComplexDim) throw InvalidInput("glue: n must be 1, 2 or 3");
  if (locals.empty()) throw InvalidInput("glue: no local potentials");
  if (!(r > 0.0)) throw InvalidInput("glue: radius must be positive");
  if (!(epsilon > 0.0 && epsilon < r * r))
    throw InvalidInput("glue: eps must lie in (0, r^2)");
  if (points_per_axis < 4) throw InvalidInput("glue: need >= 4 nodes per axis");
  for (const auto& l : locals)
    if (!l.f) throw InvalidInput("glue: empty local potential");

  const int d = 2 * n;
  const int m = points_per_axis;
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= m;
  const double r2 = r * r;
  const double bound = r2 / 100.0;

  // Branch values at each node, for the branches within 2r.
  struct Entry {
    int branch;
    double value;  // f_j at the node
    double dist2;
  };
  std::vector<std::vector<Entry>> entries(count);
  std::vector<char> covered(count, 0);
  parallel_for(count, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto z = node_point(m, d, i);
      for (std::size_t j = 0; j < locals.size(); ++j) {
        const Chart c = chart(z, locals[j].center, d);
        if (c.dist2 >= 4.0 * r2) continue;
        if (c.dist2 < r2) covered[i] = 1;
        entries[i].push_back(
            {static_cast<int>(j), locals[j].f(std::span<const double>(c.local.data(), d)), c.dist2});
      }
    }
  });

  for (std::size_t i = 0; i < count; ++i)
    if (!covered[i]) {
      std::ostringstream msg;
      msg << "glue: the balls B(x_j, r) leave the point " << describe(node_point(m, d, i), d)
          << " uncovered";
      throw InvalidInput(msg.str());
    }

  GlueResult out{SampledFunction(n, DomainKind::Torus, 0.5, m, std::vector<double>(count, 0.0)),
                 std::vector<int>(count, -1), 0.0};

  // Closeness on doubled overlaps; report the worst offending pair.
  double worst = 0.0;
  int wj = -1, wk = -1;
  std::size_t wnode = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& list = entries[i];
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a + 1; b < list.size(); ++b) {
        const double gap = std::abs(list[a].value - list[b].value);
        if (gap > worst) {
          worst = gap;
          wj = list[a].branch;
          wk = list[b].branch;
          wnode = i;
        }
      }
  }
  out.worst_closeness = worst;
  if (worst >= bound) {
    std::ostringstream msg;
    msg << "glue: closeness |f_j - f_j'| < r^2/100 = " << bound << " fails for pair (" << wj
        << ", " << wk << "): gap " << worst << " at " << describe(node_point(m, d, wnode), d);
    throw InvalidInput(msg.str());
  }

  const RegularizedMax tmax(epsilon);
  std::vector<double> values(count);
  parallel_for(count, [&](std::size_t b, std::size_t e) {
    std::vector<double> branch;
    for (std::size_t i = b; i < e; ++i) {
      branch.clear();
      double top = -std::numeric_limits<double>::infinity(), second = top;
      int lead = -1;
      for (const auto& en : entries[i]) {
        const double v = en.value - en.dist2;
        branch.push_back(v);
        if (v > top) {
          second = top;
          top = v;
          lead = en.branch;
        } else if (v > second) {
          second = v;
        }
      }
      values[i] = tmax(std::span<const double>(branch));
      if (top - second >= epsilon) out.dominant[i] = lead;
    }
  });
  out.field = SampledFunction(n, DomainKind::Torus, 0.5, m, std::move(values));
  return out;
}

namespace {

// Second differences and the complex Hessian of a point function in one chart.
struct ChartDifferences {
  double max_abs = 0.0;
  HermitianMatrix hessian;
};

ChartDifferences chart_differences(const PointFunction& g, std::array<double, kMaxRealDim> y,
                                   int n, double h) {
  const int d = 2 * n;
  auto at = [&](int a, int da, int b, int db) {
    auto p = y;
    p[a] += da * h;
    p[b] += db * h;
    return g(std::span<const double>(p.data(), d));
  };
  const double centre = g(std::span<const double>(y.data(), d));
  Eigen::Matrix<double, kMaxRealDim, kMaxRealDim> second;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      const double v = a == b ? (at(a, 1, a, 0) - 2.0 * centre + at(a, -1, a, 0)) / (h * h)
                              : (at(a, 1, b, 1) - at(a, 1, b, -1) - at(a, -1, b, 1) +
                                 at(a, -1, b, -1)) /
                                    (4.0 * h * h);
      second(a, b) = second(b, a) = v;
    }
  ChartDifferences out;
  out.hessian.resize(n, n);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out.max_abs = std::max(out.max_abs, std::abs(second(a, b)));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      out.hessian(p, q) = 0.25 * cplx(second(2 * p, 2 * q) + second(2 * p + 1, 2 * q + 1),
                                      second(2 * p, 2 * q + 1) - second(2 * p + 1, 2 * q));
  return out;
}

}  // namespace

CreaseReport crease_report(const GlueResult& glued, std::span<const LocalPotential> locals,
                           double r) {
  const SampledFunction& f = glued.field;
  const int n = f.dimension();
  const int d = 2 * n;
  const double h = f.spacing();
  const double r2 = r * r;
  const std::size_t count = f.size();

  struct NodeStats {
    double glued_max = 0.0, branch_max = 0.0, slack = 0.0, dominant_error = 0.0;
  };
  std::vector<NodeStats> stats(count);
  parallel_for(count, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      NodeStats& s = stats[i];
      for (int a = 0; a < d; ++a)
        for (int c = a; c < d; ++c)
          s.glued_max = std::max(s.glued_max, std::abs(second_difference(f, i, a, c)));
      const double glued_min = hermitian_eigen(difference_hessian(f, i), false).values(0);
      const auto z = f.point(i);
      double branch_min = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < locals.size(); ++j) {
        const Chart ch = chart(z, locals[j].center, d);
        if (ch.dist2 >= 4.0 * r2) continue;
        const auto& fj = locals[j].f;
        const auto& cj = locals[j].center;
        const ChartDifferences local = chart_differences(fj, ch.local, n, h);
        branch_min = std::min(branch_min, hermitian_eigen(local.hessian, false).values(0));
        if (ch.dist2 < r2) {
          const PointFunction branch = [&](std::span<const double> y) {
            double dist2 = 0.0;
            for (int a = 0; a < d; ++a) dist2 += (y[a] - cj[a]) * (y[a] - cj[a]);
            return fj(y) - dist2;
          };
          s.branch_max = std::max(s.branch_max, chart_differences(branch, ch.local, n, h).max_abs);
        }
        if (glued.dominant[i] == static_cast<int>(j))
          s.dominant_error = std::abs(
              f[i] - (fj(std::span<const double>(ch.local.data(), d)) - ch.dist2));
      }
      s.slack = glued_min - (branch_min - 1.0);
    }
  });

  CreaseReport out;
  out.hessian_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    out.glued_max = std::max(out.glued_max, stats[i].glued_max);
    out.branch_max = std::max(out.branch_max, stats[i].branch_max);
    out.hessian_slack = std::min(out.hessian_slack, stats[i].slack);
    out.dominant_error = std::max(out.dominant_error, stats[i].dominant_error);
    if (glued.dominant[i] >= 0) ++out.dominant_nodes;
  }
  out.ratio = out.branch_max > 0.0 ? out.glued_max / out.branch_max
                                   : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<std::array<double, kMaxRealDim>> lattice_centers(int n, double spacing) {
  const int per_axis = static_cast<int>(std::lround(1.0 / spacing));
  if (per_axis < 1 || std::abs(per_axis * spacing - 1.0) > 1e-12)
    throw InvalidInput("lattice centers: spacing must divide 1");
  const int d = 2 * n;
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= per_axis;
  std::vector<std::array<double, kMaxRealDim>> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rest = k;
    for (int a = d - 1; a >= 0; --a) {
      out[k][a] = spacing * static_cast<double>(rest % per_axis);
      rest /= per_axis;
    }
  }
  return out;
}

double second_difference(const SampledFunction& f, std::size_t node, int a, int b) {
  const int d = f.real_dimension();
  const double h = f.spacing();
  auto at = [&](int da, int db) {
    auto idx = f.index_of(node);
    idx[a] += da;
    idx[b] += db;
    const long flat = f.flat_index(std::span<const int>(idx.data(), d));
    if (flat < 0) throw InvalidInput("second difference: stencil leaves the grid");
    return f[static_cast<std::size_t>(flat)];
  };
  if (a == b) return (at(1, 0) - 2.0 * f[node] + at(-1, 0)) / (h * h);
  return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
}

HermitianMatrix difference_hessian(const SampledFunction& f, std::size_t node) {
  const int n = f.dimension();
  HermitianMatrix h(n, n);
  // d_p dbar_q = (1/4)[(D_xx + D_yy) + i(D_x_p y_q - D_y_p x_q)] with x = x_{2p}, y = x_{2p+1}.
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double re = second_difference(f, node, 2 * p, 2 * q) +
                        second_difference(f, node, 2 * p + 1, 2 * q + 1);
      const double im = second_difference(f, node, 2 * p, 2 * q + 1) -
                        second_difference(f, node, 2 * p + 1, 2 * q);
      h(p, q) = 0.25 * cplx(re, im);
    }
  return h;
}

}  // namespace malab
