#include "malab/lelong.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "malab/errors.hpp"
#include "malab/mollifier.hpp"
#include "malab/positivity.hpp"

namespace malab {

double poisson_constant(int n) { return std::pow(3.0, 2 * n - 1) / std::pow(2.0, 2 * n - 2); }

Ladder dyadic_ladder(double r, int count, double spacing) {
  if (!(r > 0.0) || !(spacing > 0.0) || count < 1)
    throw InvalidInput("dyadic ladder: bad radius, count or spacing");
  // Nearest even multiple of the step, ties going down.
  auto snap = [&](double v) { return 2.0 * spacing * std::ceil(v / (2.0 * spacing) - 0.5); };
  Ladder out;
  out.reference = snap(r);
  for (int k = 1; k <= count; ++k) {
    const double v = snap(r * std::pow(0.5, k));
    if (v < 2.0 * spacing) break;
    if (!out.deltas.empty() && v >= out.deltas.back()) continue;
    if (v >= out.reference) continue;
    out.deltas.push_back(v);
  }
  return out;
}

double ball_maximum(const SampledFunction& phi, std::span<const double> x, double delta) {
  const int d = phi.real_dimension();
  const double h = phi.spacing();
  const int m = phi.points_per_axis();
  const auto origin = phi.point(0);
  std::array<int, kMaxRealDim> lo{}, hi{};
  for (int a = 0; a < d; ++a) {
    lo[a] = static_cast<int>(std::floor((x[a] - delta - origin[a]) / h)) - 1;
    hi[a] = static_cast<int>(std::ceil((x[a] + delta - origin[a]) / h)) + 1;
    if (phi.domain() == DomainKind::Ball) {
      lo[a] = std::max(lo[a], 0);
      hi[a] = std::min(hi[a], m - 1);
    }
  }
  const double limit = delta * delta * (1.0 + 1e-12);
  double best = -std::numeric_limits<double>::infinity();
  std::array<int, kMaxRealDim> idx = lo;
  while (true) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double c = origin[a] + h * idx[a] - x[a];
      r2 += c * c;
    }
    if (r2 <= limit) {
      const long flat = phi.flat_index(std::span<const int>(idx.data(), d));
      if (flat >= 0 && phi.in_domain(static_cast<std::size_t>(flat))) {
        const double v = phi[static_cast<std::size_t>(flat)];
        if (std::isfinite(v)) best = std::max(best, v);
      }
    }
    int a = d - 1;
    while (a >= 0 && ++idx[a] > hi[a]) {
      idx[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
  return best;
}

double sphere_mean(const SampledFunction& phi, std::span<const double> x, double delta) {
  const int n = phi.dimension();
  const int d = 2 * n;
  const int moduli = n == 1 ? 1 : (n == 2 ? 12 : 6);
  const int phases = n == 1 ? 1024 : (n == 2 ? 32 : 12);
  double sum = 0.0, total = 0.0;
  std::array<double, kMaxRealDim> p{};
  for (const auto& node : sphere_nodes(n, moduli, phases)) {
    for (int q = 0; q < n; ++q) {
      p[2 * q] = x[2 * q] + delta * node.w[q].real();
      p[2 * q + 1] = x[2 * q + 1] + delta * node.w[q].imag();
    }
    if (phi.domain() == DomainKind::Torus && phi.has_closed_form())
      for (int a = 0; a < d; ++a) p[a] -= std::floor(p[a]);
    sum += node.weight * phi.evaluate(std::span<const double>(p.data(), d));
    total += node.weight;
  }
  return sum / total;
}

namespace {

// (rho_delta * phi)(x) from the samples: lattice convolution at the nearest node.
double lattice_mollify(const SampledFunction& phi, std::span<const double> x, double delta) {
  const int n = phi.dimension();
  const int d = 2 * n;
  const Mollifier mollifier(n, delta);
  const double h = phi.spacing();
  const int reach = static_cast<int>(std::floor(delta / h));
  const auto base = phi.index_of(phi.nearest_node(x));
  const int width = 2 * reach + 1;
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= width;
  double sum = 0.0, total = 0.0;
  std::array<int, kMaxRealDim> idx{};
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rest = k;
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      const int off = static_cast<int>(rest % width) - reach;
      rest /= width;
      idx[a] = base[a] + off;
      s += (off * h) * (off * h);
    }
    const double w = mollifier.density(s);
    if (w <= 0.0) continue;
    const long flat = phi.flat_index(std::span<const int>(idx.data(), d));
    if (flat < 0) throw InvalidInput("lelong: mollifier support leaves the grid");
    const auto f = static_cast<std::size_t>(flat);
    sum += w * (phi.is_singular(f) ? phi.cell_average(f) : phi[f]);
    total += w;
  }
  return sum / total;
}

void require(bool ok, const std::string& what, double slack) {
  if (ok) return;
  std::ostringstream msg;
  msg << "lelong profile: " << what << " fails (slack " << slack << ")";
  throw NumericFailure(msg.str());
}

}  // namespace

LelongProfile lelong_profile(const SampledFunction& phi, std::span<const double> x,
                             std::span<const double> deltas, double r,
                             const LelongOptions& options) {
  const int n = phi.dimension();
  const int d = 2 * n;
  const double h = phi.spacing();
  if (deltas.empty()) throw InvalidInput("lelong profile: empty radius ladder");
  if (!(r > 0.0)) throw InvalidInput("lelong profile: reference radius must be positive");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] < r)) throw InvalidInput("lelong profile: every radius must be below r");
    if (deltas[k] < 2.0 * h * (1.0 - 1e-12))
      throw InvalidInput("lelong profile: radii must stay at least two grid steps");
    if (k > 0 && !(deltas[k] < deltas[k - 1]))
      throw InvalidInput("lelong profile: radii must decrease");
  }
  if (phi.domain() == DomainKind::Ball) {
    double norm = 0.0;
    for (int a = 0; a < d; ++a) norm += x[a] * x[a];
    if (std::sqrt(norm) + r > phi.radius() * (1.0 + 1e-12))
      throw InvalidInput("lelong profile: B(x, r) leaves the ball");
  }

  if (options.check_psh) {
    const std::array<double, 1> ladder = {0.5 * r};
    const auto check = positivity(phi, PositivitySense::Smoothing, ladder);
    if (check.margin < -options.tolerance) {
      std::ostringstream msg;
      msg << "lelong profile: phi is not psh on the region (smoothing margin " << check.margin
          << ")";
      throw InvalidInput(msg.str());
    }
  }

  LelongProfile out;
  std::copy(x.begin(), x.begin() + d, out.x.begin());
  out.reference_radius = r;
  out.hat_reference = ball_maximum(phi, x, r);
  const double log_r = std::log(r);
  for (double delta : deltas) {
    const double hat = ball_maximum(phi, x, delta);
    const double half = ball_maximum(phi, x, 0.5 * delta);
    const double mean = sphere_mean(phi, x, delta);
    double smooth_value;
    if (phi.has_closed_form()) {
      PointFunction f = phi.closed_form();
      if (phi.domain() == DomainKind::Torus)
        f = [g = phi.closed_form(), d](std::span<const double> y) {
          std::array<double, kMaxRealDim> w{};
          for (int a = 0; a < d; ++a) w[a] = y[a] - std::floor(y[a]);
          return g(std::span<const double>(w.data(), d));
        };
      smooth_value = BallRule(Mollifier(n, delta)).mollify(f, x);
    } else {
      smooth_value = lattice_mollify(phi, x, delta);
    }
    const double nu = (hat - out.hat_reference) / (std::log(delta) - log_r);
    out.deltas.push_back(delta);
    out.hat_values.push_back(hat);
    out.half_hat.push_back(half);
    out.mean_values.push_back(mean);
    out.smooth_values.push_back(smooth_value);
    out.quotients.push_back(nu);
    out.smooth_ratio.push_back(nu > 0.0 ? (hat - smooth_value) / nu
                                        : std::numeric_limits<double>::quiet_NaN());
  }

  const double inf = std::numeric_limits<double>::infinity();
  const double K = poisson_constant(n);
  out.monotone_slack = inf;
  out.gap_slack = inf;
  out.poisson_lower_slack = inf;
  out.poisson_upper_slack = inf;
  out.smooth_slack = inf;
  for (std::size_t k = 0; k < out.deltas.size(); ++k) {
    if (k > 0)
      out.monotone_slack = std::min(out.monotone_slack, out.quotients[k - 1] - out.quotients[k]);
    const double hat = out.hat_values[k];
    out.gap_slack = std::min(out.gap_slack, std::log(2.0) * out.quotients[k] -
                                                std::abs(hat - out.half_hat[k]));
    out.poisson_lower_slack = std::min(out.poisson_lower_slack, hat - out.mean_values[k]);
    out.poisson_upper_slack =
        std::min(out.poisson_upper_slack,
                 K * (hat - out.half_hat[k]) - (hat - out.mean_values[k]));
    out.smooth_slack = std::min(out.smooth_slack, hat - out.smooth_values[k]);
  }
  if (options.enforce) {
    const double tol = options.tolerance;
    require(out.monotone_slack >= -tol, "monotonicity of nu in log delta", out.monotone_slack);
    require(out.gap_slack >= -tol, "gap bound |hat_delta - hat_delta/2| <= log 2 nu",
            out.gap_slack);
    require(out.poisson_lower_slack >= -tol, "lower Poisson comparison hat >= mean",
            out.poisson_lower_slack);
    require(out.poisson_upper_slack >= -tol, "upper Poisson comparison",
            out.poisson_upper_slack);
    require(out.smooth_slack >= -tol, "smoothing comparison hat >= smooth", out.smooth_slack);
  }
  return out;
}

LelongEstimate lelong_number(const LelongProfile& profile) {
  const std::size_t k = profile.quotients.size();
  if (k < 3) throw InvalidInput("lelong number: the ladder needs at least three radii");
  // hat is convex in log delta, so the last chord slope sits between the
  // Lelong number and the last secant quotient.
  const double chord = (profile.hat_values[k - 1] - profile.hat_values[k - 2]) /
                       std::log(profile.deltas[k - 1] / profile.deltas[k - 2]);
  LelongEstimate out;
  out.value = profile.quotients[k - 1];
  out.chord_slope = chord;
  out.resolution = std::max(0.0, out.value - chord);
  return out;
}

}  // namespace malab
