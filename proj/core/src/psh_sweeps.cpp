#include "malab/psh_sweeps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>

#include "malab/errors.hpp"
#include "malab/lelong.hpp"
#include "malab/mollifier.hpp"
#include "malab/positivity.hpp"
#include "malab/random.hpp"
#include "malab/regularized_max.hpp"

namespace malab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SampledFunction on_unit_ball(const BankMember& m, int points) {
  return SampledFunction::on_ball(m.n, 1.0, points, m.f);
}

}  // namespace

std::vector<BankClassification> classify_bank(std::span<const BankMember> bank, int points,
                                              std::span<const double> radii) {
  std::vector<BankClassification> rows;
  rows.reserve(bank.size());
  for (const auto& m : bank) {
    const SampledFunction phi = on_unit_ball(m, points);
    BankClassification row;
    row.name = m.name;
    row.psh = m.psh;
    row.smoothing = positivity(phi, PositivitySense::Smoothing, radii).margin;
    row.distribution = positivity(phi, PositivitySense::Distribution, radii).margin;
    rows.push_back(row);
  }
  return rows;
}

SweepSummary equivalence_summary(std::span<const BankClassification> rows) {
  SweepSummary out{"positivity sense equivalence", rows.size(), 0, 0, kInf,
                   BankClassification::kPshTolerance};
  for (const auto& r : rows) {
    if (r.smoothing_psh() != r.distribution_psh()) ++out.failures;
    if (r.psh) out.worst = std::min({out.worst, r.smoothing, r.distribution});
  }
  return out;
}

SweepSummary analytic_summary(std::span<const BankClassification> rows) {
  SweepSummary out{"bank against analytic labels", rows.size(), 0, 0, kInf,
                   BankClassification::kPshTolerance};
  for (const auto& r : rows) {
    if (r.smoothing_psh() != r.psh) ++out.failures;
    out.worst = std::min(out.worst, r.psh ? r.smoothing : -r.smoothing);
  }
  return out;
}

SweepSummary lelong_bank_sweep(std::span<const BankMember> bank, int points) {
  SweepSummary out{"lelong inequalities", 0, 0, 0, kInf, 1e-6};
  const std::array<double, kMaxRealDim> origin{};
  LelongOptions options;
  options.enforce = false;
  for (const auto& m : bank) {
    if (!m.psh) continue;
    const SampledFunction phi = on_unit_ball(m, points);
    const Ladder ladder = dyadic_ladder(0.8, 6, phi.spacing());
    const LelongProfile p = lelong_profile(
        phi, std::span<const double>(origin.data(), phi.real_dimension()), ladder.deltas,
        ladder.reference, options);
    const double worst = std::min({p.monotone_slack, p.gap_slack, p.poisson_lower_slack,
                                   p.poisson_upper_slack, p.smooth_slack});
    ++out.trials;
    out.worst = std::min(out.worst, worst);
    if (worst < -out.tolerance) ++out.failures;
  }
  return out;
}

SweepSummary regularized_max_sweep(std::size_t trials, std::uint64_t seed) {
  SweepSummary out{"regularized max laws", trials, 0, 0, kInf, 0.0};
  Rng rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    const double eps = rng.uniform(0.05, 2.0);
    const RegularizedMax tmax(eps);
    const double f = rng.uniform(-3.0, 3.0);
    const double g = f + rng.uniform(-2.0 * eps, 2.0 * eps);
    const double v = tmax(f, g);
    bool ok = true;
    out.worst = std::min(out.worst, v - (std::max(f, g) - eps));
    ok = ok && v >= std::max(f, g) - eps;
    // Monotone in each argument.
    const double bump = rng.uniform(0.0, eps);
    ok = ok && tmax(f + bump, g) >= v - 1e-14 && tmax(f, g + bump) >= v - 1e-14;
    // Exact bands.
    ok = ok && tmax(g + eps * 1.0000001, g) == g + eps * 1.0000001;
    ok = ok && tmax(f, f + eps * 1.0000001) == f + eps * 1.0000001;

    std::array<double, 4> values{};
    for (auto& x : values) x = rng.uniform(-eps, eps);
    const double base = tmax(std::span<const double>(values));
    std::array<double, 4> perm = {values[2], values[0], values[3], values[1]};
    ok = ok && std::abs(tmax(std::span<const double>(perm)) - base) <= 1e-13;
    ok = ok && base >= *std::max_element(values.begin(), values.end()) - eps;
    std::array<double, 3> lead = {values[0] + 2.0 * eps, values[0], values[0] - 0.5 * eps};
    ok = ok && tmax(std::span<const double>(lead)) == lead[0];
    if (!ok) ++out.failures;
  }
  return out;
}

SweepSummary regularized_max_psh_sweep(std::span<const BankMember> bank, int pairs, int points) {
  SweepSummary out{"regularized max keeps psh", 0, 0, 0, kInf, 1e-6};
  std::vector<const BankMember*> psh;
  for (const auto& m : bank)
    if (m.psh) psh.push_back(&m);
  const std::array<double, 2> radii = {0.25, 0.4};
  for (int k = 0; k < pairs && psh.size() >= 2; ++k) {
    const BankMember& a = *psh[(2 * k) % psh.size()];
    const BankMember& b = *psh[(2 * k + 1) % psh.size()];
    auto tmax = std::make_shared<const RegularizedMax>(0.3);
    const PointFunction f = [tmax, fa = a.f, fb = b.f](std::span<const double> x) {
      return (*tmax)(fa(x), fb(x));
    };
    const SampledFunction phi = SampledFunction::on_ball(a.n, 1.0, points, f);
    const double margin = positivity(phi, PositivitySense::Smoothing, radii).margin;
    ++out.trials;
    out.worst = std::min(out.worst, margin);
    if (margin < -out.tolerance) ++out.failures;
  }
  return out;
}

SweepSummary smoothing_psh_sweep(int count, std::uint64_t seed) {
  SweepSummary out{"smoothing keeps psh", 0, 0, 0, kInf, 1e-8};
  Rng rng(seed);
  PositivityOptions options;
  options.max_points = 16;
  options.rule = {32, 1, 64};
  const std::array<double, 1> radii = {0.2};
  for (int k = 0; k < count; ++k) {
    PointFunction f;
    switch (k % 3) {
      case 0: {
        const cplx a = rng.complex(1.0), b = rng.complex(0.5);
        f = [a, b](std::span<const double> x) { return std::norm(a * cplx(x[0], x[1]) + b); };
        break;
      }
      case 1: {
        const cplx a = rng.complex(0.5);
        const double c = rng.uniform(0.05, 0.5);
        f = [a, c](std::span<const double> x) {
          return 0.5 * std::log(std::norm(cplx(x[0], x[1]) - a) + c);
        };
        break;
      }
      default: {
        const cplx a = rng.complex(1.0);
        const double shift = rng.uniform(-0.5, 0.0);
        auto tmax = std::make_shared<const RegularizedMax>(0.2);
        f = [a, shift, tmax](std::span<const double> x) {
          const cplx z(x[0], x[1]);
          return (*tmax)(std::norm(z - a) + shift, 0.5 * std::log(std::norm(z) + 0.1));
        };
      }
    }
    const SampledFunction phi = SampledFunction::on_ball(1, 1.0, 41, f);
    for (double eps : {0.1, 0.2}) {
      const SampledFunction smoothed = smooth(phi, Mollifier(1, eps));
      const double margin = positivity(smoothed, PositivitySense::Smoothing, radii, options).margin;
      ++out.trials;
      out.worst = std::min(out.worst, margin);
      if (margin < -out.tolerance) ++out.failures;
    }
  }
  return out;
}

}  // namespace malab
