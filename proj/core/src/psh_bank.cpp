#include "malab/psh_bank.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <sstream>

#include "malab/errors.hpp"
#include "malab/random.hpp"
#include "malab/regularized_max.hpp"

namespace malab {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

cplx coordinate(std::span<const double> x, int p) { return {x[2 * p], x[2 * p + 1]}; }

struct Affine {
  std::vector<cplx> a;
  cplx b;
  double weight;
};

double affine_sum(const std::vector<Affine>& terms, std::span<const double> x) {
  double s = 0.0;
  for (const auto& t : terms) {
    cplx v = t.b;
    for (std::size_t p = 0; p < t.a.size(); ++p) v += t.a[p] * coordinate(x, static_cast<int>(p));
    s += t.weight * std::norm(v);
  }
  return s;
}

using Draw = Rng;

std::vector<Affine> random_affine(Draw& draw, int n) {
  std::vector<Affine> terms(draw.integer(1, 3));
  for (auto& t : terms) {
    t.a.resize(n);
    for (auto& a : t.a) a = draw.complex(1.0);
    t.b = draw.complex(0.5);
    t.weight = draw.uniform(0.3, 1.0);
  }
  return terms;
}

double affine_spectral_bound(const std::vector<Affine>& terms) {
  // Trace of sum w a a^*: an upper bound on its largest eigenvalue.
  double s = 0.0;
  for (const auto& t : terms)
    for (const cplx& a : t.a) s += t.weight * std::norm(a);
  return s;
}

BankMember monomial_log(Draw& draw, int n) {
  std::vector<int> powers(n);
  for (auto& k : powers) k = draw.integer(1, 2);
  const double alpha = draw.uniform(0.25, 2.0);
  std::ostringstream name;
  name << alpha << " log|(";
  for (int p = 0; p < n; ++p) name << (p ? ", " : "") << "z" << p + 1 << "^" << powers[p];
  name << ")|";
  return {name.str(), true, [n, powers, alpha](std::span<const double> x) {
            double s = 0.0;
            for (int p = 0; p < n; ++p) s += std::pow(std::norm(coordinate(x, p)), powers[p]);
            return 0.5 * alpha * std::log(s);
          }};
}

BankMember affine_member(Draw& draw, int n, double sign) {
  auto terms = random_affine(draw, n);
  std::ostringstream name;
  name << (sign < 0 ? "-" : "") << "sum of " << terms.size() << " |affine|^2";
  return {name.str(), sign > 0,
          [terms = std::move(terms), sign](std::span<const double> x) {
            return sign * affine_sum(terms, x);
          }};
}

}  // namespace

PointFunction log_norm(int n, double alpha) {
  (void)n;
  return [alpha](std::span<const double> x) { return 0.5 * alpha * std::log(norm2(x)); };
}

PointFunction truncated_log_norm(int n, double floor) {
  (void)n;
  return [floor](std::span<const double> x) { return std::max(0.5 * std::log(norm2(x)), floor); };
}

PointFunction squared_norm(int n, double sign) {
  (void)n;
  return [sign](std::span<const double> x) { return sign * norm2(x); };
}

std::vector<BankMember> psh_test_bank(int n, int count, std::uint64_t seed) {
  if (n < 2 || n > kMaxComplexDim) throw InvalidInput("psh bank: n must be 2 or 3");
  if (count < 0) throw InvalidInput("psh bank: negative count");
  Draw draw(seed);
  std::vector<BankMember> bank;
  bank.reserve(count);
  for (int i = 0; i < count; ++i) {
    switch (i % 6) {
      case 0: bank.push_back(affine_member(draw, n, 1.0)); break;
      case 1: bank.push_back(monomial_log(draw, n)); break;
      case 2: bank.push_back(affine_member(draw, n, -1.0)); break;
      case 3: {
        const double c = draw.uniform(0.1, 0.5);
        std::ostringstream name;
        name << "-log(|z|^2 + " << c << ")";
        bank.push_back({name.str(), false, [c](std::span<const double> x) {
                          return -std::log(norm2(x) + c);
                        }});
        break;
      }
      case 4: {
        // Two psh branches, one of them a log so the maximum has a genuine corner.
        BankMember a = monomial_log(draw, n);
        BankMember b = affine_member(draw, n, 1.0);
        const double shift = draw.uniform(-1.5, -0.5);
        const double eps = draw.uniform(0.1, 0.4);
        auto tmax = std::make_shared<const RegularizedMax>(eps);
        std::ostringstream name;
        name << "tmax_" << eps << "(" << a.name << ", " << b.name << " + " << shift << ")";
        bank.push_back({name.str(), true,
                        [tmax, fa = a.f, fb = b.f, shift](std::span<const double> x) {
                          return (*tmax)(fa(x), fb(x) + shift);
                        }});
        break;
      }
      default: {
        auto terms = random_affine(draw, n);
        const double c = affine_spectral_bound(terms) + draw.uniform(0.3, 1.0);
        std::ostringstream name;
        name << "|affine|^2 - " << c << " |z|^2";
        bank.push_back({name.str(), false,
                        [terms = std::move(terms), c](std::span<const double> x) {
                          return affine_sum(terms, x) - c * norm2(x);
                        }});
      }
    }
    bank.back().n = n;
  }
  return bank;
}

}  // namespace malab
