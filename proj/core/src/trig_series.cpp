#include "malab/trig_series.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "malab/errors.hpp"

namespace malab {
namespace {

constexpr double kPi = std::numbers::pi;

double phase(const TrigMode& m, std::span<const double> x, int dims) {
  double s = 0.0;
  for (int a = 0; a < dims; ++a) s += m.k[a] * x[a];
  return 2.0 * kPi * s;
}

cplx alpha(const TrigMode& m, int p) { return {double(m.k[2 * p]), -double(m.k[2 * p + 1])}; }
cplx beta(const TrigMode& m, int p) { return {double(m.k[2 * p]), double(m.k[2 * p + 1])}; }

// Derivative of Re(c e^{i theta}) whose Wirtinger symbol product is `prod`
// and total order is `order`; c = a - i b.
cplx apply(const TrigMode& m, double theta, cplx prod, int order) {
  const cplx c(m.cos_amp, -m.sin_amp);
  const cplx up = std::pow(cplx(0.0, kPi), order);
  const cplx down = std::pow(cplx(0.0, -kPi), order);
  const cplx e = std::polar(1.0, theta);
  return 0.5 * (c * e * up * prod + std::conj(c) * std::conj(e) * down * prod);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

TrigSeries::TrigSeries(int n, std::vector<TrigMode> modes) : n_(n), modes_(std::move(modes)) {
  if (n < 1 || n > kMaxComplexDim) throw InvalidInput("TrigSeries: dimension must be 1..3");
  for (const auto& m : modes_)
    for (int a = 2 * n; a < kMaxRealDim; ++a)
      if (m.k[a] != 0) throw InvalidInput("TrigSeries: frequency beyond the real dimension");
}

TrigSeries TrigSeries::parse(int n, const std::string& text) {
  std::vector<TrigMode> modes;
  std::stringstream terms(text);
  std::string term;
  while (std::getline(terms, term, ';')) {
    term = trim(term);
    if (term.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream ps(term);
    std::string part;
    while (std::getline(ps, part, ':')) parts.push_back(trim(part));
    if (parts.size() < 2 || parts.size() > 3)
      throw InvalidInput("mode '" + term + "': expected 'k... : cos_amp [: sin_amp]'");
    TrigMode m;
    std::stringstream ks(parts[0]);
    int count = 0;
    int k = 0;
    while (ks >> k) {
      if (count >= 2 * n) throw InvalidInput("mode '" + term + "': too many frequency entries");
      m.k[count++] = k;
    }
    if (!ks.eof() || count != 2 * n)
      throw InvalidInput("mode '" + term + "': expected " + std::to_string(2 * n) +
                         " integer frequencies");
    char* end = nullptr;
    m.cos_amp = std::strtod(parts[1].c_str(), &end);
    if (end == parts[1].c_str() || *end != '\0')
      throw InvalidInput("mode '" + term + "': bad cosine amplitude");
    if (parts.size() == 3) {
      m.sin_amp = std::strtod(parts[2].c_str(), &end);
      if (end == parts[2].c_str() || *end != '\0')
        throw InvalidInput("mode '" + term + "': bad sine amplitude");
    }
    modes.push_back(m);
  }
  return TrigSeries(n, std::move(modes));
}

std::string TrigSeries::to_string() const {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (i) out << " ; ";
    for (int a = 0; a < 2 * n_; ++a) out << (a ? " " : "") << modes_[i].k[a];
    out << " : " << modes_[i].cos_amp << " : " << modes_[i].sin_amp;
  }
  return out.str();
}

int TrigSeries::max_frequency() const {
  int best = 0;
  for (const auto& m : modes_)
    for (int a = 0; a < 2 * n_; ++a) best = std::max(best, std::abs(m.k[a]));
  return best;
}

double TrigSeries::value(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& m : modes_) {
    const double t = phase(m, x, 2 * n_);
    v += m.cos_amp * std::cos(t) + m.sin_amp * std::sin(t);
  }
  return v;
}

std::array<cplx, kMaxComplexDim> TrigSeries::dz(std::span<const double> x) const {
  std::array<cplx, kMaxComplexDim> g{};
  for (const auto& m : modes_) {
    const double t = phase(m, x, 2 * n_);
    for (int p = 0; p < n_; ++p) g[p] += apply(m, t, alpha(m, p), 1);
  }
  return g;
}

HermitianMatrix TrigSeries::ddbar(std::span<const double> x) const {
  HermitianMatrix h = HermitianMatrix::Zero(n_, n_);
  for (const auto& m : modes_) {
    const double t = phase(m, x, 2 * n_);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) h(p, q) += apply(m, t, alpha(m, p) * beta(m, q), 2);
  }
  return h;
}

std::array<cplx, 27> TrigSeries::third(std::span<const double> x) const {
  std::array<cplx, 27> out{};
  for (const auto& m : modes_) {
    const double t = phase(m, x, 2 * n_);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        for (int c = 0; c < n_; ++c)
          out[(a * n_ + b) * n_ + c] += apply(m, t, alpha(m, a) * beta(m, b) * alpha(m, c), 3);
  }
  return out;
}

TrigSeries TrigSeries::scaled(double s) const {
  auto modes = modes_;
  for (auto& m : modes) {
    m.cos_amp *= s;
    m.sin_amp *= s;
  }
  return TrigSeries(n_, std::move(modes));
}

}  // namespace malab
