#include "malab/reports.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "malab/errors.hpp"

namespace malab {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void append_row(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
}

std::string index_header(int real_dim) {
  std::string out;
  for (int a = 0; a < real_dim; ++a) out += "i" + std::to_string(a) + ",";
  return out + "value\n";
}

template <class IndexOf>
void append_field_rows(std::string& out, std::size_t flat, int real_dim, double value,
                       const IndexOf& index_of) {
  const auto idx = index_of(flat);
  for (int a = 0; a < real_dim; ++a) out += std::to_string(idx[a]) + ",";
  out += format_number(value) + "\n";
}

}  // namespace

std::string trace_csv(std::span<const PathPoint> trace) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& p : trace) {
    const auto& m = p.monitors;
    append_row(out, {format_number(p.t), std::to_string(p.iterations), format_number(p.residual_sup),
                     format_number(m.sup_phi), format_number(m.osc_phi),
                     format_number(m.trace_bound), format_number(m.cone_margin),
                     format_number(m.min_eigen), format_number(m.calabi_S),
                     format_number(m.szekelyhidi_G_max)});
  }
  return out;
}

std::string field_csv(const PotentialField& field) {
  const int d = field.grid.real_dimension();
  std::string out = index_header(d);
  for (std::size_t i = 0; i < field.size(); ++i)
    append_field_rows(out, i, d, field[i], [&](std::size_t k) { return field.grid.index_of(k); });
  return out;
}

std::string field_csv(const SampledFunction& field) {
  const int d = field.real_dimension();
  std::string out = index_header(d);
  for (std::size_t i = 0; i < field.size(); ++i)
    if (field.in_domain(i))
      append_field_rows(out, i, d, field[i], [&](std::size_t k) { return field.index_of(k); });
  return out;
}

std::string lelong_csv(const LelongProfile& profile) {
  std::string out = std::string(kLelongHeader) + "\n";
  for (std::size_t k = 0; k < profile.deltas.size(); ++k)
    append_row(out, {format_number(profile.deltas[k]), format_number(profile.hat_values[k]),
                     format_number(profile.mean_values[k]), format_number(profile.smooth_values[k]),
                     format_number(profile.quotients[k])});
  return out;
}

std::string sweep_csv(std::span<const SweepSummary> sweeps) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& s : sweeps)
    append_row(out, {s.name, std::to_string(s.trials), std::to_string(s.failures),
                     std::to_string(s.rejected), format_number(s.worst),
                     format_number(s.tolerance), s.passed() ? "PASS" : "FAIL"});
  return out;
}

std::string abp_csv(std::span<const AbpCase> cases) {
  std::string out = std::string(kAbpHeader) + "\n";
  for (const auto& c : cases)
    append_row(out, {c.name, format_number(c.epsilon), format_number(c.result.contact_measure),
                     format_number(c.result.integral), format_number(c.result.ratio),
                     std::to_string(c.result.contact_points)});
  return out;
}

std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
  return path;
}

void emit_csv(const SolveReport& report, const std::filesystem::path& dir) {
  write_report(dir, "trace.csv", trace_csv(report.trace));
  if (report.last_good) write_report(dir, "phi.csv", field_csv(report.last_good->phi));
}

}  // namespace malab
