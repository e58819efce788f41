#include "malab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "malab/errors.hpp"

namespace malab {

namespace {

const std::vector<std::pair<Command, std::string>>& command_names() {
  static const std::vector<std::pair<Command, std::string>> names = {
      {Command::SolveCma, "solve-cma"}, {Command::SolveJ, "solve-j"},
      {Command::SolveGma, "solve-gma"}, {Command::CheckCone, "check-cone"},
      {Command::Lelong, "lelong"},      {Command::GlueDemo, "glue-demo"},
      {Command::AbpDemo, "abp-demo"},   {Command::Props, "props"}};
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format(v[i]);
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
  throw InvalidInput("config: " + key + " = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size() || !std::isfinite(v))
    bad_value(key, value, "not a finite number");
  return v;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size())
    bad_value(key, value, "not an integer");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::string text = value;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  std::string item;
  while (in >> item) out.push_back(to_double(key, item));
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(key, value, "expected true or false");
}

double positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0)) bad_value(key, value, "must be positive");
  return v;
}

int int_in(const std::string& key, const std::string& value, long long lo, long long hi) {
  const long long v = to_integer(key, value);
  if (v < lo || v > hi)
    bad_value(key, value, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

struct Field {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define MALAB_DOUBLE(name, member, check, help)                                             \
  Field {                                                                                   \
    {name, format(RunConfig{}.member), help},                                               \
        [](RunConfig& c, const std::string& v) { c.member = check(name, v); },              \
        [](const RunConfig& c) { return format(c.member); }                                 \
  }
#define MALAB_INT(name, member, lo, hi, help)                                               \
  Field {                                                                                   \
    {name, std::to_string(RunConfig{}.member), help},                                       \
        [](RunConfig& c, const std::string& v) { c.member = int_in(name, v, lo, hi); },     \
        [](const RunConfig& c) { return std::to_string(c.member); }                         \
  }
#define MALAB_TEXT(name, member, help)                                                      \
  Field {                                                                                   \
    {name, RunConfig{}.member, help}, [](RunConfig& c, const std::string& v) { c.member = v; }, \
        [](const RunConfig& c) { return c.member; }                                         \
  }
#define MALAB_LIST(name, member, help)                                                      \
  Field {                                                                                   \
    {name, format(RunConfig{}.member), help},                                               \
        [](RunConfig& c, const std::string& v) { c.member = to_list(name, v); },            \
        [](const RunConfig& c) { return format(c.member); }                                 \
  }

double any_double(const std::string& key, const std::string& v) { return to_double(key, v); }
double fraction(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x > 0.0 && x < 1.0)) bad_value(key, v, "must lie in (0, 1)");
  return x;
}
double non_negative(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x >= 0.0)) bad_value(key, v, "must be >= 0");
  return x;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t = {
        Field{{"run.command", "solve-cma", "one of solve-cma, solve-j, solve-gma, check-cone, "
                                           "lelong, glue-demo, abp-demo, props"},
              [](RunConfig& c, const std::string& v) { c.command = parse_command(v); },
              [](const RunConfig& c) { return to_string(c.command); }},
        Field{{"run.seed", "0", "seed of the randomized sweeps"},
              [](RunConfig& c, const std::string& v) {
                const long long s = to_integer("run.seed", v);
                if (s < 0) bad_value("run.seed", v, "must be >= 0");
                c.seed = static_cast<std::uint64_t>(s);
              },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
        MALAB_INT("run.threads", threads, 1, 256, "worker threads"),
        Field{{"output.dir", ".", "directory for reports"},
              [](RunConfig& c, const std::string& v) {
                if (v.empty()) bad_value("output.dir", v, "must not be empty");
                c.output_dir = v;
              },
              [](const RunConfig& c) { return c.output_dir.string(); }},

        MALAB_INT("grid.n", n, 1, 3, "complex dimension of the torus"),
        MALAB_INT("grid.points", points, 8, 256, "points per real axis (even)"),

        MALAB_TEXT("equation.f", f, "twist / right-hand side as a trig series"),
        MALAB_TEXT("equation.phi_star", phi_star,
                   "manufactured solution; when set, equation.f is derived from it"),
        Field{{"equation.normalize_f", "true",
               "shift f by the constant that closes the integral identity"},
              [](RunConfig& c, const std::string& v) {
                c.normalize_f = to_bool("equation.normalize_f", v);
              },
              [](const RunConfig& c) { return std::string(c.normalize_f ? "true" : "false"); }},
        MALAB_LIST("equation.chi_diag", chi_diag, "constant diagonal of chi (empty: identity)"),
        MALAB_TEXT("equation.chi_potential", chi_potential,
                   "chi = diag + ddbar(potential), a trig series"),
        Field{{"equation.c", "", "J constant (empty: the cohomological value)"},
              [](RunConfig& c, const std::string& v) {
                if (v.empty()) c.c.reset();
                else c.c = positive("equation.c", v);
              },
              [](const RunConfig& c) { return c.c ? format(*c.c) : std::string(); }},
        MALAB_LIST("equation.ck", ck, "GMA coefficients c_1 .. c_{n-1}"),
        Field{{"equation.family", "j", "family for check-cone: cma, j or gma"},
              [](RunConfig& c, const std::string& v) { c.cone_family = parse_family(v); },
              [](const RunConfig& c) { return to_string(c.cone_family); }},

        MALAB_INT("path.steps", steps, 1, 100000, "uniform steps when path.schedule is empty"),
        MALAB_LIST("path.schedule", schedule, "explicit increasing t values ending at 1"),
        MALAB_DOUBLE("path.min_step", min_step, positive, "smallest bisected step"),

        MALAB_DOUBLE("solver.newton_tol", newton_tol, positive, "sup |R - b| per path point"),
        MALAB_INT("solver.max_newton", max_newton, 1, 1000, "Newton iterations per point"),
        MALAB_DOUBLE("solver.gmres_tol", gmres_tol, positive, "relative GMRES tolerance"),
        MALAB_INT("solver.gmres_restart", gmres_restart, 1, 1000, "GMRES restart length"),
        MALAB_INT("solver.gmres_max", gmres_max, 1, 100000, "GMRES iteration cap"),
        MALAB_DOUBLE("solver.min_damping", min_damping, fraction, "smallest Newton damping"),
        MALAB_DOUBLE("solver.trace_cap", trace_cap, positive, "blow-up cap on the trace bound"),
        MALAB_DOUBLE("solver.osc_cap", osc_cap, positive, "blow-up cap on osc phi"),

        MALAB_TEXT("lelong.function", lelong_function,
                   "log_norm, truncated_log, squared_norm or bank:<index>"),
        MALAB_DOUBLE("lelong.alpha", lelong_alpha, positive, "scale of log_norm"),
        MALAB_DOUBLE("lelong.floor", lelong_floor, any_double, "floor of truncated_log"),
        MALAB_INT("lelong.n", lelong_n, 1, 3, "complex dimension of the ball"),
        MALAB_INT("lelong.points", lelong_points, 5, 20001, "points per axis on B(1)"),
        MALAB_DOUBLE("lelong.reference", lelong_reference, fraction, "reference radius r"),
        MALAB_INT("lelong.count", lelong_count, 3, 64, "halvings of r in the ladder"),
        MALAB_LIST("lelong.center", lelong_center, "base point (empty: the origin)"),

        MALAB_INT("glue.n", glue_n, 1, 3, "complex dimension of the torus"),
        MALAB_INT("glue.points", glue_points, 4, 512, "points per real axis"),
        MALAB_DOUBLE("glue.spacing", glue_spacing, fraction, "centre lattice spacing (divides 1)"),
        MALAB_DOUBLE("glue.r", glue_r, positive, "ball radius"),
        MALAB_DOUBLE("glue.eps", glue_eps, fraction, "regularization eps as a fraction of r^2"),
        MALAB_TEXT("glue.psi", glue_psi, "global smooth potential the locals restrict"),
        MALAB_DOUBLE("glue.violation", glue_violation, non_negative,
                     "offset added to every other local"),

        MALAB_INT("abp.points", abp_points, 8, 4096, "points per axis on B(1) in R^2"),
        MALAB_DOUBLE("abp.eps", abp_eps, positive, "eps of the base case |x|^2 - 1"),
        MALAB_INT("abp.perturbations", abp_perturbations, 0, 10000, "random convex perturbations"),
        MALAB_DOUBLE("abp.amplitude", abp_amplitude, fraction, "bump height over s^2"),

        MALAB_INT("props.cone_trials", cone_trials, 1, 100000000, "cone-preservation tuples"),
        MALAB_INT("props.pair_trials", pair_trials, 1, 100000000, "concavity / gradient draws"),
        MALAB_INT("props.wedge_trials", wedge_trials, 1, 100000000, "pencils per dimension"),
        MALAB_INT("props.bank_size", bank_size, 1, 10000, "psh bank members"),
        MALAB_INT("props.bank_points", bank_points, 5, 129, "points per axis of the bank grid"),
    };
    std::sort(t.begin(), t.end(), [](const Field& a, const Field& b) { return a.key.name < b.key.name; });
    return t;
  }();
  return table;
}

#undef MALAB_DOUBLE
#undef MALAB_INT
#undef MALAB_TEXT
#undef MALAB_LIST

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : command_names())
    if (cmd == c) return name;
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& [cmd, n] : command_names())
    if (n == name) return cmd;
  throw InvalidInput("unknown command '" + name + "'");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& f : fields()) out += f.key.name + " = " + f.get(*this) + "\n";
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.key.name == key; });
    if (it == table.end())
      throw InvalidInput("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw InvalidInput("config line " + std::to_string(number) + ": repeated key '" + key + "'");
    it->set(config, value);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace malab
