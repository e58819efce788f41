#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "malab/config.hpp"
#include "malab/run.hpp"

using namespace malab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string log;
  fs::path dir;
  std::string summary;
};

Outcome run_text(const std::string& tag, const std::string& text) {
  RunConfig c = parse_config(text);
  c.output_dir = fixtures::scratch_dir(tag);
  std::ostringstream log;
  const int code = run(c, log);
  const auto summary_path = c.output_dir / "summary.txt";
  return {code, log.str(), c.output_dir, fs::exists(summary_path) ? fixtures::read_file(summary_path) : ""};
}

// The value of `key = value` in summary.txt, or "" if absent.
std::string summary_value(const std::string& summary, const std::string& key) {
  std::istringstream in(summary);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  return "";
}

const char* kSmallCma =
    "run.command = solve-cma\ngrid.n = 1\ngrid.points = 16\nequation.phi_star = 1 0 : 0.05 ; 0 1 : 0.03\n";

}  // namespace

TEST(Run, SmallCmaSolve) {
  const auto r = run_text("cma", kSmallCma);
  ASSERT_EQ(r.code, kExitSuccess) << r.log;
  EXPECT_LE(std::stod(summary_value(r.summary, "final_residual_sup")), 1e-8);
  EXPECT_LE(std::stod(summary_value(r.summary, "sup_error_vs_phi_star")), 1e-8);
  EXPECT_EQ(summary_value(r.summary, "exit_code"), "0");
  EXPECT_EQ(fixtures::count_lines(fixtures::read_file(r.dir / "trace.csv")), 11);
  EXPECT_TRUE(fs::exists(r.dir / "phi.csv"));
  EXPECT_EQ(parse_config(fixtures::read_file(r.dir / "config.txt")).echo(), fixtures::read_file(r.dir / "config.txt"));
}

TEST(Run, TwistBelowTheBoundIsInvalidInput) {
  const auto r = run_text("jbound", "run.command = solve-j\ngrid.n = 2\ngrid.points = 8\nequation.f = 1 0 0 0 : 2\n");
  EXPECT_EQ(r.code, kExitInvalidInput);
  EXPECT_NE(r.log.find("lower bound"), std::string::npos) << r.log;
  EXPECT_EQ(summary_value(r.summary, "exit_code"), "2");
}

TEST(Run, UnwritableOutputIsInvalidInput) {
  const auto dir = fixtures::scratch_dir("unwritable");
  std::ofstream(dir / "file") << "x";
  RunConfig c = parse_config(kSmallCma);
  c.output_dir = dir / "file" / "out";
  std::ostringstream log;
  EXPECT_EQ(run(c, log), kExitInvalidInput);
  EXPECT_NE(log.str().find("cannot create"), std::string::npos) << log.str();
}

TEST(Run, NumericFailureStillWritesTheLastGoodState) {
  // One Newton step per point and no bisection room: the first step cannot converge.
  const auto r = run_text("fail", std::string(kSmallCma) + "solver.max_newton = 1\npath.min_step = 0.5\npath.steps = 1\n");
  EXPECT_EQ(r.code, kExitNumericFailure) << r.log;
  EXPECT_EQ(summary_value(r.summary, "success"), "false");
  EXPECT_TRUE(fs::exists(r.dir / "trace.csv"));
  if (!summary_value(r.summary, "last_good_t").empty()) { EXPECT_TRUE(fs::exists(r.dir / "phi.csv")); }
}

TEST(Run, LelongCommand) {
  const auto r = run_text("lelong", "run.command = lelong\nlelong.alpha = 2\n");
  ASSERT_EQ(r.code, kExitSuccess) << r.log;
  EXPECT_NEAR(std::stod(summary_value(r.summary, "lelong_number")), 2.0, 1e-9);
  EXPECT_EQ(fixtures::count_lines(fixtures::read_file(r.dir / "lelong.csv")), 6);
}

TEST(Run, GlueAndAbpCommands) {
  const auto g = run_text("glue", "run.command = glue-demo\nglue.psi = 1 0 : 0.01\n");
  EXPECT_EQ(g.code, kExitSuccess) << g.log;
  EXPECT_LE(std::stod(summary_value(g.summary, "second_difference_ratio")), 10.0);
  const auto v = run_text("glue-bad", "run.command = glue-demo\nglue.violation = 0.01\n");
  EXPECT_EQ(v.code, kExitInvalidInput);
  EXPECT_NE(v.log.find("pair ("), std::string::npos) << v.log;

  const auto a = run_text("abp", "run.command = abp-demo\nabp.points = 128\nabp.perturbations = 2\n");
  EXPECT_EQ(a.code, kExitSuccess) << a.log;
  EXPECT_EQ(fixtures::count_lines(fixtures::read_file(a.dir / "abp.csv")), 4);
}

TEST(Run, RerunsAreByteIdentical) {
  const auto a = run_text("rerun-a", kSmallCma), b = run_text("rerun-b", kSmallCma);
  for (const char* name : {"trace.csv", "phi.csv"})
    EXPECT_EQ(fixtures::read_file(a.dir / name), fixtures::read_file(b.dir / name)) << name;
}
