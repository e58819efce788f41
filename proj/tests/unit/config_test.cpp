#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "malab/config.hpp"
#include "malab/errors.hpp"

using namespace malab;

TEST(Config, DefaultsMatchTheKeyTable) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.command, Command::SolveCma);
  EXPECT_EQ(c.steps, 10);
  EXPECT_DOUBLE_EQ(c.newton_tol, 1e-10);
  EXPECT_EQ(c.max_newton, 30);
  EXPECT_EQ(c.gmres_restart, 40);
  EXPECT_EQ(c.gmres_max, 400);
  EXPECT_DOUBLE_EQ(c.min_step, 1e-3);
  EXPECT_EQ(c.points, 16);
}

TEST(Config, ParsesValuesListsAndComments) {
  const RunConfig c = parse_config(
      "# a comment\n"
      "run.command = solve-gma\n"
      "grid.n = 3   # trailing comment\n"
      "grid.points = 8\n"
      "equation.ck = 0.5, 0.25\n"
      "equation.chi_diag = 1 2 3\n"
      "equation.c = 2.5\n"
      "equation.phi_star = 1 0 0 0 0 0 : 0.05\n");
  EXPECT_EQ(c.command, Command::SolveGma);
  EXPECT_EQ(c.n, 3);
  ASSERT_EQ(c.ck.size(), 2u);
  EXPECT_DOUBLE_EQ(c.ck[1], 0.25);
  ASSERT_EQ(c.chi_diag.size(), 3u);
  EXPECT_DOUBLE_EQ(c.chi_diag[2], 3.0);
  ASSERT_TRUE(c.c.has_value());
  EXPECT_DOUBLE_EQ(*c.c, 2.5);
  EXPECT_EQ(c.phi_star, "1 0 0 0 0 0 : 0.05");
}

TEST(Config, EchoRoundTrips) {
  const RunConfig c = parse_config(
      "run.command = lelong\nrun.seed = 42\nlelong.alpha = 0.3\nlelong.center = 0.1 0.2\n"
      "path.schedule = 0.25 0.5 1\nequation.normalize_f = false\nglue.psi = 1 0 : 0.01\n");
  const std::string echo = c.echo();
  EXPECT_EQ(parse_config(echo).echo(), echo);
  EXPECT_NE(echo.find("run.seed = 42"), std::string::npos);
}

TEST(Config, KeyTableCoversTheEcho) {
  std::set<std::string> names;
  for (const auto& k : config_keys()) EXPECT_TRUE(names.insert(k.name).second) << k.name;
  const std::string echo = parse_config("").echo();
  EXPECT_EQ(fixtures::count_lines(echo), static_cast<int>(names.size()));
  for (const auto& name : names) EXPECT_NE(echo.find(name + " = "), std::string::npos) << name;
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("grid.nn = 2\n"), InvalidInput);
  EXPECT_THROW(parse_config("grid.n = 2\ngrid.n = 2\n"), InvalidInput);
  EXPECT_THROW(parse_config("grid.n 2\n"), InvalidInput);
  EXPECT_THROW(parse_config("grid.n = two\n"), InvalidInput);
  EXPECT_THROW(parse_config("grid.n = 4\n"), InvalidInput);
  EXPECT_THROW(parse_config("grid.points = 512\n"), InvalidInput);
  EXPECT_THROW(parse_config("run.threads = 0\n"), InvalidInput);
  EXPECT_THROW(parse_config("path.min_step = -1\n"), InvalidInput);
  EXPECT_THROW(parse_config("equation.normalize_f = maybe\n"), InvalidInput);
  EXPECT_THROW(parse_config("run.command = solve-everything\n"), InvalidInput);
  EXPECT_THROW(parse_command("solve"), InvalidInput);
}

TEST(Config, ErrorsNameTheLineAndKey) {
  try {
    parse_config("grid.n = 2\nbogus.key = 1\n");
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bogus.key"), std::string::npos) << msg;
  }
}

TEST(Config, LoadMissingFileFails) {
  EXPECT_THROW(load_config(fixtures::scratch_dir("cfg") / "absent.cfg"), InvalidInput);
}

TEST(Config, CommandNamesRoundTrip) {
  for (Command c : {Command::SolveCma, Command::SolveJ, Command::SolveGma, Command::CheckCone,
                    Command::Lelong, Command::GlueDemo, Command::AbpDemo, Command::Props})
    EXPECT_EQ(parse_command(to_string(c)), c);
}
