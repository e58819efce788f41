#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

int exit_status(const std::string& args) {
  const std::string cmd = std::string("\"") + MA_LAB_EXECUTABLE + "\" " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST(Cli, ListKeysNeedsNoConfig) { EXPECT_EQ(exit_status("--list-keys"), 0); }

TEST(Cli, MissingConfigIsInvalidInput) {
  EXPECT_EQ(exit_status("--config /nonexistent/ma_lab.cfg"), 2);
  EXPECT_EQ(exit_status(""), 2);
  EXPECT_EQ(exit_status("--config"), 2);
}

TEST(Cli, OverridesReachTheRun) {
  const auto dir = fixtures::scratch_dir("cli");
  {
    std::ofstream cfg(dir / "lelong.cfg");
    cfg << "run.command = lelong\n";
  }
  const auto out = dir / "out";
  EXPECT_EQ(exit_status("--config " + (dir / "lelong.cfg").string() + " --out " + out.string() +
                        " --threads 2 --seed 9"),
            0);
  const std::string echo = fixtures::read_file(out / "config.txt");
  EXPECT_NE(echo.find("run.threads = 2"), std::string::npos) << echo;
  EXPECT_NE(echo.find("run.seed = 9"), std::string::npos) << echo;
  EXPECT_TRUE(fs::exists(out / "lelong.csv"));
  EXPECT_EQ(exit_status("--config " + (dir / "lelong.cfg").string() + " --threads 0"), 2);
}

TEST(Cli, ThreadsFromTheEnvironment) {
  const auto dir = fixtures::scratch_dir("cli-env");
  {
    std::ofstream cfg(dir / "lelong.cfg");
    cfg << "run.command = lelong\noutput.dir = " << (dir / "out").string() << "\n";
  }
  EXPECT_EQ(std::system(("MA_LAB_THREADS=3 \"" + std::string(MA_LAB_EXECUTABLE) + "\" --config " +
                         (dir / "lelong.cfg").string() + " > /dev/null 2>&1").c_str()),
            0);
  EXPECT_NE(fixtures::read_file(dir / "out" / "config.txt").find("run.threads = 3"), std::string::npos);
  EXPECT_EQ(exit_status("--config " + (dir / "lelong.cfg").string() + " --threads 1"), 0);
  const int raw = std::system(("MA_LAB_THREADS=999 \"" + std::string(MA_LAB_EXECUTABLE) + "\" --config " +
                               (dir / "lelong.cfg").string() + " > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(raw), 2);
}
