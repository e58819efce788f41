// ma_lab: runs one configured command and writes its reports.
//
//   ma_lab --config run.cfg [--out DIR] [--seed N] [--threads N]
//
// --threads falls back to MA_LAB_THREADS, then to the config value.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "malab/config.hpp"
#include "malab/errors.hpp"
#include "malab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Continuity-method and psh toolkit lab"};
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<long long> seed;
  std::optional<int> threads;
  bool list_keys = false;
  app.add_option("--config", config_path, "flat key = value config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "seed for randomized sweeps (overrides run.seed)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads, "worker threads (overrides run.threads)")
      ->check(CLI::Range(1, 256));
  app.add_flag("--list-keys", list_keys, "print every config key with its default and exit");

  // --list-keys needs no config file.
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--list-keys") {
      for (const auto& k : malab::config_keys())
        std::cout << k.name << " = " << k.default_value << "    # " << k.help << "\n";
      return 0;
    }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : malab::kExitInvalidInput;
  }

  malab::RunConfig config;
  try {
    config = malab::load_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.seed = static_cast<std::uint64_t>(*seed);
    if (threads) {
      config.threads = *threads;
    } else if (const char* env = std::getenv("MA_LAB_THREADS")) {
      const int value = std::atoi(env);
      if (value < 1 || value > 256)
        throw malab::InvalidInput(std::string("MA_LAB_THREADS must be in [1, 256], got '") + env +
                                  "'");
      config.threads = value;
    }
  } catch (const malab::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return malab::kExitInvalidInput;
  }
  return malab::run(config, std::cerr);
}
