#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rydress/config.hpp"
#include "rydress/errors.hpp"
#include "rydress/experiments.hpp"
#include "rydress/parallel.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw rydress::ConfigError("cannot write " + path.string());
  f << contents;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg-dressed two-atom simulator"};
  app.set_version_flag("--version", rydress::version());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool strict = false;
  std::optional<std::uint64_t> shots;
  unsigned threads = 0;
  bool quiet = false;

  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed, overrides the config");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--strict", strict, "turn protocol warnings into errors");
  app.add_option("--shots", shots, "Monte Carlo shots (recapture: samples per point)");
  app.add_option("--threads", threads, "worker thread cap, 0 = hardware");
  app.add_flag("-q,--quiet", quiet, "do not print the summary");

  const char* about[][2] = {{"jcurve", "J versus interatomic distance"},
                            {"scan", "microwave spectroscopy and J extraction"},
                            {"rabi", "blockaded two-atom Rabi oscillation"},
                            {"bell", "Bell-state preparation and parity analysis"},
                            {"lifetime", "Rydberg lifetime from a two-pi-pulse sequence"},
                            {"recapture", "release-and-recapture survival"}};
  for (const auto& a : about) app.add_subcommand(a[0], a[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    rydress::ExperimentConfig config =
        config_path.empty() ? rydress::ExperimentConfig{} : rydress::load_config_file(config_path);
    if (seed) config.seed = *seed;
    if (strict) config.strict = true;
    if (shots) {
      if (*shots == 0) throw rydress::ConfigError("--shots: must be positive");
      if (command == "recapture") {
        config.recapture_samples = *shots;
      } else {
        config.shots = static_cast<int>(*shots);
      }
    }
    rydress::set_max_threads(threads);

    const rydress::ExperimentOutput out = rydress::run_experiment(command, config);
    fs::create_directories(out_dir);
    for (const auto& f : out.files) write_file(fs::path(out_dir) / f.name, f.contents);
    const std::string summary = out.summary.dump(2) + "\n";
    write_file(fs::path(out_dir) / (command + "_summary.json"), summary);
    if (!quiet) std::cout << summary;
    if (out.numerical_error) {
      std::cerr << "numerical error: " << *out.numerical_error << "\n";
      return 2;
    }
    return 0;
  } catch (const rydress::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rydress::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rydress::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 2;
  } catch (const rydress::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
