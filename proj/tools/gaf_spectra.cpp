// gaf-spectra: batch front-end for the experiment runner.
//
//   gaf-spectra run <config-path> [--seed N] [--out DIR] [--workers K]
//   gaf-spectra schema <experiment>
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gafs/experiment.hpp"
#include "gafs/io.hpp"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

int report_error(const char* kind, const std::string& what, const std::optional<std::filesystem::path>& dir) {
  nlohmann::ordered_json j = {{"error", kind}, {"message", what}};
  std::cerr << j.dump() << "\n";
  if (dir) {
    try {
      gafs::write_atomic(*dir / "error.json", j.dump(2) + "\n");
    } catch (const std::exception&) {
    }
  }
  return std::string(kind) == "usage" ? kUsage : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-one perturbed random unitary matrices: simulation and checks"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run an experiment configuration");
  std::string config_path;
  std::optional<long long> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  run_cmd->add_option("config", config_path, "key = value configuration file")->required();
  run_cmd->add_option("--seed", seed, "override the root seed");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--workers", workers, "worker threads");

  auto* schema_cmd = app.add_subcommand("schema", "print the CSV schema of an experiment");
  std::string experiment;
  schema_cmd->add_option("experiment", experiment, "experiment name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*schema_cmd) {
    try {
      std::cout << gafs::schema(gafs::parse_experiment(experiment));
      return kPass;
    } catch (const gafs::UsageError& e) {
      return report_error("usage", e.what(), std::nullopt);
    }
  }

  std::optional<std::filesystem::path> dir;
  if (out_dir) dir = *out_dir;
  try {
    gafs::ExperimentConfig cfg = gafs::load_config(config_path);
    if (seed) {
      if (*seed < 0) throw gafs::UsageError("--seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(*seed);
      cfg.echo.emplace_back("seed(cli)", std::to_string(*seed));
    }
    if (out_dir) cfg.out_dir = *out_dir;
    if (workers) cfg.workers = *workers;
    dir = cfg.out_dir;
    cfg.validate();

    const gafs::RunSummary s = gafs::run(cfg);
    for (const auto& r : s.rows)
      std::cout << (r.pass ? "pass  " : "FAIL  ") << r.quantity << " = " << r.value.real() << " (reference "
                << r.reference << ")\n";
    std::cout << s.experiment_id << ": " << (s.all_pass() ? "all checks pass" : "check failure") << " in "
              << s.wall_seconds << " s, artifacts in " << cfg.out_dir.string() << "\n";
    return s.all_pass() ? kPass : kCheckFailed;
  } catch (const gafs::UsageError& e) {
    return report_error("usage", e.what(), dir);
  } catch (const gafs::NumericalError& e) {
    return report_error("numerical", e.what(), dir);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), dir);
  }
}
