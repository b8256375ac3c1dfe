#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gafs/models.hpp"
#include "gafs/stats.hpp"

namespace gafs {

enum class ExperimentKind {
  Moments,
  Coefficients,
  Tightness,
  OracleEquivalence,
  GafCompare,
  Trajectories,
  SeparationSweep,
  CriticalTime,
  SupnormCheck,
};

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& name);
const std::vector<ExperimentKind>& all_experiments();

// Acceptance bands.
inline constexpr double kStdErrBand = 4.0;
inline constexpr double kEventStdErrBand = 3.0;
inline constexpr double kSeparationGate = 0.9;
inline constexpr double kOracleTolerance = 1e-8;

/// Plain key = value configuration; '#' starts a comment. Complex values are
/// written "re,im".
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Moments;
  BaseKind model = BaseKind::Haar;
  LawSchedule law;
  Index n = 8;
  Complex a{1.0, 0.0};
  double q = 0.5;
  double alpha = 0.3;
  double epsilon = 0.1;
  Index samples = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path out_dir = "out";

  std::string statistic = "trace";  // moments: trace | weights
  std::vector<int> l_values;
  int k_max = 4;
  std::vector<MomentSpec> moments;
  std::vector<Complex> z_grid;
  std::vector<double> t_grid;
  double radius = 0.9;
  Index gaf_order = 256;
  double delta = 0.2;
  int p = 2;
  int degree = 10;
  double k_radius = 0.5;
  std::optional<double> rho_in;
  std::optional<double> rho_out;
  Index event_samples = 0;

  /// Keys in the order read, for the run summary.
  std::vector<std::pair<std::string, std::string>> echo;

  ModelSpec model_spec() const;
  /// Checks every field the chosen experiment uses; throws UsageError naming it.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct CheckRow {
  std::string quantity;
  Complex value{0.0, 0.0};
  double std_err = 0.0;
  Index samples = 0;
  double reference = 0.0;
  bool pass = false;
};

struct RunSummary {
  std::string experiment_id;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<CheckRow> rows;
  double wall_seconds = 0.0;
  std::vector<std::string> artifacts;

  bool all_pass() const;
  const CheckRow* find(const std::string& quantity) const;
  std::string json() const;
};

/// Runs the experiment and writes results.csv, summary.json and any
/// experiment-specific CSVs into config.out_dir.
RunSummary run(const ExperimentConfig& config);

/// CSV files and columns produced by an experiment.
std::string schema(ExperimentKind k);

}  // namespace gafs
