#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lightray/experiment_config.hpp"
#include "lightray/forward_model.hpp"
#include "lightray/solvers/common.hpp"

namespace lightray {

/// One table row: RRE at the discrepancy-principle iterate and the minimum
/// RRE, each with its iteration number.
struct ReportRow {
  std::string method;
  std::optional<double> rre_dp;
  std::optional<int> iter_dp;
  double rre_min = 0.0;
  int iter_min = 0;

  bool operator==(const ReportRow&) const = default;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view method) const;
  bool operator==(const ExperimentReport&) const = default;
};

ReportRow report_row(std::string_view method, const ReconResult& result);

/// CSV `method,rre_dp,iter_dp,rre_min,iter_min`, RREs to 4 decimals; a
/// missing DP iterate leaves its two fields empty.
std::string format_report_table(const ExperimentReport& report);
/// Writes dir/report.csv and returns its path.
std::filesystem::path report_table(const ExperimentReport& report, const std::filesystem::path& dir);
/// Rebuilds the report from the history_<method>.csv and stop_<method>.txt
/// files of a run directory.
ExperimentReport read_run_directory(const std::filesystem::path& dir);

struct MethodRun {
  Method method = Method::Landweber;
  ReconResult result;
  /// FISTA only: the lambdas tried and each run's minimum RRE.
  std::vector<double> lambdas;
  std::vector<double> lambda_min_rre;
};

struct ExperimentRun {
  SpaceTimeGrid grid{2, {0.0, 1.0}, 1, {0.0, 1.0}};
  StateVector x_true;
  SparseOperator A;
  Observation obs;
  std::vector<MethodRun> methods;
  ExperimentReport report;

  const MethodRun* find(Method method) const;
};

struct RunOptions {
  bool write_artifacts = true;
  /// Run only these methods (configured options if present, defaults otherwise).
  std::optional<std::vector<Method>> methods;
  std::function<void(std::string_view)> log;
};

/// grid -> phantom -> rays -> operator -> noisy data -> each solver -> report.
/// All randomness derives from the config seeds. Errors keep their code and
/// name the failing stage. Artifacts (manifest.json, report.csv, per-method
/// histories, stop sidecars, slices of the minimum-RRE iterate) go to
/// cfg.output.directory.
ExperimentRun run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Stage 1-4 only: the problem without any solver.
ExperimentRun build_problem(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Runs one configured method on an already built problem.
MethodRun run_method(const ExperimentRun& problem, const MethodConfig& method, const ExperimentConfig& cfg);

/// manifest.json content: config, its hash, seed, version, problem sizes.
std::string manifest_json(const ExperimentConfig& cfg, const ExperimentRun& run);

}  // namespace lightray
