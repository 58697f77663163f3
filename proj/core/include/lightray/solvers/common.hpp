#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lightray/forward_model.hpp"
#include "lightray/linear_operator.hpp"

namespace lightray {

/// How a regularization parameter is chosen.
///
/// Optimal uses the true solution: golden-section search on log10(lambda) for
/// the projected Tikhonov solvers, a full-run sweep over the default grid for
/// FISTA. Sweep evaluates exactly the listed values.
struct LambdaRule {
  enum class Kind { Fixed, Optimal, Sweep };

  Kind kind = Kind::Optimal;
  double value = 0.0;
  std::vector<double> grid;

  static LambdaRule fixed(double lambda) { return {Kind::Fixed, lambda, {}}; }
  static LambdaRule optimal() { return {Kind::Optimal, 0.0, {}}; }
  static LambdaRule sweep(std::vector<double> grid) { return {Kind::Sweep, 0.0, std::move(grid)}; }

  bool operator==(const LambdaRule&) const = default;
};

std::string_view to_string(LambdaRule::Kind kind);

struct FistaBacktracking {
  std::optional<double> L0;  // defaults to the sigma_1^2 estimate
  double eta = 2.0;

  bool operator==(const FistaBacktracking&) const = default;
};

struct SolverOptions {
  int max_iters = 400;
  double relaxation_factor = 1.9;  // Landweber step = relaxation_factor / sigma_1^2
  double dp_tau = 1.01;
  /// Stop at the first iterate satisfying the discrepancy principle. The DP
  /// iteration is recorded either way whenever delta > 0.
  bool dp_enabled = true;
  LambdaRule lambda_rule = LambdaRule::optimal();
  FistaBacktracking backtracking;
  std::uint64_t seed = 0;
  /// Largest singular value of A if already known; estimated otherwise.
  std::optional<double> sigma1;
  int sigma_iters = 100;
  double sigma_tol = 1e-6;
  double stagnation_tol = 1e-10;
  /// Golden-section search window on log10(lambda) and evaluation budget.
  double log10_lambda_min = -10.0;
  double log10_lambda_max = 2.0;
  int golden_evaluations = 60;

  void validate() const;
  bool operator==(const SolverOptions&) const = default;
};

struct IterationRecord {
  int iter = 0;
  double rre = 0.0;  // NaN when no true solution was supplied
  double rrn = 0.0;
  double objective = 0.0;
  double lambda = 0.0;
};

enum class StopReason { Discrepancy, MaxIters, Stagnation };

std::string_view to_string(StopReason reason);

struct ReconResult {
  Eigen::VectorXd x_final;
  /// Iterate with the smallest RRE (only when a true solution was supplied).
  Eigen::VectorXd x_best;
  /// Iterate at which the discrepancy principle first held.
  Eigen::VectorXd x_dp;
  std::vector<IterationRecord> history;
  StopReason stop_reason = StopReason::MaxIters;
  std::optional<int> dp_iter;
  std::optional<int> min_rre_iter;
  double lambda = 0.0;  // lambda of the final iterate (FISTA: the run's lambda)

  const IterationRecord& record(int iter) const { return history.at(static_cast<std::size_t>(iter - 1)); }
};

struct Metrics {
  double rre = 0.0;
  double rrn = 0.0;
};

/// RRE = ||x - x_true|| / ||x_true||, RRN = ||A x - b|| / ||A x_true||.
Metrics metrics(const Eigen::VectorXd& x, const Eigen::VectorXd& x_true, const LinearOperator& A,
                const Eigen::VectorXd& b);

bool discrepancy_stop(double residual_norm, double delta, double tau);

/// Power iteration on A^T A from a seeded Gaussian start. Returns the square
/// root of the last Rayleigh quotient, a lower bound on sigma_1.
double estimate_sigma1(const LinearOperator& A, int iters = 100, std::uint64_t seed = 0, double tol = 1e-6);

/// Componentwise soft threshold (|x_i| - threshold)_+ sgn(x_i).
Eigen::VectorXd shrink(const Eigen::VectorXd& x, double threshold);

/// CSV with header `iter,rre,rrn,objective,lambda`.
void write_history_csv(const std::filesystem::path& path, const ReconResult& result);
/// `key=value` lines: method, stop_reason, iterations, dp_iter, min_rre_iter, lambda.
void write_stop_sidecar(const std::filesystem::path& path, std::string_view method, const ReconResult& result);

/// sigma_1 from the options or, failing that, by power iteration.
double resolve_sigma1(const LinearOperator& A, const SolverOptions& opts);

namespace detail {

/// Per-iteration bookkeeping shared by all solvers: metrics, DP detection,
/// best-iterate tracking.
class IterationTracker {
 public:
  IterationTracker(const Observation& obs, const Eigen::VectorXd* x_true, const SolverOptions& opts);

  /// Records iterate k given its residual A x - b. Returns true when the
  /// solver should stop because the DP fired and stopping is enabled.
  bool record(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& residual, double objective, double lambda);

  ReconResult finish(Eigen::VectorXd x_final, StopReason reason, double lambda);

 private:
  const Observation& obs_;
  const Eigen::VectorXd* x_true_;
  const SolverOptions& opts_;
  double true_norm_ = 0.0;
  double rrn_denominator_ = 1.0;
  ReconResult result_;
  double best_rre_ = 0.0;
};

}  // namespace detail

}  // namespace lightray
