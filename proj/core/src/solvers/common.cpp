#include "lightray/solvers/common.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "lightray/error.hpp"
#include "lightray/random.hpp"

namespace lightray {

std::string_view to_string(LambdaRule::Kind kind) {
  switch (kind) {
    case LambdaRule::Kind::Fixed: return "fixed";
    case LambdaRule::Kind::Optimal: return "optimal";
    case LambdaRule::Kind::Sweep: return "sweep";
  }
  return "unknown";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Discrepancy: return "dp";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::Stagnation: return "stagnation";
  }
  return "unknown";
}

void SolverOptions::validate() const {
  require(max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be >= 1");
  require(dp_tau > 1.0, ErrorCode::InvalidArgument, "dp_tau must exceed 1");
  require(relaxation_factor > 0.0 && relaxation_factor < 2.0, ErrorCode::InvalidArgument,
          "relaxation_factor must lie in (0, 2)");
  require(backtracking.eta > 1.0, ErrorCode::InvalidArgument, "backtracking eta must exceed 1");
  require(!backtracking.L0 || *backtracking.L0 > 0.0, ErrorCode::InvalidArgument, "backtracking L0 must be positive");
  require(sigma_iters >= 1, ErrorCode::InvalidArgument, "sigma_iters must be >= 1");
  require(golden_evaluations >= 3, ErrorCode::InvalidArgument, "golden_evaluations must be >= 3");
  require(log10_lambda_min < log10_lambda_max, ErrorCode::InvalidArgument, "empty lambda search window");
  if (lambda_rule.kind == LambdaRule::Kind::Fixed) {
    require(lambda_rule.value >= 0.0, ErrorCode::InvalidArgument, "lambda must be nonnegative");
  }
  if (lambda_rule.kind == LambdaRule::Kind::Sweep) {
    require(!lambda_rule.grid.empty(), ErrorCode::InvalidArgument, "lambda sweep grid is empty");
    for (double l : lambda_rule.grid) require(l >= 0.0, ErrorCode::InvalidArgument, "lambda must be nonnegative");
  }
}

Metrics metrics(const Eigen::VectorXd& x, const Eigen::VectorXd& x_true, const LinearOperator& A,
                const Eigen::VectorXd& b) {
  const double true_norm = x_true.norm();
  const Eigen::VectorXd clean = A.apply(x_true);
  const double clean_norm = clean.norm();
  require(true_norm > 0.0, ErrorCode::ZeroDenominator, "RRE undefined for a zero true solution");
  require(clean_norm > 0.0, ErrorCode::ZeroDenominator, "RRN undefined when A x_true = 0");
  return {(x - x_true).norm() / true_norm, (A.apply(x) - b).norm() / clean_norm};
}

bool discrepancy_stop(double residual_norm, double delta, double tau) { return residual_norm <= tau * delta; }

double estimate_sigma1(const LinearOperator& A, int iters, std::uint64_t seed, double tol) {
  require(A.cols() > 0 && A.rows() > 0, ErrorCode::ZeroOperator, "cannot estimate sigma_1 of an empty operator");
  CounterRng rng(seed);
  Eigen::VectorXd v = rng.normal_vector(A.cols());
  v.normalize();
  double estimate = 0.0;
  for (int i = 0; i < iters; ++i) {
    const Eigen::VectorXd av = A.apply(v);
    const double rayleigh = av.squaredNorm() / v.squaredNorm();
    require(rayleigh > 0.0, ErrorCode::ZeroOperator, "operator annihilates the power-iteration vector");
    const double next = std::sqrt(rayleigh);
    const bool converged = i > 0 && std::abs(next - estimate) <= tol * next;
    estimate = next;
    if (converged) break;
    v = A.apply_adjoint(av);
    v /= v.norm();
  }
  return estimate;
}

Eigen::VectorXd shrink(const Eigen::VectorXd& x, double threshold) {
  require(threshold >= 0.0, ErrorCode::NegativeThreshold, "shrink threshold must be nonnegative");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]) - threshold;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
  return out;
}

double resolve_sigma1(const LinearOperator& A, const SolverOptions& opts) {
  if (opts.sigma1) {
    require(*opts.sigma1 > 0.0, ErrorCode::InvalidArgument, "sigma1 must be positive");
    return *opts.sigma1;
  }
  return estimate_sigma1(A, opts.sigma_iters, opts.seed, opts.sigma_tol);
}

void write_history_csv(const std::filesystem::path& path, const ReconResult& result) {
  std::ofstream os(path);
  require(os.good(), ErrorCode::Io, "cannot write " + path.string());
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "iter,rre,rrn,objective,lambda\n";
  for (const auto& r : result.history) {
    os << r.iter << ',';
    if (std::isnan(r.rre)) {
      os << "nan";
    } else {
      os << r.rre;
    }
    os << ',' << r.rrn << ',' << r.objective << ',' << r.lambda << '\n';
  }
  require(os.good(), ErrorCode::Io, "failed writing " + path.string());
}

void write_stop_sidecar(const std::filesystem::path& path, std::string_view method, const ReconResult& result) {
  std::ofstream os(path);
  require(os.good(), ErrorCode::Io, "cannot write " + path.string());
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "method=" << method << '\n'
     << "stop_reason=" << to_string(result.stop_reason) << '\n'
     << "iterations=" << result.history.size() << '\n'
     << "dp_iter=" << (result.dp_iter ? std::to_string(*result.dp_iter) : "none") << '\n'
     << "min_rre_iter=" << (result.min_rre_iter ? std::to_string(*result.min_rre_iter) : "none") << '\n'
     << "lambda=" << result.lambda << '\n';
  require(os.good(), ErrorCode::Io, "failed writing " + path.string());
}

namespace detail {

IterationTracker::IterationTracker(const Observation& obs, const Eigen::VectorXd* x_true, const SolverOptions& opts)
    : obs_(obs), x_true_(x_true), opts_(opts) {
  if (x_true_) {
    true_norm_ = x_true_->norm();
    require(true_norm_ > 0.0, ErrorCode::ZeroDenominator, "RRE undefined for a zero true solution");
  }
  const double denom = obs.clean_norm > 0.0 ? obs.clean_norm : obs.b.norm();
  rrn_denominator_ = denom > 0.0 ? denom : 1.0;
  result_.history.reserve(static_cast<std::size_t>(opts.max_iters));
}

bool IterationTracker::record(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& residual, double objective,
                              double lambda) {
  require(x.allFinite(), ErrorCode::NonFinite, "iterate " + std::to_string(k) + " is not finite");
  IterationRecord rec;
  rec.iter = k;
  const double res_norm = residual.norm();
  rec.rrn = res_norm / rrn_denominator_;
  rec.objective = objective;
  rec.lambda = lambda;
  rec.rre = std::numeric_limits<double>::quiet_NaN();
  if (x_true_) {
    rec.rre = (x - *x_true_).norm() / true_norm_;
    if (!result_.min_rre_iter || rec.rre < best_rre_) {
      best_rre_ = rec.rre;
      result_.min_rre_iter = k;
      result_.x_best = x;
    }
  }
  result_.history.push_back(rec);

  if (obs_.delta > 0.0 && !result_.dp_iter && discrepancy_stop(res_norm, obs_.delta, opts_.dp_tau)) {
    result_.dp_iter = k;
    result_.x_dp = x;
    return opts_.dp_enabled;
  }
  return false;
}

ReconResult IterationTracker::finish(Eigen::VectorXd x_final, StopReason reason, double lambda) {
  result_.x_final = std::move(x_final);
  result_.stop_reason = reason;
  result_.lambda = lambda;
  return std::move(result_);
}

}  // namespace detail

}  // namespace lightray
