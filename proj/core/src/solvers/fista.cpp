#include "lightray/solvers/fista.hpp"

#include <cmath>
#include <limits>

#include "lightray/error.hpp"

namespace lightray {

ProxGradientStep prox_gradient_step(const LinearOperator& A, const Eigen::VectorXd& b, double lambda,
                                    const Eigen::VectorXd& y, const Eigen::VectorXd& Ay, double L, double eta) {
  const Eigen::VectorXd ry = Ay - b;
  const double fy = ry.squaredNorm();
  const Eigen::VectorXd grad = 2.0 * A.apply_adjoint(ry);
  ProxGradientStep step;
  for (int i = 0;; ++i) {
    require(std::isfinite(L), ErrorCode::NonFinite, "backtracking Lipschitz estimate overflowed");
    Eigen::VectorXd p = shrink(y - grad / L, lambda / L);
    Eigen::VectorXd Ap = A.apply(p);
    const Eigen::VectorXd d = p - y;
    const double fp = (Ap - b).squaredNorm();
    const double model = fy + d.dot(grad) + 0.5 * L * d.squaredNorm();
    // Smooth parts only: the l1 terms cancel on both sides. The slack covers
    // rounding when p is (numerically) y.
    if (fp <= model + 1e-12 * std::max(1.0, fy)) {
      step.x = std::move(p);
      step.Ax = std::move(Ap);
      step.lipschitz = L;
      step.backtracks = i;
      return step;
    }
    L *= eta;
  }
}

ReconResult fista(const LinearOperator& A, const Observation& obs, double lambda, const Eigen::VectorXd* x_true,
                  const SolverOptions& opts) {
  opts.validate();
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be nonnegative");
  require(obs.b.size() == A.rows(), ErrorCode::DimensionMismatch, "data length does not match the operator");
  require(!x_true || x_true->size() == A.cols(), ErrorCode::DimensionMismatch, "x_true length mismatch");

  double L = 0.0;
  if (opts.backtracking.L0) {
    L = *opts.backtracking.L0;
  } else {
    const double s = resolve_sigma1(A, opts);
    L = s * s;
  }

  detail::IterationTracker tracker(obs, x_true, opts);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  Eigen::VectorXd Ax = Eigen::VectorXd::Zero(A.rows());
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd Ax_prev = Ax;
  double t = 1.0;
  double t_prev = 1.0;
  for (int k = 1; k <= opts.max_iters; ++k) {
    const double momentum = (t_prev - 1.0) / t;
    const Eigen::VectorXd y = x + momentum * (x - x_prev);
    const Eigen::VectorXd Ay = Ax + momentum * (Ax - Ax_prev);
    ProxGradientStep step = prox_gradient_step(A, obs.b, lambda, y, Ay, L, opts.backtracking.eta);
    L = step.lipschitz;

    x_prev = std::move(x);
    Ax_prev = std::move(Ax);
    x = std::move(step.x);
    Ax = std::move(step.Ax);
    t_prev = t;
    t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));

    const Eigen::VectorXd residual = Ax - obs.b;
    const double objective = residual.squaredNorm() + lambda * x.lpNorm<1>();
    if (tracker.record(k, x, residual, objective, lambda)) {
      return tracker.finish(std::move(x), StopReason::Discrepancy, lambda);
    }
    if ((x - x_prev).norm() <= opts.stagnation_tol * x.norm()) {
      return tracker.finish(std::move(x), StopReason::Stagnation, lambda);
    }
  }
  return tracker.finish(std::move(x), StopReason::MaxIters, lambda);
}

std::vector<double> default_fista_lambda_grid(const LinearOperator& A, const Eigen::VectorXd& b) {
  const double scale = A.apply_adjoint(b).lpNorm<Eigen::Infinity>();
  require(scale > 0.0, ErrorCode::ZeroOperator, "A^T b vanishes; no lambda scale");
  constexpr int count = 15;
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[i] = scale * std::pow(10.0, -6.0 + 6.0 * i / (count - 1));
  return grid;
}

FistaSweep fista_sweep(const LinearOperator& A, const Observation& obs, const Eigen::VectorXd* x_true,
                       const SolverOptions& opts) {
  opts.validate();
  FistaSweep sweep;
  switch (opts.lambda_rule.kind) {
    case LambdaRule::Kind::Fixed:
      sweep.lambdas = {opts.lambda_rule.value};
      break;
    case LambdaRule::Kind::Optimal:
      sweep.lambdas = default_fista_lambda_grid(A, obs.b);
      break;
    case LambdaRule::Kind::Sweep:
      sweep.lambdas = opts.lambda_rule.grid;
      break;
  }
  require(x_true || sweep.lambdas.size() == 1, ErrorCode::InvalidArgument,
          "choosing lambda by minimum RRE needs the true solution");

  SolverOptions run_opts = opts;
  if (!run_opts.sigma1 && !run_opts.backtracking.L0) run_opts.sigma1 = resolve_sigma1(A, opts);

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sweep.lambdas.size(); ++i) {
    ReconResult run = fista(A, obs, sweep.lambdas[i], x_true, run_opts);
    const double rre = run.min_rre_iter ? run.record(*run.min_rre_iter).rre : std::numeric_limits<double>::quiet_NaN();
    sweep.min_rre.push_back(rre);
    if (i == 0 || rre < best) {
      best = rre;
      sweep.best_index = i;
      sweep.best = std::move(run);
    }
  }
  return sweep;
}

}  // namespace lightray
