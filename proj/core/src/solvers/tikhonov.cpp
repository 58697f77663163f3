#include "lightray/solvers/tikhonov.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "lightray/error.hpp"

namespace lightray {

namespace {

/// The projected problem min ||B z - beta1 e1||^2 + lambda ||z||^2 for the
/// (k+1) x k lower bidiagonal B (diagonal alpha, subdiagonal beta_2..beta_{k+1}).
/// Each solve reduces [B; sqrt(lambda) I] to upper bidiagonal form with Givens
/// rotations (the damped LSQR recurrence), so it costs O(k).
class ProjectedProblem {
 public:
  ProjectedProblem(std::vector<double> alpha, std::vector<double> beta, double beta1)
      : alpha_(std::move(alpha)), beta_(std::move(beta)), beta1_(beta1) {}

  Eigen::VectorXd solve(double lambda) const {
    const int k = static_cast<int>(alpha_.size());
    const double damp = std::sqrt(lambda);
    std::vector<double> rho(k), theta(k, 0.0), phi(k);
    double rho_bar = alpha_[0];
    double phi_bar = beta1_;
    for (int j = 0; j < k; ++j) {
      const double rho_damped = std::hypot(rho_bar, damp);
      const double c1 = rho_damped > 0.0 ? rho_bar / rho_damped : 1.0;
      const double phi_damped = c1 * phi_bar;
      const double b = beta_[j];
      rho[j] = std::hypot(rho_damped, b);
      require(rho[j] > 0.0, ErrorCode::KrylovBreakdown, "singular projected problem");
      const double c = rho_damped / rho[j];
      const double s = b / rho[j];
      phi[j] = c * phi_damped;
      phi_bar = s * phi_damped;
      if (j + 1 < k) {
        theta[j] = s * alpha_[j + 1];
        rho_bar = -c * alpha_[j + 1];
      }
    }
    Eigen::VectorXd z(k);
    for (int j = k - 1; j >= 0; --j) z[j] = (phi[j] - (j + 1 < k ? theta[j] * z[j + 1] : 0.0)) / rho[j];
    return z;
  }

 private:
  std::vector<double> alpha_;
  std::vector<double> beta_;  // beta_2..beta_{k+1}
  double beta1_;
};

/// ||W z - x_true||^2 / ||x_true||^2 from the Gram data G = W^T W, c = W^T x_true.
double projected_rre(const Eigen::MatrixXd& G, const Eigen::VectorXd& c, double true_sq, const Eigen::VectorXd& z) {
  const double err = z.dot(G * z) - 2.0 * z.dot(c) + true_sq;
  return std::sqrt(std::max(0.0, err) / true_sq);
}

double choose_lambda(const ProjectedProblem& problem, const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                     double true_sq, const SolverOptions& opts) {
  const auto& rule = opts.lambda_rule;
  if (rule.kind == LambdaRule::Kind::Fixed) return rule.value;
  auto rre = [&](double lambda) { return projected_rre(G, c, true_sq, problem.solve(lambda)); };
  if (rule.kind == LambdaRule::Kind::Sweep) {
    double best = rule.grid.front();
    double best_rre = std::numeric_limits<double>::infinity();
    for (double l : rule.grid) {
      const double r = rre(l);
      if (r < best_rre) {
        best_rre = r;
        best = l;
      }
    }
    return best;
  }
  // Golden-section search on log10(lambda); the end points are evaluated too.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto at = [&](double e) { return rre(std::pow(10.0, e)); };
  double a = opts.log10_lambda_min;
  double b = opts.log10_lambda_max;
  double best_e = a;
  double best_r = at(a);
  auto consider = [&](double e, double r) {
    if (r < best_r) {
      best_r = r;
      best_e = e;
    }
  };
  consider(b, at(b));
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = at(x1);
  double f2 = at(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int evals = 4; evals < opts.golden_evaluations; ++evals) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = at(x1);
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = at(x2);
      consider(x2, f2);
    }
  }
  return std::pow(10.0, best_e);
}

ReconResult projected_tikhonov(const LinearOperator& A, const Observation& obs, const SymmetricOperator* Q,
                               const Eigen::VectorXd* x_true, const SolverOptions& opts) {
  opts.validate();
  require(obs.b.size() == A.rows(), ErrorCode::DimensionMismatch, "data length does not match the operator");
  require(!x_true || x_true->size() == A.cols(), ErrorCode::DimensionMismatch, "x_true length mismatch");
  require(!Q || Q->size() == A.cols(), ErrorCode::DimensionMismatch, "covariance size does not match the operator");
  const bool needs_truth = opts.lambda_rule.kind != LambdaRule::Kind::Fixed;
  require(x_true || !needs_truth, ErrorCode::InvalidArgument, "the optimal and sweep lambda rules need x_true");

  detail::IterationTracker tracker(obs, x_true, opts);
  GolubKahanState gk = golub_kahan_init(obs.b);
  const double true_sq = x_true ? x_true->squaredNorm() : 1.0;
  Eigen::MatrixXd G(0, 0);
  Eigen::VectorXd c(0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  double lambda = 0.0;

  for (int k = 1; k <= opts.max_iters; ++k) {
    if (!golub_kahan_step(A, gk, Q)) {
      require(gk.k() > 0, ErrorCode::KrylovBreakdown, "Golub-Kahan breakdown before k=1");
      return tracker.finish(std::move(x), StopReason::Stagnation, lambda);
    }
    const Eigen::VectorXd& wk = gk.w(k - 1);
    if (needs_truth) {
      G.conservativeResize(k, k);
      c.conservativeResize(k);
      for (int j = 0; j < k; ++j) {
        const double gj = gk.w(j).dot(wk);
        G(j, k - 1) = gj;
        G(k - 1, j) = gj;
      }
      c[k - 1] = wk.dot(*x_true);
    }

    const ProjectedProblem problem(gk.alpha, std::vector<double>(gk.beta.begin() + 1, gk.beta.end()), gk.beta1());
    lambda = choose_lambda(problem, G, c, true_sq, opts);
    const Eigen::VectorXd z = problem.solve(lambda);
    x.setZero();
    for (int j = 0; j < k; ++j) x += z[j] * gk.w(j);

    const Eigen::VectorXd residual = A.apply(x) - obs.b;
    const double objective = residual.squaredNorm() + lambda * z.squaredNorm();
    if (tracker.record(k, x, residual, objective, lambda)) {
      return tracker.finish(std::move(x), StopReason::Discrepancy, lambda);
    }
    if (gk.exhausted) return tracker.finish(std::move(x), StopReason::Stagnation, lambda);
  }
  return tracker.finish(std::move(x), StopReason::MaxIters, lambda);
}

}  // namespace

Eigen::VectorXd projected_tikhonov_solve(const Eigen::MatrixXd& B, double beta1, double lambda) {
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be nonnegative");
  const Eigen::Index k = B.cols();
  require(k >= 1 && B.rows() == k + 1, ErrorCode::DimensionMismatch, "B must be (k+1) x k");
  std::vector<double> alpha(k), beta(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    alpha[j] = B(j, j);
    beta[j] = B(j + 1, j);
  }
  return ProjectedProblem(std::move(alpha), std::move(beta), beta1).solve(lambda);
}

ReconResult hybrid_tikhonov(const LinearOperator& A, const Observation& obs, const Eigen::VectorXd* x_true,
                            const SolverOptions& opts) {
  return projected_tikhonov(A, obs, nullptr, x_true, opts);
}

ReconResult gen_tikhonov(const LinearOperator& A, const Observation& obs, const SymmetricOperator& Q,
                         const Eigen::VectorXd* x_true, const SolverOptions& opts) {
  return projected_tikhonov(A, obs, &Q, x_true, opts);
}

}  // namespace lightray
